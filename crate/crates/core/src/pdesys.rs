//! Orthonomic PDE systems as rewrite systems on jet coordinates.
//!
//! A system is a list of rules `u^a_{I_B} → rhs_B`. A jet coordinate is
//! *principal* when it is a derivative of some lead and *parametric*
//! otherwise; the parametric coordinates together with `x` are the internal
//! coordinates of the prolonged equation manifold.
//!
//! Reduction replaces principal coordinates (in coefficients and in contact
//! generators) by their normal forms and records exactly what was removed.
//! With `f_{JB} = u^a_{I_B+J} − D_J rhs_B`, every [`ReductionCertificate`]
//! satisfies
//!
//! ```text
//! input = normal + Σ f_{JB} λ^{JB} + Σ dv f_{JB} ∧ μ^{JB}
//! ```
//!
//! identically in the free bicomplex.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::forms::{sign, Basis, BiForm, Gen};
use crate::jetcore::{JetPoly, JetVar, MultiIndex, Signature, Var};

/// One solved equation `lead → rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lead: JetVar,
    pub rhs: JetPoly,
}

impl Rule {
    pub fn new(lead: JetVar, rhs: JetPoly) -> Self {
        Self { lead, rhs }
    }
}

/// Identifies the prolonged equation `f_{JB} = D_J f_B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProlongKey {
    pub rule: usize,
    pub prolong: MultiIndex,
}

impl ProlongKey {
    pub fn new(rule: usize, prolong: MultiIndex) -> Self {
        Self { rule, prolong }
    }

    fn derive(&self, i: usize) -> Self {
        Self::new(self.rule, self.prolong.with(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthonomicSystem {
    n: usize,
    m: usize,
    rules: Vec<Rule>,
}

/// `input = normal + Σ f_K · cofactors[K]` for a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolyReduction {
    pub normal: JetPoly,
    pub cofactors: BTreeMap<ProlongKey, JetPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ReductionCertificate {
    pub normal: BiForm,
    pub lambda: BTreeMap<ProlongKey, BiForm>,
    pub mu: BTreeMap<ProlongKey, BiForm>,
}

impl ReductionCertificate {
    /// `normal + Σ f λ + Σ dv f ∧ μ`.
    pub fn reassemble(&self, sys: &OrthonomicSystem) -> BiForm {
        let mut out = self.normal.clone();
        for (k, l) in &self.lambda {
            out += &l.mul_poly(&sys.equation(k));
        }
        for (k, m) in &self.mu {
            out += &BiForm::scalar(sys.equation(k)).d_v().wedge(m);
        }
        out
    }
}

/// Outcome of the cross-derivative check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrability {
    Pass,
    Fail(IntegrabilityWitness),
}

impl Integrability {
    pub fn passed(&self) -> bool {
        matches!(self, Integrability::Pass)
    }
}

/// A common derivative of two leads whose two reductions disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrabilityWitness {
    pub jet: JetVar,
    pub rules: (usize, usize),
    pub via_first: JetPoly,
    pub via_second: JetPoly,
}

fn accumulate_poly(map: &mut BTreeMap<ProlongKey, JetPoly>, key: ProlongKey, c: JetPoly) {
    if c.is_zero() {
        return;
    }
    let e = map.entry(key.clone()).or_default();
    *e += &c;
    if e.is_zero() {
        map.remove(&key);
    }
}

fn accumulate_form(map: &mut BTreeMap<ProlongKey, BiForm>, key: ProlongKey, f: BiForm) {
    if f.is_zero() {
        return;
    }
    let e = map.entry(key.clone()).or_default();
    *e += &f;
    if e.is_zero() {
        map.remove(&key);
    }
}

impl OrthonomicSystem {
    /// Validates leads and right-hand sides.
    ///
    /// Cross-derivative consistency is not checked here; see
    /// [`OrthonomicSystem::check_integrability`].
    pub fn new(sig: &Signature, rules: Vec<Rule>) -> Result<Self> {
        for (b, r) in rules.iter().enumerate() {
            if r.lead.dep >= sig.m() {
                return Err(Error::InvalidSystem(format!(
                    "rule {b}: unknown dependent variable"
                )));
            }
            if r.lead.idx.indices().iter().any(|&i| i >= sig.n()) {
                return Err(Error::InvalidSystem(format!(
                    "rule {b}: unknown independent variable"
                )));
            }
            for (c, s) in rules.iter().enumerate() {
                if b != c && s.lead.dep == r.lead.dep && r.lead.idx.contains(&s.lead.idx) {
                    return Err(Error::InvalidSystem(format!(
                        "lead {} is a derivative of lead {}",
                        sig.jet_name(&r.lead),
                        sig.jet_name(&s.lead)
                    )));
                }
            }
        }
        let sys = Self {
            n: sig.n(),
            m: sig.m(),
            rules,
        };
        for r in &sys.rules {
            for v in r.rhs.vars() {
                match &v {
                    Var::Jet(w) if sys.is_principal(w) => {
                        return Err(Error::InvalidSystem(format!(
                            "right-hand side of {} contains principal jet {}",
                            sig.jet_name(&r.lead),
                            sig.jet_name(w)
                        )));
                    }
                    Var::Jet(w) if w.dep >= sig.m() => {
                        return Err(Error::InvalidSystem(
                            "unknown dependent variable in rhs".into(),
                        ));
                    }
                    Var::Indep(i) if *i >= sig.n() => {
                        return Err(Error::InvalidSystem(
                            "unknown independent variable in rhs".into(),
                        ));
                    }
                    _ => {}
                }
            }
        }
        Ok(sys)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.rules.iter().map(|r| r.lead.order()).max().unwrap_or(0)
    }

    /// The rule and prolongation producing `w`, if `w` is principal.
    pub fn classify(&self, w: &JetVar) -> Option<ProlongKey> {
        self.rules.iter().enumerate().find_map(|(b, r)| {
            if r.lead.dep != w.dep {
                return None;
            }
            w.idx.minus(&r.lead.idx).map(|j| ProlongKey::new(b, j))
        })
    }

    pub fn is_principal(&self, w: &JetVar) -> bool {
        self.classify(w).is_some()
    }

    /// Parametric coordinates of order at most `k`.
    pub fn parametric_jets(&self, k: usize) -> Vec<JetVar> {
        (0..self.m)
            .flat_map(|a| {
                MultiIndex::all_up_to_order(self.n, k)
                    .into_iter()
                    .map(move |i| JetVar::new(a, i))
            })
            .filter(|w| !self.is_principal(w))
            .collect()
    }

    /// `f_{JB} = u_{I_B+J} − D_J rhs_B`.
    pub fn equation(&self, key: &ProlongKey) -> JetPoly {
        let r = &self.rules[key.rule];
        &JetPoly::jet(r.lead.derive_by(&key.prolong)) - &r.rhs.total_derivative_by(&key.prolong)
    }

    pub fn reducer(&self) -> Reducer<'_> {
        Reducer::new(self)
    }

    pub fn reduce(&self, a: &BiForm) -> Result<ReductionCertificate> {
        self.reducer().reduce(a)
    }

    pub fn reduce_poly(&self, p: &JetPoly) -> Result<PolyReduction> {
        self.reducer().reduce_poly(p)
    }

    /// Fails with the offending coordinate if `a` contains a principal jet.
    pub fn expect_internal(&self, sig: &Signature, a: &BiForm) -> Result<()> {
        match a.jet_vars().into_iter().find(|w| self.is_principal(w)) {
            Some(w) => Err(Error::NotInternal(sig.jet_name(&w))),
            None => Ok(()),
        }
    }

    /// Compares the two reductions of every common derivative of two leads
    /// that lies within `depth` extra indices of both leads.
    pub fn check_integrability(&self, depth: usize) -> Result<Integrability> {
        let red = self.reducer();
        for b in 0..self.rules.len() {
            for c in b + 1..self.rules.len() {
                let (rb, rc) = (&self.rules[b], &self.rules[c]);
                if rb.lead.dep != rc.lead.dep {
                    continue;
                }
                let lcm = rb.lead.idx.lcm(&rc.lead.idx);
                let extra = (lcm.order() - rb.lead.order()).max(lcm.order() - rc.lead.order());
                if extra > depth {
                    continue;
                }
                for k in MultiIndex::all_up_to_order(self.n, depth - extra) {
                    let w = JetVar::new(rb.lead.dep, lcm.union(&k));
                    let jb = w.idx.minus(&rb.lead.idx).expect("common derivative");
                    let jc = w.idx.minus(&rc.lead.idx).expect("common derivative");
                    let via_b = red.reduce_poly(&rb.rhs.total_derivative_by(&jb))?.normal;
                    let via_c = red.reduce_poly(&rc.rhs.total_derivative_by(&jc))?.normal;
                    if via_b != via_c {
                        return Ok(Integrability::Fail(IntegrabilityWitness {
                            jet: w,
                            rules: (b, c),
                            via_first: via_b,
                            via_second: via_c,
                        }));
                    }
                }
            }
        }
        Ok(Integrability::Pass)
    }
}

/// Memoizing reduction engine for one system.
pub struct Reducer<'s> {
    sys: &'s OrthonomicSystem,
    memo: RefCell<HashMap<JetVar, Rc<PolyReduction>>>,
    active: RefCell<HashSet<JetVar>>,
}

impl<'s> Reducer<'s> {
    pub fn new(sys: &'s OrthonomicSystem) -> Self {
        Self {
            sys,
            memo: RefCell::default(),
            active: RefCell::default(),
        }
    }

    pub fn system(&self) -> &'s OrthonomicSystem {
        self.sys
    }

    /// Normal form of a principal coordinate, `u_w = normal + Σ f_K c_K`.
    pub fn normal_jet(&self, w: &JetVar) -> Result<Rc<PolyReduction>> {
        if let Some(r) = self.memo.borrow().get(w) {
            return Ok(Rc::clone(r));
        }
        let key = self
            .sys
            .classify(w)
            .ok_or_else(|| Error::Internal("normal_jet called on a parametric jet".into()))?;
        if !self.active.borrow_mut().insert(w.clone()) {
            return Err(Error::NonTerminatingReduction(format!(
                "u{}{:?}",
                w.dep,
                w.idx.indices()
            )));
        }
        let result = self.normal_jet_uncached(w, key);
        self.active.borrow_mut().remove(w);
        let result = Rc::new(result?);
        self.memo.borrow_mut().insert(w.clone(), Rc::clone(&result));
        Ok(result)
    }

    fn normal_jet_uncached(&self, w: &JetVar, key: ProlongKey) -> Result<PolyReduction> {
        if key.prolong.is_empty() {
            let rhs = self.sys.rules[key.rule].rhs.clone();
            return Ok(PolyReduction {
                normal: rhs,
                cofactors: BTreeMap::from([(key, JetPoly::one())]),
            });
        }
        let j = *key.prolong.indices().last().expect("nonempty prolongation");
        let lower = JetVar::new(
            w.dep,
            w.idx
                .minus(&MultiIndex::from_indices([j]))
                .expect("index present"),
        );
        let below = self.normal_jet(&lower)?;
        // u_w = D_j u_lower = D_j n + Σ (f_{K+j} c + f_K D_j c)
        let red = self.reduce_poly(&below.normal.total_derivative(j))?;
        let mut cofactors = red.cofactors;
        for (k, c) in &below.cofactors {
            accumulate_poly(&mut cofactors, k.derive(j), c.clone());
            accumulate_poly(&mut cofactors, k.clone(), c.total_derivative(j));
        }
        Ok(PolyReduction {
            normal: red.normal,
            cofactors,
        })
    }

    pub fn reduce_poly(&self, p: &JetPoly) -> Result<PolyReduction> {
        let principal: Vec<JetVar> = p
            .jet_vars()
            .into_iter()
            .rev()
            .filter(|w| self.sys.is_principal(w))
            .collect();
        let mut cur = p.clone();
        let mut cofactors = BTreeMap::new();
        for w in principal {
            let r = self.normal_jet(&w)?;
            let (sub, quot) = cur.divide_out_substitution(&Var::Jet(w), &r.normal);
            if !quot.is_zero() {
                for (k, c) in &r.cofactors {
                    accumulate_poly(&mut cofactors, k.clone(), c * &quot);
                }
            }
            cur = sub;
        }
        Ok(PolyReduction {
            normal: cur,
            cofactors,
        })
    }

    pub fn reduce(&self, a: &BiForm) -> Result<ReductionCertificate> {
        let mut cert = ReductionCertificate::default();
        let mut queue: Vec<(Basis, JetPoly)> = Vec::new();
        for (b, c) in a.terms() {
            let red = self.reduce_poly(c)?;
            for (k, cf) in red.cofactors {
                accumulate_form(&mut cert.lambda, k, BiForm::term(b.clone(), cf));
            }
            queue.push((b.clone(), red.normal));
        }
        while let Some((basis, coeff)) = queue.pop() {
            if coeff.is_zero() {
                continue;
            }
            let Some(k) = basis.v.iter().position(|w| self.sys.is_principal(w)) else {
                cert.normal.add_term(basis, coeff);
                continue;
            };
            let w = &basis.v[k];
            let r = self.normal_jet(w)?;
            let gens = basis.gens();
            let pos = basis.h.len() + k;
            let replaced = |g: Gen| {
                let mut word = gens.clone();
                word[pos] = g;
                word
            };
            // dv u_w = dv n_w + Σ (dv f_K · c_K + f_K · dv c_K)
            for p in r.normal.jet_vars() {
                let piece =
                    BiForm::from_word(&coeff * &r.normal.partial_jet(&p), replaced(Gen::V(p)));
                queue.extend(piece.terms().map(|(b, c)| (b.clone(), c.clone())));
            }
            let mut without = gens.clone();
            without.remove(pos);
            for (key, cf) in &r.cofactors {
                let mu =
                    BiForm::from_word((&coeff * cf).scale(&sign(pos % 2 == 1)), without.clone());
                accumulate_form(&mut cert.mu, key.clone(), mu);
                for q in cf.jet_vars() {
                    let lam = BiForm::from_word(&coeff * &cf.partial_jet(&q), replaced(Gen::V(q)));
                    accumulate_form(&mut cert.lambda, key.clone(), lam);
                }
            }
        }
        Ok(cert)
    }
}

/// `dh^E` on a form in internal coordinates.
pub fn onshell_dh(sig: &Signature, sys: &OrthonomicSystem, a: &BiForm) -> Result<BiForm> {
    sys.expect_internal(sig, a)?;
    Ok(sys.reduce(&a.d_h(sig))?.normal)
}

/// Same as [`onshell_dh`] with a shared reducer.
pub fn onshell_dh_with(sig: &Signature, red: &Reducer<'_>, a: &BiForm) -> Result<BiForm> {
    red.system().expect_internal(sig, a)?;
    Ok(red.reduce(&a.d_h(sig))?.normal)
}

/// `dv^E`; internal coordinates are free, so this is `dv` itself.
pub fn onshell_dv(sig: &Signature, sys: &OrthonomicSystem, a: &BiForm) -> Result<BiForm> {
    sys.expect_internal(sig, a)?;
    Ok(a.d_v())
}
