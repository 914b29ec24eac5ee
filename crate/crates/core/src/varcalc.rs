//! Variational calculus on the free bicomplex.
//!
//! Source forms are written `Σ_a f_a dv u^a ∧ ν` with `ν = dx^1 ∧ … ∧ dx^n`,
//! so that the coefficients of `first_variation(L).el` are exactly the
//! Euler–Lagrange expressions `E_a(L) = Σ_I (−D)_I ∂L/∂u^a_I`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forms::{sign, Basis, BiForm, Gen, Grading};
use crate::jetcore::{JetPoly, JetVar, MultiIndex, Signature};

/// `Σ_a f_a dv u^a ∧ ν`, one coefficient per dependent variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceForm {
    coeffs: Vec<JetPoly>,
}

impl SourceForm {
    pub fn new(coeffs: Vec<JetPoly>) -> Self {
        Self { coeffs }
    }

    pub fn zero(m: usize) -> Self {
        Self {
            coeffs: vec![JetPoly::zero(); m],
        }
    }

    pub fn coeffs(&self) -> &[JetPoly] {
        &self.coeffs
    }

    pub fn get(&self, a: usize) -> &JetPoly {
        &self.coeffs[a]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(JetPoly::is_zero)
    }

    pub fn to_biform(&self, sig: &Signature) -> BiForm {
        let n = sig.n();
        let s = sign(n % 2 == 1);
        let mut out = BiForm::zero();
        for (a, f) in self.coeffs.iter().enumerate() {
            out.add_term(source_basis(n, a), f.scale(&s));
        }
        out
    }

    /// Reads an `(n,1)` form whose contact generators are all `dv u^a`.
    pub fn from_biform(sig: &Signature, form: &BiForm) -> Result<Self> {
        let n = sig.n();
        form.expect_grading(Grading::new(n, 1))?;
        let s = sign(n % 2 == 1);
        let mut coeffs = vec![JetPoly::zero(); sig.m()];
        for (b, c) in form.terms() {
            let w = &b.v[0];
            if w.order() > 0 {
                return Err(Error::NotSourceForm(format!(
                    "contact generator dv {} is a derivative",
                    sig.jet_name(w)
                )));
            }
            coeffs[w.dep] += &c.scale(&s);
        }
        Ok(Self { coeffs })
    }
}

fn source_basis(n: usize, a: usize) -> Basis {
    Basis {
        h: (0..n).collect(),
        v: vec![JetVar::field(a)],
    }
}

/// `ν`, the horizontal volume form.
pub fn volume(sig: &Signature) -> BiForm {
    BiForm::volume(sig.n())
}

/// `ℒ · ν`.
pub fn lagrangian(sig: &Signature, density: JetPoly) -> BiForm {
    BiForm::term(
        Basis {
            h: (0..sig.n()).collect(),
            v: vec![],
        },
        density,
    )
}

/// The scalar density of an `(n,0)` form.
pub fn density(sig: &Signature, l: &BiForm) -> Result<JetPoly> {
    l.expect_grading(Grading::new(sig.n(), 0))?;
    Ok(l.coefficient(&Basis {
        h: (0..sig.n()).collect(),
        v: vec![],
    }))
}

/// `(n−1)` form `s·ι_{∂_i}ν` normalised so that `dx^i ∧ it = ν`.
fn contracted_volume(n: usize, i: usize) -> (bool, Vec<Gen>) {
    let rest: Vec<Gen> = (0..n).filter(|&j| j != i).map(Gen::H).collect();
    let mut word = vec![Gen::H(i)];
    word.extend(rest.iter().cloned());
    let (odd, _) = Basis::canonicalize(word).expect("distinct generators");
    (odd, rest)
}

/// Integration by parts: writes an `(n,1)` form as `s − dh σ`.
///
/// Terms with contact generators `dv u^a_{K+i}` are peeled one index at a
/// time, highest order first (ties broken by canonical order, the last index
/// of the multi-index is removed).
pub fn source_decompose(sig: &Signature, alpha: &BiForm) -> Result<(SourceForm, BiForm)> {
    let n = sig.n();
    if alpha.grading().is_none() && !alpha.is_zero() {
        return Err(Error::NotHomogeneous);
    }
    alpha.expect_grading(Grading::new(n, 1))?;
    let mut rest = alpha.clone();
    let mut sigma = BiForm::zero();
    loop {
        let mut pick: Option<(&Basis, &JetPoly)> = None;
        for (b, c) in rest.terms() {
            let ord = b.v[0].order();
            if ord > 0 && pick.is_none_or(|(p, _)| ord > p.v[0].order()) {
                pick = Some((b, c));
            }
        }
        let Some((basis, coeff)) = pick else { break };
        let w = basis.v[0].clone();
        let i = *w.idx.indices().last().expect("positive order");
        let lower = JetVar::new(
            w.dep,
            w.idx
                .minus(&MultiIndex::from_indices([i]))
                .expect("index present"),
        );
        let (odd, mut word) = contracted_volume(n, i);
        word.push(Gen::V(lower));
        let beta = BiForm::from_word(coeff.scale(&sign(odd)), word);
        let dbeta = beta.d_h(sig);
        debug_assert_eq!(dbeta.coefficient(basis), *coeff);
        rest -= &dbeta;
        sigma -= &beta;
    }
    Ok((SourceForm::from_biform(sig, &rest)?, sigma))
}

/// The pair `(EL, θ)` with `dv L = EL − dh θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstVariation {
    pub el: SourceForm,
    pub theta: BiForm,
}

pub fn first_variation(sig: &Signature, l: &BiForm) -> Result<FirstVariation> {
    l.expect_grading(Grading::new(sig.n(), 0))?;
    let dvl = l.d_v();
    let (el, theta) = source_decompose(sig, &dvl)?;
    let check = &el.to_biform(sig) - &theta.d_h(sig);
    if check != dvl {
        return Err(Error::Internal("first variation identity failed".into()));
    }
    Ok(FirstVariation { el, theta })
}

/// Euler operator computed directly from the density.
pub fn euler_operator(sig: &Signature, l: &BiForm) -> Result<SourceForm> {
    let dens = density(sig, l)?;
    let mut coeffs = vec![JetPoly::zero(); sig.m()];
    for w in dens.jet_vars() {
        let mut term = dens.partial_jet(&w).total_derivative_by(&w.idx);
        if w.order() % 2 == 1 {
            term = -term;
        }
        coeffs[w.dep] += &term;
    }
    Ok(SourceForm::new(coeffs))
}

/// `ω = dv θ`.
pub fn presymplectic_current(sig: &Signature, l: &BiForm) -> Result<BiForm> {
    Ok(first_variation(sig, l)?.theta.d_v())
}

/// Total differential operator `Σ_J c_J D_J`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<MultiIndex, JetPoly>,
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Multiplication by `c`.
    pub fn multiplication(c: JetPoly) -> Self {
        let mut op = Self::zero();
        op.add(MultiIndex::empty(), c);
        op
    }

    fn add(&mut self, j: MultiIndex, c: JetPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(j.clone()).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &JetPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, j: &MultiIndex) -> JetPoly {
        self.terms.get(j).cloned().unwrap_or_default()
    }

    /// `D_i ∘ self`, by the Leibniz rule.
    pub fn after_total(&self, i: usize) -> DiffOp {
        let mut out = DiffOp::zero();
        for (j, c) in &self.terms {
            out.add(j.clone(), c.total_derivative(i));
            out.add(j.with(i), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (j, c) in &other.terms {
            out.add(j.clone(), -c);
        }
        out
    }

    pub fn plus(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (j, c) in &other.terms {
            out.add(j.clone(), c.clone());
        }
        out
    }
}

/// Square matrix of total differential operators, indexed `[a][b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub entries: Vec<Vec<DiffOp>>,
}

impl OperatorMatrix {
    fn zero(m: usize) -> Self {
        Self {
            entries: vec![vec![DiffOp::zero(); m]; m],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(DiffOp::is_zero)
    }
}

/// Linearization `(D_f)_{ab} = Σ_I ∂f_a/∂u^b_I D_I`.
pub fn linearization(f: &SourceForm) -> OperatorMatrix {
    let m = f.coeffs.len();
    let mut out = OperatorMatrix::zero(m);
    for (a, fa) in f.coeffs.iter().enumerate() {
        for w in fa.jet_vars() {
            out.entries[a][w.dep].add(w.idx.clone(), fa.partial_jet(&w));
        }
    }
    out
}

/// Formal adjoint `(D_f†)_{ab} = Σ_I (−1)^{|I|} D_I ∘ (∂f_b/∂u^a_I ·)`.
pub fn linearization_adjoint(f: &SourceForm) -> OperatorMatrix {
    let m = f.coeffs.len();
    let mut out = OperatorMatrix::zero(m);
    for (b, fb) in f.coeffs.iter().enumerate() {
        for w in fb.jet_vars() {
            let mut c = fb.partial_jet(&w);
            if w.order() % 2 == 1 {
                c = -c;
            }
            let op = w
                .idx
                .indices()
                .iter()
                .fold(DiffOp::multiplication(c), |op, &i| op.after_total(i));
            let entry = &mut out.entries[w.dep][b];
            *entry = entry.plus(&op);
        }
    }
    out
}

/// `D_f − D_f†`, entrywise in normal form.
pub fn linearization_adjoint_gap(f: &SourceForm) -> OperatorMatrix {
    let lin = linearization(f);
    let adj = linearization_adjoint(f);
    let m = f.coeffs.len();
    let mut out = OperatorMatrix::zero(m);
    for a in 0..m {
        for b in 0..m {
            out.entries[a][b] = lin.entries[a][b].sub(&adj.entries[a][b]);
        }
    }
    out
}

/// First nonzero entry of the Helmholtz gap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelmholtzWitness {
    pub row: usize,
    pub col: usize,
    pub index: MultiIndex,
    pub coeff: JetPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Helmholtz {
    Pass,
    Fail(HelmholtzWitness),
}

impl Helmholtz {
    pub fn passed(&self) -> bool {
        matches!(self, Helmholtz::Pass)
    }
}

pub fn helmholtz_check(f: &SourceForm) -> Helmholtz {
    let gap = linearization_adjoint_gap(f);
    for (row, line) in gap.entries.iter().enumerate() {
        for (col, op) in line.iter().enumerate() {
            if let Some((j, c)) = op.terms().next() {
                return Helmholtz::Fail(HelmholtzWitness {
                    row,
                    col,
                    index: j.clone(),
                    coeff: c.clone(),
                });
            }
        }
    }
    Helmholtz::Pass
}

/// Homotopy Lagrangian `L = ∫_0^1 u^a f_a(t·u) dt · ν` of a variational source form.
pub fn vainberg_lagrangian(sig: &Signature, f: &SourceForm) -> Result<BiForm> {
    if !helmholtz_check(f).passed() {
        return Err(Error::HelmholtzViolated);
    }
    let mut dens = JetPoly::zero();
    for (a, fa) in f.coeffs.iter().enumerate() {
        dens += &(&JetPoly::jet(JetVar::field(a)) * &fa.scale_integrate(1));
    }
    let l = lagrangian(sig, dens);
    if euler_operator(sig, &l)? != *f {
        return Err(Error::Internal(
            "homotopy Lagrangian does not reproduce the source form".into(),
        ));
    }
    Ok(l)
}

/// True iff the Euler–Lagrange form vanishes identically.
pub fn is_null_lagrangian(sig: &Signature, delta: &BiForm) -> Result<bool> {
    Ok(first_variation(sig, delta)?.el.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcore::rat;

    const T: usize = 0;
    const X: usize = 1;

    fn sig1() -> Signature {
        Signature::new(["t"], ["u"]).unwrap()
    }

    fn sig2() -> Signature {
        Signature::new(["t", "x"], ["u"]).unwrap()
    }

    fn u(idx: &[usize]) -> JetPoly {
        JetPoly::u(0, idx)
    }

    fn wv(idx: &[usize]) -> JetVar {
        JetVar::new(0, MultiIndex::from_indices(idx.iter().copied()))
    }

    #[test]
    fn decompose_single_peel() {
        let s = sig1();
        let alpha = BiForm::dx(T)
            .mul_poly(&u(&[T]))
            .wedge(&BiForm::dv(wv(&[T])));
        let (src, sigma) = source_decompose(&s, &alpha).unwrap();
        // -u_tt on dx(t) ∧ dv(u), i.e. +u_tt on dv(u) ∧ dx(t)
        assert_eq!(src.get(0), &u(&[T, T]));
        assert_eq!(sigma, -BiForm::dv(wv(&[])).mul_poly(&u(&[T])));
        assert_eq!(&src.to_biform(&s) - &sigma.d_h(&s), alpha);
    }

    #[test]
    fn decompose_source_and_exact_inputs() {
        let s = sig1();
        let alpha = BiForm::dx(T)
            .mul_poly(&JetPoly::x(T))
            .wedge(&BiForm::dv(wv(&[])));
        let (src, sigma) = source_decompose(&s, &alpha).unwrap();
        assert!(sigma.is_zero());
        assert_eq!(src.to_biform(&s), alpha);

        let exact = BiForm::dv(wv(&[])).mul_poly(&u(&[])).d_h(&s);
        let (src, sigma) = source_decompose(&s, &exact).unwrap();
        assert!(src.is_zero());
        assert_eq!(-sigma.d_h(&s), exact);

        let mixed = &alpha + &BiForm::dv(wv(&[]));
        assert_eq!(source_decompose(&s, &mixed), Err(Error::NotHomogeneous));
    }

    #[test]
    fn wave_euler_lagrange() {
        let s = sig2();
        let l = lagrangian(&s, (&u(&[T]).pow(2) - &u(&[X]).pow(2)).scale(&rat(1, 2)));
        let fv = first_variation(&s, &l).unwrap();
        assert_eq!(fv.el.get(0), &-(&u(&[T, T]) - &u(&[X, X])));
        assert_eq!(euler_operator(&s, &l).unwrap(), fv.el);
    }

    #[test]
    fn boundary_terms_are_null() {
        let s = sig2();
        let b = BiForm::dx(X).mul_poly(&(&u(&[]) * &u(&[X])));
        let l = b.d_h(&s);
        assert!(is_null_lagrangian(&s, &l).unwrap());
        assert!(is_null_lagrangian(&s, &BiForm::zero()).unwrap());
    }

    #[test]
    fn current_ignores_boundary_terms() {
        let s = sig2();
        let l = lagrangian(&s, (&u(&[T]).pow(2) - &u(&[X]).pow(2)).scale(&rat(1, 2)));
        let b = BiForm::dx(T).mul_poly(&(&u(&[]).pow(2) * &u(&[T])));
        let l2 = &l + &b.d_h(&s);
        assert_eq!(
            presymplectic_current(&s, &l).unwrap(),
            presymplectic_current(&s, &l2).unwrap()
        );
        assert!(presymplectic_current(&s, &BiForm::zero())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn gap_examples() {
        let wave = SourceForm::new(vec![&u(&[T, T]) - &u(&[X, X])]);
        assert!(linearization_adjoint_gap(&wave).is_zero());
        let heat = SourceForm::new(vec![&u(&[T]) - &u(&[X, X])]);
        let gap = linearization_adjoint_gap(&heat);
        assert_eq!(
            gap.entries[0][0].coefficient(&MultiIndex::from_indices([T])),
            JetPoly::int(2)
        );
        assert_eq!(gap.entries[0][0].terms().count(), 1);
        assert!(linearization_adjoint_gap(&SourceForm::new(vec![u(&[])])).is_zero());
    }

    #[test]
    fn helmholtz_examples() {
        let heat = SourceForm::new(vec![&u(&[T]) - &u(&[X, X])]);
        match helmholtz_check(&heat) {
            Helmholtz::Fail(w) => {
                assert_eq!(w.index, MultiIndex::from_indices([T]));
                assert_eq!(w.coeff, JetPoly::int(2));
            }
            Helmholtz::Pass => panic!("heat equation is not variational"),
        }
        assert!(helmholtz_check(&SourceForm::new(vec![&u(&[T, T]) + &u(&[])])).passed());
        // nonlinear: E(u_t^2 u) is variational
        let s = sig1();
        let l = lagrangian(&s, &u(&[T]).pow(2) * &u(&[]));
        assert!(helmholtz_check(&euler_operator(&s, &l).unwrap()).passed());
    }

    #[test]
    fn vainberg_examples() {
        let s = sig1();
        let l = vainberg_lagrangian(&s, &SourceForm::new(vec![u(&[])])).unwrap();
        assert_eq!(density(&s, &l).unwrap(), u(&[]).pow(2).scale(&rat(1, 2)));

        let f = SourceForm::new(vec![&u(&[T, T]) + &u(&[])]);
        let l = vainberg_lagrangian(&s, &f).unwrap();
        let expect = (&(&u(&[]) * &u(&[T, T])) + &u(&[]).pow(2)).scale(&rat(1, 2));
        assert_eq!(density(&s, &l).unwrap(), expect);
        assert_eq!(euler_operator(&s, &l).unwrap(), f);

        let heat = SourceForm::new(vec![&u(&[T]) - &u(&[T, T])]);
        assert_eq!(
            vainberg_lagrangian(&s, &heat),
            Err(Error::HelmholtzViolated)
        );
    }

    #[test]
    fn wrong_grading_is_rejected() {
        let s = sig1();
        assert!(matches!(
            first_variation(&s, &BiForm::dv(wv(&[]))),
            Err(Error::WrongGrading { .. })
        ));
    }
}
