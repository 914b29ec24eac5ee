//! Jet coordinates and exact polynomial arithmetic over them.
//!
//! A [`JetPoly`] is a polynomial with rational coefficients in the
//! independent variables `x^i` and the jet coordinates `u^a_I`. Multi-indices
//! are multisets, so `u_tx` and `u_xt` are the same coordinate.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Shorthand for building a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Names of the base (independent) and fibre (dependent) coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    indep: Vec<String>,
    dep: Vec<String>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        indep: impl IntoIterator<Item = S>,
        dep: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let indep: Vec<String> = indep.into_iter().map(Into::into).collect();
        let dep: Vec<String> = dep.into_iter().map(Into::into).collect();
        if indep.is_empty() || dep.is_empty() {
            return Err(Error::InvalidSignature(
                "need at least one independent and one dependent variable".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for name in indep.iter().chain(dep.iter()) {
            if name.is_empty() {
                return Err(Error::InvalidSignature("empty variable name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSignature(format!("duplicate name `{name}`")));
            }
        }
        Ok(Self { indep, dep })
    }

    /// Dimension of the base.
    pub fn n(&self) -> usize {
        self.indep.len()
    }

    /// Number of dependent variables.
    pub fn m(&self) -> usize {
        self.dep.len()
    }

    pub fn indep_names(&self) -> &[String] {
        &self.indep
    }

    pub fn dep_names(&self) -> &[String] {
        &self.dep
    }

    pub fn indep_index(&self, name: &str) -> Option<usize> {
        self.indep.iter().position(|s| s == name)
    }

    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.dep.iter().position(|s| s == name)
    }

    /// Resolves `x`, `u`, `u_tx` or `u_t,x` style names.
    ///
    /// The compact form `u_tx` is only understood when every independent
    /// variable name is a single character.
    pub fn resolve(&self, name: &str) -> Result<Var> {
        if let Some(i) = self.indep_index(name) {
            return Ok(Var::Indep(i));
        }
        if let Some(a) = self.dep_index(name) {
            return Ok(Var::Jet(JetVar::new(a, MultiIndex::empty())));
        }
        let unknown = || Error::UnknownVariable(name.to_string());
        let (head, tail) = name.split_once('_').ok_or_else(unknown)?;
        let dep = self.dep_index(head).ok_or_else(unknown)?;
        let mut idx = Vec::new();
        if tail.contains(',') {
            for part in tail.split(',') {
                idx.push(self.indep_index(part.trim()).ok_or_else(unknown)?);
            }
        } else {
            if !self.indep.iter().all(|s| s.chars().count() == 1) {
                return Err(unknown());
            }
            for ch in tail.chars() {
                let mut buf = [0u8; 4];
                idx.push(
                    self.indep_index(ch.encode_utf8(&mut buf))
                        .ok_or_else(unknown)?,
                );
            }
        }
        if idx.is_empty() {
            return Err(unknown());
        }
        Ok(Var::Jet(JetVar::new(dep, MultiIndex::from_indices(idx))))
    }

    /// `u_tx`-style display name of a jet variable.
    pub fn jet_name(&self, w: &JetVar) -> String {
        let mut s = self.dep[w.dep].clone();
        if w.idx.order() > 0 {
            s.push('_');
            let compact = self.indep.iter().all(|s| s.chars().count() == 1);
            let parts: Vec<&str> = w
                .idx
                .indices()
                .iter()
                .map(|&i| self.indep[i].as_str())
                .collect();
            s.push_str(&parts.join(if compact { "" } else { "," }));
        }
        s
    }

    pub fn var_name(&self, v: &Var) -> String {
        match v {
            Var::Indep(i) => self.indep[*i].clone(),
            Var::Jet(w) => self.jet_name(w),
        }
    }

    /// Formal partial derivative by variable name.
    pub fn partial_by_name(&self, p: &JetPoly, name: &str) -> Result<JetPoly> {
        let v = self.resolve(name)?;
        Ok(p.partial(&v))
    }
}

/// Symmetric multi-index, stored as a sorted list of base indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        Self(v)
    }

    /// Builds a multi-index from per-direction multiplicities.
    pub fn from_counts(counts: &[usize]) -> Self {
        Self(
            counts
                .iter()
                .enumerate()
                .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted list of indices, repeated by multiplicity.
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn count(&self, i: usize) -> usize {
        self.0.iter().filter(|&&j| j == i).count()
    }

    /// Multiplicities indexed by direction, padded to `n`.
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for &i in &self.0 {
            c[i] += 1;
        }
        c
    }

    pub fn with(&self, i: usize) -> Self {
        let pos = self.0.partition_point(|&j| j <= i);
        let mut v = self.0.clone();
        v.insert(pos, i);
        Self(v)
    }

    pub fn union(&self, other: &MultiIndex) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Self(v)
    }

    /// Multiset containment: every index of `other` occurs here at least as often.
    pub fn contains(&self, other: &MultiIndex) -> bool {
        self.minus(other).is_some()
    }

    /// Multiset difference `self - other`, if `other` is contained in `self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut it = other.0.iter().peekable();
        for &i in &self.0 {
            match it.peek() {
                Some(&&j) if j == i => {
                    it.next();
                }
                Some(&&j) if j < i => return None,
                _ => rest.push(i),
            }
        }
        if it.next().is_some() {
            return None;
        }
        Some(Self(rest))
    }

    /// Componentwise maximum of multiplicities.
    pub fn lcm(&self, other: &MultiIndex) -> MultiIndex {
        let n = self
            .0
            .iter()
            .chain(other.0.iter())
            .max()
            .map_or(0, |m| m + 1);
        let a = self.counts(n);
        let b = other.counts(n);
        let c: Vec<usize> = a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect();
        Self::from_counts(&c)
    }

    /// All multi-indices over `n` directions with order exactly `k`.
    pub fn all_of_order(n: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if k == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, i, k - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, 0, k, &mut Vec::new(), &mut out);
        out
    }

    /// All multi-indices over `n` directions with order at most `k`.
    pub fn all_up_to_order(n: usize, k: usize) -> Vec<MultiIndex> {
        (0..=k).flat_map(|j| Self::all_of_order(n, j)).collect()
    }
}

// Graded lexicographic: lower order first.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A jet coordinate `u^a_I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub dep: usize,
    pub idx: MultiIndex,
}

impl JetVar {
    pub fn new(dep: usize, idx: MultiIndex) -> Self {
        Self { dep, idx }
    }

    /// The undifferentiated field `u^a`.
    pub fn field(dep: usize) -> Self {
        Self::new(dep, MultiIndex::empty())
    }

    pub fn order(&self) -> usize {
        self.idx.order()
    }

    /// `u^a_{I+i}`.
    pub fn derive(&self, i: usize) -> Self {
        Self::new(self.dep, self.idx.with(i))
    }

    pub fn derive_by(&self, j: &MultiIndex) -> Self {
        Self::new(self.dep, self.idx.union(j))
    }
}

/// Any coordinate on the jet bundle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Indep(usize),
    Jet(JetVar),
}

/// Product of variable powers; factors sorted by variable, powers positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn power_of(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map_or(0, |k| self.0[k].1)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree in jet coordinates (independent variables excluded).
    pub fn jet_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| matches!(v, Var::Jet(_)))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, p)| p).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes one power of `v`, returning the previous power.
    fn lower(&self, v: &Var) -> Option<(u32, Monomial)> {
        let k = self.0.binary_search_by(|(w, _)| w.cmp(v)).ok()?;
        let p = self.0[k].1;
        let mut f = self.0.clone();
        if p == 1 {
            f.remove(k);
        } else {
            f[k].1 -= 1;
        }
        Some((p, Monomial(f)))
    }

    fn without(&self, v: &Var) -> (u32, Monomial) {
        match self.0.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(k) => {
                let mut f = self.0.clone();
                let (_, p) = f.remove(k);
                (p, Monomial(f))
            }
            Err(_) => (0, self.clone()),
        }
    }
}

/// Canonical polynomial in independent variables and jet coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct JetPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl JetPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    /// Independent variable `x^i`.
    pub fn x(i: usize) -> Self {
        Self::var(Var::Indep(i))
    }

    pub fn jet(w: JetVar) -> Self {
        Self::var(Var::Jet(w))
    }

    /// `u^a_I` from a dependent index and a list of base indices.
    pub fn u(dep: usize, idx: &[usize]) -> Self {
        Self::jet(JetVar::new(
            dep,
            MultiIndex::from_indices(idx.iter().copied()),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Returns the rational value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_assign_ref(&mut self, other: &JetPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &Monomial) -> JetPoly {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> JetPoly {
        let mut out = JetPoly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative by any coordinate.
    pub fn partial(&self, v: &Var) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            if let Some((p, rest)) = m.lower(v) {
                out.add_term(rest, c * Rational::from_integer(BigInt::from(p)));
            }
        }
        out
    }

    pub fn partial_jet(&self, w: &JetVar) -> JetPoly {
        self.partial(&Var::Jet(w.clone()))
    }

    /// Total derivative `D_i = ∂_i + Σ u^a_{I+i} ∂/∂u^a_I`.
    pub fn total_derivative(&self, i: usize) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            for (v, p) in m.factors() {
                let (_, rest) = m.lower(v).expect("factor present");
                let coef = c * Rational::from_integer(BigInt::from(*p));
                match v {
                    Var::Indep(j) if *j == i => out.add_term(rest, coef),
                    Var::Indep(_) => {}
                    Var::Jet(w) => {
                        out.add_term(rest.mul(&Monomial::var(Var::Jet(w.derive(i)))), coef)
                    }
                }
            }
        }
        out
    }

    /// `D_J` for a multi-index.
    pub fn total_derivative_by(&self, j: &MultiIndex) -> JetPoly {
        j.indices()
            .iter()
            .fold(self.clone(), |p, &i| p.total_derivative(i))
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, rules: &BTreeMap<Var, JetPoly>) -> JetPoly {
        if rules.is_empty() {
            return self.clone();
        }
        let mut out = JetPoly::zero();
        let mut powers: BTreeMap<(Var, u32), JetPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut acc = JetPoly::constant(c.clone());
            for (v, p) in m.factors() {
                match rules.get(v) {
                    Some(r) => {
                        let rp = powers.entry((v.clone(), *p)).or_insert_with(|| r.pow(*p));
                        acc = &acc * &*rp;
                    }
                    None => kept = kept.mul(&Monomial(vec![(v.clone(), *p)])),
                }
            }
            if acc.is_zero() {
                continue;
            }
            for (n, k) in acc.terms {
                out.add_term(n.mul(&kept), k);
            }
        }
        out
    }

    /// Substitution keyed by jet variables only.
    pub fn substitute_jets(&self, rules: &BTreeMap<JetVar, JetPoly>) -> JetPoly {
        let rules: BTreeMap<Var, JetPoly> = rules
            .iter()
            .map(|(w, p)| (Var::Jet(w.clone()), p.clone()))
            .collect();
        self.substitute(&rules)
    }

    /// Evaluates `(j^∞φ)^* p` for a polynomial section `φ` given per dependent variable.
    pub fn pullback_section(&self, section: &[JetPoly]) -> Result<JetPoly> {
        for phi in section {
            if let Some(w) = phi.jet_vars().into_iter().next() {
                return Err(Error::InvalidSection(format!(
                    "section component depends on jet coordinate (dep {}, order {})",
                    w.dep,
                    w.order()
                )));
            }
        }
        let mut rules = BTreeMap::new();
        for w in self.jet_vars() {
            let phi = section.get(w.dep).ok_or_else(|| {
                Error::InvalidSection(format!("no component for dependent variable {}", w.dep))
            })?;
            let value = w
                .idx
                .indices()
                .iter()
                .fold(phi.clone(), |q, &i| q.partial(&Var::Indep(i)));
            rules.insert(Var::Jet(w), value);
        }
        Ok(self.substitute(&rules))
    }

    /// All jet coordinates that occur.
    pub fn jet_vars(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter())
            .filter_map(|(v, _)| match v {
                Var::Jet(w) => Some(w.clone()),
                Var::Indep(_) => None,
            })
            .collect()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    /// Highest `|I|` over occurring jet coordinates; zero when none occur.
    pub fn jet_order(&self) -> usize {
        self.jet_vars().iter().map(JetVar::order).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Sets every jet coordinate to zero.
    pub fn at_zero_jets(&self) -> JetPoly {
        JetPoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.jet_degree() == 0)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Divides each monomial by `offset + jet_degree`; the exact value of
    /// `∫_0^1 t^{offset-1} p(x, t·u) dt`.
    pub fn scale_integrate(&self, offset: u32) -> JetPoly {
        JetPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let d = offset + m.jet_degree();
            assert!(d > 0, "scale integration with zero weight");
            (m.clone(), c / Rational::from_integer(BigInt::from(d)))
        }))
    }

    /// Splits `p = q(w → r) + (w − r)·Q`, returning `(q(w → r), Q)`.
    pub fn divide_out_substitution(&self, w: &Var, r: &JetPoly) -> (JetPoly, JetPoly) {
        let mut subst = JetPoly::zero();
        let mut quot = JetPoly::zero();
        let wp = JetPoly::var(w.clone());
        let mut rpow: Vec<JetPoly> = vec![JetPoly::one()];
        for (m, c) in &self.terms {
            let (k, rest) = m.without(w);
            if k == 0 {
                subst.add_term(rest, c.clone());
                continue;
            }
            while rpow.len() <= k as usize {
                let next = &rpow[rpow.len() - 1] * r;
                rpow.push(next);
            }
            subst.add_assign_ref(&rpow[k as usize].mul_monomial(c, &rest));
            // (w^k - r^k)/(w - r) = sum_j w^j r^{k-1-j}
            for j in 0..k {
                let piece = &wp.pow(j) * &rpow[(k - 1 - j) as usize];
                quot.add_assign_ref(&piece.mul_monomial(c, &rest));
            }
        }
        (subst, quot)
    }

    pub fn is_negative_leading(&self) -> bool {
        self.terms.values().next().is_some_and(|c| c.is_negative())
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, p) in m.factors() {
                match v {
                    Var::Indep(i) => write!(f, "*x{i}")?,
                    Var::Jet(w) => write!(f, "*u{}{:?}", w.dep, w.idx.indices())?,
                }
                if *p > 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl std::ops::$tr<JetPoly> for JetPoly {
            type Output = JetPoly;
            fn $method(self, rhs: JetPoly) -> JetPoly {
                std::ops::$tr::$method(&self, &rhs)
            }
        }
        impl std::ops::$tr<&JetPoly> for JetPoly {
            type Output = JetPoly;
            fn $method(self, rhs: &JetPoly) -> JetPoly {
                std::ops::$tr::$method(&self, rhs)
            }
        }
    };
}

impl std::ops::Add<&JetPoly> for &JetPoly {
    type Output = JetPoly;
    fn add(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl std::ops::Sub<&JetPoly> for &JetPoly {
    type Output = JetPoly;
    fn sub(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl std::ops::Mul<&JetPoly> for &JetPoly {
    type Output = JetPoly;
    fn mul(self, rhs: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            for (n, k) in &rhs.terms {
                out.add_term(m.mul(n), c * k);
            }
        }
        out
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Neg for &JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        JetPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Neg for JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        -&self
    }
}

impl std::ops::AddAssign<&JetPoly> for JetPoly {
    fn add_assign(&mut self, rhs: &JetPoly) {
        self.add_assign_ref(rhs);
    }
}

impl std::ops::SubAssign<&JetPoly> for JetPoly {
    fn sub_assign(&mut self, rhs: &JetPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (t, x) and u
    fn sig() -> Signature {
        Signature::new(["t", "x"], ["u"]).unwrap()
    }

    fn u(idx: &[usize]) -> JetPoly {
        JetPoly::u(0, idx)
    }

    const T: usize = 0;
    const X: usize = 1;

    #[test]
    fn partial_derivatives() {
        let s = sig();
        let ut = u(&[T]);
        assert_eq!(
            s.partial_by_name(&ut.pow(2), "u_t").unwrap(),
            ut.scale(&rat(2, 1))
        );
        let p = &u(&[]) * &u(&[T, T]);
        assert_eq!(s.partial_by_name(&p, "u").unwrap(), u(&[T, T]));
        let q = &JetPoly::x(X).pow(2) * &u(&[X]);
        assert_eq!(
            s.partial_by_name(&q, "x").unwrap(),
            (&JetPoly::x(X) * &u(&[X])).scale(&rat(2, 1))
        );
        assert!(matches!(
            s.partial_by_name(&q, "w"),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(u(&[]).total_derivative(T), u(&[T]));
        let p = &u(&[]) * &u(&[T]);
        assert_eq!(
            p.total_derivative(T),
            &u(&[T]).pow(2) + &(&u(&[]) * &u(&[T, T]))
        );
        let q = &JetPoly::x(X) * &u(&[T]);
        assert_eq!(
            q.total_derivative(X),
            &u(&[T]) + &(&JetPoly::x(X) * &u(&[T, X]))
        );
    }

    #[test]
    fn substitution_examples() {
        let utt = JetVar::new(0, MultiIndex::from_indices([T, T]));
        let wave = &u(&[T, T]) - &u(&[X, X]);
        let rules = BTreeMap::from([(utt.clone(), u(&[X, X]))]);
        assert!(wave.substitute_jets(&rules).is_zero());
        let rules = BTreeMap::from([(utt, -u(&[]))]);
        let p = &u(&[]) * &u(&[T, T]);
        assert_eq!(p.substitute_jets(&rules), -u(&[]).pow(2));
        assert_eq!(p.substitute_jets(&BTreeMap::new()), p);
    }

    #[test]
    fn pullback_examples() {
        let t2 = JetPoly::x(T).pow(2);
        assert_eq!(
            u(&[T]).pullback_section(std::slice::from_ref(&t2)).unwrap(),
            JetPoly::x(T).scale(&rat(2, 1))
        );
        let wave = &u(&[T, T]) - &u(&[X, X]);
        let phi = &t2 + &JetPoly::x(X).pow(2);
        assert!(wave.pullback_section(&[phi]).unwrap().is_zero());
        let p = &u(&[]) * &u(&[X]);
        assert_eq!(p.pullback_section(&[JetPoly::x(X)]).unwrap(), JetPoly::x(X));
        assert!(p.pullback_section(&[u(&[])]).is_err());
    }

    #[test]
    fn jet_order_examples() {
        assert_eq!(u(&[T, X, X]).jet_order(), 3);
        assert_eq!(JetPoly::int(5).jet_order(), 0);
        assert_eq!((&u(&[]) + &u(&[T, T])).jet_order(), 2);
    }

    #[test]
    fn multi_index_algebra() {
        let a = MultiIndex::from_indices([1, 0, 1]);
        assert_eq!(a.indices(), &[0, 1, 1]);
        assert_eq!(a.count(1), 2);
        let b = MultiIndex::from_indices([1]);
        assert_eq!(a.minus(&b), Some(MultiIndex::from_indices([0, 1])));
        assert_eq!(b.minus(&a), None);
        assert!(!MultiIndex::from_indices([0, 0]).contains(&MultiIndex::from_indices([1])));
        assert_eq!(
            MultiIndex::from_indices([0, 0]).lcm(&MultiIndex::from_indices([0, 1])),
            MultiIndex::from_indices([0, 0, 1])
        );
        assert_eq!(MultiIndex::all_of_order(2, 2).len(), 3);
        assert!(MultiIndex::from_indices([1]) < MultiIndex::from_indices([0, 0]));
    }

    #[test]
    fn resolve_names() {
        let s = sig();
        assert_eq!(
            s.resolve("u_tx").unwrap(),
            Var::Jet(JetVar::new(0, MultiIndex::from_indices([0, 1])))
        );
        assert_eq!(s.resolve("u_x,t").unwrap(), s.resolve("u_tx").unwrap());
        assert_eq!(
            s.jet_name(&JetVar::new(0, MultiIndex::from_indices([1, 0, 0]))),
            "u_ttx"
        );
        assert!(Signature::new(["t"], ["t"]).is_err());
    }

    #[test]
    fn divide_out_is_exact() {
        let w = Var::Jet(JetVar::new(0, MultiIndex::from_indices([T, T])));
        let r = &u(&[X, X]) + &JetPoly::int(3);
        let p = &(&u(&[T, T]).pow(3) * &u(&[])) + &u(&[T, T]).scale(&rat(1, 2));
        let (q, quot) = p.divide_out_substitution(&w, &r);
        let f = &JetPoly::var(w) - &r;
        assert_eq!(&q + &(&f * &quot), p);
        assert!(!q
            .vars()
            .contains(&Var::Jet(JetVar::new(0, MultiIndex::from_indices([T, T])))));
    }
}
