//! Bi-graded differential forms on the infinite jet bundle.
//!
//! A [`BiForm`] is a finite sum of terms `P · dx^H ∧ dv u_{w_1} ∧ … ∧ dv u_{w_v}`
//! with `P` a [`JetPoly`]. Generators are kept in canonical order (all
//! horizontal generators first, each block sorted), and reordering is
//! tracked with signs.
//!
//! Conventions: `dh(dv u^a_I) = Σ_i dx^i ∧ dv u^a_{I+i}`, and both
//! differentials are graded derivations of total degree one, so `dv`
//! anticommutes with `dx^i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::One;

use crate::error::{Error, Result};
use crate::jetcore::{JetPoly, JetVar, Rational, Signature};

/// Horizontal and vertical degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grading {
    pub h: usize,
    pub v: usize,
}

impl Grading {
    pub const fn new(h: usize, v: usize) -> Self {
        Self { h, v }
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.h, self.v)
    }
}

/// A single exterior generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    /// `dx^i`
    H(usize),
    /// `dv u^a_I`
    V(JetVar),
}

/// Canonically ordered wedge of generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Basis {
    pub h: Vec<usize>,
    pub v: Vec<JetVar>,
}

impl Basis {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn grading(&self) -> Grading {
        Grading::new(self.h.len(), self.v.len())
    }

    pub fn gens(&self) -> Vec<Gen> {
        self.h
            .iter()
            .map(|&i| Gen::H(i))
            .chain(self.v.iter().cloned().map(Gen::V))
            .collect()
    }

    /// Sorts a generator word into canonical order.
    ///
    /// Returns `None` when a generator repeats, otherwise the sign of the
    /// permutation (`true` for odd) and the canonical basis.
    pub fn canonicalize(mut gens: Vec<Gen>) -> Option<(bool, Basis)> {
        let mut odd = false;
        for i in 1..gens.len() {
            let mut j = i;
            while j > 0 && gens[j - 1] >= gens[j] {
                if gens[j - 1] == gens[j] {
                    return None;
                }
                gens.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        let mut basis = Basis::one();
        for g in gens {
            match g {
                Gen::H(i) => basis.h.push(i),
                Gen::V(w) => basis.v.push(w),
            }
        }
        Some((odd, basis))
    }
}

/// Element of the variational bicomplex, possibly of mixed grading.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BiForm {
    terms: BTreeMap<Basis, JetPoly>,
}

impl BiForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(basis: Basis, coeff: JetPoly) -> Self {
        let mut f = Self::zero();
        f.add_term(basis, coeff);
        f
    }

    /// A `(0,0)` form.
    pub fn scalar(p: JetPoly) -> Self {
        Self::term(Basis::one(), p)
    }

    pub fn dx(i: usize) -> Self {
        Self::term(
            Basis {
                h: vec![i],
                v: vec![],
            },
            JetPoly::one(),
        )
    }

    pub fn dv(w: JetVar) -> Self {
        Self::term(
            Basis {
                h: vec![],
                v: vec![w],
            },
            JetPoly::one(),
        )
    }

    /// `dx^1 ∧ … ∧ dx^n`.
    pub fn volume(n: usize) -> Self {
        Self::term(
            Basis {
                h: (0..n).collect(),
                v: vec![],
            },
            JetPoly::one(),
        )
    }

    /// Builds `coeff · g_1 ∧ … ∧ g_k` from an arbitrary generator word.
    pub fn from_word(coeff: JetPoly, gens: Vec<Gen>) -> Self {
        match Basis::canonicalize(gens) {
            None => Self::zero(),
            Some((odd, basis)) => Self::term(basis, if odd { -coeff } else { coeff }),
        }
    }

    pub fn add_term(&mut self, basis: Basis, coeff: JetPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(basis) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &JetPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, basis: &Basis) -> JetPoly {
        self.terms.get(basis).cloned().unwrap_or_default()
    }

    /// Coefficient of a `(0,0)` form, if the form is a pure scalar.
    pub fn as_scalar(&self) -> Option<JetPoly> {
        match self.terms.len() {
            0 => Some(JetPoly::zero()),
            1 => self.terms.get(&Basis::one()).cloned(),
            _ => None,
        }
    }

    pub fn gradings(&self) -> BTreeSet<Grading> {
        self.terms.keys().map(Basis::grading).collect()
    }

    /// The common grading of all terms; `None` for zero or mixed forms.
    pub fn grading(&self) -> Option<Grading> {
        let g = self.gradings();
        if g.len() == 1 {
            g.into_iter().next()
        } else {
            None
        }
    }

    /// Succeeds if every term has grading `g` (the zero form always does).
    pub fn expect_grading(&self, g: Grading) -> Result<()> {
        let gs = self.gradings();
        if gs.iter().all(|x| *x == g) {
            Ok(())
        } else {
            let found: Vec<String> = gs.iter().map(Grading::to_string).collect();
            Err(Error::WrongGrading {
                expected: g,
                found: found.join("+"),
            })
        }
    }

    pub fn homogeneous_part(&self, g: Grading) -> BiForm {
        BiForm {
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grading() == g)
                .map(|(b, c)| (b.clone(), c.clone()))
                .collect(),
        }
    }

    /// Every jet coordinate occurring in coefficients or contact generators.
    pub fn jet_vars(&self) -> BTreeSet<JetVar> {
        let mut out = BTreeSet::new();
        for (b, c) in &self.terms {
            out.extend(b.v.iter().cloned());
            out.extend(c.jet_vars());
        }
        out
    }

    pub fn jet_order(&self) -> usize {
        self.jet_vars().iter().map(JetVar::order).max().unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&JetPoly) -> JetPoly) -> BiForm {
        let mut out = BiForm::zero();
        for (b, c) in &self.terms {
            out.add_term(b.clone(), f(c));
        }
        out
    }

    /// Multiplication by a function.
    pub fn mul_poly(&self, p: &JetPoly) -> BiForm {
        self.map_coeffs(|c| c * p)
    }

    pub fn scale(&self, c: &Rational) -> BiForm {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn wedge(&self, other: &BiForm) -> BiForm {
        let mut out = BiForm::zero();
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                let mut word = a.gens();
                word.extend(b.gens());
                if let Some((odd, basis)) = Basis::canonicalize(word) {
                    let c = p * q;
                    out.add_term(basis, if odd { -c } else { c });
                }
            }
        }
        out
    }

    /// Horizontal differential.
    pub fn d_h(&self, sig: &Signature) -> BiForm {
        let n = sig.n();
        let mut out = BiForm::zero();
        for (basis, coeff) in &self.terms {
            let gens = basis.gens();
            for i in 0..n {
                let di = coeff.total_derivative(i);
                if di.is_zero() {
                    continue;
                }
                let mut word = vec![Gen::H(i)];
                word.extend(gens.iter().cloned());
                out += &BiForm::from_word(di, word);
            }
            let nh = basis.h.len();
            for (k, w) in basis.v.iter().enumerate() {
                // derivation sign for passing dx^H and the first k contact generators
                let odd = (nh + k) % 2 == 1;
                for i in 0..n {
                    let mut word: Vec<Gen> = gens[..nh + k].to_vec();
                    word.push(Gen::H(i));
                    word.push(Gen::V(w.derive(i)));
                    word.extend(gens[nh + k + 1..].iter().cloned());
                    let c = if odd { -coeff.clone() } else { coeff.clone() };
                    out += &BiForm::from_word(c, word);
                }
            }
        }
        out
    }

    /// Vertical differential.
    pub fn d_v(&self) -> BiForm {
        let mut out = BiForm::zero();
        for (basis, coeff) in &self.terms {
            let gens = basis.gens();
            for w in coeff.jet_vars() {
                let dc = coeff.partial_jet(&w);
                let mut word = vec![Gen::V(w)];
                word.extend(gens.iter().cloned());
                out += &BiForm::from_word(dc, word);
            }
        }
        out
    }

    /// Full de Rham differential `dh + dv`.
    pub fn d(&self, sig: &Signature) -> BiForm {
        &self.d_h(sig) + &self.d_v()
    }

    /// Fibre-scaling homotopy `h_v` with `dv h_v + h_v dv = id` in positive
    /// vertical degree.
    ///
    /// For a term `P dx^H ∧ dv w_1 ∧ … ∧ dv w_v` each contraction
    /// `ι_R dv w_k = w_k` carries the sign `(-1)^{|H|+k-1}`, and each monomial
    /// of `P` of jet degree `q` is divided by `v + q`.
    pub fn vertical_homotopy(&self) -> Result<BiForm> {
        let mut out = BiForm::zero();
        for (basis, coeff) in &self.terms {
            let v = basis.v.len();
            if v == 0 {
                return Err(Error::VerticalDegreeZero);
            }
            let nh = basis.h.len();
            let scaled = coeff.scale_integrate(v as u32);
            for (k, w) in basis.v.iter().enumerate() {
                let mut rest = basis.clone();
                rest.v.remove(k);
                let c = &scaled * &JetPoly::jet(w.clone());
                out.add_term(rest, if (nh + k) % 2 == 1 { -c } else { c });
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for i in &b.h {
                write!(f, "^dx{i}")?;
            }
            for w in &b.v {
                write!(f, "^dv(u{}{:?})", w.dep, w.idx.indices())?;
            }
        }
        Ok(())
    }
}

impl std::ops::AddAssign<&BiForm> for BiForm {
    fn add_assign(&mut self, rhs: &BiForm) {
        for (b, c) in &rhs.terms {
            self.add_term(b.clone(), c.clone());
        }
    }
}

impl std::ops::SubAssign<&BiForm> for BiForm {
    fn sub_assign(&mut self, rhs: &BiForm) {
        for (b, c) in &rhs.terms {
            self.add_term(b.clone(), -c);
        }
    }
}

impl std::ops::Add<&BiForm> for &BiForm {
    type Output = BiForm;
    fn add(self, rhs: &BiForm) -> BiForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::Sub<&BiForm> for &BiForm {
    type Output = BiForm;
    fn sub(self, rhs: &BiForm) -> BiForm {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl std::ops::Add for BiForm {
    type Output = BiForm;
    fn add(mut self, rhs: BiForm) -> BiForm {
        self += &rhs;
        self
    }
}

impl std::ops::Sub for BiForm {
    type Output = BiForm;
    fn sub(mut self, rhs: BiForm) -> BiForm {
        self -= &rhs;
        self
    }
}

impl std::ops::Neg for &BiForm {
    type Output = BiForm;
    fn neg(self) -> BiForm {
        self.map_coeffs(|c| -c)
    }
}

impl std::ops::Neg for BiForm {
    type Output = BiForm;
    fn neg(self) -> BiForm {
        -&self
    }
}

/// `(-1)^k` as a rational.
pub(crate) fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// `φ|_{u → 0}` applied to every coefficient.
pub fn at_zero_jets(f: &BiForm) -> BiForm {
    f.map_coeffs(JetPoly::at_zero_jets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcore::{rat, MultiIndex};

    const T: usize = 0;
    const X: usize = 1;

    fn sig1() -> Signature {
        Signature::new(["t"], ["u"]).unwrap()
    }

    fn sig2() -> Signature {
        Signature::new(["t", "x"], ["u"]).unwrap()
    }

    fn w(idx: &[usize]) -> JetVar {
        JetVar::new(0, MultiIndex::from_indices(idx.iter().copied()))
    }

    fn u(idx: &[usize]) -> JetPoly {
        JetPoly::jet(w(idx))
    }

    #[test]
    fn wedge_examples() {
        assert!(BiForm::dx(T).wedge(&BiForm::dx(T)).is_zero());
        let a = BiForm::dv(w(&[T])).wedge(&BiForm::dv(w(&[])));
        let b = BiForm::dv(w(&[])).wedge(&BiForm::dv(w(&[T])));
        assert_eq!(a, -b);
        let c = BiForm::dx(T).mul_poly(&u(&[])).wedge(&BiForm::dv(w(&[])));
        assert_eq!(
            c,
            BiForm::term(
                Basis {
                    h: vec![T],
                    v: vec![w(&[])]
                },
                u(&[])
            )
        );
    }

    #[test]
    fn dh_examples() {
        let s = sig2();
        let f = BiForm::scalar(u(&[]));
        let expect = &BiForm::dx(T).mul_poly(&u(&[T])) + &BiForm::dx(X).mul_poly(&u(&[X]));
        assert_eq!(f.d_h(&s), expect);
        let g = BiForm::dv(w(&[]));
        let expect =
            &BiForm::dx(T).wedge(&BiForm::dv(w(&[T]))) + &BiForm::dx(X).wedge(&BiForm::dv(w(&[X])));
        assert_eq!(g.d_h(&s), expect);
        let p = BiForm::scalar(&u(&[]) * &u(&[X]));
        assert!(p.d_h(&s).d_h(&s).is_zero());
    }

    #[test]
    fn dv_examples() {
        let f = BiForm::scalar(u(&[T]).pow(2).scale(&rat(1, 2)));
        assert_eq!(f.d_v(), BiForm::dv(w(&[T])).mul_poly(&u(&[T])));
        let g = BiForm::scalar(&u(&[]) * &u(&[T]));
        assert!(g.d_v().d_v().is_zero());
        let h = BiForm::dx(T).mul_poly(&JetPoly::x(X));
        assert!(h.d_v().is_zero());
    }

    #[test]
    fn homotopy_examples() {
        let a = BiForm::dv(w(&[T])).wedge(&BiForm::dv(w(&[])));
        let h = a.vertical_homotopy().unwrap();
        let expect = (&BiForm::dv(w(&[])).mul_poly(&u(&[T]))
            - &BiForm::dv(w(&[T])).mul_poly(&u(&[])))
            .scale(&rat(1, 2));
        assert_eq!(h, expect);
        assert_eq!(h.d_v(), a);

        assert_eq!(
            BiForm::dv(w(&[])).vertical_homotopy().unwrap(),
            BiForm::scalar(u(&[]))
        );
        let b = BiForm::dv(w(&[])).mul_poly(&u(&[]));
        let hb = b.vertical_homotopy().unwrap();
        assert_eq!(hb, BiForm::scalar(u(&[]).pow(2).scale(&rat(1, 2))));
        assert_eq!(hb.d_v(), b);

        assert_eq!(
            BiForm::scalar(u(&[])).vertical_homotopy(),
            Err(Error::VerticalDegreeZero)
        );
    }

    #[test]
    fn homotopy_with_horizontal_generators() {
        let s = sig1();
        // dh of a (0,1) form carries one dx; the identity must still hold.
        let th = BiForm::dv(w(&[])).mul_poly(&u(&[T]));
        let a = th.d_h(&s);
        let lhs = &a.vertical_homotopy().unwrap().d_v() + &a.d_v().vertical_homotopy().unwrap();
        assert_eq!(lhs, a);
    }

    #[test]
    fn homogeneous_parts() {
        let f = &BiForm::dx(T).mul_poly(&u(&[])) + &BiForm::dv(w(&[]));
        assert_eq!(
            f.homogeneous_part(Grading::new(1, 0)),
            BiForm::dx(T).mul_poly(&u(&[]))
        );
        assert_eq!(f.homogeneous_part(Grading::new(0, 1)), BiForm::dv(w(&[])));
        assert!(f.homogeneous_part(Grading::new(1, 1)).is_zero());
        assert_eq!(f.grading(), None);
        assert!(f.expect_grading(Grading::new(1, 0)).is_err());
    }

    #[test]
    fn full_differential_is_nilpotent_on_sample() {
        let s = sig2();
        let f = BiForm::dv(w(&[X])).mul_poly(&(&u(&[T]) * &JetPoly::x(T)));
        assert!(f.d(&s).d(&s).is_zero());
    }
}
