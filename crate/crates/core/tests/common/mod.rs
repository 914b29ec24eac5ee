#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use varbico::forms::Gen;
use varbico::jetcore::{rat, JetPoly, JetVar, Monomial, MultiIndex, Signature, Var};
use varbico::pdesys::{OrthonomicSystem, Rule};
use varbico::varcalc::lagrangian;
use varbico::BiForm;

pub const T: usize = 0;
pub const X: usize = 1;

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub order: usize,
    pub degree: u32,
    pub terms: usize,
}

pub fn jet(dep: usize, idx: &[usize]) -> JetVar {
    JetVar::new(dep, MultiIndex::from_indices(idx.iter().copied()))
}

pub fn u(idx: &[usize]) -> JetPoly {
    JetPoly::jet(jet(0, idx))
}

pub fn small_rational(rng: &mut impl Rng) -> varbico::Rational {
    let mut num = rng.gen_range(-4i64..=4);
    if num == 0 {
        num = 1;
    }
    rat(num, rng.gen_range(1i64..=3))
}

pub fn random_jet(rng: &mut impl Rng, sig: &Signature, order: usize) -> JetVar {
    let k = rng.gen_range(0..=order);
    JetVar::new(
        rng.gen_range(0..sig.m()),
        MultiIndex::from_indices((0..k).map(|_| rng.gen_range(0..sig.n()))),
    )
}

pub fn random_poly(rng: &mut impl Rng, sig: &Signature, shape: Shape) -> JetPoly {
    let mut p = JetPoly::zero();
    for _ in 0..rng.gen_range(1..=shape.terms) {
        let mut m = Monomial::one();
        for _ in 0..rng.gen_range(0..=shape.degree) {
            let v = if rng.gen_bool(0.25) {
                Var::Indep(rng.gen_range(0..sig.n()))
            } else {
                Var::Jet(random_jet(rng, sig, shape.order))
            };
            m = m.mul(&Monomial::var(v));
        }
        p += &JetPoly::term(small_rational(rng), m);
    }
    p
}

pub fn random_internal_poly(
    rng: &mut impl Rng,
    sig: &Signature,
    sys: &OrthonomicSystem,
    shape: Shape,
) -> JetPoly {
    let jets = sys.parametric_jets(shape.order);
    let mut p = JetPoly::zero();
    for _ in 0..rng.gen_range(1..=shape.terms) {
        let mut m = Monomial::one();
        for _ in 0..rng.gen_range(0..=shape.degree) {
            let v = if rng.gen_bool(0.25) {
                Var::Indep(rng.gen_range(0..sig.n()))
            } else {
                Var::Jet(jets.choose(rng).expect("parametric jets").clone())
            };
            m = m.mul(&Monomial::var(v));
        }
        p += &JetPoly::term(small_rational(rng), m);
    }
    p
}

/// A sum of terms of random gradings with at most `max_v` contact factors.
pub fn random_form(
    rng: &mut impl Rng,
    sig: &Signature,
    shape: Shape,
    min_v: usize,
    max_v: usize,
) -> BiForm {
    let mut f = BiForm::zero();
    for _ in 0..rng.gen_range(1..=shape.terms) {
        let mut word = Vec::new();
        for i in 0..sig.n() {
            if rng.gen_bool(0.4) {
                word.push(Gen::H(i));
            }
        }
        for _ in 0..rng.gen_range(min_v..=max_v) {
            word.push(Gen::V(random_jet(rng, sig, shape.order)));
        }
        word.shuffle(rng);
        let coeff = random_poly(rng, sig, Shape { terms: 2, ..shape });
        f += &BiForm::from_word(coeff, word);
    }
    f
}

/// A random form of fixed grading in internal coordinates of `sys`.
pub fn random_internal_form(
    rng: &mut impl Rng,
    sig: &Signature,
    sys: &OrthonomicSystem,
    shape: Shape,
    h: usize,
    v: usize,
) -> BiForm {
    let jets = sys.parametric_jets(shape.order);
    let mut f = BiForm::zero();
    for _ in 0..rng.gen_range(1..=shape.terms) {
        let mut idx: Vec<usize> = (0..sig.n()).collect();
        idx.shuffle(rng);
        let mut word: Vec<Gen> = idx[..h].iter().map(|&i| Gen::H(i)).collect();
        for _ in 0..v {
            word.push(Gen::V(jets.choose(rng).expect("parametric jets").clone()));
        }
        let coeff = random_internal_poly(rng, sig, sys, Shape { terms: 2, ..shape });
        f += &BiForm::from_word(coeff, word);
    }
    f
}

pub fn random_lagrangian(rng: &mut impl Rng, sig: &Signature, shape: Shape) -> BiForm {
    lagrangian(sig, random_poly(rng, sig, shape))
}

/// Section components polynomial in the base coordinates.
pub fn random_section(rng: &mut impl Rng, sig: &Signature) -> Vec<JetPoly> {
    (0..sig.m())
        .map(|_| {
            let mut p = JetPoly::zero();
            for _ in 0..rng.gen_range(1..=3) {
                let mut m = Monomial::one();
                for _ in 0..rng.gen_range(0..=3) {
                    m = m.mul(&Monomial::var(Var::Indep(rng.gen_range(0..sig.n()))));
                }
                p += &JetPoly::term(small_rational(rng), m);
            }
            p
        })
        .collect()
}

pub fn oscillator() -> (Signature, OrthonomicSystem) {
    let s = Signature::new(["t"], ["u"]).unwrap();
    let sys = OrthonomicSystem::new(&s, vec![Rule::new(jet(0, &[T, T]), -u(&[]))]).unwrap();
    (s, sys)
}

pub fn oscillator_lagrangian(s: &Signature) -> BiForm {
    lagrangian(s, (&u(&[T]).pow(2) - &u(&[]).pow(2)).scale(&rat(1, 2)))
}

pub fn wave() -> (Signature, OrthonomicSystem) {
    let s = Signature::new(["t", "x"], ["u"]).unwrap();
    let sys = OrthonomicSystem::new(&s, vec![Rule::new(jet(0, &[T, T]), u(&[X, X]))]).unwrap();
    (s, sys)
}

pub fn wave_lagrangian(s: &Signature) -> BiForm {
    lagrangian(s, (&u(&[T]).pow(2) - &u(&[X]).pow(2)).scale(&rat(1, 2)))
}

/// Dependent variables `q1, q2, lam` over `t`.
pub fn constrained() -> (Signature, OrthonomicSystem) {
    let s = Signature::new(["t"], ["q1", "q2", "lam"]).unwrap();
    let sys = OrthonomicSystem::new(
        &s,
        vec![
            Rule::new(jet(0, &[T, T]), JetPoly::zero()),
            Rule::new(jet(1, &[]), JetPoly::jet(jet(0, &[]))),
            Rule::new(jet(2, &[]), JetPoly::zero()),
        ],
    )
    .unwrap();
    (s, sys)
}

pub fn q(a: usize, idx: &[usize]) -> JetPoly {
    JetPoly::jet(jet(a, idx))
}

/// `½ q̇1² + ½ q̇2² + (λ + α)(q1 − q2)`.
pub fn constrained_lagrangian(s: &Signature, alpha: &JetPoly) -> BiForm {
    let kinetic = (&q(0, &[T]).pow(2) + &q(1, &[T]).pow(2)).scale(&rat(1, 2));
    let constraint = &(&q(2, &[]) + alpha) * &(&q(0, &[]) - &q(1, &[]));
    lagrangian(s, &kinetic + &constraint)
}
