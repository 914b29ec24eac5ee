//! Variational bicomplex on jet bundles with exact rational coefficients,
//! and reconstruction of Lagrangians from orthonomic PDE systems equipped
//! with a compatible presymplectic current.

pub mod cli;
pub mod descent;
pub mod error;
pub mod forms;
pub mod jetcore;
pub mod lagcmp;
pub mod linalg;
pub mod pdesys;
pub mod varcalc;

pub use error::{Error, Result};
pub use forms::{Basis, BiForm, Gen, Grading};
pub use jetcore::{rat, JetPoly, JetVar, Monomial, MultiIndex, Rational, Signature, Var};
pub use pdesys::{OrthonomicSystem, ProlongKey, ReductionCertificate, Rule};
pub use varcalc::SourceForm;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/bicomplex.md")]
    mod bicomplex {}
    #[doc = include_str!("../../../book/src/variations.md")]
    mod variations {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/comparison.md")]
    mod comparison {}
    #[doc = include_str!("../../../book/src/sessions.md")]
    mod sessions {}
}
