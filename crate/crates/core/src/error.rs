use thiserror::Error;

use crate::forms::Grading;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("expected a form of grading {expected}, found {found}")]
    WrongGrading { expected: Grading, found: String },
    #[error("form is not homogeneous")]
    NotHomogeneous,
    #[error("vertical homotopy needs vertical degree at least one")]
    VerticalDegreeZero,
    #[error("not a source form: {0}")]
    NotSourceForm(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("system fails the integrability check at {jet}: {detail}")]
    NotIntegrable { jet: String, detail: String },
    #[error("reduction does not terminate (cycle through {0})")]
    NonTerminatingReduction(String),
    #[error("form is not in internal coordinates: principal jet {0}")]
    NotInternal(String),
    #[error("source form fails the Helmholtz conditions")]
    HelmholtzViolated,
    #[error("presymplectic current is not compatible with the system")]
    Incompatible,
    #[error("{0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
