//! A small text language for bundles, Lagrangians, forms and systems, and a
//! command runner over it.
//!
//! ```text
//! bundle (t) (u)
//! def W : form = dv(jet(u;t)) /\ dv(u)
//! sys osc { jet(u;t,t) -> 0 - u }
//! cmd reconstruct osc W
//! ```
//!
//! Expressions are evaluated eagerly to exact forms. A bare dependent name
//! is the field itself, a bare independent name is the base coordinate, and
//! earlier definitions may be referenced by name.

mod parse;
mod render;
mod run;

use std::fmt;

use indexmap::IndexMap;

use crate::forms::BiForm;
use crate::jetcore::Signature;
use crate::pdesys::OrthonomicSystem;
use crate::varcalc::SourceForm;

pub use parse::{parse_expr, parse_session};
pub use render::{render, render_form, render_poly, value_json, Format, Value};
pub use run::{run, run_text, Options, RunOutput, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Lagrangian,
    Form,
    Source,
    System,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Lagrangian => "lag",
            Kind::Form => "form",
            Kind::Source => "src",
            Kind::System => "sys",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definition {
    Lagrangian(BiForm),
    Form(BiForm),
    Source(SourceForm),
    System(OrthonomicSystem),
}

impl Definition {
    pub fn kind(&self) -> Kind {
        match self {
            Definition::Lagrangian(_) => Kind::Lagrangian,
            Definition::Form(_) => Kind::Form,
            Definition::Source(_) => Kind::Source,
            Definition::System(_) => Kind::System,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    El,
    Theta,
    Omega,
    Helmholtz,
    Vainberg,
    Reduce,
    CheckOmega,
    Reconstruct,
    Compare,
}

impl Verb {
    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "el" => Verb::El,
            "theta" => Verb::Theta,
            "omega" => Verb::Omega,
            "helmholtz" => Verb::Helmholtz,
            "vainberg" => Verb::Vainberg,
            "reduce" => Verb::Reduce,
            "checkomega" => Verb::CheckOmega,
            "reconstruct" => Verb::Reconstruct,
            "compare" => Verb::Compare,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Verb::El => "el",
            Verb::Theta => "theta",
            Verb::Omega => "omega",
            Verb::Helmholtz => "helmholtz",
            Verb::Vainberg => "vainberg",
            Verb::Reduce => "reduce",
            Verb::CheckOmega => "checkomega",
            Verb::Reconstruct => "reconstruct",
            Verb::Compare => "compare",
        }
    }

    /// Expected argument kinds; `None` accepts any form-valued definition.
    pub fn arguments(self) -> &'static [Option<Kind>] {
        use Kind::*;
        match self {
            Verb::El | Verb::Theta | Verb::Omega => &[Some(Lagrangian)],
            Verb::Helmholtz | Verb::Vainberg => &[Some(Source)],
            Verb::Reduce => &[Some(System), None],
            Verb::CheckOmega | Verb::Reconstruct => &[Some(System), Some(Form)],
            Verb::Compare => &[Some(Lagrangian), Some(Lagrangian), Some(System)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub verb: Verb,
    pub args: Vec<String>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    pub signature: Signature,
    pub defs: IndexMap<String, Definition>,
    pub commands: Vec<Command>,
}

/// A lexical, syntactic or typing error at a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}
