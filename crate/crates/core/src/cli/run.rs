use serde_json::json;

use super::render::{render, value_json, Format, Value};
use super::{parse_session, Command, Definition, Session, Verb};
use crate::descent::{check_compatibility, reconstruct, DEFAULT_DEPTH};
use crate::error::Error;
use crate::forms::BiForm;
use crate::jetcore::Signature;
use crate::lagcmp::{contains, Bounds, ElContainment, OmegaMatch};
use crate::pdesys::OrthonomicSystem;
use crate::varcalc::{
    first_variation, helmholtz_check, presymplectic_current, vainberg_lagrangian, Helmholtz,
    SourceForm,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub format: Format,
    pub bounds: Bounds,
    pub depth: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            format: Format::Text,
            bounds: Bounds::default(),
            depth: DEFAULT_DEPTH,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Undecided,
    Fail,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Undecided => "undecided",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    /// 0 all passed, 1 a check failed, 2 input error, 3 a check was undecided.
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Outcome {
    summary: Option<String>,
    status: Status,
    values: Vec<(String, Value)>,
}

impl Outcome {
    fn pass(values: Vec<(String, Value)>) -> Self {
        Self {
            summary: None,
            status: Status::Pass,
            values,
        }
    }
}

fn form<'s>(session: &'s Session, name: &str) -> &'s BiForm {
    match &session.defs[name] {
        Definition::Lagrangian(f) | Definition::Form(f) => f,
        _ => unreachable!("argument kinds are checked by the parser"),
    }
}

fn source<'s>(session: &'s Session, name: &str) -> &'s SourceForm {
    match &session.defs[name] {
        Definition::Source(s) => s,
        _ => unreachable!("argument kinds are checked by the parser"),
    }
}

fn system<'s>(session: &'s Session, name: &str) -> &'s OrthonomicSystem {
    match &session.defs[name] {
        Definition::System(s) => s,
        _ => unreachable!("argument kinds are checked by the parser"),
    }
}

fn el_values(sig: &Signature, el: &SourceForm) -> Vec<(String, Value)> {
    el.coeffs()
        .iter()
        .enumerate()
        .map(|(a, c)| {
            (
                format!("EL[{}]", sig.dep_names()[a]),
                Value::Scalar(c.clone()),
            )
        })
        .collect()
}

fn execute(session: &Session, cmd: &Command, opts: &Options) -> Result<Outcome, Error> {
    let sig = &session.signature;
    let arg = |k: usize| cmd.args[k].as_str();
    Ok(match cmd.verb {
        Verb::El => Outcome::pass(el_values(
            sig,
            &first_variation(sig, form(session, arg(0)))?.el,
        )),
        Verb::Theta => {
            let theta = first_variation(sig, form(session, arg(0)))?.theta;
            Outcome::pass(vec![("theta".into(), Value::Form(theta))])
        }
        Verb::Omega => {
            let omega = presymplectic_current(sig, form(session, arg(0)))?;
            Outcome::pass(vec![("omega".into(), Value::Form(omega))])
        }
        Verb::Helmholtz => match helmholtz_check(source(session, arg(0))) {
            Helmholtz::Pass => Outcome {
                summary: Some("pass".into()),
                status: Status::Pass,
                values: vec![],
            },
            Helmholtz::Fail(w) => {
                let names = sig.dep_names();
                let idx: Vec<&str> = w
                    .index
                    .indices()
                    .iter()
                    .map(|&i| sig.indep_names()[i].as_str())
                    .collect();
                let label = format!("gap[{},{};{}]", names[w.row], names[w.col], idx.join(","));
                Outcome {
                    summary: Some("fail".into()),
                    status: Status::Fail,
                    values: vec![(label, Value::Scalar(w.coeff))],
                }
            }
        },
        Verb::Vainberg => match vainberg_lagrangian(sig, source(session, arg(0))) {
            Ok(l) => Outcome::pass(vec![("L".into(), Value::Form(l))]),
            Err(Error::HelmholtzViolated) => Outcome {
                summary: Some("fail, not variational".into()),
                status: Status::Fail,
                values: vec![],
            },
            Err(e) => return Err(e),
        },
        Verb::Reduce => {
            let cert = system(session, arg(0)).reduce(form(session, arg(1)))?;
            Outcome::pass(vec![("normal".into(), Value::Form(cert.normal))])
        }
        Verb::CheckOmega => {
            let report = check_compatibility(
                sig,
                form(session, arg(1)),
                system(session, arg(0)),
                opts.depth,
            )?;
            let mut values = vec![("omega".into(), Value::Form(report.reduced.clone()))];
            if !report.dh_closed {
                values.push((
                    "dh".into(),
                    Value::Form(report.dh_certificate.normal.clone()),
                ));
            }
            if !report.dv_closed {
                values.push((
                    "dv".into(),
                    Value::Form(report.dv_certificate.normal.clone()),
                ));
            }
            let ok = report.compatible();
            Outcome {
                summary: Some(if ok { "compatible" } else { "incompatible" }.into()),
                status: if ok { Status::Pass } else { Status::Fail },
                values,
            }
        }
        Verb::Reconstruct => {
            let sys = system(session, arg(0));
            let r = match reconstruct(sig, form(session, arg(1)), sys, opts.depth) {
                Ok(r) => r,
                Err(Error::Incompatible) => {
                    return Ok(Outcome {
                        summary: Some("incompatible".into()),
                        status: Status::Fail,
                        values: vec![],
                    })
                }
                Err(e) => return Err(e),
            };
            let ok = r.verify(sig, sys)?.all();
            let mut values = vec![
                ("L".into(), Value::Form(r.lagrangian.clone())),
                ("theta".into(), Value::Form(r.theta.clone())),
                ("omega".into(), Value::Form(r.omega.clone())),
            ];
            values.extend(el_values(sig, &r.el));
            for (key, ms) in &r.multipliers {
                let idx: Vec<&str> = key
                    .prolong
                    .indices()
                    .iter()
                    .map(|&i| sig.indep_names()[i].as_str())
                    .collect();
                for (a, m) in ms.iter().enumerate() {
                    if !m.is_zero() {
                        let at = if idx.is_empty() {
                            key.rule.to_string()
                        } else {
                            format!("{};{}", key.rule, idx.join(","))
                        };
                        let label = format!("multiplier[{at}][{}]", sig.dep_names()[a]);
                        values.push((label, Value::Scalar(m.clone())));
                    }
                }
            }
            Outcome {
                summary: Some(
                    if ok {
                        "verified"
                    } else {
                        "invariants violated"
                    }
                    .into(),
                ),
                status: if ok { Status::Pass } else { Status::Fail },
                values,
            }
        }
        Verb::Compare => {
            let v = contains(
                sig,
                form(session, arg(0)),
                form(session, arg(1)),
                system(session, arg(2)),
                opts.bounds,
            )?;
            let mut values = Vec::new();
            let el = match &v.el_contained {
                ElContainment::Pass => "el contained",
                ElContainment::Fail {
                    component,
                    residual,
                } => {
                    values.push((
                        format!("residual[{}]", sig.dep_names()[*component]),
                        Value::Scalar(residual.clone()),
                    ));
                    "el not contained"
                }
            };
            let omega = match &v.omega_match {
                OmegaMatch::Exact => "omega exact",
                OmegaMatch::ExactUpToDh(pi) => {
                    values.push(("pi".into(), Value::Form(pi.clone())));
                    "omega exact up to dh"
                }
                OmegaMatch::UndecidedWithinBounds => "omega undecided within bounds",
                OmegaMatch::Mismatch(d) => {
                    values.push(("difference".into(), Value::Form(d.clone())));
                    "omega mismatch"
                }
            };
            let status = if v.holds() {
                Status::Pass
            } else if v.undecided() && matches!(v.el_contained, ElContainment::Pass) {
                Status::Undecided
            } else {
                Status::Fail
            };
            Outcome {
                summary: Some(format!("{el}, {omega}")),
                status,
                values,
            }
        }
    })
}

fn header(cmd: &Command, summary: &Option<String>) -> String {
    let mut h = format!("{} {}", cmd.verb.name(), cmd.args.join(" "));
    if let Some(s) = summary {
        h.push_str(": ");
        h.push_str(s);
    }
    h
}

fn write_outcome(out: &mut String, sig: &Signature, cmd: &Command, o: &Outcome, format: Format) {
    match format {
        Format::Json => {
            let values: Vec<_> = o
                .values
                .iter()
                .map(|(n, v)| value_json(sig, n, v))
                .collect();
            let line = json!({
                "schema": "varbico-1",
                "command": cmd.verb.name(),
                "args": cmd.args,
                "status": o.status.name(),
                "summary": o.summary,
                "values": values,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        Format::Latex => {
            out.push_str(&format!("% {}\n", header(cmd, &o.summary)));
            for (n, v) in &o.values {
                out.push_str(&format!("{n} = {}\n", render(sig, v, format)));
            }
        }
        Format::Text => {
            out.push_str(&header(cmd, &o.summary));
            out.push('\n');
            for (n, v) in &o.values {
                out.push_str(&format!("  {n} = {}\n", render(sig, v, format)));
            }
        }
    }
}

/// Runs every command in order. An input error stops the run.
pub fn run(session: &Session, opts: &Options) -> RunOutput {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut worst = Status::Pass;
    for cmd in &session.commands {
        match execute(session, cmd, opts) {
            Ok(o) => {
                if o.status != Status::Pass {
                    stderr.push_str(&format!("line {}: {}\n", cmd.line, header(cmd, &o.summary)));
                }
                worst = worst.max(o.status);
                write_outcome(&mut stdout, &session.signature, cmd, &o, opts.format);
            }
            Err(e) => {
                stderr.push_str(&format!(
                    "line {}: {} failed: {e}\n",
                    cmd.line,
                    cmd.verb.name()
                ));
                return RunOutput {
                    code: 2,
                    stdout,
                    stderr,
                };
            }
        }
    }
    let code = match worst {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Undecided => 3,
    };
    RunOutput {
        code,
        stdout,
        stderr,
    }
}

/// Parses and runs a session file's contents.
pub fn run_text(text: &str, opts: &Options) -> RunOutput {
    match parse_session(text) {
        Ok(session) => run(&session, opts),
        Err(e) => RunOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("{e}\n"),
        },
    }
}
