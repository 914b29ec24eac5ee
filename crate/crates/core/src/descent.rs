//! Reconstruction of a Lagrangian from an orthonomic system and a compatible
//! presymplectic current.
//!
//! The pipeline has three stages:
//!
//! 1. [`check_compatibility`]: `ω̂` of grading `(n−1, 2)` in internal
//!    coordinates must satisfy `dh^E ω̂ = 0` and `dv^E ω̂ = 0`.
//! 2. [`descend`]: solve `dv^E θ̂ = ω̂` and `dv^E L̂ = −dh^E θ̂` on-shell with
//!    the vertical homotopy.
//! 3. [`lift_and_assemble`]: read `θ̂, L̂` off-shell, strip the equation
//!    multiples certified by reduction and integrate by parts to get
//!    `(L, θ, ω, EL)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forms::{BiForm, Grading};
use crate::jetcore::{JetPoly, Signature};
use crate::pdesys::{
    onshell_dh_with, Integrability, OrthonomicSystem, ProlongKey, ReductionCertificate,
};
use crate::varcalc::{source_decompose, SourceForm};

/// Default number of extra derivatives used by the integrability check.
pub const DEFAULT_DEPTH: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityReport {
    /// `ω̂` after reduction to internal coordinates.
    pub reduced: BiForm,
    pub dh_closed: bool,
    pub dv_closed: bool,
    pub dh_certificate: ReductionCertificate,
    pub dv_certificate: ReductionCertificate,
}

impl CompatibilityReport {
    pub fn compatible(&self) -> bool {
        self.dh_closed && self.dv_closed
    }
}

/// On-shell solution of the two lowest descent equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descent {
    /// The current the descent was run against, in internal coordinates.
    pub omega_hat: BiForm,
    pub theta_hat: BiForm,
    pub lagrangian_hat: BiForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub lagrangian: BiForm,
    pub theta: BiForm,
    pub omega: BiForm,
    pub el: SourceForm,
    /// `EL_a = Σ_K f_K · multipliers[K][a]`.
    pub multipliers: BTreeMap<ProlongKey, Vec<JetPoly>>,
    pub omega_hat: BiForm,
}

/// Outcome of the four checks every reconstruction must pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    /// `dv L = EL − dh θ`.
    pub first_variation: bool,
    /// `dv θ = ω`.
    pub current: bool,
    /// Every `EL_a` reduces to 0.
    pub containment: bool,
    /// `ω` reduces to `ω̂`.
    pub onshell_current: bool,
}

impl InvariantReport {
    pub fn all(&self) -> bool {
        self.first_variation && self.current && self.containment && self.onshell_current
    }
}

fn require_integrable(sig: &Signature, sys: &OrthonomicSystem, depth: usize) -> Result<()> {
    match sys.check_integrability(depth)? {
        Integrability::Pass => Ok(()),
        Integrability::Fail(w) => Err(Error::NotIntegrable {
            jet: sig.jet_name(&w.jet),
            detail: format!("rules {} and {} disagree", w.rules.0, w.rules.1),
        }),
    }
}

pub fn check_compatibility(
    sig: &Signature,
    omega_hat: &BiForm,
    sys: &OrthonomicSystem,
    depth: usize,
) -> Result<CompatibilityReport> {
    omega_hat.expect_grading(Grading::new(sig.n() - 1, 2))?;
    require_integrable(sig, sys, depth)?;
    let red = sys.reducer();
    let reduced = red.reduce(omega_hat)?.normal;
    let dh_certificate = red.reduce(&reduced.d_h(sig))?;
    let dv_certificate = red.reduce(&reduced.d_v())?;
    Ok(CompatibilityReport {
        reduced,
        dh_closed: dh_certificate.normal.is_zero(),
        dv_closed: dv_certificate.normal.is_zero(),
        dh_certificate,
        dv_certificate,
    })
}

fn homotopy(a: &BiForm) -> Result<BiForm> {
    if a.is_zero() {
        Ok(BiForm::zero())
    } else {
        a.vertical_homotopy()
    }
}

pub fn descend(
    sig: &Signature,
    omega_hat: &BiForm,
    sys: &OrthonomicSystem,
    depth: usize,
) -> Result<Descent> {
    let report = check_compatibility(sig, omega_hat, sys, depth)?;
    if !report.compatible() {
        return Err(Error::Incompatible);
    }
    descend_reduced(sig, report.reduced, &BiForm::zero(), sys)
}

/// Descent with a prescribed `(n−2, 2)` component `π̂`, which must be
/// `dv`-closed; the `(n−1, 1)` equation then reads `dv^E θ̂ = ω̂ − dh^E π̂`.
pub fn descend_with_upper(
    sig: &Signature,
    omega_hat: &BiForm,
    upper: &BiForm,
    sys: &OrthonomicSystem,
    depth: usize,
) -> Result<Descent> {
    if sig.n() < 2 {
        return Err(Error::Unsupported(
            "an (n-2)-form component needs at least two independent variables".into(),
        ));
    }
    upper.expect_grading(Grading::new(sig.n() - 2, 2))?;
    sys.expect_internal(sig, upper)?;
    if !upper.d_v().is_zero() {
        return Err(Error::Unsupported(
            "upper descent component must be vertically closed".into(),
        ));
    }
    let report = check_compatibility(sig, omega_hat, sys, depth)?;
    if !report.compatible() {
        return Err(Error::Incompatible);
    }
    descend_reduced(sig, report.reduced, upper, sys)
}

fn descend_reduced(
    sig: &Signature,
    omega: BiForm,
    upper: &BiForm,
    sys: &OrthonomicSystem,
) -> Result<Descent> {
    let red = sys.reducer();
    let target = &omega - &onshell_dh_with(sig, &red, upper)?;
    let theta_hat = homotopy(&target)?;
    let lagrangian_hat = homotopy(&-onshell_dh_with(sig, &red, &theta_hat)?)?;
    Ok(Descent {
        omega_hat: target,
        theta_hat,
        lagrangian_hat,
    })
}

/// Assembles `(L, θ, ω, EL)` from any off-shell lift of a descent.
///
/// `theta_lift` and `lagrangian_lift` must satisfy `dv L̂ + dh θ̂ ≡ 0` modulo
/// the system; the lifts produced by [`descend`] do so by construction.
pub fn lift_and_assemble(
    sig: &Signature,
    sys: &OrthonomicSystem,
    omega_hat: &BiForm,
    theta_lift: &BiForm,
    lagrangian_lift: &BiForm,
) -> Result<ReconstructionResult> {
    let n = sig.n();
    theta_lift.expect_grading(Grading::new(n - 1, 1))?;
    lagrangian_lift.expect_grading(Grading::new(n, 0))?;
    let red = sys.reducer();
    let delta = &lagrangian_lift.d_v() + &theta_lift.d_h(sig);
    let cert = red.reduce(&delta)?;
    if !cert.normal.is_zero() {
        return Err(Error::Internal(format!(
            "descent equations do not hold on-shell, residual {}",
            cert.normal
        )));
    }
    let mut lagrangian = lagrangian_lift.clone();
    for (key, mu) in &cert.mu {
        lagrangian -= &mu.mul_poly(&sys.equation(key));
    }
    let gamma = &lagrangian.d_v() + &theta_lift.d_h(sig);
    let (el, sigma) = source_decompose(sig, &gamma)?;
    let theta = theta_lift + &sigma;
    let omega = theta.d_v();

    let mut multipliers: BTreeMap<ProlongKey, Vec<JetPoly>> = BTreeMap::new();
    for (a, e) in el.coeffs().iter().enumerate() {
        let r = red.reduce_poly(e)?;
        if !r.normal.is_zero() {
            return Err(Error::Internal(format!(
                "EL component {a} does not vanish on-shell"
            )));
        }
        for (key, c) in r.cofactors {
            multipliers
                .entry(key)
                .or_insert_with(|| vec![JetPoly::zero(); sig.m()])[a] = c;
        }
    }
    Ok(ReconstructionResult {
        lagrangian,
        theta,
        omega,
        el,
        multipliers,
        omega_hat: omega_hat.clone(),
    })
}

pub fn reconstruct(
    sig: &Signature,
    omega_hat: &BiForm,
    sys: &OrthonomicSystem,
    depth: usize,
) -> Result<ReconstructionResult> {
    let d = descend(sig, omega_hat, sys, depth)?;
    lift_and_assemble(sig, sys, &d.omega_hat, &d.theta_hat, &d.lagrangian_hat)
}

impl ReconstructionResult {
    pub fn verify(&self, sig: &Signature, sys: &OrthonomicSystem) -> Result<InvariantReport> {
        let red = sys.reducer();
        let lhs = self.lagrangian.d_v();
        let rhs = &self.el.to_biform(sig) - &self.theta.d_h(sig);
        let mut containment = true;
        for e in self.el.coeffs() {
            containment &= red.reduce_poly(e)?.normal.is_zero();
        }
        Ok(InvariantReport {
            first_variation: lhs == rhs,
            current: self.theta.d_v() == self.omega,
            containment,
            onshell_current: red.reduce(&self.omega)?.normal == red.reduce(&self.omega_hat)?.normal,
        })
    }
}
