//! Stopping test and contraction diagnostics.

use crate::error::{Error, Result};
use crate::fem::FieldState;
use crate::mesh::Mesh;
use crate::model::PhysParams;
use crate::scalar::{dot, Real};

use super::operator::Operators;
use super::IterationReport;

/// `‖current − previous‖ ≤ atol + rtol ‖current‖` over the stacked dofs.
pub fn stopping_check<T: Real>(current: &FieldState<T>, previous: &FieldState<T>, atol: T, rtol: T) -> bool {
    current.dist(previous) <= atol + rtol * current.norm()
}

/// Weighted error functional `F^i = L_p/2 ‖e_p‖² + L_T/2 ‖e_T‖² + τ/4 ‖e_w‖²_{K⁻¹}`
/// against the last iterate, and the ratios `F^i / F^{i−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionDiagnostic<T> {
    pub functional: Vec<T>,
    pub observed: Vec<T>,
    /// Ratios of successive stopping-test left-hand sides (iterate-to-iterate).
    pub successive: Vec<T>,
    /// `1/(1+δ)` with the Thomas-constant term dropped and the cut-off
    /// constant `M`; `None` when `δ ≤ 0`.
    pub theoretical: Option<T>,
    /// Same bound with `M` replaced by the largest observed Darcy flux.
    pub theoretical_observed: Option<T>,
}

fn delta<T: Real>(params: &PhysParams<T>, tau: T, l_t: T, l_p: T, m: T) -> Option<T> {
    let (_, k_max) = params.k_range();
    let (theta_min, _) = params.theta_range();
    let two = T::lit(2.0);
    let a0 = params.a0 / params.t_ref;
    let heat = a0 - params.b0 - tau * (params.c_f * m).powi(2) / two * (k_max / theta_min + T::one());
    let term = |num: T, l: T| if l > T::zero() { two * num / l } else if num > T::zero() { T::infinity() } else { num };
    let d = term(params.c0 - params.b0, l_p).min(term(heat, l_t)).min(T::lit(0.5));
    (d > T::zero()).then(|| T::one() / (T::one() + d))
}

/// Contraction of the weighted error functional along the recorded iterates
/// of `report`, using the last iterate as the converged state.
pub fn contraction_diagnostic<T: Real>(
    report: &IterationReport<T>,
    mesh: &Mesh<T>,
    params: &PhysParams<T>,
    tau: T,
    l_t: T,
    l_p: T,
) -> Result<ContractionDiagnostic<T>> {
    if report.iterates.len() != report.iterations + 1 {
        return Err(Error::InvalidArgument("contraction diagnostic needs recorded iterates".into()));
    }
    let theoretical = delta(params, tau, l_t, l_p, params.cutoff_m);
    let theoretical_observed = delta(params, tau, l_t, l_p, report.max_darcy_flux);
    if report.iterations < 2 {
        return Ok(ContractionDiagnostic {
            functional: Vec::new(),
            observed: Vec::new(),
            successive: Vec::new(),
            theoretical,
            theoretical_observed,
        });
    }
    let reference = report.iterates.last().unwrap();
    let ops = Operators::new(mesh, params, tau, l_t, l_p)?;
    let half = T::lit(0.5);
    let functional: Vec<T> = report.iterates[..report.iterates.len() - 1]
        .iter()
        .map(|x| {
            let e = x.sub(reference);
            let ep = dot(&e.p, &ops.mass.matvec(&e.p));
            let et = dot(&e.t, &ops.mass.matvec(&e.t));
            let ew = dot(&e.w, &ops.mass_k.matvec(&e.w));
            l_p * half * ep + l_t * half * et + tau * T::lit(0.25) * ew
        })
        .collect();
    let observed = functional.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(ContractionDiagnostic {
        functional,
        observed,
        successive: report.contraction_factors.clone(),
        theoretical,
        theoretical_observed,
    })
}
