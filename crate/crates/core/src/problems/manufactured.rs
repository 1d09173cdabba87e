//! Smooth manufactured solution on the unit square:
//! `T = p = t·B`, `u = t·B (1, 1)` with `B = x(1−x) y(1−y)`.

use std::sync::Arc;

use crate::fem::{ExactFields, FeSpaces, FieldState};
use crate::mesh::Domain;
use crate::model::{PhysParams, Regime};
use crate::scalar::Real;

use super::{clamped_displacement, ProblemSpec, Sources};

/// `B` and its first and second derivatives at `x`.
struct Bump<T> {
    b: T,
    bx: T,
    by: T,
    bxx: T,
    byy: T,
    bxy: T,
}

fn bump<T: Real>(x: [T; 2]) -> Bump<T> {
    let (one, two) = (T::one(), T::lit(2.0));
    let (gx, gy) = (x[0] * (one - x[0]), x[1] * (one - x[1]));
    let (dx, dy) = (one - two * x[0], one - two * x[1]);
    Bump { b: gx * gy, bx: dx * gy, by: gx * dy, bxx: -two * gy, byy: -two * gx, bxy: dx * dy }
}

/// Exact fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedFields<T> {
    pub temperature: T,
    pub pressure: T,
    pub displacement: [T; 2],
    pub heat_flux: [T; 2],
    pub darcy_flux: [T; 2],
}

/// Closed-form solution; fluxes are `r = −Θ∇(T/T_ref)` and `w = −K∇p`.
pub fn manufactured_exact<T: Real>(params: &PhysParams<T>, t: T, x: [T; 2]) -> ManufacturedFields<T> {
    let b = bump(x);
    let v = t * b.b;
    let grad = [t * b.bx, t * b.by];
    let mv = |m: &[[T; 2]; 2], g: [T; 2], s: T| {
        [-(m[0][0] * g[0] + m[0][1] * g[1]) * s, -(m[1][0] * g[0] + m[1][1] * g[1]) * s]
    };
    ManufacturedFields {
        temperature: v,
        pressure: v,
        displacement: [v, v],
        heat_flux: mv(&params.theta, grad, T::one() / params.t_ref),
        darcy_flux: mv(&params.k, grad, T::one()),
    }
}

/// `(z, g, f)` obtained by substituting the exact fields into the balance
/// equations (heat equation in the `T / T_ref` form).
pub fn manufactured_rhs<T: Real>(params: &PhysParams<T>, t: T, x: [T; 2]) -> (T, T, [T; 2]) {
    let b = bump(x);
    let p = params;
    let s = T::one() / p.t_ref;
    let grad = [b.bx, b.by];
    let kgrad = [p.k[0][0] * grad[0] + p.k[0][1] * grad[1], p.k[1][0] * grad[0] + p.k[1][1] * grad[1]];
    let contract = |m: &[[T; 2]; 2]| m[0][0] * b.bxx + (m[0][1] + m[1][0]) * b.bxy + m[1][1] * b.byy;
    let div_b = b.bx + b.by;

    let z = (p.a0 * s - p.b0) * b.b + p.beta * div_b + p.c_f * t * t * s * (kgrad[0] * grad[0] + kgrad[1] * grad[1])
        - t * s * contract(&p.theta);
    let g = (p.c0 - p.b0) * b.b + p.alpha * div_b - t * contract(&p.k);
    let lap = b.bxx + b.byy;
    let coupling = p.alpha + p.thermal_stress_coefficient();
    let f = [
        t * (-p.mu * lap - (p.mu + p.lambda) * (b.bxx + b.bxy) + coupling * b.bx),
        t * (-p.mu * lap - (p.mu + p.lambda) * (b.bxy + b.byy) + coupling * b.by),
    ];
    (z, g, f)
}

/// Exact fields at a fixed time, for error measurement.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedExact<T> {
    pub params: PhysParams<T>,
    pub t: T,
}

impl<T: Real> ExactFields<T> for ManufacturedExact<T> {
    fn temperature(&self, x: [T; 2]) -> T {
        manufactured_exact(&self.params, self.t, x).temperature
    }
    fn heat_flux(&self, x: [T; 2]) -> [T; 2] {
        manufactured_exact(&self.params, self.t, x).heat_flux
    }
    fn pressure(&self, x: [T; 2]) -> T {
        manufactured_exact(&self.params, self.t, x).pressure
    }
    fn darcy_flux(&self, x: [T; 2]) -> [T; 2] {
        manufactured_exact(&self.params, self.t, x).darcy_flux
    }
    fn displacement(&self, x: [T; 2]) -> [T; 2] {
        manufactured_exact(&self.params, self.t, x).displacement
    }
}

/// Unit-square problem for a regime, optionally overriding `c_f`. Zero
/// initial state, `u = 0` on the boundary, homogeneous natural data for `T`
/// and `p`. The mesh resolution is set later through the domain.
pub fn manufactured_problem<T: Real>(regime: Regime, c_f_override: Option<T>) -> ProblemSpec<T> {
    let mut params = regime.params::<T>();
    if let Some(c_f) = c_f_override {
        params.c_f = c_f;
    }
    manufactured_problem_with(params)
}

/// Manufactured problem for arbitrary coefficients.
pub fn manufactured_problem_with<T: Real>(params: PhysParams<T>) -> ProblemSpec<T> {
    let (pz, pg, pf) = (params, params, params);
    ProblemSpec {
        name: "manufactured".into(),
        domain: Domain::unit_square(4),
        params,
        sources: Sources {
            heat: Some(Arc::new(move |x, t| manufactured_rhs(&pz, t, x).0)),
            flow: Some(Arc::new(move |x, t| manufactured_rhs(&pg, t, x).1)),
            body_force: Some(Arc::new(move |x, t| manufactured_rhs(&pf, t, x).2)),
        },
        essential: Arc::new(|mesh, _| clamped_displacement(mesh)),
        initial: Arc::new(|mesh| FieldState::zeros(&FeSpaces::new(mesh))),
    }
}
