//! L2 error measurement against closed-form fields.

use crate::mesh::Mesh;
use crate::scalar::Real;

use super::assembly::{p1_evaluate, rt0_eval_unchecked};
use super::quadrature::TriangleRule;
use super::state::FieldState;

/// Closed-form reference fields.
pub trait ExactFields<T> {
    fn temperature(&self, x: [T; 2]) -> T;
    fn heat_flux(&self, x: [T; 2]) -> [T; 2];
    fn pressure(&self, x: [T; 2]) -> T;
    fn darcy_flux(&self, x: [T; 2]) -> [T; 2];
    fn displacement(&self, x: [T; 2]) -> [T; 2];
}

/// All fields identically zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFields;

impl<T: Real> ExactFields<T> for ZeroFields {
    fn temperature(&self, _: [T; 2]) -> T {
        T::zero()
    }
    fn heat_flux(&self, _: [T; 2]) -> [T; 2] {
        [T::zero(); 2]
    }
    fn pressure(&self, _: [T; 2]) -> T {
        T::zero()
    }
    fn darcy_flux(&self, _: [T; 2]) -> [T; 2] {
        [T::zero(); 2]
    }
    fn displacement(&self, _: [T; 2]) -> [T; 2] {
        [T::zero(); 2]
    }
}

/// `‖numeric − exact‖_{L²(Ω)}` per field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct L2Errors<T> {
    pub t: T,
    pub r: T,
    pub p: T,
    pub w: T,
    pub u: T,
}

impl<T: Copy> L2Errors<T> {
    /// `[e_T, e_r, e_p, e_w, e_u]`
    pub fn as_array(&self) -> [T; 5] {
        [self.t, self.r, self.p, self.w, self.u]
    }
}

/// Degree-4 quadrature of the squared pointwise errors of every field.
pub fn l2_errors<T: Real, E: ExactFields<T> + ?Sized>(mesh: &Mesh<T>, state: &FieldState<T>, exact: &E) -> L2Errors<T> {
    let rule = TriangleRule::degree4();
    let mut acc = [T::zero(); 5];
    let sq2 = |a: [T; 2], b: [T; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    for t in 0..mesh.n_triangles() {
        let area = mesh.area(t);
        for (x, w) in rule.map(&mesh.corners(t)) {
            let wa = w * area;
            acc[0] += wa * (state.t[t] - exact.temperature(x)).powi(2);
            acc[1] += wa * sq2(rt0_eval_unchecked(mesh, &state.r, t, x), exact.heat_flux(x));
            acc[2] += wa * (state.p[t] - exact.pressure(x)).powi(2);
            acc[3] += wa * sq2(rt0_eval_unchecked(mesh, &state.w, t, x), exact.darcy_flux(x));
            acc[4] += wa * sq2(p1_evaluate(mesh, &state.u, t, x), exact.displacement(x));
        }
    }
    let [t, r, p, w, u] = acc.map(|v| v.sqrt());
    L2Errors { t, r, p, w, u }
}
