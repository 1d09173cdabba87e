//! Mandel's consolidation problem on the quarter domain `[0, a] × [0, b]`,
//! extended with the heat equation, and the isothermal series solution used
//! as its oracle.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{FeSpaces, Field, FieldState};
use crate::mesh::{boundary_edges, Domain, Side};
use crate::model::{lame_from_engineering, LameConvention, PhysParams};
use crate::scalar::Real;

use super::{EssentialValues, ProblemSpec, Sources};

/// Geometry, load and material data (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MandelConfig {
    pub a: f64,
    pub b: f64,
    /// Compressive force per unit length.
    pub force: f64,
    pub young: f64,
    pub poisson: f64,
    pub c0: f64,
    pub alpha: f64,
    pub fluid_viscosity: f64,
    /// Intrinsic permeability (isotropic).
    pub permeability: f64,
    /// Thermal conductivity (isotropic).
    pub conductivity: f64,
    pub b0: f64,
    pub beta: f64,
    pub a0: f64,
    pub t_ref: f64,
    pub c_f: f64,
    pub tau: f64,
    /// Constant volumetric heat source.
    pub heat_source: f64,
    pub cutoff_m: f64,
    pub lame: LameConvention,
    pub thermal_stress_scaled: bool,
    /// Series terms used for boundary data and initial state.
    pub n_terms: usize,
}

impl Default for MandelConfig {
    fn default() -> Self {
        Self {
            a: 100.0,
            b: 10.0,
            force: 2e8,
            young: 5.94e9,
            poisson: 0.2,
            c0: 6.06e-11,
            alpha: 1.0,
            fluid_viscosity: 1e-3,
            permeability: 9.87e-14,
            conductivity: 1.7,
            b0: 3.03e-11,
            beta: 9.9e6,
            a0: 0.92e3,
            t_ref: 298.15,
            c_f: 4.18e6,
            tau: 10.0,
            heat_source: 0.0,
            cutoff_m: 1e3,
            lame: LameConvention::Standard,
            thermal_stress_scaled: false,
            n_terms: 200,
        }
    }
}

impl MandelConfig {
    pub fn params<T: Real>(&self) -> Result<PhysParams<T>> {
        let (mu, lambda) = lame_from_engineering(self.young, self.poisson, self.lame)?;
        let k = self.permeability / self.fluid_viscosity;
        let iso = |v: f64| [[T::lit(v), T::zero()], [T::zero(), T::lit(v)]];
        Ok(PhysParams {
            a0: T::lit(self.a0),
            b0: T::lit(self.b0),
            c0: T::lit(self.c0),
            c_f: T::lit(self.c_f),
            alpha: T::lit(self.alpha),
            beta: T::lit(self.beta),
            mu: T::lit(mu),
            lambda: T::lit(lambda),
            k: iso(k),
            theta: iso(self.conductivity),
            t_ref: T::lit(self.t_ref),
            cutoff_m: T::lit(self.cutoff_m),
            d: 2,
            thermal_stress_scaled: self.thermal_stress_scaled,
        })
    }
}

/// Derived poroelastic constants of the isothermal problem. Bulk moduli are
/// the three-dimensional ones, as in the plane-strain series solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MandelConstants {
    pub shear: f64,
    pub nu: f64,
    pub nu_u: f64,
    pub skempton: f64,
    pub bulk_drained: f64,
    pub bulk_undrained: f64,
    /// Consolidation coefficient.
    pub consolidation: f64,
}

impl MandelConstants {
    pub fn from_params(p: &PhysParams<f64>) -> Self {
        let (mu, lambda) = (p.mu, p.lambda);
        let kappa = p.k[0][0];
        let nu = lambda / (2.0 * (lambda + mu));
        let bulk_drained = lambda + 2.0 * mu / 3.0;
        let biot_modulus = 1.0 / p.c0;
        let bulk_undrained = bulk_drained + p.alpha * p.alpha * biot_modulus;
        let skempton = p.alpha * biot_modulus / bulk_undrained;
        let nu_u = (3.0 * bulk_undrained - 2.0 * mu) / (2.0 * (3.0 * bulk_undrained + mu));
        let consolidation = kappa * biot_modulus * (bulk_drained + 4.0 * mu / 3.0) / (bulk_undrained + 4.0 * mu / 3.0);
        Self { shear: mu, nu, nu_u, skempton, bulk_drained, bulk_undrained, consolidation }
    }

    /// Slope `C` in `tan α = C α`.
    pub fn root_slope(&self) -> f64 {
        (1.0 - self.nu) / (self.nu_u - self.nu)
    }
}

/// First `n` positive roots of `tan α = C α` for `C > 1`. Root `k` lies in
/// `((k−1)π, (k−½)π)`, where `sin α − C α cos α` changes sign.
pub fn mandel_roots(slope: f64, n: usize) -> Result<Vec<f64>> {
    if !(slope > 1.0) || !slope.is_finite() {
        return Err(Error::RootFinding(format!("slope must exceed 1, got {slope}")));
    }
    let g = |x: f64| x.sin() - slope * x * x.cos();
    let mut roots = Vec::with_capacity(n);
    for k in 1..=n {
        let mut lo = if k == 1 { 1e-8 } else { (k as f64 - 1.0) * PI };
        let mut hi = (k as f64 - 0.5) * PI;
        let (glo, ghi) = (g(lo), g(hi));
        if glo.signum() == ghi.signum() {
            return Err(Error::RootFinding(format!("no sign change in bracket {k}")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid).signum() == glo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// One evaluation of the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MandelSample {
    pub p: f64,
    pub u1: f64,
    pub u2: f64,
    /// Bound on the magnitude of the omitted pressure terms.
    pub tail_bound: f64,
}

/// Isothermal series solution with precomputed roots.
#[derive(Debug, Clone)]
pub struct MandelAnalytic {
    pub constants: MandelConstants,
    pub a: f64,
    pub force: f64,
    pub roots: Vec<f64>,
}

impl MandelAnalytic {
    pub fn new(config: &MandelConfig, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::InvalidArgument("need at least one series term".into()));
        }
        let constants = MandelConstants::from_params(&config.params::<f64>()?);
        let roots = mandel_roots(constants.root_slope(), n_terms)?;
        Ok(Self { constants, a: config.a, force: config.force, roots })
    }

    /// Undrained response just after loading.
    pub fn undrained(&self, x: [f64; 2]) -> (f64, f64, f64) {
        let c = &self.constants;
        let (f, a, g) = (self.force, self.a, c.shear);
        let p = f * c.skempton * (1.0 + c.nu_u) / (3.0 * a);
        (p, f * c.nu_u * x[0] / (2.0 * g * a), -f * (1.0 - c.nu_u) * x[1] / (2.0 * g * a))
    }

    pub fn eval(&self, x: [f64; 2], t: f64) -> Result<MandelSample> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("series needs t > 0, got {t}")));
        }
        let c = &self.constants;
        let (f, a, g) = (self.force, self.a, c.shear);
        let rate = c.consolidation * t / (a * a);
        let (mut sp, mut sx1, mut sx2, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for &al in &self.roots {
            let e = (-al * al * rate).exp();
            let (s, co) = al.sin_cos();
            let den = al - s * co;
            sp += s / den * ((al * x[0] / a).cos() - co) * e;
            sx1 += s * co / den * e;
            sx2 += co / den * (al * x[0] / a).sin() * e;
            sy += s * co / den * e;
        }
        let p_amp = 2.0 * f * c.skempton * (1.0 + c.nu_u) / (3.0 * a);
        let p = p_amp * sp;
        let u1 = (f * c.nu / (2.0 * g * a) - f * c.nu_u / (g * a) * sx1) * x[0] + f / g * sx2;
        let u2 = (-f * (1.0 - c.nu) / (2.0 * g * a) + f * (1.0 - c.nu_u) / (g * a) * sy) * x[1];

        // |sin α / (α − sin α cos α)| · |cos − cos| ≤ 2 / (α − 1) with α_k > (k−1)π
        let n = self.roots.len();
        let tail: f64 = (n + 1..n + 2000)
            .map(|k| {
                let al = (k as f64 - 1.0) * PI;
                2.0 / (al - 1.0) * (-al * al * rate).exp()
            })
            .sum();
        Ok(MandelSample { p, u1, u2, tail_bound: p_amp * tail })
    }
}

/// Series solution at `x` and `t > 0` with `n_terms` roots.
pub fn mandel_analytic_isothermal(config: &MandelConfig, x: [f64; 2], t: f64, n_terms: usize) -> Result<MandelSample> {
    MandelAnalytic::new(config, n_terms)?.eval(x, t)
}

/// Quarter-domain problem: impermeable and adiabatic on the left, bottom and
/// top sides, drained (`p = T = 0`, natural) on the right, `u1 = 0` on the
/// left, `u2 = 0` on the bottom, and `u2` on the top taken from the series.
/// The initial state is the undrained response with `T = 0`.
pub fn mandel_problem<T: Real>(config: MandelConfig, nx: usize, ny: usize) -> Result<ProblemSpec<T>> {
    let params = config.params::<T>()?;
    let analytic = Arc::new(MandelAnalytic::new(&config, config.n_terms)?);
    let b = config.b;

    let top = analytic.clone();
    let essential = Arc::new(move |mesh: &crate::mesh::Mesh<T>, t: T| {
        let mut ev = EssentialValues::default();
        for side in [Side::Left, Side::Bottom, Side::Top] {
            for e in boundary_edges(mesh, side) {
                ev.push(Field::R, e, T::zero());
                ev.push(Field::W, e, T::zero());
            }
        }
        let t = t.as_f64();
        let u_top = if t > 0.0 {
            top.eval([0.0, b], t).map(|s| s.u2).unwrap_or(f64::NAN)
        } else {
            top.undrained([0.0, b]).2
        };
        let tol = 1e-9 * b;
        for (v, x) in mesh.vertices.iter().enumerate() {
            let (x0, x1) = (x[0].as_f64(), x[1].as_f64());
            if x0.abs() <= tol {
                ev.push(Field::U, 2 * v, T::zero());
            }
            if x1.abs() <= tol {
                ev.push(Field::U, 2 * v + 1, T::zero());
            } else if (x1 - b).abs() <= tol {
                ev.push(Field::U, 2 * v + 1, T::lit(u_top));
            }
        }
        ev
    });

    let init = analytic;
    let initial = Arc::new(move |mesh: &crate::mesh::Mesh<T>| {
        let mut s = FieldState::zeros(&FeSpaces::new(mesh));
        let (p0, _, _) = init.undrained([0.0, 0.0]);
        s.p.iter_mut().for_each(|p| *p = T::lit(p0));
        for (v, x) in mesh.vertices.iter().enumerate() {
            let (_, u1, u2) = init.undrained([x[0].as_f64(), x[1].as_f64()]);
            s.u[2 * v] = T::lit(u1);
            s.u[2 * v + 1] = T::lit(u2);
        }
        s
    });

    let z = T::lit(config.heat_source);
    let heat = (config.heat_source != 0.0).then(|| Arc::new(move |_: [T; 2], _: T| z) as super::ScalarSource<T>);
    Ok(ProblemSpec {
        name: "mandel".into(),
        domain: Domain::new(T::lit(config.a), T::lit(config.b), nx, ny),
        params,
        sources: Sources { heat, flow: None, body_force: None },
        essential,
        initial,
    })
}
