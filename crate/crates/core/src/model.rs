//! Physical coefficients, content functionals, stabilization parameters and
//! the parameter regimes of the manufactured test.
//!
//! The algebraic routines only need field operations, so they accept exact
//! rationals as well as floats.

use std::fmt;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, Num};

use crate::error::{Error, Result};

/// All coefficients of the coupled heat, flow and mechanics equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams<T> {
    /// Effective thermal capacity.
    pub a0: T,
    /// Thermal dilation coefficient.
    pub b0: T,
    /// Constrained specific storage.
    pub c0: T,
    /// Volumetric heat capacity of the fluid.
    pub c_f: T,
    /// Biot–Willis constant.
    pub alpha: T,
    /// Thermal stress coefficient.
    pub beta: T,
    pub mu: T,
    pub lambda: T,
    /// Permeability over viscosity.
    pub k: [[T; 2]; 2],
    /// Effective thermal conductivity.
    pub theta: [[T; 2]; 2],
    /// Reference temperature; the heat equation sees `T / t_ref`.
    pub t_ref: T,
    pub cutoff_m: T,
    pub d: usize,
    /// Divide the thermal stress `βT` in the momentum balance by `t_ref` too.
    pub thermal_stress_scaled: bool,
}

fn small_int<T: Num>(n: usize) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

impl<T: Num + Copy + PartialOrd + fmt::Debug> PhysParams<T> {
    /// Checks positivity of the scalar coefficients, `c0 > b0`, `a0 > b0`, and
    /// that both tensors are symmetric positive definite.
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        let positive = [("a0", self.a0), ("c0", self.c0), ("mu", self.mu), ("t_ref", self.t_ref), ("cutoff_m", self.cutoff_m)];
        for (name, v) in positive {
            if !(v > z) {
                return Err(Error::InvalidArgument(format!("{name} must be strictly positive, got {v:?}")));
            }
        }
        // coupling coefficients may vanish
        let non_negative =
            [("b0", self.b0), ("c_f", self.c_f), ("alpha", self.alpha), ("beta", self.beta), ("lambda", self.lambda)];
        for (name, v) in non_negative {
            if !(v >= z) {
                return Err(Error::InvalidArgument(format!("{name} must be non-negative, got {v:?}")));
            }
        }
        if !(self.c0 - self.b0 > z) || !(self.a0 - self.b0 > z) {
            return Err(Error::InvalidArgument("need c0 > b0 and a0 > b0".into()));
        }
        for (name, m) in [("K", self.k), ("Theta", self.theta)] {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if m[0][1] != m[1][0] || !(m[0][0] > z) || !(det > z) {
                return Err(Error::NotSpd(format!("{name} = {m:?}")));
            }
        }
        if self.d != 2 {
            return Err(Error::InvalidArgument(format!("only d = 2 is supported, got {}", self.d)));
        }
        Ok(())
    }

    /// `2μ/d + λ`
    pub fn bulk_term(&self) -> T {
        small_int::<T>(2) * self.mu / small_int::<T>(self.d) + self.lambda
    }

    /// Factor on `βT` in the momentum balance.
    pub fn thermal_stress_coefficient(&self) -> T {
        if self.thermal_stress_scaled {
            self.beta / self.t_ref
        } else {
            self.beta
        }
    }
}

impl<T: Float> PhysParams<T> {
    /// Smallest and largest eigenvalue of a symmetric 2×2 tensor.
    pub fn eig_range(m: &[[T; 2]; 2]) -> (T, T) {
        let two = T::one() + T::one();
        let mean = (m[0][0] + m[1][1]) / two;
        let rad = (((m[0][0] - m[1][1]) / two).powi(2) + m[0][1] * m[1][0]).sqrt();
        (mean - rad, mean + rad)
    }

    /// `(k_m, k_M)`
    pub fn k_range(&self) -> (T, T) {
        Self::eig_range(&self.k)
    }

    /// `(θ_m, θ_M)`
    pub fn theta_range(&self) -> (T, T) {
        Self::eig_range(&self.theta)
    }
}

/// `ψ = a0 T − b0 p + β div u` and `φ = c0 p − b0 T + α div u`.
pub fn content_functionals<T: Num + Copy>(params: &PhysParams<T>, p: T, temp: T, div_u: T) -> (T, T) {
    let psi = params.a0 * temp - params.b0 * p + params.beta * div_u;
    let phi = params.c0 * p - params.b0 * temp + params.alpha * div_u;
    (psi, phi)
}

/// Stabilization parameters at equality in the fixed-stress bound:
/// `L_T = 4β² / (3(2μ/d + λ))` and `L_p = 4α² / (3(2μ/d + λ))`.
pub fn stabilization_from_theory<T: Num + Copy + PartialOrd + fmt::Debug>(params: &PhysParams<T>) -> Result<(T, T)> {
    if params.d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let denom = small_int::<T>(3) * params.bulk_term();
    if denom == T::zero() {
        return Err(Error::InvalidArgument("2 mu / d + lambda vanishes".into()));
    }
    let four = small_int::<T>(4);
    Ok((four * params.beta * params.beta / denom, four * params.alpha * params.alpha / denom))
}

/// Largest time step for which the monolithic iteration is a contraction,
/// `2(a0 − b0) / (c_f² M² (k_M/θ_m + 1) − θ_m / (4 c_Ω))`, or `+∞` when the
/// denominator is not positive. `c_omega` is the (generally unknown) Thomas
/// constant; pass `T::infinity()` to drop its term.
pub fn time_step_bound<T: Float + fmt::Debug>(params: &PhysParams<T>, c_omega: T) -> T {
    let (_, k_max) = params.k_range();
    let (theta_min, _) = params.theta_range();
    let four = T::from(4.0).unwrap();
    let two = T::from(2.0).unwrap();
    let mm = params.c_f * params.cutoff_m;
    let denom = mm * mm * (k_max / theta_min + T::one()) - theta_min / (four * c_omega);
    if denom <= T::zero() {
        T::infinity()
    } else {
        two * (params.a0 - params.b0) / denom
    }
}

/// Denominator used for `λ` in [`lame_from_engineering`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LameConvention {
    /// `λ = Eν / ((1+ν)(1+2ν))`
    #[default]
    OnePlusTwoNu,
    /// `λ = Eν / ((1+ν)(1−2ν))`
    Standard,
}

impl FromStr for LameConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1+2nu" => Ok(Self::OnePlusTwoNu),
            "standard" | "1-2nu" => Ok(Self::Standard),
            other => Err(Error::InvalidArgument(format!("unknown lame convention `{other}`"))),
        }
    }
}

impl fmt::Display for LameConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OnePlusTwoNu => "1+2nu",
            Self::Standard => "standard",
        })
    }
}

/// `(μ, λ)` from Young's modulus and Poisson's ratio.
pub fn lame_from_engineering<T: Num + Copy + PartialOrd + fmt::Debug>(e: T, nu: T, convention: LameConvention) -> Result<(T, T)> {
    let one = T::one();
    let two = one + one;
    let half = one / two;
    if !(e > T::zero()) {
        return Err(Error::InvalidArgument(format!("Young's modulus must be positive, got {e:?}")));
    }
    if !(nu > T::zero() - one) || !(nu < half) {
        return Err(Error::InvalidArgument(format!("Poisson ratio must lie in (-1, 0.5), got {nu:?}")));
    }
    let mu = e / (two * (one + nu));
    let second = match convention {
        LameConvention::OnePlusTwoNu => one + two * nu,
        LameConvention::Standard => one - two * nu,
    };
    Ok((mu, e * nu / ((one + nu) * second)))
}

/// Coupling regimes of the manufactured test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    PR1,
    PR2,
    PR3,
    PR4,
    PR5,
}

impl Regime {
    pub const ALL: [Regime; 5] = [Regime::PR1, Regime::PR2, Regime::PR3, Regime::PR4, Regime::PR5];

    /// `(α, β, b0)` in tenths.
    fn tenths(self) -> (i64, i64, i64) {
        match self {
            Regime::PR1 => (10, 10, 10),
            Regime::PR2 => (1, 1, 10),
            Regime::PR3 => (1, 10, 1),
            Regime::PR4 => (10, 1, 1),
            Regime::PR5 => (1, 1, 1),
        }
    }

    /// Dimensionless parameter set: `K = Θ = 0.1 I`, `μ = λ = c_f = 0.1`,
    /// `a0 = c0 = 2 b0`, `T_ref = 1`, cut-off `M = 1e6`.
    pub fn params<T: Num + Copy + FromPrimitive>(self) -> PhysParams<T> {
        let tenth = |n: i64| T::from_i64(n).unwrap() / T::from_i64(10).unwrap();
        let (alpha, beta, b0) = self.tenths();
        let (alpha, beta, b0) = (tenth(alpha), tenth(beta), tenth(b0));
        let two = T::one() + T::one();
        let k = [[tenth(1), T::zero()], [T::zero(), tenth(1)]];
        PhysParams {
            a0: two * b0,
            b0,
            c0: two * b0,
            c_f: tenth(1),
            alpha,
            beta,
            mu: tenth(1),
            lambda: tenth(1),
            k,
            theta: k,
            t_ref: T::one(),
            cutoff_m: T::from_i64(1_000_000).unwrap(),
            d: 2,
            thermal_stress_scaled: false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::PR1 => "PR1",
            Regime::PR2 => "PR2",
            Regime::PR3 => "PR3",
            Regime::PR4 => "PR4",
            Regime::PR5 => "PR5",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown regime `{}`", s.trim())))
    }
}

/// Parameter set of a named regime.
pub fn regime<T: Num + Copy + FromPrimitive>(name: &str) -> Result<PhysParams<T>> {
    Ok(name.parse::<Regime>()?.params())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn functionals_by_substitution() {
        let pr1 = Regime::PR1.params::<Q>();
        assert_eq!(content_functionals(&pr1, q(0, 1), q(0, 1), q(0, 1)), (q(0, 1), q(0, 1)));
        assert_eq!(content_functionals(&pr1, q(1, 1), q(1, 1), q(1, 1)), (q(2, 1), q(2, 1)));
        let pr5 = Regime::PR5.params::<Q>();
        assert_eq!(content_functionals(&pr5, q(1, 1), q(0, 1), q(0, 1)), (q(-1, 10), q(1, 5)));
    }

    #[test]
    fn theory_stabilization_is_exact() {
        assert_eq!(stabilization_from_theory(&Regime::PR1.params::<Q>()).unwrap(), (q(20, 3), q(20, 3)));
        assert_eq!(stabilization_from_theory(&Regime::PR5.params::<Q>()).unwrap(), (q(1, 15), q(1, 15)));
        let mut p = Regime::PR3.params::<Q>();
        assert_eq!(stabilization_from_theory(&p).unwrap(), (q(20, 3), q(1, 15)));
        p.alpha = q(0, 1);
        p.beta = q(0, 1);
        assert_eq!(stabilization_from_theory(&p).unwrap(), (q(0, 1), q(0, 1)));
        p.mu = q(0, 1);
        p.lambda = q(0, 1);
        assert!(stabilization_from_theory(&p).is_err());
    }

    #[test]
    fn stabilization_is_quadratic_in_coupling() {
        let mut p = Regime::PR2.params::<Q>();
        let (_, lp) = stabilization_from_theory(&p).unwrap();
        p.alpha = p.alpha * q(3, 1);
        assert_eq!(stabilization_from_theory(&p).unwrap().1, lp * q(9, 1));
    }

    #[test]
    fn regimes_match_table() {
        let p = regime::<f64>("PR1").unwrap();
        assert_eq!((p.alpha, p.beta, p.b0, p.a0, p.c0), (1.0, 1.0, 1.0, 2.0, 2.0));
        let p = regime::<f64>("pr4").unwrap();
        assert_eq!((p.alpha, p.beta, p.b0), (1.0, 0.1, 0.1));
        let p = regime::<f64>("PR5").unwrap();
        assert_eq!((p.alpha, p.beta, p.b0), (0.1, 0.1, 0.1));
        assert!(regime::<f64>("PR6").is_err());
        for r in Regime::ALL {
            let p = r.params::<Q>();
            assert!(p.validate().is_ok());
            assert_eq!(p.c0 - p.b0, p.b0);
            assert_eq!(p.a0 - p.b0, p.b0);
        }
    }

    #[test]
    fn time_step_bound_examples() {
        let mut p = Regime::PR5.params::<f64>();
        p.cutoff_m = 1.0;
        let tau = time_step_bound(&p, 1e300);
        assert!((tau - 10.0).abs() < 1e-9, "{tau}");
        p.a0 = 0.3;
        assert!((time_step_bound(&p, 1e300) - 20.0).abs() < 1e-9);
        // tiny c_f M: the Thomas term dominates and there is no restriction
        p.c_f = 1e-6;
        assert!(time_step_bound(&p, 1.0).is_infinite());
        // monotone decreasing in M on the finite branch
        let mut p = Regime::PR5.params::<f64>();
        p.cutoff_m = 1.0;
        let a = time_step_bound(&p, 1e300);
        p.cutoff_m = 2.0;
        assert!(time_step_bound(&p, 1e300) < a);
    }

    #[test]
    fn lame_conversions() {
        let (mu, lambda) = lame_from_engineering(5.94e9, 0.2, LameConvention::OnePlusTwoNu).unwrap();
        assert!((mu - 2.475e9).abs() < 1.0);
        assert!((lambda - 5.94e9 * 0.2 / (1.2 * 1.4)).abs() < 1.0);
        assert!((lambda - 7.0714e8).abs() / 7.0714e8 < 1e-4);
        let (_, ls) = lame_from_engineering(5.94e9, 0.2, LameConvention::Standard).unwrap();
        assert!((ls - 1.65e9).abs() < 1.0);
        assert_eq!(lame_from_engineering(q(2, 1), q(0, 1), LameConvention::OnePlusTwoNu).unwrap(), (q(1, 1), q(0, 1)));
        assert!(lame_from_engineering(1.0, 0.5, LameConvention::OnePlusTwoNu).is_err());
        assert!(lame_from_engineering(1.0, -1.0, LameConvention::OnePlusTwoNu).is_err());
        assert!(lame_from_engineering(-1.0, 0.2, LameConvention::OnePlusTwoNu).is_err());
        assert_eq!("standard".parse::<LameConvention>().unwrap(), LameConvention::Standard);
    }

    #[test]
    fn validation_rejects_a4_violation() {
        let mut p = Regime::PR1.params::<f64>();
        p.a0 = 1.0;
        assert!(p.validate().is_err());
        let mut p = Regime::PR1.params::<f64>();
        p.k = [[0.1, 0.2], [0.2, 0.1]];
        assert!(p.validate().is_err());
    }
}
