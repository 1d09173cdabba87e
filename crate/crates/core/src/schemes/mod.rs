//! The six L-scheme coupling iterations.
//!
//! Every scheme is a block Gauss–Seidel sweep over groups of physics (heat
//! `H = (T, r)`, flow `F = (p, w)`, mechanics `M = u`) applied to the same
//! linearized, stabilized operator. Fields outside the group being solved
//! enter with their latest values; the convective term is built from the
//! Darcy flux available when the heat group is solved.

mod diagnostics;
mod driver;
mod operator;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fem::{Field, FieldState};
use crate::model::{stabilization_from_theory, PhysParams};
use crate::scalar::Real;

pub use diagnostics::{contraction_diagnostic, stopping_check, ContractionDiagnostic};
pub use driver::{run_transient, SchemeSolver, StepLoads, TransientResult};
pub use operator::Operators;

/// Physics solved together in one step of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Physics {
    Heat,
    Flow,
    Mechanics,
}

impl Physics {
    pub fn fields(self) -> &'static [Field] {
        match self {
            Physics::Heat => &[Field::T, Field::R],
            Physics::Flow => &[Field::P, Field::W],
            Physics::Mechanics => &[Field::U],
        }
    }
}

/// Coupling strategy.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Monolithic.
    HFM,
    /// Heat and flow together, then mechanics.
    HF_M,
    /// Heat and mechanics together, then flow.
    HM_F,
    /// Flow and mechanics together, then heat.
    FM_H,
    /// Heat, then flow, then mechanics.
    H_F_M,
    /// Flow, then heat, then mechanics.
    F_H_M,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] =
        [SchemeKind::HFM, SchemeKind::HF_M, SchemeKind::HM_F, SchemeKind::FM_H, SchemeKind::H_F_M, SchemeKind::F_H_M];

    /// Groups in solve order.
    pub fn groups(self) -> Vec<Vec<Physics>> {
        use Physics::*;
        match self {
            SchemeKind::HFM => vec![vec![Heat, Flow, Mechanics]],
            SchemeKind::HF_M => vec![vec![Heat, Flow], vec![Mechanics]],
            SchemeKind::HM_F => vec![vec![Heat, Mechanics], vec![Flow]],
            SchemeKind::FM_H => vec![vec![Flow, Mechanics], vec![Heat]],
            SchemeKind::H_F_M => vec![vec![Heat], vec![Flow], vec![Mechanics]],
            SchemeKind::F_H_M => vec![vec![Flow], vec![Heat], vec![Mechanics]],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::HFM => "HFM",
            SchemeKind::HF_M => "HF-M",
            SchemeKind::HM_F => "HM-F",
            SchemeKind::FM_H => "FM-H",
            SchemeKind::H_F_M => "H-F-M",
            SchemeKind::F_H_M => "F-H-M",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    /// Accepts the dashed labels (`HF-M`) and underscores (`HF_M`), any case.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.label() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme `{}`", s.trim())))
    }
}

/// Choice of `(L_T, L_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilizationMode<T> {
    /// Equality in the fixed-stress bound.
    Theory,
    /// `L_T = L_p = 0`.
    None,
    Custom { l_t: T, l_p: T },
    /// Theory values times a factor.
    TheoryScaled(T),
}

impl<T: Real> StabilizationMode<T> {
    pub fn resolve(&self, params: &PhysParams<T>) -> Result<(T, T)> {
        match *self {
            StabilizationMode::Theory => stabilization_from_theory(params),
            StabilizationMode::None => Ok((T::zero(), T::zero())),
            StabilizationMode::TheoryScaled(f) => {
                if !(f >= T::zero()) {
                    return Err(Error::InvalidArgument(format!("stabilization factor must be non-negative, got {f}")));
                }
                let (l_t, l_p) = stabilization_from_theory(params)?;
                Ok((l_t * f, l_p * f))
            }
            StabilizationMode::Custom { l_t, l_p } => {
                if !(l_t >= T::zero()) || !(l_p >= T::zero()) {
                    return Err(Error::InvalidArgument(format!("stabilization must be non-negative, got {l_t}:{l_p}")));
                }
                Ok((l_t, l_p))
            }
        }
    }
}

impl<T: Real> FromStr for StabilizationMode<T> {
    type Err = Error;

    /// `theory`, `none`, `theory*F` or `LT:LP`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "theory" => return Ok(Self::Theory),
            "none" => return Ok(Self::None),
            _ => {}
        }
        let bad = || Error::InvalidArgument(format!("stabilization must be theory, none, theory*F or LT:LP, got `{s}`"));
        if let Some(f) = s.strip_prefix("theory*") {
            let f = f.trim().parse::<f64>().map_err(|_| bad())?;
            if !(f >= 0.0) {
                return Err(bad());
            }
            return Ok(Self::TheoryScaled(T::lit(f)));
        }
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let (l_t, l_p) = (T::lit(parse(a)?), T::lit(parse(b)?));
        if !(l_t >= T::zero()) || !(l_p >= T::zero()) {
            return Err(bad());
        }
        Ok(Self::Custom { l_t, l_p })
    }
}

impl<T: Real> fmt::Display for StabilizationMode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Theory => f.write_str("theory"),
            Self::None => f.write_str("none"),
            Self::Custom { l_t, l_p } => write!(f, "{l_t}:{l_p}"),
            Self::TheoryScaled(k) => write!(f, "theory*{k}"),
        }
    }
}

/// Norm used by the stopping criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopNorm {
    /// Euclidean norm of the stacked dof vector.
    Euclidean,
    /// Square root of the summed squared L2 norms of the five fields.
    #[default]
    L2,
}

impl FromStr for StopNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" | "dof" => Ok(Self::Euclidean),
            "l2" => Ok(Self::L2),
            other => Err(Error::InvalidArgument(format!("unknown stopping norm `{other}`"))),
        }
    }
}

impl fmt::Display for StopNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Euclidean => "euclidean",
            Self::L2 => "l2",
        })
    }
}

/// First iterate of every time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialGuess {
    /// Converged state of the previous step.
    #[default]
    Previous,
    /// Zero, except for prescribed dofs.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub stabilization: StabilizationMode<T>,
    pub atol: T,
    pub rtol: T,
    pub max_iter: usize,
    pub norm: StopNorm,
    pub initial_guess: InitialGuess,
    /// Keep every iterate in the reports (needed by the contraction diagnostic).
    pub record_iterates: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            stabilization: StabilizationMode::Theory,
            atol: T::lit(1e-6),
            rtol: T::lit(1e-6),
            max_iter: 100,
            norm: StopNorm::L2,
            initial_guess: InitialGuess::Previous,
            record_iterates: false,
        }
    }
}

/// Outcome of the iteration at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport<T> {
    pub step: usize,
    pub time: T,
    pub iterations: usize,
    pub converged: bool,
    /// Left-hand side of the stopping test per iteration.
    pub residual_history: Vec<T>,
    /// Ratios of successive stopping-test left-hand sides.
    pub contraction_factors: Vec<T>,
    /// Initial guess followed by every iterate, if recorded.
    pub iterates: Vec<FieldState<T>>,
    /// Largest centroid magnitudes of the converged heat and Darcy fluxes.
    pub max_heat_flux: T,
    pub max_darcy_flux: T,
    /// A converged flux exceeded the cut-off constant somewhere.
    pub cutoff_exceeded: bool,
}
