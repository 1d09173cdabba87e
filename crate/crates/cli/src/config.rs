//! Flat `key = value` run configuration with optional sweep axes.
//!
//! ```text
//! # comment
//! problem = manufactured
//! regime = PR1
//! h = 1/16
//! sweep.scheme = all
//! sweep.mesh = 4, 8, 16
//! ```
//!
//! Keys accept `-` or `_`. Sweep axes expand as a cartesian product, the
//! first sweep line varying slowest.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thermoporo::model::{LameConvention, Regime};
use thermoporo::schemes::{InitialGuess, StopNorm};
use thermoporo::{SchemeKind, StabilizationMode};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProblemKind {
    #[default]
    Manufactured,
    Mandel,
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "manufactured" => Ok(Self::Manufactured),
            "mandel" => Ok(Self::Mandel),
            other => Err(format!("unknown problem `{other}` (expected manufactured or mandel)")),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Manufactured => "manufactured",
            Self::Mandel => "mandel",
        })
    }
}

/// Quantities that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Mesh,
    Regime,
    Scheme,
    Stabilization,
    HeatSource,
    CouplingCf,
}

impl SweepAxis {
    /// Config key written for each value of the axis.
    fn key(self) -> &'static str {
        match self {
            Self::Mesh => "mesh",
            Self::Regime => "regime",
            Self::Scheme => "scheme",
            Self::Stabilization => "stabilization",
            Self::HeatSource => "heat_source",
            Self::CouplingCf => "cf",
        }
    }

    /// `all` shorthand, where it makes sense.
    fn all_values(self) -> Option<Vec<String>> {
        match self {
            Self::Regime => Some(Regime::ALL.iter().map(|r| r.to_string()).collect()),
            Self::Scheme => Some(SchemeKind::ALL.iter().map(|s| s.to_string()).collect()),
            _ => None,
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match normalize_key(s).as_str() {
            "mesh" | "h" => Ok(Self::Mesh),
            "regime" => Ok(Self::Regime),
            "scheme" => Ok(Self::Scheme),
            "stabilization" | "stab" => Ok(Self::Stabilization),
            "heat_source" | "z" => Ok(Self::HeatSource),
            "cf" => Ok(Self::CouplingCf),
            other => Err(format!("unknown sweep axis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<String>,
}

/// Elements along x and y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshSize {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for MeshSize {
    type Err = String;

    /// `16`, `16x8`, `1/16` or `0.0625` (the last two as `h`).
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("invalid mesh `{s}` (expected N, NxM, 1/N or h)");
        if let Some((a, b)) = s.split_once(['x', 'X']) {
            let nx = a.trim().parse::<usize>().map_err(|_| bad())?;
            let ny = b.trim().parse::<usize>().map_err(|_| bad())?;
            return positive(nx, ny).ok_or_else(bad);
        }
        if let Some((a, b)) = s.split_once('/') {
            if a.trim() != "1" {
                return Err(bad());
            }
            let n = b.trim().parse::<usize>().map_err(|_| bad())?;
            return positive(n, n).ok_or_else(bad);
        }
        if let Ok(n) = s.parse::<usize>() {
            return positive(n, n).ok_or_else(bad);
        }
        let h = s.parse::<f64>().map_err(|_| bad())?;
        if !(h > 0.0 && h <= 1.0) {
            return Err(bad());
        }
        let n = (1.0 / h).round() as usize;
        if ((n as f64) * h - 1.0).abs() > 1e-9 {
            return Err(format!("h = {h} does not divide the unit interval"));
        }
        positive(n, n).ok_or_else(bad)
    }
}

fn positive(nx: usize, ny: usize) -> Option<MeshSize> {
    (nx > 0 && ny > 0).then_some(MeshSize { nx, ny })
}

impl fmt::Display for MeshSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nx == self.ny {
            write!(f, "{}", self.nx)
        } else {
            write!(f, "{}x{}", self.nx, self.ny)
        }
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub scheme: SchemeKind,
    /// Manufactured problem only.
    pub regime: Regime,
    pub mesh: MeshSize,
    /// Defaults: 1 (manufactured), 10 s (Mandel).
    pub tau: Option<f64>,
    /// Defaults: 1 (manufactured), `t_final / tau` or 100 (Mandel).
    pub n_steps: Option<usize>,
    pub t_final: Option<f64>,
    pub stabilization: StabilizationMode<f64>,
    pub atol: f64,
    pub rtol: f64,
    pub max_iter: usize,
    pub stop_norm: StopNorm,
    pub initial_guess: InitialGuess,
    pub cutoff_m: Option<f64>,
    pub c_f: Option<f64>,
    /// Mandel only.
    pub heat_source: f64,
    pub lame: LameConvention,
    pub thermal_stress_scaled: bool,
    /// Mandel with `β = b0 = 0`.
    pub isothermal: bool,
    /// Mandel profile times in seconds.
    pub profile_times: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    pub mesh_dump: bool,
    /// Exit nonzero when a step does not converge.
    pub require_convergence: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Manufactured,
            scheme: SchemeKind::HFM,
            regime: Regime::PR1,
            mesh: MeshSize { nx: 16, ny: 16 },
            tau: None,
            n_steps: None,
            t_final: None,
            stabilization: StabilizationMode::Theory,
            atol: 1e-6,
            rtol: 1e-6,
            max_iter: 100,
            stop_norm: StopNorm::L2,
            initial_guess: InitialGuess::Previous,
            cutoff_m: None,
            c_f: None,
            heat_source: 0.0,
            lame: LameConvention::Standard,
            thermal_stress_scaled: false,
            isothermal: false,
            profile_times: vec![100.0, 500.0, 1000.0],
            output_dir: None,
            mesh_dump: false,
            require_convergence: true,
        }
    }
}

impl RunConfig {
    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(match self.problem {
            ProblemKind::Manufactured => 1.0,
            ProblemKind::Mandel => 10.0,
        })
    }

    pub fn n_steps(&self) -> usize {
        if let Some(n) = self.n_steps {
            return n;
        }
        match (self.t_final, self.problem) {
            (Some(tf), _) => (tf / self.tau()).round() as usize,
            (None, ProblemKind::Manufactured) => 1,
            (None, ProblemKind::Mandel) => 100,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, msg: String| Err(ConfigError::new(None, key, msg));
        if !(self.tau() > 0.0) || !self.tau().is_finite() {
            return bad("tau", format!("must be positive, got {}", self.tau()));
        }
        if self.n_steps() == 0 {
            return bad("steps", "need at least one time step".into());
        }
        if !(self.atol > 0.0) {
            return bad("atol", format!("must be positive, got {}", self.atol));
        }
        if !(self.rtol > 0.0) {
            return bad("rtol", format!("must be positive, got {}", self.rtol));
        }
        if self.max_iter == 0 {
            return bad("max_iter", "must be positive".into());
        }
        if let Some(m) = self.cutoff_m {
            if !(m > 0.0) {
                return bad("cutoff", format!("must be positive, got {m}"));
            }
        }
        if let Some(c) = self.c_f {
            if !(c >= 0.0) {
                return bad("cf", format!("must be non-negative, got {c}"));
            }
        }
        if !self.heat_source.is_finite() {
            return bad("heat_source", "must be finite".into());
        }
        Ok(())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match normalize_key(key).as_str() {
            "problem" => self.problem = v.parse()?,
            "scheme" => self.scheme = v.parse().map_err(|e| format!("{e}"))?,
            "regime" => self.regime = v.parse().map_err(|e| format!("{e}"))?,
            "mesh" | "h" | "mesh_n" | "n" => self.mesh = v.parse()?,
            "tau" => self.tau = Some(parse_f64(v)?),
            "steps" | "n_steps" => self.n_steps = Some(parse_usize(v)?),
            "t_final" | "t_f" => self.t_final = Some(parse_f64(v)?),
            "stabilization" | "stab" => self.stabilization = v.parse().map_err(|e| format!("{e}"))?,
            "atol" => self.atol = parse_f64(v)?,
            "rtol" => self.rtol = parse_f64(v)?,
            "max_iter" => self.max_iter = parse_usize(v)?,
            "stop_norm" => self.stop_norm = v.parse().map_err(|e| format!("{e}"))?,
            "initial_guess" => {
                self.initial_guess = match v.to_ascii_lowercase().as_str() {
                    "previous" => InitialGuess::Previous,
                    "zero" => InitialGuess::Zero,
                    other => return Err(format!("unknown initial guess `{other}` (expected previous or zero)")),
                }
            }
            "cutoff" | "cutoff_m" => self.cutoff_m = Some(parse_f64(v)?),
            "cf" | "c_f" => self.c_f = Some(parse_f64(v)?),
            "heat_source" | "z" => self.heat_source = parse_f64(v)?,
            "lame" => self.lame = v.parse().map_err(|e| format!("{e}"))?,
            "thermal_stress_scaled" => self.thermal_stress_scaled = parse_bool(v)?,
            "isothermal" => self.isothermal = parse_bool(v)?,
            "profile_times" => {
                self.profile_times = if v.is_empty() { Vec::new() } else { split_list(v).map(parse_f64).collect::<Result<_, _>>()? }
            }
            "output_dir" | "out" => self.output_dir = Some(PathBuf::from(v)),
            "mesh_dump" => self.mesh_dump = parse_bool(v)?,
            "require_convergence" => self.require_convergence = parse_bool(v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Copy with one sweep value applied.
    pub fn with(&self, axis: SweepAxis, value: &str) -> Result<Self, String> {
        let mut c = self.clone();
        c.set(axis.key(), value)?;
        Ok(c)
    }
}

/// Base configuration plus sweep axes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub base: RunConfig,
    pub sweeps: Vec<Sweep>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut out = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = Some(i + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(n, line, "expected `key = value`".into()))?;
            let key = key.trim();
            if let Some(axis) = key.strip_prefix("sweep.") {
                out.add_sweep(axis, value).map_err(|m| ConfigError::new(n, key, m))?;
            } else {
                out.base.set(key, value).map_err(|m| ConfigError::new(n, key, m))?;
            }
        }
        Ok(out)
    }

    /// Adds an axis from `v1, v2, …` or `all`.
    pub fn add_sweep(&mut self, axis: &str, values: &str) -> Result<(), String> {
        let axis: SweepAxis = axis.parse()?;
        let values: Vec<String> = if values.trim().eq_ignore_ascii_case("all") {
            axis.all_values().ok_or_else(|| format!("axis `{}` has no `all` shorthand", axis.key()))?
        } else {
            split_list(values).map(str::to_string).collect()
        };
        if values.is_empty() {
            return Err(format!("sweep axis `{}` has no values", axis.key()));
        }
        if self.sweeps.iter().any(|s| s.axis == axis) {
            return Err(format!("sweep axis `{}` given twice", axis.key()));
        }
        self.sweeps.push(Sweep { axis, values });
        Ok(())
    }

    /// Every run of the sweep in row order; a config without sweeps
    /// expands to the base run alone.
    pub fn expand(&self) -> Result<Vec<RunConfig>, ConfigError> {
        let mut runs = vec![self.base.clone()];
        for sweep in &self.sweeps {
            let mut next = Vec::with_capacity(runs.len() * sweep.values.len());
            for run in &runs {
                for v in &sweep.values {
                    next.push(run.with(sweep.axis, v).map_err(|m| ConfigError::new(None, sweep.axis.key(), m))?);
                }
            }
            runs = next;
        }
        for r in &runs {
            r.validate()?;
        }
        Ok(runs)
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.trim().parse::<f64>().map_err(|_| format!("expected a number, got `{v}`"))
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.trim().parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}
