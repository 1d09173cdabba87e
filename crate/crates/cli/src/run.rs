//! Single runs and sweeps.

use log::{info, warn};

use thermoporo::fem::{l2_errors, L2Errors};
use thermoporo::mesh::{build_rect_mesh, Domain};
use thermoporo::problems::manufactured::manufactured_problem_with;
use thermoporo::problems::{mandel_problem, manufactured_problem, MandelAnalytic, MandelConfig, ManufacturedExact};
use thermoporo::schemes::{run_transient, TransientResult};
use thermoporo::{Mesh, PhysParams, ProblemSpec, SolverOptions};

use crate::config::{ExperimentConfig, ProblemKind, RunConfig};
use crate::error::CliError;
use crate::profile::{profile_dump, Line, ProfileSample};
use crate::report::{RowStatus, TableReport, TableRow};

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub mesh: Mesh,
    pub params: PhysParams,
    /// Resolved `(L_T, L_p)`.
    pub stabilization: (f64, f64),
    pub result: TransientResult<f64>,
    /// Errors after each step (manufactured problem).
    pub errors: Vec<L2Errors<f64>>,
    /// Series oracle (Mandel).
    pub analytic: Option<MandelAnalytic>,
}

impl RunOutcome {
    pub fn converged(&self) -> bool {
        self.result.all_converged()
    }

    pub fn summary(&self) -> TableRow {
        let reports = &self.result.reports;
        let its: Vec<usize> = reports.iter().map(|r| r.iterations).collect();
        let mut row = TableRow::from_config(&self.config, Some(&self.params));
        row.l_t = Some(self.stabilization.0);
        row.l_p = Some(self.stabilization.1);
        row.iterations = its.first().copied();
        row.max_iterations = its.iter().max().copied();
        row.total_iterations = Some(its.iter().sum());
        row.status = if self.converged() { RowStatus::Converged } else { RowStatus::NotConverged };
        row.errors = self.errors.last().map(L2Errors::as_array);
        row
    }

    /// Midline profiles at the configured times that coincide with a step.
    pub fn profiles(&self) -> Vec<(f64, ProfileSample)> {
        let tau = self.config.tau();
        let mut out = Vec::new();
        for &t in &self.config.profile_times {
            let k = (t / tau).round();
            if k < 1.0 || (k * tau - t).abs() > 1e-9 * t.abs().max(1.0) || k as usize > self.result.states.len() {
                warn!("profile time {t} is not a computed time level; skipped");
                continue;
            }
            let state = &self.result.states[k as usize - 1];
            for line in [Line::Horizontal, Line::Vertical] {
                for s in profile_dump(state, &self.mesh, line, t, self.analytic.as_ref()) {
                    out.push((t, s));
                }
            }
        }
        out
    }
}

/// Problem data and, for Mandel, the series oracle.
pub fn build_problem(cfg: &RunConfig) -> Result<(ProblemSpec, Option<MandelAnalytic>), CliError> {
    let (nx, ny) = (cfg.mesh.nx, cfg.mesh.ny);
    match cfg.problem {
        ProblemKind::Manufactured => {
            let mut p = manufactured_problem::<f64>(cfg.regime, cfg.c_f);
            if let Some(m) = cfg.cutoff_m {
                p = manufactured_problem_with(PhysParams { cutoff_m: m, ..p.params });
            }
            p.domain = Domain::new(1.0, 1.0, nx, ny);
            Ok((p, None))
        }
        ProblemKind::Mandel => {
            let mc = mandel_config(cfg);
            let analytic = MandelAnalytic::new(&mc, mc.n_terms)?;
            Ok((mandel_problem::<f64>(mc, nx, ny)?, Some(analytic)))
        }
    }
}

pub fn mandel_config(cfg: &RunConfig) -> MandelConfig {
    let mut mc = MandelConfig {
        heat_source: cfg.heat_source,
        lame: cfg.lame,
        thermal_stress_scaled: cfg.thermal_stress_scaled,
        tau: cfg.tau(),
        ..Default::default()
    };
    if let Some(c) = cfg.c_f {
        mc.c_f = c;
    }
    if let Some(m) = cfg.cutoff_m {
        mc.cutoff_m = m;
    }
    if cfg.isothermal {
        mc.beta = 0.0;
        mc.b0 = 0.0;
    }
    mc
}

pub fn solver_options(cfg: &RunConfig) -> SolverOptions {
    SolverOptions {
        stabilization: cfg.stabilization,
        atol: cfg.atol,
        rtol: cfg.rtol,
        max_iter: cfg.max_iter,
        norm: cfg.stop_norm,
        initial_guess: cfg.initial_guess,
        record_iterates: false,
    }
}

/// Runs one configuration. Non-convergence is reported in the outcome,
/// not as an error.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let (problem, analytic) = build_problem(cfg)?;
    let mesh = build_rect_mesh(problem.domain)?;
    let stabilization = cfg.stabilization.resolve(&problem.params)?;
    info!(
        "{} {} {} mesh {} stab {} ({:e}, {:e})",
        cfg.problem, cfg.scheme, cfg.regime, cfg.mesh, cfg.stabilization, stabilization.0, stabilization.1
    );
    let result = run_transient(cfg.scheme, &mesh, &problem, cfg.tau(), cfg.n_steps(), solver_options(cfg))?;
    let errors = match cfg.problem {
        ProblemKind::Manufactured => result
            .states
            .iter()
            .zip(&result.reports)
            .map(|(s, r)| l2_errors(&mesh, s, &ManufacturedExact { params: problem.params, t: r.time }))
            .collect(),
        ProblemKind::Mandel => Vec::new(),
    };
    Ok(RunOutcome { config: cfg.clone(), mesh, params: problem.params, stabilization, result, errors, analytic })
}

/// Runs every configuration of the experiment in row order. Failed runs are
/// recorded in their row and the sweep continues.
pub fn sweep(exp: &ExperimentConfig) -> Result<TableReport, CliError> {
    let runs = exp.expand()?;
    let mut report = TableReport::default();
    for cfg in &runs {
        let row = match execute(cfg) {
            Ok(out) => out.summary(),
            Err(e) => {
                warn!("run failed: {e}");
                let params = build_problem(cfg).ok().map(|(p, _)| p.params);
                let mut row = TableRow::from_config(cfg, params.as_ref());
                row.status = RowStatus::Failed(e.to_string());
                row
            }
        };
        report.rows.push(row);
    }
    Ok(report)
}
