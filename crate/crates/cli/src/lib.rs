//! Command-line front end: configuration files, single runs, sweeps and CSV
//! output for the thermo-poroelastic solvers.

pub mod config;
pub mod error;
pub mod profile;
pub mod report;
pub mod run;

use std::path::Path;

pub use config::{ExperimentConfig, MeshSize, ProblemKind, RunConfig, Sweep, SweepAxis};
pub use error::{CliError, ConfigError};
pub use profile::{profile_dump, Line, ProfileSample};
pub use report::{TableReport, TableRow};
pub use run::{execute, sweep, RunOutcome};

/// Exit status for a successful experiment.
pub const EXIT_OK: i32 = 0;
/// Some step did not converge and convergence was required.
pub const EXIT_NOT_CONVERGED: i32 = 1;

/// Runs the experiment, writes its files when an output directory is
/// configured, and returns the table and the exit status.
pub fn run_experiment(exp: &ExperimentConfig) -> Result<(TableReport, i32), CliError> {
    let require = exp.base.require_convergence;
    let dir = exp.base.output_dir.as_deref();
    if exp.sweeps.is_empty() {
        let out = execute(&exp.base)?;
        if let Some(dir) = dir {
            report::write_run(&out, dir)?;
        }
        let table = TableReport { rows: vec![out.summary()] };
        let code = if require && !out.converged() { EXIT_NOT_CONVERGED } else { EXIT_OK };
        return Ok((table, code));
    }
    let table = sweep(exp)?;
    if let Some(dir) = dir {
        report::write_table(&table, dir)?;
    }
    let code = if table.any_failed() {
        3
    } else if require && !table.all_converged() {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_OK
    };
    Ok((table, code))
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(ExperimentConfig::parse(&text)?)
}
