use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use thermoporo_cli::{load_config, run_experiment, ConfigError, ExperimentConfig};

/// Iterative coupling schemes for non-isothermal poroelasticity.
///
/// Flags override values from `--config`. Repeat `--sweep AXIS=V1,V2` to run
/// a table; axes are mesh, regime, scheme, stabilization, heat_source and cf.
#[derive(Debug, Parser)]
#[command(name = "thermoporo", version)]
struct Args {
    /// Flat `key = value` file; `sweep.<axis> = …` lines define sweeps.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// manufactured | mandel
    #[arg(long)]
    problem: Option<String>,
    /// HFM, HF-M, HM-F, FM-H, H-F-M or F-H-M
    #[arg(long)]
    scheme: Option<String>,
    /// PR1 … PR5 (manufactured problem)
    #[arg(long)]
    regime: Option<String>,
    /// N, NxM, 1/N or h
    #[arg(long, visible_alias = "mesh-n")]
    mesh: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    /// theory, none, theory*F or LT:LP
    #[arg(long, visible_alias = "stabilization")]
    stab: Option<String>,
    #[arg(long)]
    atol: Option<String>,
    #[arg(long)]
    rtol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// l2 | euclidean
    #[arg(long)]
    stop_norm: Option<String>,
    /// previous | zero
    #[arg(long)]
    initial_guess: Option<String>,
    /// Cut-off constant M
    #[arg(long)]
    cutoff: Option<String>,
    /// Override of the convection coefficient c_f
    #[arg(long)]
    cf: Option<String>,
    /// Volumetric heat source z (Mandel)
    #[arg(long)]
    heat_source: Option<String>,
    /// standard | 1+2nu
    #[arg(long)]
    lame: Option<String>,
    /// Mandel with the thermal couplings removed
    #[arg(long)]
    isothermal: bool,
    /// Comma-separated profile times (Mandel)
    #[arg(long)]
    profile_times: Option<String>,
    /// Output directory
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write the mesh to `mesh.txt`
    #[arg(long)]
    mesh_dump: bool,
    /// Exit 0 even when a step does not converge
    #[arg(long)]
    allow_nonconvergence: bool,
    /// AXIS=V1,V2,…
    #[arg(long)]
    sweep: Vec<String>,
    /// KEY=VALUE for any config key
    #[arg(long)]
    set: Vec<String>,
}

fn apply_flags(exp: &mut ExperimentConfig, args: &Args) -> Result<(), ConfigError> {
    let flag = |key: &str, m: String| ConfigError::new(None, key, m);
    let pairs = [
        ("problem", &args.problem),
        ("scheme", &args.scheme),
        ("regime", &args.regime),
        ("mesh", &args.mesh),
        ("tau", &args.tau),
        ("steps", &args.steps),
        ("t_final", &args.t_final),
        ("stabilization", &args.stab),
        ("atol", &args.atol),
        ("rtol", &args.rtol),
        ("max_iter", &args.max_iter),
        ("stop_norm", &args.stop_norm),
        ("initial_guess", &args.initial_guess),
        ("cutoff", &args.cutoff),
        ("cf", &args.cf),
        ("heat_source", &args.heat_source),
        ("lame", &args.lame),
        ("profile_times", &args.profile_times),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            exp.base.set(key, v).map_err(|m| flag(key, m))?;
        }
    }
    if args.isothermal {
        exp.base.isothermal = true;
    }
    if args.mesh_dump {
        exp.base.mesh_dump = true;
    }
    if args.allow_nonconvergence {
        exp.base.require_convergence = false;
    }
    if let Some(out) = &args.out {
        exp.base.output_dir = Some(out.clone());
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| flag(kv, "expected KEY=VALUE".into()))?;
        exp.base.set(k, v).map_err(|m| flag(k, m))?;
    }
    for kv in &args.sweep {
        let (k, v) = kv.split_once('=').ok_or_else(|| flag(kv, "expected AXIS=V1,V2".into()))?;
        exp.add_sweep(k, v).map_err(|m| flag(k, m))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let result = (|| {
        let mut exp = match &args.config {
            Some(path) => load_config(path)?,
            None => ExperimentConfig::default(),
        };
        apply_flags(&mut exp, &args)?;
        run_experiment(&exp)
    })();
    match result {
        Ok((table, code)) => {
            print!("{}", table.to_csv());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
