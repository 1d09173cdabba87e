//! CSV output. Reals use scientific notation with six significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thermoporo::PhysParams;

use crate::config::{ProblemKind, RunConfig};
use crate::error::CliError;
use crate::run::RunOutcome;

/// Six significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

fn opt_int(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Converged,
    NotConverged,
    Failed(String),
}

impl RowStatus {
    fn as_csv(&self) -> String {
        match self {
            Self::Converged => "ok".into(),
            Self::NotConverged => "not_converged".into(),
            Self::Failed(msg) => format!("error: {}", msg.replace([',', '\n', '"'], " ")),
        }
    }
}

/// One completed (or failed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub problem: ProblemKind,
    pub scheme: String,
    /// Empty for Mandel.
    pub regime: String,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub stabilization: String,
    pub l_t: Option<f64>,
    pub l_p: Option<f64>,
    pub c_f: Option<f64>,
    pub heat_source: f64,
    pub tau: f64,
    pub steps: usize,
    /// Count at the first time step.
    pub iterations: Option<usize>,
    pub max_iterations: Option<usize>,
    pub total_iterations: Option<usize>,
    pub status: RowStatus,
    /// `[e_T, e_r, e_p, e_w, e_u]` after the last step.
    pub errors: Option<[f64; 5]>,
}

impl TableRow {
    pub fn from_config(cfg: &RunConfig, params: Option<&PhysParams>) -> Self {
        let width = match cfg.problem {
            ProblemKind::Manufactured => 1.0,
            ProblemKind::Mandel => crate::run::mandel_config(cfg).a,
        };
        Self {
            problem: cfg.problem,
            scheme: cfg.scheme.to_string(),
            regime: match cfg.problem {
                ProblemKind::Manufactured => cfg.regime.to_string(),
                ProblemKind::Mandel => String::new(),
            },
            nx: cfg.mesh.nx,
            ny: cfg.mesh.ny,
            h: width / cfg.mesh.nx as f64,
            stabilization: cfg.stabilization.to_string().replace(',', ";"),
            l_t: None,
            l_p: None,
            c_f: params.map(|p| p.c_f),
            heat_source: cfg.heat_source,
            tau: cfg.tau(),
            steps: cfg.n_steps(),
            iterations: None,
            max_iterations: None,
            total_iterations: None,
            status: RowStatus::Failed("not run".into()),
            errors: None,
        }
    }

    pub fn converged(&self) -> bool {
        self.status == RowStatus::Converged
    }

    pub const HEADER: &'static str = "problem,scheme,regime,nx,ny,h,stabilization,l_t,l_p,c_f,heat_source,tau,steps,\
iterations,max_iterations,total_iterations,status,e_T,e_r,e_p,e_w,e_u";

    pub fn to_csv(&self) -> String {
        let e = self.errors.map(|e| e.map(sci).join(",")).unwrap_or_else(|| ",,,,".into());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.problem,
            self.scheme,
            self.regime,
            self.nx,
            self.ny,
            sci(self.h),
            self.stabilization,
            opt_sci(self.l_t),
            opt_sci(self.l_p),
            opt_sci(self.c_f),
            sci(self.heat_source),
            sci(self.tau),
            self.steps,
            opt_int(self.iterations),
            opt_int(self.max_iterations),
            opt_int(self.total_iterations),
            self.status.as_csv(),
            e
        )
    }
}

/// Rows of a sweep in run order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(TableRow::HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| matches!(r.status, RowStatus::Failed(_)))
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(TableRow::converged)
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| CliError::io(path, e))
}

pub fn iterations_csv(out: &RunOutcome) -> String {
    let mut s = String::from("step,time,iterations,converged,residual,max_heat_flux,max_darcy_flux,cutoff_exceeded\n");
    for r in &out.result.reports {
        let res = r.residual_history.last().copied().unwrap_or(0.0);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.step,
            sci(r.time),
            r.iterations,
            r.converged,
            sci(res),
            sci(r.max_heat_flux),
            sci(r.max_darcy_flux),
            r.cutoff_exceeded
        );
    }
    s
}

pub fn errors_csv(out: &RunOutcome) -> String {
    let mut s = String::from("step,time,h,e_T,e_r,e_p,e_w,e_u\n");
    let h = 1.0 / out.config.mesh.nx as f64;
    for (r, e) in out.result.reports.iter().zip(&out.errors) {
        let _ = writeln!(s, "{},{},{},{}", r.step, sci(r.time), sci(h), e.as_array().map(sci).join(","));
    }
    s
}

/// Final state: element, edge and vertex tables.
pub fn state_csvs(out: &RunOutcome) -> [String; 3] {
    let mesh = &out.mesh;
    let st = out.result.states.last().unwrap_or(&out.result.initial);
    let mut cells = String::from("element,x,y,T,p\n");
    for e in 0..mesh.n_triangles() {
        let c = mesh.centroid(e);
        let _ = writeln!(cells, "{e},{},{},{},{}", sci(c[0]), sci(c[1]), sci(st.t[e]), sci(st.p[e]));
    }
    let mut edges = String::from("edge,x,y,r,w\n");
    for e in 0..mesh.n_edges() {
        let c = mesh.edge_midpoint(e);
        let _ = writeln!(edges, "{e},{},{},{},{}", sci(c[0]), sci(c[1]), sci(st.r[e]), sci(st.w[e]));
    }
    let mut verts = String::from("vertex,x,y,u1,u2\n");
    for (v, x) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(verts, "{v},{},{},{},{}", sci(x[0]), sci(x[1]), sci(st.u[2 * v]), sci(st.u[2 * v + 1]));
    }
    [cells, edges, verts]
}

pub fn profiles_csv(out: &RunOutcome) -> String {
    let mut s = String::from("time,line,field,coordinate,value,exact\n");
    for (t, p) in out.profiles() {
        let _ = writeln!(s, "{},{},{},{},{},{}", sci(t), p.line, p.field, sci(p.coordinate), sci(p.value), opt_sci(p.exact));
    }
    s
}

/// Writes every file of a single run into `dir`.
pub fn write_run(out: &RunOutcome, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let table = TableReport { rows: vec![out.summary()] };
    write(dir, "summary.csv", &table.to_csv())?;
    write(dir, "iterations.csv", &iterations_csv(out))?;
    let [cells, edges, verts] = state_csvs(out);
    write(dir, "state_elements.csv", &cells)?;
    write(dir, "state_edges.csv", &edges)?;
    write(dir, "state_vertices.csv", &verts)?;
    match out.config.problem {
        ProblemKind::Manufactured => write(dir, "errors.csv", &errors_csv(out))?,
        ProblemKind::Mandel => write(dir, "profiles.csv", &profiles_csv(out))?,
    }
    if out.config.mesh_dump {
        let mut buf = Vec::new();
        out.mesh.write_dump(&mut buf).map_err(|e| CliError::io(dir.join("mesh.txt"), e))?;
        fs::write(dir.join("mesh.txt"), buf).map_err(|e| CliError::io(dir.join("mesh.txt"), e))?;
    }
    Ok(())
}

pub fn write_table(table: &TableReport, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write(dir, "table.csv", &table.to_csv())
}
