//! Field traces along the midlines of the domain.

use std::fmt;

use thermoporo::fem::p1_evaluate;
use thermoporo::problems::MandelAnalytic;
use thermoporo::{FieldState, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    /// `y = height / 2`, sampling `p`, `T` and `u1`.
    Horizontal,
    /// `x = width / 2`, sampling `u2`.
    Vertical,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Horizontal => "horizontal",
            Self::Vertical => "vertical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSample {
    pub line: Line,
    pub field: &'static str,
    /// Position along the line.
    pub coordinate: f64,
    pub value: f64,
    /// Isothermal series value, when available.
    pub exact: Option<f64>,
}

/// Samples along `line`: element values at cell midpoints for `p` and `T`,
/// nodal values at grid nodes for the displacement.
pub fn profile_dump(state: &FieldState, mesh: &Mesh, line: Line, t: f64, exact: Option<&MandelAnalytic>) -> Vec<ProfileSample> {
    let d = mesh.domain;
    let series = |x: [f64; 2]| exact.filter(|_| t > 0.0).and_then(|a| a.eval(x, t).ok());
    let locate = |x: [f64; 2]| mesh.locate(x).expect("midline point lies in the domain");
    let mut out = Vec::new();
    match line {
        Line::Horizontal => {
            let y = 0.5 * d.height;
            let hx = d.width / d.nx as f64;
            for i in 0..d.nx {
                let x = [(i as f64 + 0.5) * hx, y];
                let e = locate(x);
                let s = series(x);
                out.push(ProfileSample { line, field: "p", coordinate: x[0], value: state.p[e], exact: s.map(|s| s.p) });
                out.push(ProfileSample { line, field: "T", coordinate: x[0], value: state.t[e], exact: None });
            }
            for i in 0..=d.nx {
                let x = [i as f64 * hx, y];
                let u = p1_evaluate(mesh, &state.u, locate(x), x);
                out.push(ProfileSample { line, field: "u1", coordinate: x[0], value: u[0], exact: series(x).map(|s| s.u1) });
            }
        }
        Line::Vertical => {
            let x0 = 0.5 * d.width;
            let hy = d.height / d.ny as f64;
            for j in 0..=d.ny {
                let x = [x0, j as f64 * hy];
                let u = p1_evaluate(mesh, &state.u, locate(x), x);
                out.push(ProfileSample { line, field: "u2", coordinate: x[1], value: u[1], exact: series(x).map(|s| s.u2) });
            }
        }
    }
    out
}

/// `‖value − exact‖ / ‖exact‖` over the samples of `field` that carry an
/// exact value.
pub fn relative_l2(samples: &[ProfileSample], field: &str) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    let mut any = false;
    for s in samples.iter().filter(|s| s.field == field) {
        if let Some(e) = s.exact {
            num += (s.value - e).powi(2);
            den += e * e;
            any = true;
        }
    }
    (any && den > 0.0).then(|| (num / den).sqrt())
}
