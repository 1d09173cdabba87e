//! Dense and finite-difference reference computations shared by the
//! integration tests and the acceptance target.

use std::sync::Arc;

use thermoporo::fem::{FeSpaces, Field, FieldState};
use thermoporo::mesh::{build_rect_mesh, Domain, Mesh};
use thermoporo::model::{PhysParams, Regime};
use thermoporo::problems::{manufactured_exact, manufactured_rhs, EssentialValues, Sources};
use thermoporo::schemes::{SchemeKind, SchemeSolver, SolverOptions, StabilizationMode};

use super::{dense_solve, integrate_triangle, p1_oracle, rt0_oracle, Lcg};

const H: f64 = 1e-3;

/// Balance-equation residual sources recomputed from the scalar exact fields
/// with central differences only.
pub fn fd_sources(p: &PhysParams<f64>, t: f64, x: [f64; 2]) -> (f64, f64, [f64; 2]) {
    let temp = |t: f64, x: [f64; 2]| manufactured_exact(p, t, x).temperature;
    let pres = |t: f64, x: [f64; 2]| manufactured_exact(p, t, x).pressure;
    let disp = |t: f64, x: [f64; 2], c: usize| manufactured_exact(p, t, x).displacement[c];
    let shift = |x: [f64; 2], i: usize, h: f64| {
        let mut y = x;
        y[i] += h;
        y
    };
    let d = |f: &dyn Fn([f64; 2]) -> f64, x: [f64; 2], i: usize| (f(shift(x, i, H)) - f(shift(x, i, -H))) / (2.0 * H);
    let dd = |f: &dyn Fn([f64; 2]) -> f64, x: [f64; 2], i: usize, j: usize| {
        d(&|y| d(f, y, j), x, i)
    };
    let dt = |f: &dyn Fn(f64) -> f64| (f(t + H) - f(t - H)) / (2.0 * H);
    let div_u = |t: f64, x: [f64; 2]| d(&|y| disp(t, y, 0), x, 0) + d(&|y| disp(t, y, 1), x, 1);
    let s = 1.0 / p.t_ref;

    let grad = |f: &dyn Fn([f64; 2]) -> f64| [d(f, x, 0), d(f, x, 1)];
    let (gt, gp) = (grad(&|y| temp(t, y)), grad(&|y| pres(t, y)));
    let kgp = [p.k[0][0] * gp[0] + p.k[0][1] * gp[1], p.k[1][0] * gp[0] + p.k[1][1] * gp[1]];
    let div_tensor = |m: [[f64; 2]; 2], f: &dyn Fn([f64; 2]) -> f64| {
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| m[i][j] * dd(f, x, i, j)).sum::<f64>()
    };
    let z = dt(&|tt| p.a0 * s * temp(tt, x) - p.b0 * pres(tt, x) + p.beta * div_u(tt, x))
        + p.c_f * s * (kgp[0] * gt[0] + kgp[1] * gt[1])
        - s * div_tensor(p.theta, &|y| temp(t, y));
    let g = dt(&|tt| p.c0 * pres(tt, x) - p.b0 * temp(tt, x) + p.alpha * div_u(tt, x)) - div_tensor(p.k, &|y| pres(t, y));

    // −div(2μ ε(u) + λ div u I) + ∇(β_u T + α p)
    let mut f = [0.0; 2];
    for (i, fi) in f.iter_mut().enumerate() {
        let mut div_sigma = 0.0;
        for j in 0..2 {
            let eps_ij = |y: [f64; 2]| 0.5 * (d(&|q| disp(t, q, i), y, j) + d(&|q| disp(t, q, j), y, i));
            div_sigma += 2.0 * p.mu * d(&eps_ij, x, j);
        }
        div_sigma += p.lambda * d(&|y| div_u(t, y), x, i);
        let coupling = |y: [f64; 2]| p.thermal_stress_coefficient() * temp(t, y) + p.alpha * pres(t, y);
        *fi = -div_sigma + d(&coupling, x, i);
    }
    (z, g, f)
}

pub fn anisotropic(mut p: PhysParams<f64>) -> PhysParams<f64> {
    p.k = [[0.3, 0.05], [0.05, 0.2]];
    p.theta = [[0.4, -0.1], [-0.1, 0.5]];
    p.t_ref = 1.7;
    p.c_f = 2.3;
    p
}

/// Largest `|a − b| / (1 + |b|)` between the closed-form manufactured sources
/// and [`fd_sources`] over a 5×5 grid, three times and seven coefficient sets.
pub fn fd_source_deviation() -> f64 {
    let mut worst = 0.0f64;
    let mut cases: Vec<PhysParams<f64>> = Regime::ALL.iter().map(|r| r.params()).collect();
    cases.push(anisotropic(Regime::PR1.params()));
    let mut scaled = anisotropic(Regime::PR3.params());
    scaled.thermal_stress_scaled = true;
    cases.push(scaled);
    for p in &cases {
        for &t in &[0.5, 1.0, 2.0] {
            for i in 0..5 {
                for j in 0..5 {
                    let x = [0.1 + 0.2 * i as f64, 0.1 + 0.2 * j as f64];
                    let (z, g, f) = manufactured_rhs(p, t, x);
                    let (zo, go, fo) = fd_sources(p, t, x);
                    for (a, b) in [(z, zo), (g, go), (f[0], fo[0]), (f[1], fo[1])] {
                        worst = worst.max((a - b).abs() / (1.0 + b.abs()));
                    }
                }
            }
        }
    }
    worst
}

pub fn coupled_params() -> PhysParams<f64> {
    PhysParams {
        a0: 1.3,
        b0: 0.4,
        c0: 1.1,
        c_f: 0.7,
        alpha: 0.8,
        beta: 0.6,
        mu: 0.9,
        lambda: 0.5,
        k: [[0.3, 0.05], [0.05, 0.2]],
        theta: [[0.4, -0.1], [-0.1, 0.5]],
        t_ref: 2.0,
        cutoff_m: 1e6,
        d: 2,
        thermal_stress_scaled: false,
    }
}

fn inv2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

fn quad(m: [[f64; 2]; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * (m[0][0] * b[0] + m[0][1] * b[1]) + a[1] * (m[1][0] * b[0] + m[1][1] * b[1])
}

fn random_state(sp: &FeSpaces, rng: &mut Lcg) -> FieldState<f64> {
    let mut s = FieldState::zeros(sp);
    for f in Field::ALL {
        let v = rng.vec(s.field(f).len());
        s.field_mut(f).copy_from_slice(&v);
    }
    s
}

pub struct Data {
    pub z: fn([f64; 2]) -> f64,
    pub g: fn([f64; 2]) -> f64,
    pub f: fn([f64; 2]) -> [f64; 2],
}

/// One monolithic iteration assembled densely from the discrete equations.
#[allow(clippy::too_many_arguments)]
pub fn dense_hfm_iteration(
    mesh: &Mesh<f64>,
    p: &PhysParams<f64>,
    tau: f64,
    l_t: f64,
    l_p: f64,
    prev: &FieldState<f64>,
    lag: &FieldState<f64>,
    data: &Data,
    fixed: &[(usize, f64)],
) -> Vec<f64> {
    let sp = FeSpaces::new(mesh);
    let (ot, or, op, ow, ou) = (0, sp.n_t, sp.n_t + sp.n_r, sp.n_t + sp.n_r + sp.n_p, sp.n_t + sp.n_r + sp.n_p + sp.n_w);
    let n = ou + sp.n_u;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    let s = 1.0 / p.t_ref;
    let (theta_inv, k_inv) = (inv2(p.theta), inv2(p.k));
    let div_rt = |phi: &dyn Fn([f64; 2]) -> [f64; 2]| {
        let (o, x, y) = (phi([0.0, 0.0]), phi([1.0, 0.0]), phi([0.0, 1.0]));
        (x[0] - o[0]) + (y[1] - o[1])
    };
    for t in 0..mesh.n_triangles() {
        let c = mesh.corners(t);
        let area = mesh.area(t);
        let edges: Vec<usize> = mesh.triangle_edges[t].iter().map(|r| r.edge).collect();
        let phis: Vec<_> = edges.iter().map(|&e| rt0_oracle(mesh, t, e)).collect();
        let verts = mesh.triangles[t];
        let hats: Vec<_> = (0..3).map(|k| p1_oracle(mesh, t, k)).collect();
        let w_lag = |x: [f64; 2]| {
            let mut v = [0.0; 2];
            for (i, &e) in edges.iter().enumerate() {
                let f = phis[i](x);
                v[0] += lag.w[e] * f[0];
                v[1] += lag.w[e] * f[1];
            }
            v
        };
        let u_dofs: Vec<(usize, usize, usize)> =
            (0..3).flat_map(|k| (0..2).map(move |comp| (k, comp, 2 * verts[k] + comp))).collect();
        let div_u = |k: usize, comp: usize| hats[k].1[comp] * area;
        let div_u_prev: f64 = u_dofs.iter().map(|&(k, comp, d)| div_u(k, comp) * prev.u[d]).sum();

        // heat row
        let rt = ot + t;
        a[rt][ot + t] += (p.a0 + l_t) * s * area;
        a[rt][op + t] -= p.b0 * area;
        for (i, &e) in edges.iter().enumerate() {
            let phi = &phis[i];
            let conv = integrate_triangle(c, 4, |x| p.c_f * quad(theta_inv, w_lag(x), phi(x)));
            a[rt][or + e] += tau * (div_rt(phi) * area + conv);
        }
        for &(k, comp, d) in &u_dofs {
            a[rt][ou + d] += p.beta * div_u(k, comp);
        }
        b[rt] += tau * integrate_triangle(c, 6, data.z) + p.a0 * s * area * prev.t[t] - p.b0 * area * prev.p[t]
            + p.beta * div_u_prev
            + l_t * s * area * lag.t[t];

        // flow row
        let rp = op + t;
        a[rp][op + t] += (p.c0 + l_p) * area;
        a[rp][ot + t] -= p.b0 * area;
        for (i, &e) in edges.iter().enumerate() {
            a[rp][ow + e] += tau * div_rt(&phis[i]) * area;
        }
        for &(k, comp, d) in &u_dofs {
            a[rp][ou + d] += p.alpha * div_u(k, comp);
        }
        b[rp] += tau * integrate_triangle(c, 6, data.g) + p.c0 * area * prev.p[t] - p.b0 * area * prev.t[t]
            + p.alpha * div_u_prev
            + l_p * area * lag.p[t];

        // flux rows
        for (i, &ei) in edges.iter().enumerate() {
            for (j, &ej) in edges.iter().enumerate() {
                a[or + ei][or + ej] += integrate_triangle(c, 4, |x| quad(theta_inv, phis[j](x), phis[i](x)));
                a[ow + ei][ow + ej] += integrate_triangle(c, 4, |x| quad(k_inv, phis[j](x), phis[i](x)));
            }
            let d = div_rt(&phis[i]) * area;
            a[or + ei][ot + t] -= s * d;
            a[ow + ei][op + t] -= d;
        }

        // momentum rows
        for &(ki, ci, di) in &u_dofs {
            let gi = hats[ki].1;
            for &(kj, cj, dj) in &u_dofs {
                let gj = hats[kj].1;
                // ε(φ e_c) = sym(e_c ⊗ ∇φ)
                let eps = |g: [f64; 2], comp: usize| {
                    let mut m = [[0.0; 2]; 2];
                    m[comp][0] += 0.5 * g[0];
                    m[comp][1] += 0.5 * g[1];
                    m[0][comp] += 0.5 * g[0];
                    m[1][comp] += 0.5 * g[1];
                    m
                };
                let (ei, ej) = (eps(gi, ci), eps(gj, cj));
                let dd: f64 = (0..2).flat_map(|r| (0..2).map(move |q| (r, q))).map(|(r, q)| ei[r][q] * ej[r][q]).sum();
                a[ou + di][ou + dj] += (2.0 * p.mu * dd + p.lambda * gi[ci] * gj[cj]) * area;
            }
            a[ou + di][ot + t] -= p.beta * div_u(ki, ci);
            a[ou + di][op + t] -= p.alpha * div_u(ki, ci);
            let (coef, _) = hats[ki];
            b[ou + di] += integrate_triangle(c, 6, |x| (data.f)(x)[ci] * (coef[0] + coef[1] * x[0] + coef[2] * x[1]));
        }
    }
    // eliminate prescribed unknowns by row replacement
    for &(d, v) in fixed {
        a[d].iter_mut().for_each(|x| *x = 0.0);
        a[d][d] = 1.0;
        b[d] = v;
    }
    dense_solve(a, b)
}

/// Largest deviation, relative to the largest entry, between one HFM
/// iteration of the solver and [`dense_hfm_iteration`] on a two-triangle mesh.
pub fn dense_oracle_deviation() -> f64 {
    let mesh = build_rect_mesh(Domain::new(1.0, 1.0, 1, 1)).unwrap();
    assert_eq!(mesh.n_triangles(), 2);
    let p = coupled_params();
    let sp = FeSpaces::new(&mesh);
    let mut rng = Lcg(7);
    let prev = random_state(&sp, &mut rng);
    let lag = random_state(&sp, &mut rng);
    let (tau, l_t, l_p) = (0.5, 0.7, 0.9);
    let data = Data { z: |x| 1.0 + x[0], g: |x| x[0] * x[1], f: |x| [x[1], 1.0 - x[0]] };

    let mut ev = EssentialValues::default();
    ev.push(Field::U, 0, 0.1);
    ev.push(Field::U, 1, -0.2);
    ev.push(Field::U, 3, 0.05);
    ev.push(Field::W, 0, 0.3);

    let opts = SolverOptions { stabilization: StabilizationMode::Custom { l_t, l_p }, ..Default::default() };
    let mut solver = SchemeSolver::new(SchemeKind::HFM, &mesh, &p, tau, opts).unwrap();
    let sources = Sources::<f64> {
        heat: Some(Arc::new(move |x, _| (data.z)(x))),
        flow: Some(Arc::new(move |x, _| (data.g)(x))),
        body_force: Some(Arc::new(move |x, _| (data.f)(x))),
    };
    let loads = solver.operators().loads(&mesh, &sources, 1.0);
    let base = solver.operators().base_rhs(&prev, &loads);
    solver.set_constraints(&ev).unwrap();
    let got = solver.iterate_once(&lag, &base).unwrap();

    let ou = sp.n_t + sp.n_r + sp.n_p + sp.n_w;
    let ow = sp.n_t + sp.n_r + sp.n_p;
    let fixed = [(ou, 0.1), (ou + 1, -0.2), (ou + 3, 0.05), (ow, 0.3)];
    let want = dense_hfm_iteration(&mesh, &p, tau, l_t, l_p, &prev, &lag, &data, &fixed);
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    got.stacked().iter().zip(&want).map(|(g, w)| (g - w).abs() / scale).fold(0.0, f64::max)
}
