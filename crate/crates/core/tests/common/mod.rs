#![allow(dead_code)]

//! Independent reference computations for the integration tests: a
//! collapsed Gauss–Legendre rule on triangles and basis functions obtained by
//! solving their defining conditions directly.

pub mod oracles;

use thermoporo::mesh::{build_rect_mesh, Domain, Mesh};

/// Gauss–Legendre nodes and weights on [0, 1] via Newton on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out
}

/// ∫ over the triangle of `f` with a Duffy-collapsed tensor rule.
pub fn integrate_triangle(c: [[f64; 2]; 3], n: usize, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let gl = gauss_legendre(n);
    let jac = ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1])).abs();
    let mut s = 0.0;
    for &(u, wu) in &gl {
        for &(v, wv) in &gl {
            // (u, v) in the square -> (ξ, η) = (u, (1 − u) v) in the reference triangle
            let (xi, eta) = (u, (1.0 - u) * v);
            let x = [
                c[0][0] + xi * (c[1][0] - c[0][0]) + eta * (c[2][0] - c[0][0]),
                c[0][1] + xi * (c[1][1] - c[0][1]) + eta * (c[2][1] - c[0][1]),
            ];
            s += wu * wv * (1.0 - u) * jac * f(x);
        }
    }
    s
}

pub fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][k] = b[i];
        }
        *xk = det(m) / d;
    }
    x
}

/// RT0 basis on triangle `t` for global edge `e` of the form `(a + c x, b + c y)`,
/// fixed by requiring flux 1 through `e` along its global normal and 0
/// through the other two edges.
pub fn rt0_oracle(mesh: &Mesh<f64>, t: usize, e: usize) -> impl Fn([f64; 2]) -> [f64; 2] {
    let edges: Vec<usize> = mesh.triangle_edges[t].iter().map(|r| r.edge).collect();
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (row, &ed) in edges.iter().enumerate() {
        let [p, q] = mesh.edges[ed];
        let (pa, pb) = (mesh.vertices[p], mesh.vertices[q]);
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        let n = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
        let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
        // flux of (a + c x, b + c y) is exact with the midpoint value (linear integrand)
        a[row] = [n[0] * len, n[1] * len, (mid[0] * n[0] + mid[1] * n[1]) * len];
        b[row] = if ed == e { 1.0 } else { 0.0 };
    }
    let [ca, cb, cc] = solve3(a, b);
    move |x| [ca + cc * x[0], cb + cc * x[1]]
}

/// P1 hat function of local vertex `k` on triangle `t`, via a 3×3 solve.
pub fn p1_oracle(mesh: &Mesh<f64>, t: usize, k: usize) -> ([f64; 3], [f64; 2]) {
    let c = mesh.corners(t);
    let a = [[1.0, c[0][0], c[0][1]], [1.0, c[1][0], c[1][1]], [1.0, c[2][0], c[2][1]]];
    let mut b = [0.0; 3];
    b[k] = 1.0;
    let coef = solve3(a, b);
    (coef, [coef[1], coef[2]])
}

pub fn unit_mesh(n: usize) -> Mesh<f64> {
    build_rect_mesh(Domain::unit_square(n)).unwrap()
}

/// Deterministic pseudo-random values in [-1, 1).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        assert!(a[piv][k].abs() > 1e-300, "singular dense system");
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}
