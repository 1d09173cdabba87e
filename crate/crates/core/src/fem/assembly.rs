//! Global matrices and load vectors.
//!
//! RT0 basis on triangle `K` for the local edge `k` opposite vertex `P_k`:
//! `φ_k(x) = s_k (x − P_k) / (2|K|)`, where `s_k` is the orientation sign. The
//! dof of a field is its flux through the edge along the global normal, so
//! `∫_K div φ_k = s_k`.

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, Triplets};
use crate::mesh::Mesh;
use crate::scalar::Real;

use super::quadrature::{gauss3_unit, TriangleRule};

pub type Tensor2<T> = [[T; 2]; 2];

pub fn scaled_identity<T: Real>(s: T) -> Tensor2<T> {
    [[s, T::zero()], [T::zero(), s]]
}

/// Inverse of a symmetric positive definite 2×2 tensor.
pub fn spd_inverse<T: Real>(a: &Tensor2<T>) -> Result<Tensor2<T>> {
    let scale = a[0][0].abs().max(a[1][1].abs()).max(a[0][1].abs());
    let finite = a.iter().flatten().all(|v| v.is_finite());
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !finite || (a[0][1] - a[1][0]).abs() > T::lit(1e-12) * scale || !(a[0][0] > T::zero()) || !(det > T::zero()) {
        return Err(Error::NotSpd(format!("{a:?}")));
    }
    Ok([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

#[inline]
pub(crate) fn apply<T: Real>(a: &Tensor2<T>, v: [T; 2]) -> [T; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

#[inline]
fn dot2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

/// Gradients of the barycentric coordinates of triangle `t`.
pub fn barycentric_gradients<T: Real>(mesh: &Mesh<T>, t: usize) -> [[T; 2]; 3] {
    let p = mesh.corners(t);
    let two_area = mesh.area(t) * T::lit(2.0);
    let mut g = [[T::zero(); 2]; 3];
    for (k, gk) in g.iter_mut().enumerate() {
        let (pj, pl) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        *gk = [(pj[1] - pl[1]) / two_area, (pl[0] - pj[0]) / two_area];
    }
    g
}

/// Value at `x` of the local RT0 basis function of edge `k` on triangle `t`.
#[inline]
pub fn rt0_basis<T: Real>(mesh: &Mesh<T>, t: usize, k: usize, x: [T; 2]) -> [T; 2] {
    let pk = mesh.vertices[mesh.triangles[t][k]];
    let s = T::from_i8(mesh.triangle_edges[t][k].sign).unwrap();
    let c = s / (T::lit(2.0) * mesh.area(t));
    [c * (x[0] - pk[0]), c * (x[1] - pk[1])]
}

/// Evaluates an RT0 field inside triangle `element`.
pub fn rt0_evaluate<T: Real>(mesh: &Mesh<T>, dofs: &[T], element: usize, point: [T; 2]) -> Result<[T; 2]> {
    if !mesh.contains(element, point) {
        return Err(Error::PointOutsideElement { element, x: point[0].as_f64(), y: point[1].as_f64() });
    }
    Ok(rt0_eval_unchecked(mesh, dofs, element, point))
}

#[inline]
pub(crate) fn rt0_eval_unchecked<T: Real>(mesh: &Mesh<T>, dofs: &[T], t: usize, x: [T; 2]) -> [T; 2] {
    let mut v = [T::zero(); 2];
    for k in 0..3 {
        let phi = rt0_basis(mesh, t, k, x);
        let d = dofs[mesh.triangle_edges[t][k].edge];
        v[0] += d * phi[0];
        v[1] += d * phi[1];
    }
    v
}

/// RT0 interpolant: normal flux of `f` through each edge.
pub fn rt0_interpolate<T: Real>(mesh: &Mesh<T>, f: impl Fn([T; 2]) -> [T; 2]) -> Vec<T> {
    let rule = gauss3_unit::<T>();
    (0..mesh.n_edges())
        .map(|e| {
            let [a, b] = mesh.edges[e];
            let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
            let n = mesh.edge_normal(e);
            let len = mesh.edge_length(e);
            rule.iter()
                .map(|&(s, w)| {
                    let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                    w * dot2(f(x), n)
                })
                .sum::<T>()
                * len
        })
        .collect()
}

/// Vector P1 nodal interpolant.
pub fn p1_interpolate<T: Real>(mesh: &Mesh<T>, f: impl Fn([T; 2]) -> [T; 2]) -> Vec<T> {
    mesh.vertices.iter().flat_map(|&x| f(x)).collect()
}

/// Vector P1 field at `x` inside triangle `t`.
pub fn p1_evaluate<T: Real>(mesh: &Mesh<T>, u: &[T], t: usize, x: [T; 2]) -> [T; 2] {
    let l = mesh.barycentric(t, x);
    let mut v = [T::zero(); 2];
    for (k, &vk) in mesh.triangles[t].iter().enumerate() {
        v[0] += l[k] * u[2 * vk];
        v[1] += l[k] * u[2 * vk + 1];
    }
    v
}

/// Diagonal matrix of element areas.
pub fn assemble_p0_mass<T: Real>(mesh: &Mesh<T>) -> SparseMatrix<T> {
    let areas: Vec<T> = (0..mesh.n_triangles()).map(|t| mesh.area(t)).collect();
    SparseMatrix::diagonal(&areas)
}

/// `(tensor⁻¹ φ_i, φ_j)` over RT0; the tensor passed is `Θ` or `K`.
pub fn assemble_weighted_rt0_mass<T: Real>(mesh: &Mesh<T>, tensor: &Tensor2<T>) -> Result<SparseMatrix<T>> {
    let inv = spd_inverse(tensor)?;
    let rule = TriangleRule::edge_midpoints();
    let mut trip = Triplets::with_capacity(mesh.n_edges(), mesh.n_edges(), 9 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let corners = mesh.corners(t);
        let area = mesh.area(t);
        let mut local = [[T::zero(); 3]; 3];
        for (x, w) in rule.map(&corners) {
            let phi = [rt0_basis(mesh, t, 0, x), rt0_basis(mesh, t, 1, x), rt0_basis(mesh, t, 2, x)];
            for i in 0..3 {
                let kphi = apply(&inv, phi[i]);
                for j in 0..3 {
                    local[i][j] += w * area * dot2(kphi, phi[j]);
                }
            }
        }
        let refs = mesh.triangle_edges[t];
        for i in 0..3 {
            for j in 0..3 {
                trip.push(refs[i].edge, refs[j].edge, local[i][j]);
            }
        }
    }
    Ok(trip.build())
}

/// `(div φ_e, 1)_K`: one signed unit entry per element–edge pair.
pub fn assemble_rt0_div<T: Real>(mesh: &Mesh<T>) -> SparseMatrix<T> {
    let mut trip = Triplets::with_capacity(mesh.n_triangles(), mesh.n_edges(), 3 * mesh.n_triangles());
    for (t, refs) in mesh.triangle_edges.iter().enumerate() {
        for r in refs {
            trip.push(t, r.edge, T::from_i8(r.sign).unwrap());
        }
    }
    trip.build()
}

/// `2μ(ε(u), ε(v)) + λ(div u, div v)` on vector P1.
pub fn assemble_elasticity<T: Real>(mesh: &Mesh<T>, mu: T, lambda: T) -> Result<SparseMatrix<T>> {
    if !(mu > T::zero()) || !(lambda >= T::zero()) {
        return Err(Error::InvalidArgument(format!("need mu > 0 and lambda >= 0, got mu = {mu}, lambda = {lambda}")));
    }
    let n = 2 * mesh.n_vertices();
    let mut trip = Triplets::with_capacity(n, n, 36 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let g = barycentric_gradients(mesh, t);
        let area = mesh.area(t);
        let vs = mesh.triangles[t];
        for a in 0..3 {
            for c in 0..2 {
                for b in 0..3 {
                    for d in 0..2 {
                        let shear = if c == d { dot2(g[a], g[b]) } else { T::zero() } + g[a][d] * g[b][c];
                        let val = area * (mu * shear + lambda * g[a][c] * g[b][d]);
                        trip.push(2 * vs[a] + c, 2 * vs[b] + d, val);
                    }
                }
            }
        }
    }
    Ok(trip.build())
}

/// `D[K, j] = ∫_K div ϕ_j` for the vector P1 basis.
pub fn assemble_div_coupling<T: Real>(mesh: &Mesh<T>) -> SparseMatrix<T> {
    let mut trip = Triplets::with_capacity(mesh.n_triangles(), 2 * mesh.n_vertices(), 6 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let g = barycentric_gradients(mesh, t);
        let area = mesh.area(t);
        for (k, &v) in mesh.triangles[t].iter().enumerate() {
            trip.push(t, 2 * v, area * g[k][0]);
            trip.push(t, 2 * v + 1, area * g[k][1]);
        }
    }
    trip.build()
}

/// Consistent mass matrix of vector P1.
pub fn assemble_p1_vector_mass<T: Real>(mesh: &Mesh<T>) -> SparseMatrix<T> {
    let n = 2 * mesh.n_vertices();
    let mut trip = Triplets::with_capacity(n, n, 18 * mesh.n_triangles());
    let twelfth = T::one() / T::lit(12.0);
    for t in 0..mesh.n_triangles() {
        let area = mesh.area(t);
        let vs = mesh.triangles[t];
        for a in 0..3 {
            for b in 0..3 {
                let m = area * twelfth * if a == b { T::lit(2.0) } else { T::one() };
                for c in 0..2 {
                    trip.push(2 * vs[a] + c, 2 * vs[b] + c, m);
                }
            }
        }
    }
    trip.build()
}

/// Pointwise cut-off: `v` if `|v| ≤ M`, otherwise `M v / |v|`.
#[inline]
pub fn apply_cutoff<T: Real>(v: [T; 2], m: T) -> [T; 2] {
    let len = v[0].hypot(v[1]);
    if len <= m {
        v
    } else {
        let s = m / len;
        [v[0] * s, v[1] * s]
    }
}

/// `C[K, e] = c_f ∫_K 𝓜(w_h) · Θ⁻¹ φ_e` with the cut-off applied to `w_h` at
/// each edge-midpoint quadrature node. The sparsity pattern does not depend
/// on `w`.
pub fn assemble_convection<T: Real>(mesh: &Mesh<T>, w: &[T], theta: &Tensor2<T>, c_f: T, m: T) -> Result<SparseMatrix<T>> {
    if w.len() != mesh.n_edges() {
        return Err(Error::DimensionMismatch(format!("w has {} dofs, mesh has {} edges", w.len(), mesh.n_edges())));
    }
    if !(m > T::zero()) {
        return Err(Error::InvalidArgument(format!("cut-off constant must be positive, got {m}")));
    }
    let inv = spd_inverse(theta)?;
    let rule = TriangleRule::edge_midpoints();
    let mut trip = Triplets::with_capacity(mesh.n_triangles(), mesh.n_edges(), 3 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let corners = mesh.corners(t);
        let area = mesh.area(t);
        let mut local = [T::zero(); 3];
        for (x, q) in rule.map(&corners) {
            let wq = apply(&inv, apply_cutoff(rt0_eval_unchecked(mesh, w, t, x), m));
            for (k, lk) in local.iter_mut().enumerate() {
                *lk += q * area * dot2(wq, rt0_basis(mesh, t, k, x));
            }
        }
        for (k, r) in mesh.triangle_edges[t].iter().enumerate() {
            trip.push(t, r.edge, c_f * local[k]);
        }
    }
    Ok(trip.build())
}

/// Largest magnitude of an RT0 field over element centroids.
pub fn rt0_max_centroid_magnitude<T: Real>(mesh: &Mesh<T>, dofs: &[T]) -> T {
    (0..mesh.n_triangles()).fold(T::zero(), |m, t| {
        let v = rt0_eval_unchecked(mesh, dofs, t, mesh.centroid(t));
        m.max(v[0].hypot(v[1]))
    })
}

/// `∫_K f` per element, degree-4 quadrature.
pub fn assemble_p0_load<T: Real>(mesh: &Mesh<T>, f: impl Fn([T; 2]) -> T) -> Vec<T> {
    let rule = TriangleRule::degree4();
    (0..mesh.n_triangles())
        .map(|t| {
            let area = mesh.area(t);
            rule.map(&mesh.corners(t)).map(|(x, w)| w * area * f(x)).sum()
        })
        .collect()
}

/// `∫ f · ϕ_j` over the vector P1 basis, degree-4 quadrature.
pub fn assemble_p1_vector_load<T: Real>(mesh: &Mesh<T>, f: impl Fn([T; 2]) -> [T; 2]) -> Vec<T> {
    let rule = TriangleRule::<T>::degree4();
    let mut out = vec![T::zero(); 2 * mesh.n_vertices()];
    for t in 0..mesh.n_triangles() {
        let area = mesh.area(t);
        let vs = mesh.triangles[t];
        for (l, &w) in rule.points.iter().zip(&rule.weights) {
            let c = mesh.corners(t);
            let x = [
                l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0],
                l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1],
            ];
            let fx = f(x);
            for k in 0..3 {
                out[2 * vs[k]] += w * area * l[k] * fx[0];
                out[2 * vs[k] + 1] += w * area * l[k] * fx[1];
            }
        }
    }
    out
}
