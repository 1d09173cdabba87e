//! Structured triangulations of axis-aligned rectangles.
//!
//! Every grid cell is split along its bottom-left to top-right diagonal. Edges
//! are globally oriented from the lower to the higher vertex index; the unit
//! normal of an edge is its tangent rotated clockwise. Each triangle stores,
//! for the local edge opposite local vertex `k`, the global edge index and the
//! sign relating the global normal to the triangle's outward normal.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rectangle `[0, width] × [0, height]` with its subdivision counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    pub width: T,
    pub height: T,
    pub nx: usize,
    pub ny: usize,
}

impl<T: Real> Domain<T> {
    pub fn new(width: T, height: T, nx: usize, ny: usize) -> Self {
        Self { width, height, nx, ny }
    }

    /// Unit square with `n × n` cells.
    pub fn unit_square(n: usize) -> Self {
        Self::new(T::one(), T::one(), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > T::zero()) || !(self.height > T::zero()) {
            return Err(Error::InvalidDomain(format!(
                "extents must be positive, got {} x {}",
                self.width, self.height
            )));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidDomain(format!(
                "subdivision counts must be at least 1, got {} x {}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// Side of the rectangle a boundary edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "bottom" => Ok(Side::Bottom),
            "top" => Ok(Side::Top),
            other => Err(Error::InvalidArgument(format!("unknown boundary tag `{other}`"))),
        }
    }
}

/// Reference from a triangle to one of its edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    pub edge: usize,
    /// `+1` when the global edge normal points out of the triangle.
    pub sign: i8,
}

/// Conforming triangulation of a rectangle.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    pub domain: Domain<T>,
    pub vertices: Vec<[T; 2]>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Vertex pairs `(low, high)`.
    pub edges: Vec<[usize; 2]>,
    /// Local edge `k` is opposite local vertex `k`.
    pub triangle_edges: Vec<[EdgeRef; 3]>,
    /// Triangles adjacent to each edge; the second slot is empty on the boundary.
    pub edge_triangles: Vec<[Option<usize>; 2]>,
    /// Side of each edge, `None` for interior edges.
    pub boundary_tags: Vec<Option<Side>>,
}

/// Splits every cell of the grid along its bottom-left to top-right diagonal.
pub fn build_rect_mesh<T: Real>(domain: Domain<T>) -> Result<Mesh<T>> {
    domain.validate()?;
    let Domain { width, height, nx, ny } = domain;
    let hx = width / T::from_usize_lossy(nx);
    let hy = height / T::from_usize_lossy(ny);
    let vid = |i: usize, j: usize| j * (nx + 1) + i;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // pin the far sides exactly to the extents
            let x = if i == nx { width } else { hx * T::from_usize_lossy(i) };
            let y = if j == ny { height } else { hy * T::from_usize_lossy(j) };
            vertices.push([x, y]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * nx * ny + nx + ny);
    let mut edges = Vec::new();
    let mut edge_triangles: Vec<[Option<usize>; 2]> = Vec::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut refs = [EdgeRef { edge: 0, sign: 1 }; 3];
        for (k, slot) in refs.iter_mut().enumerate() {
            let a = tri[(k + 1) % 3];
            let b = tri[(k + 2) % 3];
            let key = (a.min(b), a.max(b));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push([key.0, key.1]);
                edge_triangles.push([None, None]);
                edges.len() - 1
            });
            if edge_triangles[e][0].is_none() {
                edge_triangles[e][0] = Some(t);
            } else {
                edge_triangles[e][1] = Some(t);
            }
            // counter-clockwise traversal a -> b has the outward normal on its right
            *slot = EdgeRef { edge: e, sign: if a < b { 1 } else { -1 } };
        }
        triangle_edges.push(refs);
    }

    let grid = |v: usize| (v % (nx + 1), v / (nx + 1));
    let boundary_tags = edges
        .iter()
        .zip(&edge_triangles)
        .map(|(&[a, b], adj)| {
            if adj[1].is_some() {
                return None;
            }
            let ((ia, ja), (ib, jb)) = (grid(a), grid(b));
            if ia == 0 && ib == 0 {
                Some(Side::Left)
            } else if ia == nx && ib == nx {
                Some(Side::Right)
            } else if ja == 0 && jb == 0 {
                Some(Side::Bottom)
            } else if ja == ny && jb == ny {
                Some(Side::Top)
            } else {
                unreachable!("boundary edge {a}-{b} not on the rectangle")
            }
        })
        .collect();

    Ok(Mesh { domain, vertices, triangles, edges, triangle_edges, edge_triangles, boundary_tags })
}

/// Edges lying on the given side, in ascending index order.
pub fn boundary_edges<T>(mesh: &Mesh<T>, side: Side) -> Vec<usize> {
    mesh.boundary_tags
        .iter()
        .enumerate()
        .filter_map(|(e, tag)| (*tag == Some(side)).then_some(e))
        .collect()
}

impl<T: Real> Mesh<T> {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn corners(&self, t: usize) -> [[T; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area (positive for counter-clockwise ordering).
    pub fn area(&self, t: usize) -> T {
        let [p0, p1, p2] = self.corners(t);
        ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])) * T::lit(0.5)
    }

    pub fn centroid(&self, t: usize) -> [T; 2] {
        let [p0, p1, p2] = self.corners(t);
        let third = T::one() / T::lit(3.0);
        [(p0[0] + p1[0] + p2[0]) * third, (p0[1] + p1[1] + p2[1]) * third]
    }

    pub fn edge_length(&self, e: usize) -> T {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt()
    }

    pub fn edge_midpoint(&self, e: usize) -> [T; 2] {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let half = T::lit(0.5);
        [(pa[0] + pb[0]) * half, (pa[1] + pb[1]) * half]
    }

    /// Unit normal of the global edge orientation (tangent rotated clockwise).
    pub fn edge_normal(&self, e: usize) -> [T; 2] {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let len = self.edge_length(e);
        [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len]
    }

    /// Largest triangle diameter.
    pub fn h_max(&self) -> T {
        let dx = self.domain.width / T::from_usize_lossy(self.domain.nx);
        let dy = self.domain.height / T::from_usize_lossy(self.domain.ny);
        (dx * dx + dy * dy).sqrt()
    }

    /// Barycentric coordinates of `x` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, x: [T; 2]) -> [T; 3] {
        let [p0, p1, p2] = self.corners(t);
        let two_area = self.area(t) * T::lit(2.0);
        let l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (x[1] - p0[1])) / two_area;
        let l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (x[0] - p0[0]) * (p1[1] - p0[1])) / two_area;
        [T::one() - l1 - l2, l1, l2]
    }

    /// Whether `x` lies in the closed triangle `t` (with a relative tolerance).
    pub fn contains(&self, t: usize, x: [T; 2]) -> bool {
        let tol = T::epsilon().sqrt();
        self.barycentric(t, x).iter().all(|&l| l >= -tol)
    }

    /// Triangle containing `x`; points on shared edges resolve to the lower index.
    pub fn locate(&self, x: [T; 2]) -> Option<usize> {
        let Domain { width, height, nx, ny } = self.domain;
        let tol = T::epsilon().sqrt();
        if x[0] < -tol * width || x[0] > width * (T::one() + tol) || x[1] < -tol * height || x[1] > height * (T::one() + tol) {
            return None;
        }
        let sx = x[0] / width * T::from_usize_lossy(nx);
        let sy = x[1] / height * T::from_usize_lossy(ny);
        let i = sx.floor().to_usize().unwrap_or(0).min(nx - 1);
        let j = sy.floor().to_usize().unwrap_or(0).min(ny - 1);
        let fx = sx - T::from_usize_lossy(i);
        let fy = sy - T::from_usize_lossy(j);
        let cell = j * nx + i;
        Some(if fx >= fy { 2 * cell } else { 2 * cell + 1 })
    }

    /// Plain-text dump: vertices, triangles, and tagged edges.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# vertices {}", self.n_vertices())?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(out, "{i} {:.12e} {:.12e}", v[0].as_f64(), v[1].as_f64())?;
        }
        writeln!(out, "# triangles {}", self.n_triangles())?;
        for (i, t) in self.triangles.iter().enumerate() {
            writeln!(out, "{i} {} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(out, "# edges {}", self.n_edges())?;
        for (i, (e, tag)) in self.edges.iter().zip(&self.boundary_tags).enumerate() {
            let tag = tag.map_or("interior", Side::as_str);
            writeln!(out, "{i} {} {} {tag}", e[0], e[1])?;
        }
        Ok(())
    }
}
