//! Dof counts and the five-field state vector.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::scalar::{norm2, Real};

/// Dimensions of the discrete spaces: P0 temperature and pressure, RT0 heat
/// and Darcy fluxes, vector P1 displacement (dof `2·vertex + component`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeSpaces {
    pub n_t: usize,
    pub n_r: usize,
    pub n_p: usize,
    pub n_w: usize,
    pub n_u: usize,
}

impl FeSpaces {
    pub fn new<T: Real>(mesh: &Mesh<T>) -> Self {
        let (ne, nd) = (mesh.n_triangles(), mesh.n_edges());
        Self { n_t: ne, n_r: nd, n_p: ne, n_w: nd, n_u: 2 * mesh.n_vertices() }
    }

    pub fn sizes(&self) -> [usize; 5] {
        [self.n_t, self.n_r, self.n_p, self.n_w, self.n_u]
    }

    pub fn total(&self) -> usize {
        self.sizes().iter().sum()
    }
}

/// Field index in the stacked ordering `(T, r, p, w, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    T,
    R,
    P,
    W,
    U,
}

impl Field {
    pub const ALL: [Field; 5] = [Field::T, Field::R, Field::P, Field::W, Field::U];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::T => "T",
            Field::R => "r",
            Field::P => "p",
            Field::W => "w",
            Field::U => "u",
        }
    }
}

/// Dof vectors of all five unknowns at one time level or iterate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldState<T> {
    pub t: Vec<T>,
    pub r: Vec<T>,
    pub p: Vec<T>,
    pub w: Vec<T>,
    pub u: Vec<T>,
}

impl<T: Real> FieldState<T> {
    pub fn zeros(spaces: &FeSpaces) -> Self {
        let z = |n| vec![T::zero(); n];
        Self { t: z(spaces.n_t), r: z(spaces.n_r), p: z(spaces.n_p), w: z(spaces.n_w), u: z(spaces.n_u) }
    }

    pub fn field(&self, f: Field) -> &[T] {
        match f {
            Field::T => &self.t,
            Field::R => &self.r,
            Field::P => &self.p,
            Field::W => &self.w,
            Field::U => &self.u,
        }
    }

    pub fn field_mut(&mut self, f: Field) -> &mut Vec<T> {
        match f {
            Field::T => &mut self.t,
            Field::R => &mut self.r,
            Field::P => &mut self.p,
            Field::W => &mut self.w,
            Field::U => &mut self.u,
        }
    }

    pub fn check(&self, spaces: &FeSpaces) -> Result<()> {
        for (f, n) in Field::ALL.iter().zip(spaces.sizes()) {
            if self.field(*f).len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "field {} has {} dofs, space has {n}",
                    f.name(),
                    self.field(*f).len()
                )));
            }
        }
        Ok(())
    }

    /// Concatenation in the order `(T, r, p, w, u)`.
    pub fn stacked(&self) -> Vec<T> {
        Field::ALL.iter().flat_map(|f| self.field(*f).iter().copied()).collect()
    }

    pub fn from_stacked(spaces: &FeSpaces, v: &[T]) -> Result<Self> {
        if v.len() != spaces.total() {
            return Err(Error::DimensionMismatch(format!(
                "stacked vector has {} entries, spaces need {}",
                v.len(),
                spaces.total()
            )));
        }
        let mut s = Self::default();
        let mut off = 0;
        for (f, n) in Field::ALL.iter().zip(spaces.sizes()) {
            *s.field_mut(*f) = v[off..off + n].to_vec();
            off += n;
        }
        Ok(s)
    }

    /// Euclidean norm of the stacked dof vector.
    pub fn norm(&self) -> T {
        Field::ALL.iter().map(|f| norm2(self.field(*f)).powi(2)).sum::<T>().sqrt()
    }

    /// Euclidean norm of `self − other` over the stacked dofs.
    pub fn dist(&self, other: &Self) -> T {
        Field::ALL
            .iter()
            .map(|f| self.field(*f).iter().zip(other.field(*f)).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>())
            .sum::<T>()
            .sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x - *y).collect();
        Self { t: d(&self.t, &other.t), r: d(&self.r, &other.r), p: d(&self.p, &other.p), w: d(&self.w, &other.w), u: d(&self.u, &other.u) }
    }

    pub fn is_finite(&self) -> bool {
        Field::ALL.iter().all(|f| self.field(*f).iter().all(|v| v.is_finite()))
    }
}
