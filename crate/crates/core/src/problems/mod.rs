//! Experiment definitions: boundary conditions, sources and initial states.

pub mod mandel;
pub mod manufactured;

use std::sync::Arc;

use crate::fem::{Field, FieldState};
use crate::mesh::{Domain, Mesh};
use crate::model::PhysParams;
use crate::scalar::Real;

pub use mandel::{mandel_analytic_isothermal, mandel_problem, MandelAnalytic, MandelConfig, MandelConstants};
pub use manufactured::{manufactured_exact, manufactured_problem, manufactured_rhs, ManufacturedExact, ManufacturedFields};

pub type ScalarSource<T> = Arc<dyn Fn([T; 2], T) -> T + Send + Sync>;
pub type VectorSource<T> = Arc<dyn Fn([T; 2], T) -> [T; 2] + Send + Sync>;

/// Right-hand sides of the heat, flow and momentum equations as functions of
/// position and time. `None` means identically zero.
#[derive(Clone, Default)]
pub struct Sources<T> {
    pub heat: Option<ScalarSource<T>>,
    pub flow: Option<ScalarSource<T>>,
    pub body_force: Option<VectorSource<T>>,
}

/// Prescribed dof values for each field at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialValues<T> {
    pub per_field: [Vec<(usize, T)>; 5],
}

impl<T> Default for EssentialValues<T> {
    fn default() -> Self {
        Self { per_field: Default::default() }
    }
}

impl<T: Real> EssentialValues<T> {
    pub fn field(&self, f: Field) -> &[(usize, T)] {
        &self.per_field[f.index()]
    }

    pub fn push(&mut self, f: Field, dof: usize, value: T) {
        self.per_field[f.index()].push((dof, value));
    }

    /// Overwrites the constrained entries of `state`.
    pub fn impose(&self, state: &mut FieldState<T>) {
        for f in Field::ALL {
            let v = state.field_mut(f);
            for &(d, x) in self.field(f) {
                v[d] = x;
            }
        }
    }
}

pub type EssentialFn<T> = Arc<dyn Fn(&Mesh<T>, T) -> EssentialValues<T> + Send + Sync>;
pub type InitialFn<T> = Arc<dyn Fn(&Mesh<T>) -> FieldState<T> + Send + Sync>;

/// A complete experiment: domain, coefficients, data and initial state.
/// Natural (flux-equation) boundary data is zero in both experiments and is
/// therefore not represented.
#[derive(Clone)]
pub struct ProblemSpec<T> {
    pub name: String,
    pub domain: Domain<T>,
    pub params: PhysParams<T>,
    pub sources: Sources<T>,
    pub essential: EssentialFn<T>,
    pub initial: InitialFn<T>,
}

impl<T: Real> ProblemSpec<T> {
    /// Zero data, zero initial state and clamped displacement.
    pub fn homogeneous(domain: Domain<T>, params: PhysParams<T>) -> Self {
        Self {
            name: "homogeneous".into(),
            domain,
            params,
            sources: Sources::default(),
            essential: Arc::new(|mesh, _| clamped_displacement(mesh)),
            initial: Arc::new(|mesh| FieldState::zeros(&crate::fem::FeSpaces::new(mesh))),
        }
    }
}

/// `u = 0` at every boundary vertex.
pub fn clamped_displacement<T: Real>(mesh: &Mesh<T>) -> EssentialValues<T> {
    let mut ev = EssentialValues::default();
    for v in boundary_vertices(mesh) {
        ev.push(Field::U, 2 * v, T::zero());
        ev.push(Field::U, 2 * v + 1, T::zero());
    }
    ev
}

/// Vertices on the rectangle's boundary in ascending order.
pub fn boundary_vertices<T: Real>(mesh: &Mesh<T>) -> Vec<usize> {
    let mut on = vec![false; mesh.n_vertices()];
    for (e, tag) in mesh.boundary_tags.iter().enumerate() {
        if tag.is_some() {
            let [a, b] = mesh.edges[e];
            on[a] = true;
            on[b] = true;
        }
    }
    (0..mesh.n_vertices()).filter(|&v| on[v]).collect()
}
