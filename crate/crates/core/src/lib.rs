//! Mixed finite elements and iterative coupling schemes for non-isothermal
//! poroelasticity with thermal convection.

pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod problems;
pub mod scalar;
pub mod schemes;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Mesh = mesh::Mesh<f64>;
pub type Domain = mesh::Domain<f64>;
pub type SparseMatrix = linalg::SparseMatrix<f64>;
pub type FieldState = fem::FieldState<f64>;
pub type PhysParams = model::PhysParams<f64>;
pub type ProblemSpec = problems::ProblemSpec<f64>;
pub type SolverOptions = schemes::SolverOptions<f64>;
pub type IterationReport = schemes::IterationReport<f64>;

pub use schemes::{SchemeKind, StabilizationMode};
