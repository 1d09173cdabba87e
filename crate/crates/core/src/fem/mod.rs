//! Mixed finite elements: P0 temperature and pressure, RT0 fluxes, vector P1
//! displacement.

pub mod assembly;
pub mod norms;
pub mod quadrature;
pub mod state;

pub use assembly::{
    apply_cutoff, assemble_convection, assemble_div_coupling, assemble_elasticity, assemble_p0_load,
    assemble_p0_mass, assemble_p1_vector_load, assemble_p1_vector_mass, assemble_rt0_div,
    assemble_weighted_rt0_mass, barycentric_gradients, p1_evaluate, p1_interpolate, rt0_basis,
    rt0_evaluate, rt0_interpolate, rt0_max_centroid_magnitude, scaled_identity, spd_inverse, Tensor2,
};
pub use norms::{l2_errors, ExactFields, L2Errors, ZeroFields};
pub use state::{FeSpaces, Field, FieldState};
