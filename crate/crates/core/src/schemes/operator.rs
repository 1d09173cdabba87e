//! Matrices of the linearized, stabilized five-field operator.
//!
//! With `s = 1/T_ref` and `A`, `B`, `D` the P0 mass, RT0 divergence and
//! displacement divergence matrices, block rows are
//!
//! ```text
//! T: (a0+L_T)s A    τ(B + C(w))   −b0 A          ·      β D
//! r: −s Bᵀ          M_Θ           ·              ·      ·
//! p: −b0 A          ·             (c0+L_p) A     τB     α D
//! w: ·              ·             −Bᵀ            M_K    ·
//! u: −β_u Dᵀ        ·             −α Dᵀ          ·      E
//! ```
//!
//! where `C(w)` is the convection matrix and `β_u` is `β` or `β s`.

use crate::error::Result;
use crate::fem::{
    assemble_convection, assemble_div_coupling, assemble_elasticity, assemble_p0_load, assemble_p0_mass,
    assemble_p1_vector_load, assemble_p1_vector_mass, assemble_rt0_div, assemble_weighted_rt0_mass, scaled_identity,
    FeSpaces, Field, FieldState,
};
use crate::linalg::{assemble_block, BlockSystem, SparseMatrix};
use crate::mesh::Mesh;
use crate::model::PhysParams;
use crate::problems::Sources;
use crate::scalar::Real;

use super::driver::StepLoads;

#[derive(Debug, Clone)]
pub struct Operators<T> {
    pub spaces: FeSpaces,
    pub params: PhysParams<T>,
    pub tau: T,
    pub l_t: T,
    pub l_p: T,
    pub mass: SparseMatrix<T>,
    pub div: SparseMatrix<T>,
    pub div_u: SparseMatrix<T>,
    pub mass_theta: SparseMatrix<T>,
    pub mass_k: SparseMatrix<T>,
    blocks: Vec<Vec<Option<SparseMatrix<T>>>>,
}

impl<T: Real> Operators<T> {
    pub fn new(mesh: &Mesh<T>, params: &PhysParams<T>, tau: T, l_t: T, l_p: T) -> Result<Self> {
        params.validate()?;
        let p = params;
        let s = T::one() / p.t_ref;
        let mass = assemble_p0_mass(mesh);
        let div = assemble_rt0_div(mesh);
        let div_t = div.transpose();
        let div_u = assemble_div_coupling(mesh);
        let div_u_t = div_u.transpose();
        let mass_theta = assemble_weighted_rt0_mass(mesh, &p.theta)?;
        let mass_k = assemble_weighted_rt0_mass(mesh, &p.k)?;
        let elasticity = assemble_elasticity(mesh, p.mu, p.lambda)?;

        let mut blocks: Vec<Vec<Option<SparseMatrix<T>>>> = vec![vec![None; 5]; 5];
        let mut set = |r: Field, c: Field, m: SparseMatrix<T>| blocks[r.index()][c.index()] = Some(m);
        set(Field::T, Field::T, mass.scaled((p.a0 + l_t) * s));
        set(Field::T, Field::R, div.scaled(tau));
        set(Field::T, Field::P, mass.scaled(-p.b0));
        set(Field::T, Field::U, div_u.scaled(p.beta));
        set(Field::R, Field::T, div_t.scaled(-s));
        set(Field::R, Field::R, mass_theta.clone());
        set(Field::P, Field::T, mass.scaled(-p.b0));
        set(Field::P, Field::P, mass.scaled(p.c0 + l_p));
        set(Field::P, Field::W, div.scaled(tau));
        set(Field::P, Field::U, div_u.scaled(p.alpha));
        set(Field::W, Field::P, div_t.scaled(-T::one()));
        set(Field::W, Field::W, mass_k.clone());
        set(Field::U, Field::T, div_u_t.scaled(-p.thermal_stress_coefficient()));
        set(Field::U, Field::P, div_u_t.scaled(-p.alpha));
        set(Field::U, Field::U, elasticity);

        Ok(Self { spaces: FeSpaces::new(mesh), params: *p, tau, l_t, l_p, mass, div, div_u, mass_theta, mass_k, blocks })
    }

    /// Static block; the `(T, r)` block excludes convection.
    pub fn block(&self, row: Field, col: Field) -> Option<&SparseMatrix<T>> {
        self.blocks[row.index()][col.index()].as_ref()
    }

    /// `τ(B + C(w))`; same sparsity pattern for every `w`.
    pub fn heat_flux_block(&self, mesh: &Mesh<T>, w: &[T]) -> Result<SparseMatrix<T>> {
        let p = &self.params;
        if p.c_f == T::zero() {
            return Ok(self.div.scaled(self.tau));
        }
        let c = assemble_convection(mesh, w, &p.theta, p.c_f, p.cutoff_m)?;
        self.div.lin_comb(self.tau, &c, self.tau)
    }

    /// Block `(row, col)` with convection built from `w`.
    pub fn block_with(&self, mesh: &Mesh<T>, row: Field, col: Field, w: &[T]) -> Result<Option<SparseMatrix<T>>> {
        if (row, col) == (Field::T, Field::R) {
            return self.heat_flux_block(mesh, w).map(Some);
        }
        Ok(self.block(row, col).cloned())
    }

    /// Monolithic matrix with convection from `w`.
    pub fn monolithic(&self, mesh: &Mesh<T>, w: &[T]) -> Result<SparseMatrix<T>> {
        let mut grid = vec![vec![None; 5]; 5];
        for r in Field::ALL {
            for c in Field::ALL {
                grid[r.index()][c.index()] = self.block_with(mesh, r, c, w)?;
            }
        }
        assemble_block(&BlockSystem::from_grid(grid)?)
    }

    /// Load vectors at time `t`.
    pub fn loads(&self, mesh: &Mesh<T>, sources: &Sources<T>, t: T) -> StepLoads<T> {
        let sp = &self.spaces;
        let heat = match &sources.heat {
            Some(f) => assemble_p0_load(mesh, |x| f(x, t)),
            None => vec![T::zero(); sp.n_t],
        };
        let flow = match &sources.flow {
            Some(f) => assemble_p0_load(mesh, |x| f(x, t)),
            None => vec![T::zero(); sp.n_p],
        };
        let force = match &sources.body_force {
            Some(f) => assemble_p1_vector_load(mesh, |x| f(x, t)),
            None => vec![T::zero(); sp.n_u],
        };
        StepLoads { heat, flow, force }
    }

    /// Right-hand side without stabilization, per field: sources plus the
    /// content functionals of the previous time level.
    pub fn base_rhs(&self, prev: &FieldState<T>, loads: &StepLoads<T>) -> [Vec<T>; 5] {
        let p = &self.params;
        let s = T::one() / p.t_ref;
        let sp = &self.spaces;
        let mut rt = loads.heat.iter().map(|&z| self.tau * z).collect::<Vec<_>>();
        self.mass.matvec_acc(p.a0 * s, &prev.t, &mut rt);
        self.mass.matvec_acc(-p.b0, &prev.p, &mut rt);
        self.div_u.matvec_acc(p.beta, &prev.u, &mut rt);
        let mut rp = loads.flow.iter().map(|&g| self.tau * g).collect::<Vec<_>>();
        self.mass.matvec_acc(p.c0, &prev.p, &mut rp);
        self.mass.matvec_acc(-p.b0, &prev.t, &mut rp);
        self.div_u.matvec_acc(p.alpha, &prev.u, &mut rp);
        [rt, vec![T::zero(); sp.n_r], rp, vec![T::zero(); sp.n_w], loads.force.clone()]
    }

    /// Stabilization contribution `L_T s A T_lag` or `L_p A p_lag` to the
    /// right-hand side of `field`'s rows.
    pub fn stabilization_rhs(&self, field: Field, lag: &FieldState<T>, out: &mut [T]) {
        match field {
            Field::T if self.l_t != T::zero() => self.mass.matvec_acc(self.l_t / self.params.t_ref, &lag.t, out),
            Field::P if self.l_p != T::zero() => self.mass.matvec_acc(self.l_p, &lag.p, out),
            _ => {}
        }
    }

    /// Residual of the unstabilized nonlinear discrete system at `state`
    /// (convection evaluated at `state.w`), per field, without the rows of
    /// prescribed dofs removed.
    pub fn discrete_residual(&self, mesh: &Mesh<T>, state: &FieldState<T>, base: &[Vec<T>; 5]) -> Result<[Vec<T>; 5]> {
        let mut out: [Vec<T>; 5] = std::array::from_fn(|i| base[i].iter().map(|&v| -v).collect());
        for r in Field::ALL {
            for c in Field::ALL {
                if let Some(m) = self.block_with(mesh, r, c, &state.w)? {
                    m.matvec_acc(T::one(), state.field(c), &mut out[r.index()]);
                }
            }
        }
        // remove the stabilization carried by the diagonal blocks
        let s = T::one() / self.params.t_ref;
        self.mass.matvec_acc(-self.l_t * s, &state.t, &mut out[Field::T.index()]);
        self.mass.matvec_acc(-self.l_p, &state.p, &mut out[Field::P.index()]);
        Ok(out)
    }

    /// Squared-L2 weights for the stopping norm: `(A, M_I, A, M_I, M_P1)`.
    pub fn l2_weights(mesh: &Mesh<T>) -> Result<[SparseMatrix<T>; 5]> {
        let a = assemble_p0_mass(mesh);
        let m = assemble_weighted_rt0_mass(mesh, &scaled_identity(T::one()))?;
        Ok([a.clone(), m.clone(), a, m, assemble_p1_vector_mass(mesh)])
    }
}
