//! Time stepping and the per-step coupling iteration.

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::fem::{rt0_max_centroid_magnitude, FeSpaces, Field, FieldState};
use crate::linalg::{assemble_block, BlockSystem, Constraints, LuSolver, SparseMatrix};
use crate::mesh::Mesh;
use crate::model::PhysParams;
use crate::problems::{EssentialValues, ProblemSpec};
use crate::scalar::{dot, Real};

use super::operator::Operators;
use super::{InitialGuess, IterationReport, SchemeKind, SolverOptions, StopNorm};

/// Assembled source terms of one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLoads<T> {
    pub heat: Vec<T>,
    pub flow: Vec<T>,
    pub force: Vec<T>,
}

/// One group of fields solved together, with its cached factorization.
struct Group<T: Real> {
    fields: Vec<Field>,
    offsets: Vec<usize>,
    size: usize,
    has_heat: bool,
    constraints: Constraints<T>,
    matrix: Option<SparseMatrix<T>>,
    lu: Option<LuSolver<T>>,
    /// Darcy flux the cached convection block was built from.
    lu_w: Option<Vec<T>>,
}

impl<T: Real> Group<T> {
    fn local(&self, f: Field) -> Option<usize> {
        self.fields.iter().position(|&g| g == f)
    }
}

/// Iteration driver for one scheme on one mesh and time step size.
pub struct SchemeSolver<'m, T: Real> {
    mesh: &'m Mesh<T>,
    scheme: SchemeKind,
    ops: Operators<T>,
    options: SolverOptions<T>,
    groups: Vec<Group<T>>,
    l2: Option<[SparseMatrix<T>; 5]>,
}

impl<'m, T: Real> SchemeSolver<'m, T> {
    pub fn new(scheme: SchemeKind, mesh: &'m Mesh<T>, params: &PhysParams<T>, tau: T, options: SolverOptions<T>) -> Result<Self> {
        if !(tau > T::zero()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {tau}")));
        }
        if !(options.atol > T::zero()) || !(options.rtol > T::zero()) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        let (l_t, l_p) = options.stabilization.resolve(params)?;
        let ops = Operators::new(mesh, params, tau, l_t, l_p)?;
        let sizes = ops.spaces.sizes();
        let groups = scheme
            .groups()
            .into_iter()
            .map(|phys| {
                let mut fields: Vec<Field> = phys.iter().flat_map(|p| p.fields().iter().copied()).collect();
                fields.sort();
                let mut offsets = Vec::with_capacity(fields.len());
                let mut size = 0;
                for f in &fields {
                    offsets.push(size);
                    size += sizes[f.index()];
                }
                Group {
                    has_heat: fields.contains(&Field::T),
                    constraints: Constraints::unconstrained(size),
                    fields,
                    offsets,
                    size,
                    matrix: None,
                    lu: None,
                    lu_w: None,
                }
            })
            .collect();
        let l2 = match options.norm {
            StopNorm::L2 => Some(Operators::l2_weights(mesh)?),
            StopNorm::Euclidean => None,
        };
        debug!("{scheme}: L_T = {l_t}, L_p = {l_p}, {} dofs", ops.spaces.total());
        Ok(Self { mesh, scheme, ops, options, groups, l2 })
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn operators(&self) -> &Operators<T> {
        &self.ops
    }

    pub fn options(&self) -> &SolverOptions<T> {
        &self.options
    }

    /// `(L_T, L_p)` in use.
    pub fn stabilization(&self) -> (T, T) {
        (self.ops.l_t, self.ops.l_p)
    }

    /// Norm used by the stopping criterion.
    pub fn norm(&self, s: &FieldState<T>) -> T {
        match &self.l2 {
            None => s.norm(),
            Some(w) => Field::ALL
                .iter()
                .map(|f| dot(s.field(*f), &w[f.index()].matvec(s.field(*f))))
                .sum::<T>()
                .max(T::zero())
                .sqrt(),
        }
    }

    pub fn dist(&self, a: &FieldState<T>, b: &FieldState<T>) -> T {
        match &self.l2 {
            None => a.dist(b),
            Some(_) => self.norm(&a.sub(b)),
        }
    }

    /// Installs the prescribed dofs of the current time level.
    pub fn set_constraints(&mut self, ev: &EssentialValues<T>) -> Result<()> {
        for g in &mut self.groups {
            let mut dofs = Vec::new();
            let mut vals = Vec::new();
            for (k, f) in g.fields.iter().enumerate() {
                for &(d, v) in ev.field(*f) {
                    dofs.push(g.offsets[k] + d);
                    vals.push(v);
                }
            }
            let c = Constraints::new(g.size, &dofs, &vals)?;
            if c.free() != g.constraints.free() {
                g.lu = None;
                g.lu_w = None;
            }
            g.constraints = c;
        }
        Ok(())
    }

    /// One sweep over the scheme's groups starting from `lagged`.
    pub fn iterate_once(&mut self, lagged: &FieldState<T>, base: &[Vec<T>; 5]) -> Result<FieldState<T>> {
        let mut cur = lagged.clone();
        let mesh = self.mesh;
        for gi in 0..self.groups.len() {
            let ops = &self.ops;
            let g = &mut self.groups[gi];

            let mut rhs = vec![T::zero(); g.size];
            for (k, &f) in g.fields.iter().enumerate() {
                let seg = &mut rhs[g.offsets[k]..g.offsets[k] + ops.spaces.sizes()[f.index()]];
                seg.copy_from_slice(&base[f.index()]);
                ops.stabilization_rhs(f, lagged, seg);
                for c in Field::ALL {
                    if g.local(c).is_none() {
                        if let Some(m) = ops.block(f, c) {
                            m.matvec_acc(-T::one(), cur.field(c), seg);
                        }
                    }
                }
            }

            let convective = g.has_heat && ops.params.c_f != T::zero();
            let stale = g.lu.is_none() || (convective && g.lu_w.as_deref() != Some(&cur.w[..]));
            if stale {
                let mut grid = vec![vec![None; g.fields.len()]; g.fields.len()];
                for (i, &r) in g.fields.iter().enumerate() {
                    for (j, &c) in g.fields.iter().enumerate() {
                        grid[i][j] = ops.block_with(mesh, r, c, &cur.w)?;
                    }
                }
                let sizes = g.fields.iter().map(|f| ops.spaces.sizes()[f.index()]).collect::<Vec<_>>();
                let mut sys = BlockSystem::new(sizes.clone(), sizes);
                for (i, row) in grid.into_iter().enumerate() {
                    for (j, blk) in row.into_iter().enumerate() {
                        if let Some(m) = blk {
                            sys.set(i, j, m)?;
                        }
                    }
                }
                let full = assemble_block(&sys)?;
                let reduced = g.constraints.reduce_matrix(&full);
                match &mut g.lu {
                    Some(lu) => lu.refactor(&reduced)?,
                    None => g.lu = Some(LuSolver::new(&reduced)?),
                }
                g.matrix = Some(full);
                g.lu_w = convective.then(|| cur.w.clone());
            }

            let full = g.matrix.as_ref().expect("group matrix assembled");
            let b = g.constraints.reduce_rhs(full, &rhs);
            let x = if g.constraints.n_free() == 0 {
                Vec::new()
            } else {
                g.lu.as_ref().expect("group factorized").solve(&b)?
            };
            let x = g.constraints.extend(&x);
            for (k, &f) in g.fields.iter().enumerate() {
                let n = ops.spaces.sizes()[f.index()];
                cur.field_mut(f).copy_from_slice(&x[g.offsets[k]..g.offsets[k] + n]);
            }
        }
        Ok(cur)
    }

    /// Iterates one time step to convergence or `max_iter`.
    pub fn solve_step(
        &mut self,
        prev: &FieldState<T>,
        loads: &StepLoads<T>,
        essential: &EssentialValues<T>,
        step: usize,
        time: T,
    ) -> Result<(FieldState<T>, IterationReport<T>)> {
        prev.check(&self.ops.spaces)?;
        let base = self.ops.base_rhs(prev, loads);
        let mut cur = match self.options.initial_guess {
            InitialGuess::Previous => prev.clone(),
            InitialGuess::Zero => FieldState::zeros(&self.ops.spaces),
        };
        essential.impose(&mut cur);
        self.set_constraints(essential)?;

        let opts = self.options;
        let mut iterates = if opts.record_iterates { vec![cur.clone()] } else { Vec::new() };
        let mut history = Vec::new();
        let mut converged = false;
        for i in 1..=opts.max_iter {
            let next = self
                .iterate_once(&cur, &base)
                .map_err(|e| Error::Step { step, iteration: i, source: Box::new(e) })?;
            if !next.is_finite() {
                warn!("step {step}: iterate {i} is not finite, giving up");
                history.push(T::infinity());
                if opts.record_iterates {
                    iterates.push(next.clone());
                }
                cur = next;
                break;
            }
            let res = self.dist(&next, &cur);
            let tol = opts.atol + opts.rtol * self.norm(&next);
            history.push(res);
            if opts.record_iterates {
                iterates.push(next.clone());
            }
            cur = next;
            if res <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            warn!("step {step}: {} did not converge in {} iterations", self.scheme, history.len());
        }

        let m = self.ops.params.cutoff_m;
        let max_heat_flux = rt0_max_centroid_magnitude(self.mesh, &cur.r);
        let max_darcy_flux = rt0_max_centroid_magnitude(self.mesh, &cur.w);
        let cutoff_exceeded = max_heat_flux > m || max_darcy_flux > m;
        if cutoff_exceeded {
            warn!("step {step}: flux magnitude ({max_heat_flux}, {max_darcy_flux}) exceeds the cut-off {m}");
        }
        let contraction_factors = history.windows(2).map(|w| w[1] / w[0]).collect();
        let report = IterationReport {
            step,
            time,
            iterations: history.len(),
            converged,
            residual_history: history,
            contraction_factors,
            iterates,
            max_heat_flux,
            max_darcy_flux,
            cutoff_exceeded,
        };
        Ok((cur, report))
    }
}

/// States and iteration reports of a transient run.
#[derive(Debug, Clone)]
pub struct TransientResult<T> {
    pub initial: FieldState<T>,
    /// State after each step.
    pub states: Vec<FieldState<T>>,
    pub reports: Vec<IterationReport<T>>,
}

impl<T> TransientResult<T> {
    pub fn all_converged(&self) -> bool {
        self.reports.iter().all(|r| r.converged)
    }
}

/// Backward Euler over `n_steps` steps of size `tau`, iterating each step
/// with `scheme`.
pub fn run_transient<T: Real>(
    scheme: SchemeKind,
    mesh: &Mesh<T>,
    problem: &ProblemSpec<T>,
    tau: T,
    n_steps: usize,
    options: SolverOptions<T>,
) -> Result<TransientResult<T>> {
    let mut solver = SchemeSolver::new(scheme, mesh, &problem.params, tau, options)?;
    let initial = (problem.initial)(mesh);
    initial.check(&FeSpaces::new(mesh))?;
    let mut prev = initial.clone();
    let mut states = Vec::with_capacity(n_steps);
    let mut reports = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let t = tau * T::from_usize_lossy(n);
        let loads = solver.operators().loads(mesh, &problem.sources, t);
        let essential = (problem.essential)(mesh, t);
        let (state, report) = solver.solve_step(&prev, &loads, &essential, n, t)?;
        debug!("step {n} t = {t}: {} iterations, converged = {}", report.iterations, report.converged);
        prev = state.clone();
        states.push(state);
        reports.push(report);
    }
    Ok(TransientResult { initial, states, reports })
}
