//! Sparse matrices, block composition, essential constraints and direct solves.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};
use crate::scalar::{norm2, Real};

/// Compressed-sparse-row matrix. Explicit zeros are kept so that matrices
/// rebuilt with new values keep the same pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Coordinate-format accumulator; duplicates are summed on finalization.
#[derive(Debug, Clone)]
pub struct Triplets<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> Triplets<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    pub fn with_capacity(rows: usize, cols: usize, cap: usize) -> Self {
        Self { rows, cols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.rows && j < self.cols, "({i}, {j}) outside {}x{}", self.rows, self.cols);
        self.entries.push((i, j, v));
    }

    pub fn build(self) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(self.rows, self.cols, &self.entries)
            .expect("indices checked on push")
    }
}

impl<T: Real> SparseMatrix<T> {
    pub fn from_triplets(rows: usize, cols: usize, entries: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; rows + 1];
        for &(i, j, _) in entries {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            counts[i + 1] += 1;
        }
        for i in 0..rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols_tmp = vec![0usize; entries.len()];
        let mut vals_tmp = vec![T::zero(); entries.len()];
        for &(i, j, v) in entries {
            let slot = next[i];
            cols_tmp[slot] = j;
            vals_tmp[slot] = v;
            next[i] += 1;
        }

        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, T)> = Vec::new();
        for i in 0..rows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|k| (cols_tmp[k], vals_tmp[k])));
            scratch.sort_by_key(|&(j, _)| j);
            for &(j, v) in &scratch {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { rows, cols, row_ptr, col_idx, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self { rows: n, cols: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: d.to_vec() }
    }

    pub fn from_dense(a: &[Vec<T>]) -> Self {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let entries: Vec<_> = a
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, v)| **v != T::zero()).map(move |(j, &v)| (i, j, v)))
            .collect();
        Self::from_triplets(rows, cols, &entries).expect("dense indices in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Iterates `(column, value)` over the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.row_ptr == other.row_ptr && self.col_idx == other.col_idx
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.rows];
        self.matvec_acc(T::one(), x, &mut y);
        y
    }

    /// `y += alpha · A x`
    pub fn matvec_acc(&self, alpha: T, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.cols, "matvec: x has wrong length");
        assert_eq!(y.len(), self.rows, "matvec: y has wrong length");
        for (i, yi) in y.iter_mut().enumerate() {
            let s: T = self.row(i).map(|(j, v)| v * x[j]).sum();
            *yi += alpha * s;
        }
    }

    pub fn transpose(&self) -> Self {
        let entries: Vec<_> = (0..self.rows).flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v))).collect();
        Self::from_triplets(self.cols, self.rows, &entries).expect("transposed indices in range")
    }

    pub fn scaled(&self, alpha: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `alpha · self + beta · other`, pattern is the union of both.
    pub fn lin_comb(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.rows {
            entries.extend(self.row(i).map(|(j, v)| (i, j, alpha * v)));
            entries.extend(other.row(i).map(|(j, v)| (i, j, beta * v)));
        }
        Self::from_triplets(self.rows, self.cols, &entries)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.cols]; self.rows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        d
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `max |A_ij − A_ji| ≤ tol · max |A|`.
    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs();
        (0..self.rows).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= rel_tol * scale))
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, T>> {
        let entries: Vec<_> = (0..self.rows)
            .flat_map(|i| self.row(i).map(move |(j, v)| Triplet::new(i, j, v)))
            .collect();
        SparseColMat::try_new_from_triplets(self.rows, self.cols, &entries)
            .map_err(|e| Error::InvalidArgument(format!("sparse conversion failed: {e:?}")))
    }
}

/// Grid of optional blocks with fixed row and column partitions.
#[derive(Debug, Clone)]
pub struct BlockSystem<T> {
    row_sizes: Vec<usize>,
    col_sizes: Vec<usize>,
    blocks: Vec<Vec<Option<SparseMatrix<T>>>>,
}

impl<T: Real> BlockSystem<T> {
    pub fn new(row_sizes: Vec<usize>, col_sizes: Vec<usize>) -> Self {
        let blocks = vec![vec![None; col_sizes.len()]; row_sizes.len()];
        Self { row_sizes, col_sizes, blocks }
    }

    /// Builds a system from a grid, inferring the partition from the blocks
    /// present. Every block row and column needs at least one block.
    pub fn from_grid(grid: Vec<Vec<Option<SparseMatrix<T>>>>) -> Result<Self> {
        let nr = grid.len();
        let nc = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|row| row.len() != nc) {
            return Err(Error::DimensionMismatch("ragged block grid".into()));
        }
        let mut row_sizes = vec![None; nr];
        let mut col_sizes = vec![None; nc];
        for (bi, row) in grid.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                if let Some(m) = blk {
                    for (slot, size, what, idx) in [(&mut row_sizes[bi], m.rows(), "row", bi), (&mut col_sizes[bj], m.cols(), "column", bj)] {
                        match *slot {
                            None => *slot = Some(size),
                            Some(s) if s != size => {
                                return Err(Error::DimensionMismatch(format!(
                                    "block {what} {idx} has inconsistent sizes {s} and {size}"
                                )))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        let unwrap_sizes = |v: Vec<Option<usize>>, what: &str| -> Result<Vec<usize>> {
            v.into_iter()
                .enumerate()
                .map(|(i, s)| s.ok_or_else(|| Error::DimensionMismatch(format!("block {what} {i} has no blocks"))))
                .collect()
        };
        Ok(Self { row_sizes: unwrap_sizes(row_sizes, "row")?, col_sizes: unwrap_sizes(col_sizes, "column")?, blocks: grid })
    }

    pub fn set(&mut self, bi: usize, bj: usize, m: SparseMatrix<T>) -> Result<()> {
        if m.rows() != self.row_sizes[bi] || m.cols() != self.col_sizes[bj] {
            return Err(Error::DimensionMismatch(format!(
                "block ({bi}, {bj}) is {}x{}, partition expects {}x{}",
                m.rows(),
                m.cols(),
                self.row_sizes[bi],
                self.col_sizes[bj]
            )));
        }
        self.blocks[bi][bj] = Some(m);
        Ok(())
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn col_sizes(&self) -> &[usize] {
        &self.col_sizes
    }

    /// Concatenates per-block right-hand sides.
    pub fn flatten_rhs(&self, parts: &[&[T]]) -> Result<Vec<T>> {
        if parts.len() != self.row_sizes.len() || parts.iter().zip(&self.row_sizes).any(|(p, &n)| p.len() != n) {
            return Err(Error::DimensionMismatch("right-hand side does not match the row partition".into()));
        }
        Ok(parts.iter().flat_map(|p| p.iter().copied()).collect())
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = vec![0];
    for s in sizes {
        off.push(off.last().unwrap() + s);
    }
    off
}

/// Flattens a block system into one matrix; absent blocks are zero.
pub fn assemble_block<T: Real>(system: &BlockSystem<T>) -> Result<SparseMatrix<T>> {
    let ro = offsets(&system.row_sizes);
    let co = offsets(&system.col_sizes);
    let mut entries = Vec::new();
    for (bi, row) in system.blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            let Some(m) = blk else { continue };
            if m.rows() != system.row_sizes[bi] || m.cols() != system.col_sizes[bj] {
                return Err(Error::DimensionMismatch(format!("block ({bi}, {bj}) inconsistent with partition")));
            }
            for i in 0..m.rows() {
                entries.extend(m.row(i).map(|(j, v)| (ro[bi] + i, co[bj] + j, v)));
            }
        }
    }
    SparseMatrix::from_triplets(*ro.last().unwrap(), *co.last().unwrap(), &entries)
}

/// Sparse LU factorization with a post-solve residual check.
///
/// Rows and columns are scaled by their largest entry before factoring, and
/// up to two steps of iterative refinement are applied when the first solve
/// misses the residual target.
pub struct LuSolver<T: Real> {
    matrix: SparseMatrix<T>,
    row_scale: Vec<T>,
    col_scale: Vec<T>,
    symbolic: SymbolicLu<usize>,
    lu: Lu<usize, T>,
}

fn scaling<T: Real>(a: &SparseMatrix<T>) -> Result<(Vec<T>, Vec<T>, SparseMatrix<T>)> {
    let n = a.rows();
    let mut row_scale = vec![T::zero(); n];
    for (i, r) in row_scale.iter_mut().enumerate() {
        let m = a.row(i).fold(T::zero(), |m, (_, v)| m.max(v.abs()));
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::Singular(format!("row {i} is empty or non-finite")));
        }
        *r = m.recip();
    }
    let mut col_max = vec![T::zero(); a.cols()];
    for i in 0..n {
        for (j, v) in a.row(i) {
            col_max[j] = col_max[j].max((v * row_scale[i]).abs());
        }
    }
    let mut col_scale = Vec::with_capacity(a.cols());
    for (j, &m) in col_max.iter().enumerate() {
        if !(m > T::zero()) {
            return Err(Error::Singular(format!("column {j} is empty")));
        }
        col_scale.push(m.recip());
    }
    let mut scaled = a.clone();
    for i in 0..n {
        for k in scaled.row_ptr[i]..scaled.row_ptr[i + 1] {
            let j = scaled.col_idx[k];
            scaled.values[k] *= row_scale[i] * col_scale[j];
        }
    }
    Ok((row_scale, col_scale, scaled))
}

fn map_lu_err(e: faer::sparse::linalg::LuError) -> Error {
    match e {
        faer::sparse::linalg::LuError::SymbolicSingular { index } => {
            Error::Singular(format!("no pivot available at elimination step {index}"))
        }
        other => Error::Singular(format!("{other:?}")),
    }
}

impl<T: Real> LuSolver<T> {
    pub fn new(a: &SparseMatrix<T>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!("cannot factor a {}x{} matrix", a.rows(), a.cols())));
        }
        let (row_scale, col_scale, scaled) = scaling(a)?;
        let fa = scaled.to_faer()?;
        let symbolic = SymbolicLu::try_new(fa.symbolic()).map_err(|e| Error::Singular(format!("{e:?}")))?;
        let lu = Lu::try_new_with_symbolic(symbolic.clone(), fa.as_ref()).map_err(map_lu_err)?;
        Ok(Self { matrix: a.clone(), row_scale, col_scale, symbolic, lu })
    }

    /// Refactors a matrix; the symbolic analysis is reused when the pattern matches.
    pub fn refactor(&mut self, a: &SparseMatrix<T>) -> Result<()> {
        if !a.same_pattern(&self.matrix) {
            *self = Self::new(a)?;
            return Ok(());
        }
        let (row_scale, col_scale, scaled) = scaling(a)?;
        let fa = scaled.to_faer()?;
        self.lu = Lu::try_new_with_symbolic(self.symbolic.clone(), fa.as_ref()).map_err(map_lu_err)?;
        self.matrix = a.clone();
        self.row_scale = row_scale;
        self.col_scale = col_scale;
        Ok(())
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    fn raw_solve(&self, b: &[T]) -> Vec<T> {
        let n = b.len();
        let mut rhs = Mat::<T>::from_fn(n, 1, |i, _| b[i] * self.row_scale[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..n).map(|i| rhs[(i, 0)] * self.col_scale[i]).collect()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.matrix.rows();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs has length {}, matrix is {n}x{n}", b.len())));
        }
        // residuals are measured on the row-equilibrated system so that
        // equations with very different units weigh alike
        let scaled_norm = |v: &[T]| norm2(&v.iter().zip(&self.row_scale).map(|(a, s)| *a * *s).collect::<Vec<_>>());
        let bnorm = scaled_norm(b);
        if bnorm == T::zero() {
            return Ok(vec![T::zero(); n]);
        }
        let tol = T::lit(T::SOLVE_RTOL);
        let mut x = self.raw_solve(b);
        let mut rel = T::infinity();
        for _ in 0..3 {
            let mut r = b.to_vec();
            self.matrix.matvec_acc(-T::one(), &x, &mut r);
            rel = scaled_norm(&r) / bnorm;
            if !rel.is_finite() {
                break;
            }
            if rel <= tol {
                return Ok(x);
            }
            let dx = self.raw_solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += *d);
        }
        if !rel.is_finite() {
            return Err(Error::Singular("factorization produced non-finite values".into()));
        }
        Err(Error::InaccurateSolve { residual: rel.as_f64(), tolerance: T::SOLVE_RTOL })
    }
}

/// One-shot direct solve of `A x = b` meeting the residual contract.
pub fn solve<T: Real>(a: &SparseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    LuSolver::new(a)?.solve(b)
}

/// Fixed values for a subset of unknowns, with the map between full and
/// reduced numbering.
#[derive(Debug, Clone)]
pub struct Constraints<T> {
    full_len: usize,
    /// Reduced index of each full index, `None` for constrained unknowns.
    reduced_of: Vec<Option<usize>>,
    free: Vec<usize>,
    values: Vec<(usize, T)>,
}

impl<T: Real> Constraints<T> {
    pub fn new(full_len: usize, dofs: &[usize], values: &[T]) -> Result<Self> {
        if dofs.len() != values.len() {
            return Err(Error::DimensionMismatch("constraint dofs and values differ in length".into()));
        }
        let mut fixed: Vec<Option<T>> = vec![None; full_len];
        for (&d, &v) in dofs.iter().zip(values) {
            if d >= full_len {
                return Err(Error::InvalidArgument(format!("constrained dof {d} out of range {full_len}")));
            }
            match fixed[d] {
                Some(old) if old != v => {
                    return Err(Error::InvalidArgument(format!("dof {d} constrained to both {old} and {v}")))
                }
                _ => fixed[d] = Some(v),
            }
        }
        let mut reduced_of = vec![None; full_len];
        let mut free = Vec::new();
        let mut vals = Vec::new();
        for (i, f) in fixed.iter().enumerate() {
            match f {
                None => {
                    reduced_of[i] = Some(free.len());
                    free.push(i);
                }
                Some(v) => vals.push((i, *v)),
            }
        }
        Ok(Self { full_len, reduced_of, free, values: vals })
    }

    pub fn unconstrained(full_len: usize) -> Self {
        Self::new(full_len, &[], &[]).expect("no constraints")
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn fixed(&self) -> &[(usize, T)] {
        &self.values
    }

    /// Same constrained set as `self`, new prescribed values.
    pub fn with_values(&self, values: &[(usize, T)]) -> Result<Self> {
        let (dofs, vals): (Vec<usize>, Vec<T>) = values.iter().copied().unzip();
        let c = Self::new(self.full_len, &dofs, &vals)?;
        if c.free != self.free {
            return Err(Error::InvalidArgument("constrained set changed".into()));
        }
        Ok(c)
    }

    pub fn reduce_matrix(&self, a: &SparseMatrix<T>) -> SparseMatrix<T> {
        let n = self.free.len();
        let mut entries = Vec::with_capacity(a.nnz());
        for (ri, &i) in self.free.iter().enumerate() {
            entries.extend(a.row(i).filter_map(|(j, v)| self.reduced_of[j].map(|rj| (ri, rj, v))));
        }
        SparseMatrix::from_triplets(n, n, &entries).expect("reduced indices in range")
    }

    /// `b_f − A_fc · x_c`
    pub fn reduce_rhs(&self, a: &SparseMatrix<T>, b: &[T]) -> Vec<T> {
        let mut xc = vec![T::zero(); self.full_len];
        for &(d, v) in &self.values {
            xc[d] = v;
        }
        self.free
            .iter()
            .map(|&i| {
                let coupling: T = a.row(i).filter(|(j, _)| self.reduced_of[*j].is_none()).map(|(j, v)| v * xc[j]).sum();
                b[i] - coupling
            })
            .collect()
    }

    pub fn extend(&self, reduced: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.full_len];
        for (&i, &v) in self.free.iter().zip(reduced) {
            x[i] = v;
        }
        for &(d, v) in &self.values {
            x[d] = v;
        }
        x
    }
}

/// Reduced system produced by symmetric elimination of essential constraints.
#[derive(Debug, Clone)]
pub struct ReducedSystem<T> {
    pub matrix: SparseMatrix<T>,
    pub rhs: Vec<T>,
    pub constraints: Constraints<T>,
}

impl<T: Real> ReducedSystem<T> {
    /// Lifts a reduced solution back to the full numbering.
    pub fn extend(&self, reduced: &[T]) -> Vec<T> {
        self.constraints.extend(reduced)
    }

    pub fn solve(&self) -> Result<Vec<T>> {
        if self.constraints.n_free() == 0 {
            return Ok(self.extend(&[]));
        }
        Ok(self.extend(&solve(&self.matrix, &self.rhs)?))
    }
}

/// Eliminates the rows and columns of `dofs`, moving their prescribed values
/// to the right-hand side.
pub fn apply_essential_bc<T: Real>(
    a: &SparseMatrix<T>,
    b: &[T],
    dofs: &[usize],
    values: &[T],
) -> Result<ReducedSystem<T>> {
    if a.rows() != a.cols() || b.len() != a.rows() {
        return Err(Error::DimensionMismatch("essential constraints need a square system".into()));
    }
    let constraints = Constraints::new(a.rows(), dofs, values)?;
    Ok(ReducedSystem { matrix: constraints.reduce_matrix(a), rhs: constraints.reduce_rhs(a, b), constraints })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| {
            let mut r = r.clone();
            r.push(bi);
            r
        }).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap()).unwrap();
            m.swap(k, p);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
            x[i] = (m[i][n] - s) / m[i][i];
        }
        x
    }

    /// Deterministic SPD matrix: `G Gᵀ + n I` from a simple LCG.
    fn spd(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut s = seed;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let g: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rnd()).collect()).collect();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| g[i][k] * g[j][k]).sum::<f64>() + if i == j { n as f64 } else { 0.0 }).collect())
            .collect()
    }

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 4.0)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 3.0);
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn block_identity_and_diagonal() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let single = BlockSystem::from_grid(vec![vec![Some(a.clone())]]).unwrap();
        assert_eq!(assemble_block(&single).unwrap(), a);

        let b = SparseMatrix::from_dense(&[vec![5.0]]);
        let mut sys = BlockSystem::new(vec![2, 1], vec![2, 1]);
        sys.set(0, 0, a.clone()).unwrap();
        sys.set(1, 1, b.clone()).unwrap();
        let m = assemble_block(&sys).unwrap();
        assert_eq!(m.nnz(), a.nnz() + b.nnz());
        assert_eq!(m.get(2, 2), 5.0);
        assert_eq!(m.get(0, 2), 0.0);
    }

    #[test]
    fn saddle_point_matches_dense_assembly() {
        let a = vec![vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]];
        let b = vec![vec![1.0, -1.0, 0.0], vec![0.0, 1.0, 1.0]];
        let sa = SparseMatrix::from_dense(&a);
        let sb = SparseMatrix::from_dense(&b);
        let sys = BlockSystem::from_grid(vec![vec![Some(sa), Some(sb.transpose())], vec![Some(sb), None]]).unwrap();
        let m = assemble_block(&sys).unwrap().to_dense();
        let mut expect = vec![vec![0.0; 5]; 5];
        for i in 0..3 {
            for j in 0..3 {
                expect[i][j] = a[i][j];
            }
        }
        for i in 0..2 {
            for j in 0..3 {
                expect[3 + i][j] = b[i][j];
                expect[j][3 + i] = b[i][j];
            }
        }
        assert_eq!(m, expect);
    }

    #[test]
    fn inconsistent_partition_rejected() {
        let a = SparseMatrix::<f64>::identity(2);
        let b = SparseMatrix::<f64>::identity(3);
        assert!(BlockSystem::from_grid(vec![vec![Some(a.clone()), None], vec![Some(b), None]]).is_err());
        let mut sys = BlockSystem::new(vec![2], vec![2]);
        assert!(sys.set(0, 0, SparseMatrix::identity(3)).is_err());
        assert!(sys.set(0, 0, a).is_ok());
    }

    #[test]
    fn trivial_solves() {
        let x = solve(&SparseMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        let x: Vec<f64> = solve(&SparseMatrix::diagonal(&[2.0, 4.0]), &[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_spd_residual() {
        let a = spd(100, 7);
        let sa = SparseMatrix::from_dense(&a);
        let b: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let x = solve(&sa, &b).unwrap();
        let mut r = b.clone();
        sa.matvec_acc(-1.0, &x, &mut r);
        assert!(norm2(&r) / norm2(&b) <= 1e-10);
    }

    #[test]
    fn singular_is_an_error() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&a, &[1.0, 1.0]).is_err());
        let empty_row = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(solve(&empty_row, &[1.0, 1.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn constrained_identity() {
        let a = SparseMatrix::<f64>::identity(2);
        let red = apply_essential_bc(&a, &[0.0, 3.0], &[0], &[5.0]).unwrap();
        let x = red.solve().unwrap();
        assert_eq!(x, vec![5.0, 3.0]);
    }

    #[test]
    fn elimination_keeps_symmetry() {
        let a = SparseMatrix::from_dense(&spd(3, 3));
        let red = apply_essential_bc(&a, &[1.0, 2.0, 3.0], &[1], &[0.0]).unwrap();
        assert_eq!(red.matrix.rows(), 2);
        assert!(red.matrix.is_symmetric(0.0));
    }

    #[test]
    fn elimination_matches_dense_oracle() {
        let a = spd(10, 11);
        let b: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
        let dofs = [2, 5, 9];
        let vals = [1.5, -2.0, 0.25];
        let red = apply_essential_bc(&SparseMatrix::from_dense(&a), &b, &dofs, &vals).unwrap();
        let x = red.solve().unwrap();

        // dense oracle: replace constrained rows by identity rows
        let mut ad = a.clone();
        let mut bd = b.clone();
        for (&d, &v) in dofs.iter().zip(&vals) {
            ad[d] = (0..10).map(|j| if j == d { 1.0 } else { 0.0 }).collect();
            bd[d] = v;
        }
        let xd = dense_solve(&ad, &bd);
        for (u, v) in x.iter().zip(&xd) {
            assert!((u - v).abs() < 1e-12, "{u} vs {v}");
        }
    }

    #[test]
    fn conflicting_constraints_rejected() {
        let a = SparseMatrix::<f64>::identity(2);
        assert!(apply_essential_bc(&a, &[0.0, 0.0], &[0, 0], &[1.0, 2.0]).is_err());
        assert!(apply_essential_bc(&a, &[0.0, 0.0], &[0, 0], &[1.0, 1.0]).is_ok());
        assert!(apply_essential_bc(&a, &[0.0, 0.0], &[4], &[1.0]).is_err());
    }

    #[test]
    fn refactor_reuses_pattern() {
        let a = SparseMatrix::from_dense(&spd(6, 1));
        let mut lu = LuSolver::new(&a).unwrap();
        let a2 = a.scaled(2.0);
        lu.refactor(&a2).unwrap();
        let x = lu.solve(&[1.0; 6]).unwrap();
        let y = solve(&a, &[1.0; 6]).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((2.0 * u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_solve() {
        let a = SparseMatrix::<f32>::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-5);
    }
}
