//! Compressed-column storage on a fixed mesh pattern, Dirichlet elimination
//! and sparse Cholesky solves.

use std::collections::BTreeMap;
use std::sync::Arc;

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::Side;
use thiserror::Error;

use crate::mesh::Mesh;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("dof {dof} constrained to both {first} and {second}")]
    ConflictingConstraint { dof: usize, first: f64, second: f64 },
    #[error("dof {dof} out of range for a system of size {size}")]
    DofOutOfRange { dof: usize, size: usize },
    #[error("matrix is singular: non-positive pivot at dof {0} (unconstrained floating dof?)")]
    Singular(usize),
    #[error("Cholesky factorization failed: matrix not positive definite")]
    NotPositiveDefinite,
    #[error("non-finite value in the linear system")]
    NonFinite,
}

/// Full (both triangles) sparsity pattern of a nodal field with `block`
/// interleaved dofs per node.
#[derive(Debug)]
pub struct Pattern {
    pub n: usize,
    pub block: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    diag: Vec<usize>,
    symbolic: SymbolicSparseColMat<usize>,
}

impl Pattern {
    pub fn from_mesh(mesh: &Mesh, block: usize) -> Arc<Self> {
        let nn = mesh.num_nodes();
        let mut adj: Vec<Vec<usize>> = (0..nn).map(|i| vec![i]).collect();
        for tri in mesh.elements() {
            for &a in &tri.nodes {
                for &b in &tri.nodes {
                    adj[a].push(b);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let n = nn * block;
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for node in 0..nn {
            for _ in 0..block {
                for &m in &adj[node] {
                    row_idx.extend((0..block).map(|c| m * block + c));
                }
                col_ptr.push(row_idx.len());
            }
        }
        Arc::new(Self::from_parts(n, block, col_ptr, row_idx))
    }

    fn from_parts(n: usize, block: usize, col_ptr: Vec<usize>, row_idx: Vec<usize>) -> Self {
        let diag = (0..n)
            .map(|j| col_ptr[j] + row_idx[col_ptr[j]..col_ptr[j + 1]].binary_search(&j).expect("diagonal in pattern"))
            .collect();
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr.clone(), None, row_idx.clone());
        Self { n, block, col_ptr, row_idx, diag, symbolic }
    }

    /// Dense pattern, for small systems and tests.
    pub fn dense(n: usize) -> Arc<Self> {
        let col_ptr = (0..=n).map(|j| j * n).collect();
        let row_idx = (0..n).flat_map(|_| 0..n).collect();
        Arc::new(Self::from_parts(n, 1, col_ptr, row_idx))
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    #[inline]
    pub fn position(&self, row: usize, col: usize) -> Option<usize> {
        let (lo, hi) = (self.col_ptr[col], self.col_ptr[col + 1]);
        self.row_idx[lo..hi].binary_search(&row).ok().map(|k| lo + k)
    }
}

/// Square sparse matrix on a shared [`Pattern`].
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub pattern: Arc<Pattern>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        Self { pattern, values }
    }

    pub fn size(&self) -> usize {
        self.pattern.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pattern.position(row, col).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` at `(row, col)`; panics if the entry is outside the pattern.
    #[inline]
    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        let k = self.pattern.position(row, col).unwrap_or_else(|| panic!("({row}, {col}) outside pattern"));
        self.values[k] += v;
    }

    /// Scatters a dense element matrix over `dofs` (row-major `ke`).
    pub fn scatter(&mut self, dofs: &[usize], ke: &[f64]) {
        let m = dofs.len();
        for (b, &col) in dofs.iter().enumerate() {
            for (a, &row) in dofs.iter().enumerate() {
                self.add(row, col, ke[a * m + b]);
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let p = &self.pattern;
        let mut y = vec![0.0; p.n];
        for j in 0..p.n {
            let xj = x[j];
            for k in p.col_ptr[j]..p.col_ptr[j + 1] {
                y[p.row_idx[k]] += self.values[k] * xj;
            }
        }
        y
    }

    /// Largest `|a_ij - a_ji|` relative to the largest `|a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let p = &self.pattern;
        let mut scale: f64 = 0.0;
        let mut diff: f64 = 0.0;
        for j in 0..p.n {
            for k in p.col_ptr[j]..p.col_ptr[j + 1] {
                let i = p.row_idx[k];
                scale = scale.max(self.values[k].abs());
                diff = diff.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    fn as_faer(&self) -> SparseColMatRef<'_, usize, f64> {
        SparseColMatRef::new(self.pattern.symbolic.as_ref(), &self.values)
    }
}

/// Prescribed dof values; inserting a different value for a dof already
/// constrained is an error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    values: BTreeMap<usize, f64>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, dof: usize, value: f64) -> Result<(), SolveError> {
        match self.values.get(&dof) {
            Some(&old) if old != value => Err(SolveError::ConflictingConstraint { dof, first: old, second: value }),
            _ => {
                self.values.insert(dof, value);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&d, &v)| (d, v))
    }

    pub fn get(&self, dof: usize) -> Option<f64> {
        self.values.get(&dof).copied()
    }
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: SparseMatrix,
    pub b: Vec<f64>,
}

impl LinearSystem {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let n = pattern.n;
        Self { a: SparseMatrix::zeros(pattern), b: vec![0.0; n] }
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    /// Symmetric elimination: the constrained columns move to the right-hand
    /// side, rows and columns are zeroed and the diagonal set to one.
    pub fn apply_dirichlet(&mut self, constraints: &Constraints) -> Result<(), SolveError> {
        let n = self.size();
        let mut fixed: Vec<Option<f64>> = vec![None; n];
        for (dof, v) in constraints.iter() {
            if dof >= n {
                return Err(SolveError::DofOutOfRange { dof, size: n });
            }
            fixed[dof] = Some(v);
        }
        let p = Arc::clone(&self.a.pattern);
        for j in 0..n {
            for k in p.col_ptr[j]..p.col_ptr[j + 1] {
                let i = p.row_idx[k];
                match (fixed[i], fixed[j]) {
                    (None, None) => {}
                    (None, Some(vj)) => {
                        self.b[i] -= self.a.values[k] * vj;
                        self.a.values[k] = 0.0;
                    }
                    _ => self.a.values[k] = if i == j { 1.0 } else { 0.0 },
                }
            }
        }
        for (dof, v) in constraints.iter() {
            self.b[dof] = v;
        }
        Ok(())
    }

    /// `||A x - b|| / ||b||` (absolute norm when `b = 0`).
    pub fn residual(&self, x: &[f64]) -> f64 {
        let ax = self.a.matvec(x);
        let r: f64 = ax.iter().zip(&self.b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let nb: f64 = self.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nb > 0.0 {
            r / nb
        } else {
            r
        }
    }
}

/// Sparse Cholesky solver caching the symbolic analysis of one pattern.
#[derive(Default)]
pub struct CholeskySolver {
    symbolic: Option<(Arc<Pattern>, SymbolicLlt<usize>)>,
}

impl CholeskySolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factor(&mut self, a: &SparseMatrix) -> Result<Factor, SolveError> {
        let p = &a.pattern;
        if a.values.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        for (j, &k) in p.diag.iter().enumerate() {
            if !(a.values[k] > 0.0) {
                return Err(SolveError::Singular(j));
            }
        }
        let reuse = matches!(&self.symbolic, Some((q, _)) if Arc::ptr_eq(q, p));
        if !reuse {
            let sym = SymbolicLlt::try_new(p.symbolic.as_ref(), Side::Lower).map_err(|_| SolveError::NotPositiveDefinite)?;
            self.symbolic = Some((Arc::clone(p), sym));
        }
        let sym = self.symbolic.as_ref().map(|(_, s)| s.clone()).expect("symbolic analysis present");
        let llt = Llt::try_new_with_symbolic(sym, a.as_faer(), Side::Lower).map_err(|_| SolveError::NotPositiveDefinite)?;
        Ok(Factor { llt, n: p.n })
    }

    pub fn solve(&mut self, system: &LinearSystem) -> Result<Vec<f64>, SolveError> {
        let factor = self.factor(&system.a)?;
        let x = factor.solve(&system.b)?;
        let res = system.residual(&x);
        if res > 1e-10 {
            log::warn!("linear solve relative residual {res:.3e}");
        }
        Ok(x)
    }
}

/// Numeric factorization, reusable for several right-hand sides.
pub struct Factor {
    llt: Llt<usize, f64>,
    n: usize,
}

impl Factor {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        assert_eq!(b.len(), self.n);
        if b.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.llt.solve_in_place(x.as_mut());
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        Ok(out)
    }
}

/// One-shot convenience: factor and solve.
pub fn solve(system: &LinearSystem) -> Result<Vec<f64>, SolveError> {
    CholeskySolver::new().solve(system)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_system(a: &[&[f64]], b: &[f64]) -> LinearSystem {
        let n = b.len();
        let mut sys = LinearSystem::zeros(Pattern::dense(n));
        for i in 0..n {
            for j in 0..n {
                sys.a.add(i, j, a[i][j]);
            }
        }
        sys.b = b.to_vec();
        sys
    }

    #[test]
    fn identity_and_two_by_two() {
        let sys = dense_system(&[&[1.0, 0.0], &[0.0, 1.0]], &[3.0, -2.0]);
        assert_eq!(solve(&sys).unwrap(), vec![3.0, -2.0]);
        let sys = dense_system(&[&[2.0, 1.0], &[1.0, 2.0]], &[3.0, 3.0]);
        let x = solve(&sys).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert!(sys.residual(&x) <= 1e-10);
    }

    #[test]
    fn zero_diagonal_is_singular() {
        let sys = dense_system(&[&[1.0, 0.0], &[0.0, 0.0]], &[1.0, 1.0]);
        assert_eq!(solve(&sys), Err(SolveError::Singular(1)));
    }

    #[test]
    fn indefinite_is_rejected() {
        let sys = dense_system(&[&[1.0, 2.0], &[2.0, 1.0]], &[1.0, 1.0]);
        assert_eq!(solve(&sys), Err(SolveError::NotPositiveDefinite));
    }

    #[test]
    fn two_node_bar() {
        // k [[1,-1],[-1,1]] with u(0) = 0, u(L) = delta
        let mut sys = dense_system(&[&[1.0, -1.0], &[-1.0, 1.0]], &[0.0, 0.0]);
        let mut c = Constraints::new();
        c.insert(0, 0.0).unwrap();
        c.insert(1, 0.25).unwrap();
        sys.apply_dirichlet(&c).unwrap();
        assert_eq!(solve(&sys).unwrap(), vec![0.0, 0.25]);
    }

    #[test]
    fn three_node_bar_interior_is_linear() {
        let k = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        let mut sys = dense_system(&[&k[0], &k[1], &k[2]], &[0.0; 3]);
        let mut c = Constraints::new();
        c.insert(0, 0.0).unwrap();
        c.insert(2, 1.0).unwrap();
        sys.apply_dirichlet(&c).unwrap();
        assert!(sys.a.asymmetry() == 0.0);
        let x = solve(&sys).unwrap();
        assert!((x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn all_constrained() {
        let mut sys = dense_system(&[&[4.0, 1.0], &[1.0, 3.0]], &[1.0, 2.0]);
        let mut c = Constraints::new();
        c.insert(0, 7.0).unwrap();
        c.insert(1, -3.5).unwrap();
        sys.apply_dirichlet(&c).unwrap();
        assert_eq!(solve(&sys).unwrap(), vec![7.0, -3.5]);
    }

    #[test]
    fn conflicting_constraint() {
        let mut c = Constraints::new();
        c.insert(3, 1.0).unwrap();
        c.insert(3, 1.0).unwrap();
        assert!(matches!(c.insert(3, 2.0), Err(SolveError::ConflictingConstraint { dof: 3, .. })));
    }

    #[test]
    fn symbolic_reused_across_values() {
        let p = Pattern::dense(2);
        let mut solver = CholeskySolver::new();
        for scale in [1.0, 2.0, 5.0] {
            let mut sys = LinearSystem::zeros(Arc::clone(&p));
            sys.a.scatter(&[0, 1], &[2.0 * scale, scale, scale, 2.0 * scale]);
            sys.b = vec![3.0 * scale, 3.0 * scale];
            let x = solver.solve(&sys).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        }
    }
}
