//! Dense symmetric eigendecomposition helpers.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Eigenpairs of a symmetric matrix, eigenvalues ascending. Column `i` of
/// `vectors` belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    pub fn of(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: DMatrix::zeros(0, 0),
            };
        }
        // Symmetrize so round-off in the input cannot leak into the solver.
        let sym = (m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Indices of eigenvalues above `rel_tol * max|lambda|`.
    pub fn range_indices(&self, rel_tol: f64) -> Vec<usize> {
        let cut = rel_tol * self.max_abs();
        (0..self.values.len()).filter(|&i| self.values[i] > cut).collect()
    }

    /// Indices of eigenvalues at or below `rel_tol * max|lambda|`.
    pub fn kernel_indices(&self, rel_tol: f64) -> Vec<usize> {
        let cut = rel_tol * self.max_abs();
        (0..self.values.len()).filter(|&i| self.values[i] <= cut).collect()
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    /// Moore-Penrose pseudoinverse, dropping eigenvalues at or below
    /// `rel_tol * max|lambda|`.
    pub fn pseudo_inverse(&self, rel_tol: f64) -> DMatrix<f64> {
        let n = self.values.len();
        let mut out = DMatrix::zeros(n, n);
        for i in self.range_indices(rel_tol) {
            let v = self.vectors.column(i);
            out += (v * v.transpose()) / self.values[i];
        }
        out
    }
}
