//! Small dense-matrix helpers for verification code paths.

use nalgebra::{DMatrix, DVector};

use crate::webgraph::LinkMatrix;

pub type Dense = DMatrix<f64>;

pub fn all_ones(n: usize) -> Dense {
    DMatrix::from_element(n, n, 1.0)
}

/// Dense Google matrix `(1 - m) A + (m / n) S`.
pub fn google_dense(a: &LinkMatrix, m: f64) -> Dense {
    let n = a.dim();
    a.to_dense() * (1.0 - m) + all_ones(n) * (m / n as f64)
}

/// Damped version `(1 - d) P + (d / n) S` of a stochastic matrix.
pub fn damp(p: &Dense, d: f64) -> Dense {
    let n = p.nrows();
    p * (1.0 - d) + all_ones(n) * (d / n as f64)
}

pub fn col_sums(p: &Dense) -> Vec<f64> {
    p.column_iter().map(|c| c.sum()).collect()
}

pub fn row_sums(p: &Dense) -> Vec<f64> {
    p.row_iter().map(|r| r.sum()).collect()
}

pub fn is_column_stochastic(p: &Dense, tol: f64) -> bool {
    p.is_square()
        && p.iter().all(|&v| v >= -tol)
        && col_sums(p).iter().all(|s| (s - 1.0).abs() <= tol)
}

pub fn is_row_stochastic(p: &Dense, tol: f64) -> bool {
    is_column_stochastic(&p.transpose(), tol)
}

/// Induced 1-norm: maximum absolute column sum.
pub fn one_norm(p: &Dense) -> f64 {
    p.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).abs().max()
}

pub fn mat_vec(p: &Dense, x: &[f64]) -> Vec<f64> {
    (p * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Submatrix picking `rows` and `cols` in the given order.
pub fn select(p: &Dense, rows: &[usize], cols: &[usize]) -> Dense {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| p[(rows[r], cols[c])])
}
