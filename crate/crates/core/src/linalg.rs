//! Small dense linear algebra on `q × q` systems.

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;

/// Solves `a x = b` for symmetric positive definite `a`. `None` if `a` is
/// not numerically positive definite (relative eigenvalue floor `1e-12`).
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    if !is_positive_definite(a, 1e-12) {
        return None;
    }
    let chol = a.clone().cholesky()?;
    Some(chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec())
}

pub fn inverse_spd(a: &Matrix) -> Option<Matrix> {
    if !is_positive_definite(a, 1e-12) {
        return None;
    }
    Some(a.clone().cholesky()?.inverse())
}

/// Smallest eigenvalue strictly above `rel_floor` times the largest one.
pub fn is_positive_definite(a: &Matrix, rel_floor: f64) -> bool {
    if a.nrows() == 0 || a.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let eig = a.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    max > 0.0 && min > rel_floor * max
}

/// Sample covariance (divisor `m − 1`) of equally weighted rows.
pub fn sample_covariance<'a, I>(rows: I, q: usize) -> (Vec<f64>, Matrix)
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let rows: Vec<&[f64]> = rows.into_iter().collect();
    let m = rows.len() as f64;
    let mut mean = vec![0.0; q];
    for r in &rows {
        for k in 0..q {
            mean[k] += r[k] / m;
        }
    }
    let mut cov = Matrix::zeros(q, q);
    for r in &rows {
        for a in 0..q {
            for b in 0..=a {
                cov[(a, b)] += (r[a] - mean[a]) * (r[b] - mean[b]);
            }
        }
    }
    let denom = (m - 1.0).max(1.0);
    for a in 0..q {
        for b in 0..=a {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    (mean, cov)
}
