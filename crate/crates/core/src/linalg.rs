//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `‖a − b‖ / ‖b‖`, reading `0/0` as zero.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    if num == 0.0 {
        return 0.0;
    }
    num / norm(b).max(f64::MIN_POSITIVE)
}

pub fn mat_vec(m: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum()).collect()
}

/// Smallest eigenvalue of a symmetric row-major matrix.
pub fn min_eigenvalue(m: &[f64], n: usize) -> f64 {
    let mat = DMatrix::from_row_slice(n, n, m);
    mat.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Inverse of a symmetric positive-definite row-major matrix, or `None` when
/// its smallest eigenvalue is below `rel_floor · ‖m‖_F`.
pub fn spd_inverse(m: &[f64], n: usize, rel_floor: f64) -> Option<Vec<f64>> {
    let fro = norm(m);
    if !(min_eigenvalue(m, n) > rel_floor * fro) {
        return None;
    }
    let mat = DMatrix::from_row_slice(n, n, m);
    let inv = mat.cholesky()?.inverse();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(0.5 * (inv[(i, j)] + inv[(j, i)]));
        }
    }
    Some(out)
}

/// Outcome of a least-squares fit `b ≈ Σ cₖ colₖ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstsqFit {
    pub coeffs: Vec<f64>,
    /// `‖b − Σ cₖ colₖ‖`
    pub residual: f64,
}

/// Least squares via thin QR on column-normalized data.
///
/// Returns `None` when the normalized columns are closer to dependence than
/// `min_angle` (measured by the smallest diagonal entry of `R`).
pub fn lstsq(cols: &[Vec<f64>], b: &[f64], min_angle: f64) -> Option<LstsqFit> {
    let m = b.len();
    let k = cols.len();
    let scales: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    if scales.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let a = DMatrix::from_fn(m, k, |i, j| cols[j][i] / scales[j]);
    let qr = a.clone().qr();
    let r = qr.r();
    if (0..k).any(|i| !(r[(i, i)].abs() > min_angle)) {
        return None;
    }
    let rhs = DVector::from_column_slice(b);
    let qtb = qr.q().transpose() * &rhs;
    let sol = r.solve_upper_triangular(&qtb)?;
    let fitted = &a * &sol;
    let residual = (rhs - fitted).norm();
    let coeffs = (0..k).map(|j| sol[j] / scales[j]).collect();
    Some(LstsqFit { coeffs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_of_diagonal() {
        let inv = spd_inverse(&[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3, 1e-12).unwrap();
        assert_relative_eq!(inv[0], 0.5);
        assert_relative_eq!(inv[4], 1.0);
        assert_relative_eq!(inv[8], 1.0);
    }

    #[test]
    fn indefinite_is_rejected() {
        assert!(spd_inverse(&[1.0, 2.0, 2.0, 1.0], 2, 1e-12).is_none());
    }

    #[test]
    fn lstsq_exact_span() {
        let cols = [alloc::vec![1.0, 0.0, 1.0], alloc::vec![0.0, 2.0, 0.0]];
        let fit = lstsq(&cols, &[3.0, 4.0, 3.0], 1e-8).unwrap();
        assert_relative_eq!(fit.coeffs[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(fit.coeffs[1], 2.0, epsilon = 1e-14);
        assert!(fit.residual < 1e-14);
    }

    #[test]
    fn lstsq_reports_out_of_span_part() {
        let cols = [alloc::vec![1.0, 0.0, 0.0]];
        let fit = lstsq(&cols, &[1.0, 2.0, 0.0], 1e-8).unwrap();
        assert_relative_eq!(fit.residual, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn lstsq_rejects_collinear_columns() {
        let cols = [alloc::vec![1.0, 1.0], alloc::vec![2.0, 2.0]];
        assert!(lstsq(&cols, &[1.0, 0.0], 1e-6).is_none());
    }
}
