//! Thomas algorithm for complex tridiagonal systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold below which the elimination is declared broken.
const PIVOT_FLOOR: f64 = 1e-14;

/// Solves `A x = rhs` for tridiagonal `A` with main diagonal `diag`,
/// superdiagonal `upper` (element `(j, j+1)`) and subdiagonal `lower`
/// (element `(j+1, j)`). No pivoting; a pivot smaller than 1e-14 of its row
/// scale reports `SolverBreakdown`.
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    assert!(n >= 2, "system too small");
    assert_eq!(lower.len(), n - 1);
    assert_eq!(upper.len(), n - 1);
    assert_eq!(rhs.len(), n);

    let mut c_prime = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut d_prime = vec![Complex64::new(0.0, 0.0); n];

    let row_scale = |i: usize| -> f64 {
        let mut s = diag[i].norm();
        if i < n - 1 {
            s += upper[i].norm();
        }
        if i > 0 {
            s += lower[i - 1].norm();
        }
        s
    };

    let mut denom = diag[0];
    if denom.norm() < PIVOT_FLOOR * row_scale(0) {
        return Err(Error::SolverBreakdown { row: 0, pivot: denom.norm() });
    }
    c_prime[0] = upper[0] / denom;
    d_prime[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c_prime[i - 1];
        if denom.norm() < PIVOT_FLOOR * row_scale(i) {
            return Err(Error::SolverBreakdown { row: i, pivot: denom.norm() });
        }
        if i < n - 1 {
            c_prime[i] = upper[i] / denom;
        }
        d_prime[i] = (rhs[i] - lower[i - 1] * d_prime[i - 1]) / denom;
    }
    let mut x = d_prime;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c_prime[i] * next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(
        lower: &[Complex64],
        diag: &[Complex64],
        upper: &[Complex64],
        x: &[Complex64],
    ) -> Vec<Complex64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += lower[i - 1] * x[i - 1];
                }
                if i < n - 1 {
                    v += upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    #[test]
    fn solves_random_hermitian_like_system() {
        let n = 64;
        let diag: Vec<Complex64> =
            (0..n).map(|i| Complex64::new(4.0 + (i as f64 * 0.37).sin(), 0.1)).collect();
        let upper: Vec<Complex64> =
            (0..n - 1).map(|i| Complex64::new(-1.0, 0.3 * (i as f64 * 0.11).cos())).collect();
        let lower: Vec<Complex64> = upper.iter().map(|u| u.conj()).collect();
        let rhs: Vec<Complex64> =
            (0..n).map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.7).sin())).collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (b, r) in apply(&lower, &diag, &upper, &x).iter().zip(&rhs) {
            assert!((b - r).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_system() {
        let n = 8;
        let diag = vec![Complex64::new(1.0, 0.0); n];
        let off = vec![Complex64::new(0.0, 0.0); n - 1];
        let rhs: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, -2.0)).collect();
        let x = solve_tridiagonal(&off, &diag, &off, &rhs).unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn breakdown_is_detected() {
        let diag = vec![Complex64::new(0.0, 0.0); 4];
        let off = vec![Complex64::new(1.0, 0.0); 3];
        let rhs = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(
            solve_tridiagonal(&off, &diag, &off, &rhs),
            Err(Error::SolverBreakdown { row: 0, .. })
        ));
    }
}
