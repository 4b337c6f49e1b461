//! Small dense factorizations for symmetric positive definite systems.
//!
//! Factor matrices in this crate have at most `(n+1)^cl(J)` rows, so plain
//! row-major `Vec<f64>` storage and textbook algorithms are the right tool.

/// In-place Cholesky factorization `A = L·Lᵀ` of a symmetric matrix stored
/// row-major. On success the lower triangle of `a` holds `L` (the strict
/// upper triangle is zeroed). Fails with the offending pivot index when a
/// pivot is not strictly positive or not finite.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(j);
        }
        let ljj = diag.sqrt();
        a[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / ljj;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            a[i * n + j] = 0.0;
        }
    }
    Ok(())
}

/// Solve `L w = v` in place for lower-triangular `L`.
pub(crate) fn forward_substitute(l: &[f64], n: usize, v: &mut [f64]) {
    debug_assert_eq!(l.len(), n * n);
    debug_assert_eq!(v.len(), n);
    for i in 0..n {
        let mut s = v[i];
        for k in 0..i {
            s -= l[i * n + k] * v[k];
        }
        v[i] = s / l[i * n + i];
    }
}

/// Solve `A x = b` by LU decomposition with partial pivoting. Returns `None`
/// when a pivot vanishes. Used as an independent route for cross-checking the
/// Cholesky path; the two share no code.
pub(crate) fn lu_solve(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col] == 0.0 || !a[pivot * n + col].is_finite() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] * inv;
            if factor != 0.0 {
                for k in (col + 1)..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
                b[row] -= factor * b[col];
            }
            a[row * n + col] = 0.0;
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_of_diagonal() {
        let mut a = vec![1.0, 0.0, 0.0, 1.0 / 3.0];
        cholesky_in_place(&mut a, 2).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-15);
        assert!((a[3] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(a[1], 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert_eq!(cholesky_in_place(&mut a, 2), Err(1));
    }

    #[test]
    fn forward_solve_round_trip() {
        // L = [[2,0],[1,3]], v = L * [5, 7]
        let l = vec![2.0, 0.0, 1.0, 3.0];
        let mut v = vec![10.0, 26.0];
        forward_substitute(&l, 2, &mut v);
        assert_eq!(v, vec![5.0, 7.0]);
    }

    #[test]
    fn lu_solves_general_system() {
        // permutation-heavy system to exercise pivoting
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x_true = [1.0, -2.0, 3.0];
        let mut b = vec![0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i * 3 + j] * x_true[j];
            }
        }
        let x = lu_solve(a, 3, b).unwrap();
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_detects_singular() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(lu_solve(a, 2, vec![1.0, 2.0]).is_none());
    }
}
