use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{Matrix, Vector};
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest entry are treated as zero.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// LU factorization with row pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                op: "lu",
                expected: (a.rows(), a.rows()),
                found: a.shape(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if n > 0 && scale == 0.0 {
            return Err(Error::SingularMatrix);
        }
        let threshold = SINGULAR_RTOL * scale;
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0_f64;

        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pmag <= threshold {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            min_pivot = min_pivot.min(pmag);
            max_pivot = max_pivot.max(pmag);
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        let ukj = lu[(k, j)];
                        lu[(i, j)] -= factor * ukj;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            min_pivot,
            max_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Smallest over largest pivot magnitude; a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            1.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    pub fn determinant(&self) -> f64 {
        let n = self.dim();
        let mut det: f64 = (0..n).map(|i| self.lu[(i, i)]).product();
        // sign of the permutation
        let mut seen = alloc::vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                det = -det;
            }
        }
        det
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vector> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                op: "solve",
                expected: (n, 1),
                found: (b.len(), 1),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(Vector(x))
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "solve",
                expected: (self.dim(), b.cols()),
                found: b.shape(),
            });
        }
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.col(j))?;
            for i in 0..b.rows() {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }
}

/// Solves `A X = B` by Gaussian elimination with row pivoting.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Lu::new(a)?.solve(b)
}

pub fn solve_linear_vec(a: &Matrix, b: &[f64]) -> Result<Vector> {
    Lu::new(a)?.solve_vec(b)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Lu::new(a)?.solve(&Matrix::identity(a.rows()))
}

/// Cholesky factor `L` with `A = L Lᵀ`; fails unless `A` is symmetric positive definite.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &Matrix, x: &Matrix, b: &Matrix) -> f64 {
        (&(a * x) - b).max_abs()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = Matrix::column(&[1.5, -2.0, 7.25]);
        let x = solve_linear(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]).unwrap();
        let x = solve_linear_vec(&a, &[2.0, 8.0]).unwrap();
        assert_eq!(&x[..], &[1.0, 2.0]);
    }

    #[test]
    fn permutation_requires_pivoting() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let x = solve_linear_vec(&a, &[3.0, 5.0]).unwrap();
        assert_eq!(&x[..], &[5.0, 3.0]);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(solve_linear_vec(&a, &[1.0, 1.0]).unwrap_err(), Error::SingularMatrix);
        assert_eq!(
            solve_linear_vec(&Matrix::zeros(2, 2), &[1.0, 1.0]).unwrap_err(),
            Error::SingularMatrix
        );
    }

    #[test]
    fn multi_rhs_residual_bound() {
        let a = Matrix::from_row_slice(
            3,
            3,
            &[4.0, -2.0, 1.0, 3.0, 6.0, -4.0, 2.0, 1.0, 8.0],
        )
        .unwrap();
        let b = Matrix::from_row_slice(3, 2, &[12.0, 1.0, -25.0, 0.0, 32.0, -3.0]).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        assert!(residual(&a, &x, &b) <= 1e-10 * (1.0 + b.max_abs()));
    }

    #[test]
    fn determinant_tracks_row_swaps() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(Lu::new(&a).unwrap().determinant(), -1.0);
        let b = Matrix::from_row_slice(2, 2, &[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert!((Lu::new(&b).unwrap().determinant() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let spd = Matrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 3.0]).unwrap();
        let l = cholesky(&spd).unwrap();
        assert!((&(&l * &l.transpose()) - &spd).max_abs() < 1e-14);
        let indef = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert_eq!(cholesky(&indef).unwrap_err(), Error::NotPositiveDefinite);
    }
}
