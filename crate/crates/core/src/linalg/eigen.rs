use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::Matrix;
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal mass is this small relative to the matrix.
const OFF_DIAGONAL_RTOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_symmetric(1e-9) {
        return Err(Error::InvalidArgument("matrix is not symmetric"));
    }
    let n = a.rows();
    let mut m = a.clone();
    let total = m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= OFF_DIAGONAL_RTOL * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    Ok(eig)
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    let gram = if a.rows() <= a.cols() {
        a * &a.transpose()
    } else {
        &a.transpose() * a
    };
    let eig = symmetric_eigenvalues(&gram)?;
    Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rotated() {
        let d = Matrix::from_diagonal(&[3.0, -1.0, 2.0]);
        assert_eq!(symmetric_eigenvalues(&d).unwrap(), alloc::vec![-1.0, 2.0, 3.0]);
        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = symmetric_eigenvalues(&a).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_sum_to_trace() {
        let a = Matrix::from_row_slice(
            4,
            4,
            &[
                4.0, 1.0, -2.0, 2.0, 1.0, 2.0, 0.0, 1.0, -2.0, 0.0, 3.0, -2.0, 2.0, 1.0, -2.0, -1.0,
            ],
        )
        .unwrap();
        let e = symmetric_eigenvalues(&a).unwrap();
        assert!((e.iter().sum::<f64>() - a.trace()).abs() < 1e-12);
        let sq: f64 = e.iter().map(|x| x * x).sum();
        let fro: f64 = a.as_slice().iter().map(|x| x * x).sum();
        assert!((sq - fro).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_of_selector() {
        let b = Matrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]).unwrap();
        assert!((spectral_norm(&b).unwrap() - 1.0).abs() < 1e-15);
        let r = Matrix::from_row_slice(1, 2, &[3.0, 4.0]).unwrap();
        assert!((spectral_norm(&r).unwrap() - 5.0).abs() < 1e-14);
    }
}
