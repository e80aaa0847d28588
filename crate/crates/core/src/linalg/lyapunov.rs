use super::{cholesky, solve_linear_vec, Matrix};
use crate::error::{Error, Result};

/// Solves `Aᵀ P + P A = −Q` for symmetric positive definite `P`.
///
/// The equation is vectorized into an `n² × n²` linear system, which is fine
/// for the state sizes handled here (n ≤ 8). A singular system means `A` has
/// two eigenvalues summing to zero and cannot be Hurwitz.
pub fn lyapunov_solve(acl: &Matrix, q: &Matrix) -> Result<Matrix> {
    let n = acl.rows();
    if !acl.is_square() || q.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            op: "lyapunov_solve",
            expected: (n, n),
            found: q.shape(),
        });
    }
    if !q.is_symmetric(1e-12) || cholesky(q).is_err() {
        return Err(Error::InvalidArgument("Q must be symmetric positive definite"));
    }
    let nn = n * n;
    let mut k = Matrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for m in 0..n {
                // (AᵀP)_ij = Σ_m A_mi P_mj
                k[(row, m * n + j)] += acl[(m, i)];
                // (PA)_ij = Σ_m P_im A_mj
                k[(row, i * n + m)] += acl[(m, j)];
            }
        }
    }
    let rhs: alloc::vec::Vec<f64> = q.as_slice().iter().map(|v| -v).collect();
    let p_vec = solve_linear_vec(&k, &rhs)?;
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = 0.5 * (p_vec[i * n + j] + p_vec[j * n + i]);
        }
    }
    cholesky(&p)?;
    Ok(p)
}

/// `‖Aᵀ P + P A + Q‖_∞`
pub fn lyapunov_residual(acl: &Matrix, p: &Matrix, q: &Matrix) -> f64 {
    let r = &(&(&acl.transpose() * p) + &(p * acl)) + q;
    r.norm_inf()
}
