//! Small dense linear algebra: just what the controllers and the stability
//! certificates need, sized for state dimensions up to about 20.

mod eigen;
mod expm;
mod lyapunov;
mod matrix;
mod poly;
mod routh;
mod solve;

pub use eigen::{spectral_norm, symmetric_eigenvalues};
pub use expm::{exp_integral, mat_exp};
pub use lyapunov::{lyapunov_residual, lyapunov_solve};
pub use matrix::{dist2, norm2, Matrix, Vector};
pub use poly::{char_poly, Polynomial};
pub use routh::{routh_hurwitz, routh_table, RouthTable, StabilityVerdict, ROUTH_EPS};
pub use solve::{cholesky, inverse, solve_linear, solve_linear_vec, Lu, SINGULAR_RTOL};
