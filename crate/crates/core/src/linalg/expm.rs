//! Matrix exponential by scaling and squaring of a truncated Taylor series,
//! and the zero-order-hold input integral built on top of it.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::Matrix;
use crate::error::{Error, Result};

/// The scaled argument is brought below this 1-norm before the series is summed.
const SCALED_NORM: f64 = 0.5;
const MAX_TERMS: usize = 40;

/// `e^{A t}`.
pub fn mat_exp(a: &Matrix, t: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "mat_exp",
            expected: (a.rows(), a.rows()),
            found: a.shape(),
        });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let at = a.scale(t);
    let norm = at.norm_1();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = at.scale(2f64.powi(-squarings));

    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &scaled).scale(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() <= f64::EPSILON * 1e-3 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(sum)
}

/// `∫₀ᵀ e^{Aτ} dτ · B`, read off the top-right block of the exponential of
/// the augmented matrix `[[A, B], [0, 0]]`.
pub fn exp_integral(a: &Matrix, b: &Matrix, horizon: f64) -> Result<Matrix> {
    if !a.is_square() || b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "exp_integral",
            expected: (a.rows(), b.cols()),
            found: b.shape(),
        });
    }
    if !(horizon >= 0.0) {
        return Err(Error::InvalidArgument("horizon must be non-negative"));
    }
    let n = a.rows();
    let m = b.cols();
    let mut aug = Matrix::zeros(n + m, n + m);
    aug.set_block(0, 0, a);
    aug.set_block(0, n, b);
    let e = mat_exp(&aug, horizon)?;
    Ok(e.block(0, n, n, m))
}
