//! Routh–Hurwitz test on real polynomials.
//!
//! Zero rows are replaced by the derivative of the auxiliary polynomial
//! formed from the row above; isolated zero pivots are replaced by a small
//! positive epsilon. Either event marks the table as special, and a special
//! table without sign changes is reported as marginal.

use alloc::vec;
use alloc::vec::Vec;


use super::Polynomial;
use crate::error::Result;

/// Relative tolerance under which a Routh entry counts as zero, and the
/// relative epsilon substituted for a zero pivot.
pub const ROUTH_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    Marginal,
}

impl StabilityVerdict {
    pub fn is_stable(self) -> bool {
        self == StabilityVerdict::Stable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StabilityVerdict::Stable => "stable",
            StabilityVerdict::Unstable => "unstable",
            StabilityVerdict::Marginal => "marginal",
        }
    }
}

impl core::fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Completed Routh array.
#[derive(Clone, Debug)]
pub struct RouthTable {
    pub rows: Vec<Vec<f64>>,
    /// A zero row or zero pivot was encountered.
    pub special: bool,
}

impl RouthTable {
    pub fn first_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn sign_changes(&self) -> usize {
        self.first_column()
            .windows(2)
            .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
            .count()
    }

    pub fn verdict(&self) -> StabilityVerdict {
        if self.sign_changes() > 0 {
            StabilityVerdict::Unstable
        } else if self.special {
            StabilityVerdict::Marginal
        } else {
            StabilityVerdict::Stable
        }
    }
}

pub fn routh_table(p: &Polynomial) -> RouthTable {
    let sign = if p.leading() < 0.0 { -1.0 } else { 1.0 };
    let c: Vec<f64> = p.coeffs().iter().map(|x| x * sign).collect();
    let n = c.len() - 1;
    if n == 0 {
        return RouthTable {
            rows: vec![vec![c[0]]],
            special: false,
        };
    }
    let width = n / 2 + 1;
    let pick = |start: usize| -> Vec<f64> {
        let mut r: Vec<f64> = c.iter().skip(start).step_by(2).copied().collect();
        r.resize(width, 0.0);
        r
    };
    let mut rows = vec![pick(0), pick(1)];
    let mut special = false;

    for i in 1..=n {
        let scale = row_scale(&rows[i - 1]).max(row_scale(&rows[i]));
        let tol = ROUTH_EPS * scale;
        if rows[i].iter().all(|v| v.abs() <= tol) {
            // auxiliary polynomial from row i-1 has powers (n-i+1), (n-i-1), ...
            special = true;
            let order = (n + 1 - i) as f64;
            let derived: Vec<f64> = rows[i - 1]
                .iter()
                .enumerate()
                .map(|(k, v)| v * (order - 2.0 * k as f64).max(0.0))
                .collect();
            rows[i] = derived;
        }
        if rows[i][0].abs() <= tol {
            special = true;
            rows[i][0] = ROUTH_EPS * scale.max(f64::MIN_POSITIVE);
        }
        if i == n {
            break;
        }
        let (upper, lower) = (&rows[i - 1], &rows[i]);
        let pivot = lower[0];
        let mut next = vec![0.0; width];
        for k in 0..width - 1 {
            next[k] = (pivot * upper[k + 1] - upper[0] * lower[k + 1]) / pivot;
        }
        rows.push(next);
    }
    rows.truncate(n + 1);
    RouthTable { rows, special }
}

fn row_scale(row: &[f64]) -> f64 {
    row.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Routh–Hurwitz verdict; fails only for the zero polynomial, which
/// [`Polynomial::new`] already rejects.
pub fn routh_hurwitz(p: &Polynomial) -> Result<StabilityVerdict> {
    Ok(routh_table(p).verdict())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn verdict(c: &[f64]) -> StabilityVerdict {
        routh_hurwitz(&Polynomial::new(c.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn first_order() {
        assert_eq!(verdict(&[1.0, 1.0]), StabilityVerdict::Stable);
        assert_eq!(verdict(&[1.0, -1.0]), StabilityVerdict::Unstable);
        assert_eq!(verdict(&[-1.0, -1.0]), StabilityVerdict::Stable);
    }

    #[test]
    fn imaginary_pair_is_marginal() {
        assert_eq!(verdict(&[1.0, 0.0, 1.0]), StabilityVerdict::Marginal);
        // (s+1)(s^2+1)
        assert_eq!(verdict(&[1.0, 1.0, 1.0, 1.0]), StabilityVerdict::Marginal);
    }

    #[test]
    fn root_at_origin_is_marginal() {
        assert_eq!(verdict(&[1.0, 1.0, 0.0]), StabilityVerdict::Marginal);
        assert_eq!(verdict(&[1.0, 0.0, 0.0]), StabilityVerdict::Marginal);
    }

    #[test]
    fn cubic_with_large_constant_is_unstable() {
        // s^3 + s^2 + s + 10: 1*1 < 10
        let t = routh_table(&Polynomial::new(vec![1.0, 1.0, 1.0, 10.0]).unwrap());
        assert_eq!(t.sign_changes(), 2);
        assert_eq!(t.verdict(), StabilityVerdict::Unstable);
    }

    #[test]
    fn zero_pivot_with_rhp_roots() {
        // s^4 + s^3 + 2s^2 + 2s + 3 has a zero pivot and two RHP roots
        assert_eq!(verdict(&[1.0, 1.0, 2.0, 2.0, 3.0]), StabilityVerdict::Unstable);
    }

    #[test]
    fn hurwitz_quartic() {
        let p = Polynomial::from_roots(&[-1.0, -3.0], &[(-0.5, 2.0)]);
        assert_eq!(routh_hurwitz(&p).unwrap(), StabilityVerdict::Stable);
    }

    #[test]
    fn constant_is_trivially_stable() {
        assert_eq!(verdict(&[3.0]), StabilityVerdict::Stable);
    }
}
