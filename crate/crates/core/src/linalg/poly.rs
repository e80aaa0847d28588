use alloc::vec::Vec;


use super::Matrix;
use crate::error::{Error, Result};

/// Real polynomial, coefficients ordered from the highest degree down.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Strips leading zeros. The zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let lead = coeffs.iter().position(|&c| c != 0.0);
        match lead {
            None => Err(Error::DegenerateInput),
            Some(k) => {
                coeffs.drain(..k);
                Ok(Self { coeffs })
            }
        }
    }

    /// Monic polynomial with the given real roots and complex pairs `re ± i·im`.
    pub fn from_roots(real: &[f64], pairs: &[(f64, f64)]) -> Self {
        let mut c = alloc::vec![1.0];
        for &r in real {
            c = mul_coeffs(&c, &[1.0, -r]);
        }
        for &(re, im) in pairs {
            c = mul_coeffs(&c, &[1.0, -2.0 * re, re * re + im * im]);
        }
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * x + c)
    }

    /// Evaluates at the complex point `re + i·im`, returning `(re, im)`.
    pub fn eval_complex(&self, re: f64, im: f64) -> (f64, f64) {
        self.coeffs.iter().fold((0.0, 0.0), |(ar, ai), c| {
            (ar * re - ai * im + c, ar * im + ai * re)
        })
    }

    /// Coefficients divided by the leading one.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

fn mul_coeffs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Monic characteristic polynomial `det(sI − A)` via the Faddeev–LeVerrier recurrence.
pub fn char_poly(a: &Matrix) -> Result<Polynomial> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "char_poly",
            expected: (a.rows(), a.rows()),
            found: a.shape(),
        });
    }
    let n = a.rows();
    let mut coeffs = alloc::vec![0.0; n + 1];
    coeffs[0] = 1.0;
    // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += coeffs[k - 1];
        }
        m = next;
        coeffs[k] = -(a * &m).trace() / k as f64;
    }
    Ok(Polynomial { coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_polynomial_is_degenerate() {
        assert_eq!(
            Polynomial::new(alloc::vec![0.0, 0.0]).unwrap_err(),
            Error::DegenerateInput
        );
        assert_eq!(Polynomial::new(alloc::vec![0.0, 2.0, 1.0]).unwrap().degree(), 1);
    }

    #[test]
    fn char_poly_of_zero_matrix() {
        let p = char_poly(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn char_poly_of_companion_form() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]).unwrap();
        let p = char_poly(&a).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 3.0, 2.0]);
    }

    #[test]
    fn from_roots_expands() {
        let p = Polynomial::from_roots(&[-1.0, -2.0], &[(0.0, 1.0)]);
        // (s^2+3s+2)(s^2+1)
        assert_eq!(p.coeffs(), &[1.0, 3.0, 3.0, 3.0, 2.0]);
        let (re, im) = p.eval_complex(0.0, 1.0);
        assert!(re.abs() < 1e-12 && im.abs() < 1e-12);
    }
}
