//! Linear flat systems `ż = A z + B v`, `y = C z`, their coordinate
//! transformations, and the zero-order-hold output predictor
//! `g_f(z, v) = C R z + C S v` with `R = e^{AT}` and `S = ∫₀ᵀ e^{Aτ} dτ B`.

use crate::error::{Error, Result};
use crate::linalg::{exp_integral, mat_exp, Lu, Matrix, Vector};

/// Maps between original coordinates `(x, u)` and flat coordinates `(z, v)`.
pub trait FlatTransform {
    /// `z = Φ(x)`
    fn phi(&self, x: &[f64]) -> Result<Vector>;
    /// `x = φ(z)`, the inverse of `Φ`.
    fn phi_inv(&self, z: &[f64]) -> Result<Vector>;
    /// `v = Γ(x, u)`
    fn gamma_fwd(&self, x: &[f64], u: &[f64]) -> Result<Vector>;
    /// `u = γ(z, v)`, the inverse of `Γ` for fixed state.
    fn gamma_inv(&self, z: &[f64], v: &[f64]) -> Result<Vector>;
    /// `∂Γ/∂u (x, u)`, an `M × M` matrix.
    fn dgamma_du(&self, x: &[f64], u: &[f64]) -> Result<Matrix>;
}

/// Checks `Φ(0) = 0` and `Γ(0, 0) = 0`.
pub fn check_origin<F: FlatTransform + ?Sized>(f: &F, n: usize, m: usize) -> Result<()> {
    let x0 = Vector::zeros(n);
    let u0 = Vector::zeros(m);
    let z = f.phi(&x0)?;
    let v = f.gamma_fwd(&x0, &u0)?;
    if z.norm_inf() > 1e-12 || v.norm_inf() > 1e-12 {
        return Err(Error::InvalidArgument("flat transform does not fix the origin"));
    }
    Ok(())
}

/// The linear part `(A, B, C)` of a flat system.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSystem {
    a: Matrix,
    b: Matrix,
    c: Matrix,
}

impl FlatSystem {
    /// Requires `C = [I_M, 0]`.
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                op: "FlatSystem::new",
                expected: (n, n),
                found: a.shape(),
            });
        }
        let m = b.cols();
        if b.rows() != n || c.shape() != (m, n) || m == 0 || m > n {
            return Err(Error::DimensionMismatch {
                op: "FlatSystem::new",
                expected: (m, n),
                found: c.shape(),
            });
        }
        let mut selector = Matrix::zeros(m, n);
        selector.set_block(0, 0, &Matrix::identity(m));
        if c != selector {
            return Err(Error::InvalidArgument("C must select the first M flat states"));
        }
        Ok(Self { a, b, c })
    }

    /// Single chain of `p` integrators driven at its last state.
    pub fn integrator_chain(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("chain order must be at least 1"));
        }
        let (a, b, c) = chain_matrices(p);
        Self::new(a, b, c)
    }

    /// `channels` independent chains of order `p`, with states ordered by
    /// derivative level: all positions first, then all first derivatives, and
    /// so on. This puts the outputs in the first `channels` slots.
    pub fn decoupled_chains(p: usize, channels: usize) -> Result<Self> {
        if p == 0 || channels == 0 {
            return Err(Error::InvalidArgument("chain order and channel count must be positive"));
        }
        let n = p * channels;
        let mut a = Matrix::zeros(n, n);
        let mut b = Matrix::zeros(n, channels);
        for level in 0..p - 1 {
            for ch in 0..channels {
                a[(level * channels + ch, (level + 1) * channels + ch)] = 1.0;
            }
        }
        for ch in 0..channels {
            b[((p - 1) * channels + ch, ch)] = 1.0;
        }
        let mut c = Matrix::zeros(channels, n);
        c.set_block(0, 0, &Matrix::identity(channels));
        Self::new(a, b, c)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    /// `A z + B v`
    pub fn flow(&self, z: &[f64], v: &[f64]) -> Vector {
        &self.a.mul_vec(z) + &self.b.mul_vec(v)
    }
}

/// `(A, B, C)` of a single integrator chain of order `p`.
pub fn chain_matrices(p: usize) -> (Matrix, Matrix, Matrix) {
    let mut a = Matrix::zeros(p, p);
    for i in 0..p.saturating_sub(1) {
        a[(i, i + 1)] = 1.0;
    }
    let mut b = Matrix::zeros(p, 1);
    b[(p - 1, 0)] = 1.0;
    let mut c = Matrix::zeros(1, p);
    c[(0, 0)] = 1.0;
    (a, b, c)
}

/// Prediction matrices for a fixed horizon.
#[derive(Clone, Debug)]
pub struct FlatPredictor {
    horizon: f64,
    r: Matrix,
    s: Matrix,
    cr: Matrix,
    cs: Matrix,
    cs_lu: Lu,
}

impl FlatPredictor {
    /// Fails with [`Error::SingularPrediction`] when `C S` is not invertible,
    /// which includes the empty horizon `T = 0`.
    pub fn new(fs: &FlatSystem, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument("prediction horizon must be positive"));
        }
        let r = mat_exp(fs.a(), horizon)?;
        let s = exp_integral(fs.a(), fs.b(), horizon)?;
        let cr = fs.c() * &r;
        let cs = fs.c() * &s;
        let cs_lu = Lu::new(&cs).map_err(|_| Error::SingularPrediction)?;
        Ok(Self {
            horizon,
            r,
            s,
            cr,
            cs,
            cs_lu,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn cr(&self) -> &Matrix {
        &self.cr
    }

    pub fn cs(&self) -> &Matrix {
        &self.cs
    }

    /// Predicted output `ỹ(t+T) = CR z + CS v`.
    pub fn predict(&self, z: &[f64], v: &[f64]) -> Vector {
        &self.cr.mul_vec(z) + &self.cs.mul_vec(v)
    }

    /// Flat input `v* = (CS)⁻¹ (r(t+T) − CR z)` that makes the prediction hit `r_future`.
    pub fn invert_prediction(&self, z: &[f64], r_future: &[f64]) -> Result<Vector> {
        let rhs = &Vector::from_slice(r_future) - &self.cr.mul_vec(z);
        self.cs_lu.solve_vec(&rhs)
    }

    /// `(CS)⁻¹ w`
    pub fn solve_cs(&self, w: &[f64]) -> Result<Vector> {
        self.cs_lu.solve_vec(w)
    }

    /// `A − B (CS)⁻¹ CR`, the flat closed loop under the statical controller.
    pub fn closed_loop_matrix(&self, fs: &FlatSystem) -> Result<Matrix> {
        let gain = self.cs_lu.solve(&self.cr)?;
        Ok(fs.a() - &(fs.b() * &gain))
    }

    /// `[[A, B], [−α (CS)⁻¹ CR, −α I]]`, the flat system coupled with the
    /// dynamical controller acting on `v`.
    pub fn combined_dnrc_matrix(&self, fs: &FlatSystem, alpha: f64) -> Result<Matrix> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be positive"));
        }
        let n = fs.state_dim();
        let m = fs.input_dim();
        let gain = self.cs_lu.solve(&self.cr)?;
        let mut out = Matrix::zeros(n + m, n + m);
        out.set_block(0, 0, fs.a());
        out.set_block(0, n, fs.b());
        out.set_block(n, 0, &gain.scale(-alpha));
        out.set_block(n, n, &Matrix::identity(m).scale(-alpha));
        Ok(out)
    }
}
