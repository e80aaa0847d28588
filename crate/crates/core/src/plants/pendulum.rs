//! Inverted pendulum on a cart, reduced to the pole angle.
//!
//! `(Ml + ml sin²θ) θ̈ + ml θ̇² sinθ cosθ − (M+m) g sinθ = F cosθ`
//!
//! θ = 0 is the upright equilibrium. The flat state is `(θ, θ̇)` and the flat
//! input is `θ̈`.

use alloc::vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, RngCore};

use super::{InputLimit, Plant};
use crate::error::{Error, Result};
use crate::flat::{FlatSystem, FlatTransform};
use crate::linalg::{Matrix, Vector};

/// Below this `|cos θ|` the force has no authority over θ̈.
const MIN_COS: f64 = 1e-6;

/// Sampling bounds of the valid region.
pub const ANGLE_BOUND: f64 = 1.4;
pub const RATE_BOUND: f64 = 5.0;
pub const FORCE_BOUND: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PendulumParams {
    /// Mass of the weight at the tip, kg.
    pub mass: f64,
    /// Cart mass, kg.
    pub cart_mass: f64,
    /// Pole length, m.
    pub length: f64,
    pub gravity: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            mass: 0.2,
            cart_mass: 1.0,
            length: 2.0,
            gravity: 9.81,
        }
    }
}

impl PendulumParams {
    fn inertia(&self, sin: f64) -> f64 {
        self.cart_mass * self.length + self.mass * self.length * sin * sin
    }

    /// θ̈ terms that do not involve the force.
    fn drift(&self, sin: f64, cos: f64, rate: f64) -> f64 {
        (self.cart_mass + self.mass) * self.gravity * sin
            - self.mass * self.length * rate * rate * sin * cos
    }
}

fn cos_checked(theta: f64) -> Result<f64> {
    let c = theta.cos();
    if c.abs() < MIN_COS {
        Err(Error::SingularConfiguration("pendulum is horizontal"))
    } else {
        Ok(c)
    }
}

/// `(θ̇, θ̈)` for state `(θ, θ̇)` and cart force `force`.
pub fn pendulum_dynamics(p: &PendulumParams, x: &[f64], force: f64) -> Result<Vector> {
    let (theta, rate) = (x[0], x[1]);
    let cos = cos_checked(theta)?;
    let sin = theta.sin();
    let accel = (force * cos + p.drift(sin, cos, rate)) / p.inertia(sin);
    Ok(Vector(vec![rate, accel]))
}

/// Conserved quantity of the unforced pendulum, scaled by `(M+m)/(ml)`:
/// `½ l (M + m sin²θ) θ̇² + (M+m) g cos θ`.
pub fn pendulum_energy(p: &PendulumParams, x: &[f64]) -> f64 {
    let (theta, rate) = (x[0], x[1]);
    let sin = theta.sin();
    0.5 * p.length * (p.cart_mass + p.mass * sin * sin) * rate * rate
        + (p.cart_mass + p.mass) * p.gravity * theta.cos()
}

#[derive(Clone, Debug)]
pub struct Pendulum {
    params: PendulumParams,
    flat: FlatSystem,
    limits: [InputLimit; 1],
}

impl Pendulum {
    pub fn new(params: PendulumParams) -> Result<Self> {
        let PendulumParams {
            mass,
            cart_mass,
            length,
            gravity,
        } = params;
        if !(mass > 0.0 && cart_mass > 0.0 && length > 0.0 && gravity > 0.0) {
            return Err(Error::InvalidArgument("pendulum parameters must be positive"));
        }
        Ok(Self {
            params,
            flat: FlatSystem::integrator_chain(2)?,
            limits: [InputLimit::UNBOUNDED],
        })
    }

    pub fn params(&self) -> &PendulumParams {
        &self.params
    }
}

impl Default for Pendulum {
    fn default() -> Self {
        Self::new(PendulumParams::default()).expect("default parameters are valid")
    }
}

impl FlatTransform for Pendulum {
    fn phi(&self, x: &[f64]) -> Result<Vector> {
        Ok(Vector::from_slice(&x[..2]))
    }

    fn phi_inv(&self, z: &[f64]) -> Result<Vector> {
        Ok(Vector::from_slice(&z[..2]))
    }

    fn gamma_fwd(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        let accel = pendulum_dynamics(&self.params, x, u[0])?[1];
        Ok(Vector(vec![accel]))
    }

    fn gamma_inv(&self, z: &[f64], v: &[f64]) -> Result<Vector> {
        let (theta, rate) = (z[0], z[1]);
        let cos = cos_checked(theta)?;
        let sin = theta.sin();
        let p = &self.params;
        let force = (v[0] * p.inertia(sin) - p.drift(sin, cos, rate)) / cos;
        Ok(Vector(vec![force]))
    }

    fn dgamma_du(&self, x: &[f64], _u: &[f64]) -> Result<Matrix> {
        let cos = cos_checked(x[0])?;
        let sin = x[0].sin();
        Matrix::new(1, 1, vec![cos / self.params.inertia(sin)])
    }
}

impl Plant for Pendulum {
    fn name(&self) -> &str {
        "pendulum"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn dynamics(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        pendulum_dynamics(&self.params, x, u[0])
    }

    fn output_indices(&self) -> &[usize] {
        &[0]
    }

    fn input_limits(&self) -> &[InputLimit] {
        &self.limits
    }

    fn flat_system(&self) -> &FlatSystem {
        &self.flat
    }

    fn in_valid_region(&self, x: &[f64], u: &[f64]) -> bool {
        x[0].abs() <= ANGLE_BOUND && x[1].abs() <= RATE_BOUND && u[0].abs() <= FORCE_BOUND
    }

    fn sample_valid(&self, rng: &mut dyn RngCore) -> (Vector, Vector) {
        let x = vec![
            rng.gen_range(-ANGLE_BOUND..=ANGLE_BOUND),
            rng.gen_range(-RATE_BOUND..=RATE_BOUND),
        ];
        let u = vec![rng.gen_range(-FORCE_BOUND..=FORCE_BOUND)];
        (Vector(x), Vector(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn paper() -> PendulumParams {
        PendulumParams::default()
    }

    #[test]
    fn upright_equilibrium() {
        let d = pendulum_dynamics(&paper(), &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(&d[..], &[0.0, 0.0]);
    }

    #[test]
    fn released_from_thirty_degrees() {
        let d = pendulum_dynamics(&paper(), &[PI / 6.0, 0.0], 0.0).unwrap();
        // (1.2 * 9.81 * 0.5) / (2 + 0.4 * 0.25)
        let expect = 5.886 / 2.1;
        assert!((d[1] - expect).abs() < 1e-12);
        assert!((d[1] - 2.8029).abs() < 1e-4);
        let mirrored = pendulum_dynamics(&paper(), &[-PI / 6.0, 0.0], 0.0).unwrap();
        assert!((mirrored[1] + d[1]).abs() < 1e-14);
    }

    #[test]
    fn horizontal_pole_is_singular() {
        assert!(matches!(
            pendulum_dynamics(&paper(), &[PI / 2.0, 0.0], 1.0),
            Err(Error::SingularConfiguration(_))
        ));
    }

    #[test]
    fn flat_input_is_angular_acceleration() {
        let p = Pendulum::new(paper()).unwrap();
        let x = [0.4, -1.3];
        let u = [7.5];
        let v = p.gamma_fwd(&x, &u).unwrap();
        let d = p.dynamics(&x, &u).unwrap();
        assert_eq!(v[0], d[1]);
        let back = p.gamma_inv(&p.phi(&x).unwrap(), &v).unwrap();
        assert!((back[0] - u[0]).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_params() {
        let mut bad = paper();
        bad.length = 0.0;
        assert!(Pendulum::new(bad).is_err());
    }
}
