//! Kinematic bicycle with state `(X, Y, V, ψ)` and input `(a, δ)`.
//!
//! Flat state `z = (X, Y, V cosψ, V sinψ)`, flat input `v = (Ẍ, Ÿ)`:
//!
//! ```text
//! v₁ = a cosψ − (V²/L) sinψ tanδ
//! v₂ = a sinψ + (V²/L) cosψ tanδ
//! ```
//!
//! The transformation degenerates at `V = 0`.

use alloc::vec;
use core::f64::consts::{FRAC_PI_4, PI};

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, RngCore};

use super::{InputLimit, Plant};
use crate::error::{Error, Result};
use crate::flat::{FlatSystem, FlatTransform};
use crate::linalg::{Matrix, Vector};

/// Speeds at or below this make the flat transformation singular.
pub const MIN_SPEED: f64 = 1e-6;

const SPEED_RANGE: (f64, f64) = (0.5, 20.0);
const POSITION_BOUND: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BicycleParams {
    /// Distance between the axles, m.
    pub wheelbase: f64,
    /// Acceleration bounds, m/s².
    pub accel_limits: (f64, f64),
    /// Steering angle bounds, rad.
    pub steer_limits: (f64, f64),
}

impl Default for BicycleParams {
    fn default() -> Self {
        Self {
            wheelbase: 1.0,
            accel_limits: (-5.0, 2.0),
            steer_limits: (-FRAC_PI_4, FRAC_PI_4),
        }
    }
}

/// `(V cosψ, V sinψ, a, (V/L) tanδ)`
pub fn bicycle_dynamics(p: &BicycleParams, x: &[f64], u: &[f64]) -> Vector {
    let (speed, heading) = (x[2], x[3]);
    let (accel, steer) = (u[0], u[1]);
    Vector(vec![
        speed * heading.cos(),
        speed * heading.sin(),
        accel,
        speed / p.wheelbase * steer.tan(),
    ])
}

/// Recovers `(x, u)` from flat coordinates `(z, v)`.
pub fn bicycle_flat_inverse(p: &BicycleParams, z: &[f64], v: &[f64]) -> Result<(Vector, Vector)> {
    let speed = z[2].hypot(z[3]);
    if speed <= MIN_SPEED {
        return Err(Error::SingularConfiguration("bicycle speed is zero"));
    }
    let heading = z[3].atan2(z[2]);
    let accel = (z[2] * v[0] + z[3] * v[1]) / speed;
    let steer = (p.wheelbase * (z[2] * v[1] - z[3] * v[0]) / (speed * speed * speed)).atan();
    Ok((
        Vector(vec![z[0], z[1], speed, heading]),
        Vector(vec![accel, steer]),
    ))
}

#[derive(Clone, Debug)]
pub struct Bicycle {
    params: BicycleParams,
    flat: FlatSystem,
    limits: [InputLimit; 2],
}

impl Bicycle {
    pub fn new(params: BicycleParams) -> Result<Self> {
        let (amin, amax) = params.accel_limits;
        let (smin, smax) = params.steer_limits;
        if !(params.wheelbase > 0.0) {
            return Err(Error::InvalidArgument("wheelbase must be positive"));
        }
        if !(amin <= amax) || !(smin <= smax) {
            return Err(Error::InvalidArgument("input limits must be ordered"));
        }
        if smin <= -PI / 2.0 || smax >= PI / 2.0 {
            return Err(Error::InvalidArgument("steering limits must lie inside (-pi/2, pi/2)"));
        }
        Ok(Self {
            params,
            flat: FlatSystem::decoupled_chains(2, 2)?,
            limits: [InputLimit::new(amin, amax), InputLimit::new(smin, smax)],
        })
    }

    pub fn params(&self) -> &BicycleParams {
        &self.params
    }
}

impl FlatTransform for Bicycle {
    fn phi(&self, x: &[f64]) -> Result<Vector> {
        let (speed, heading) = (x[2], x[3]);
        Ok(Vector(vec![
            x[0],
            x[1],
            speed * heading.cos(),
            speed * heading.sin(),
        ]))
    }

    fn phi_inv(&self, z: &[f64]) -> Result<Vector> {
        let speed = z[2].hypot(z[3]);
        if speed <= MIN_SPEED {
            return Err(Error::SingularConfiguration("bicycle speed is zero"));
        }
        Ok(Vector(vec![z[0], z[1], speed, z[3].atan2(z[2])]))
    }

    fn gamma_fwd(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        let (speed, heading) = (x[2], x[3]);
        let (accel, steer) = (u[0], u[1]);
        let lateral = speed * speed / self.params.wheelbase * steer.tan();
        let (s, c) = heading.sin_cos();
        Ok(Vector(vec![accel * c - lateral * s, accel * s + lateral * c]))
    }

    fn gamma_inv(&self, z: &[f64], v: &[f64]) -> Result<Vector> {
        Ok(bicycle_flat_inverse(&self.params, z, v)?.1)
    }

    fn dgamma_du(&self, x: &[f64], u: &[f64]) -> Result<Matrix> {
        let (speed, heading) = (x[2], x[3]);
        let sec = 1.0 / u[1].cos();
        let k = speed * speed / self.params.wheelbase * sec * sec;
        let (s, c) = heading.sin_cos();
        Matrix::new(2, 2, vec![c, -k * s, s, k * c])
    }
}

impl Plant for Bicycle {
    fn name(&self) -> &str {
        "bicycle"
    }

    fn state_dim(&self) -> usize {
        4
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn dynamics(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        Ok(bicycle_dynamics(&self.params, x, u))
    }

    fn output_indices(&self) -> &[usize] {
        &[0, 1]
    }

    fn input_limits(&self) -> &[InputLimit] {
        &self.limits
    }

    fn flat_system(&self) -> &FlatSystem {
        &self.flat
    }

    fn in_valid_region(&self, x: &[f64], u: &[f64]) -> bool {
        x[2] >= SPEED_RANGE.0
            && x[2] <= SPEED_RANGE.1
            && x[3].abs() <= PI
            && x[0].abs() <= POSITION_BOUND
            && x[1].abs() <= POSITION_BOUND
            && self.limits.iter().zip(u).all(|(l, &v)| v >= l.min && v <= l.max)
    }

    fn sample_valid(&self, rng: &mut dyn RngCore) -> (Vector, Vector) {
        let x = vec![
            rng.gen_range(-POSITION_BOUND..=POSITION_BOUND),
            rng.gen_range(-POSITION_BOUND..=POSITION_BOUND),
            rng.gen_range(SPEED_RANGE.0..=SPEED_RANGE.1),
            rng.gen_range(-PI..=PI),
        ];
        let u = vec![
            rng.gen_range(self.limits[0].min..=self.limits[0].max),
            rng.gen_range(self.limits[1].min..=self.limits[1].max),
        ];
        (Vector(x), Vector(u))
    }

    fn origin_admissible(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn straight_line_at_unit_speed() {
        let d = bicycle_dynamics(&BicycleParams::default(), &[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0]);
        assert_eq!(&d[..], &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn axis_aligned_motion() {
        let p = BicycleParams {
            wheelbase: 2.0,
            ..BicycleParams::default()
        };
        let d = bicycle_dynamics(&p, &[0.0, 0.0, 2.0, FRAC_PI_2], &[1.0, 0.0]);
        assert!(d[0].abs() < 1e-15);
        assert_eq!(&d[1..], &[2.0, 1.0, 0.0]);
    }

    #[test]
    fn flat_inverse_at_unit_speed() {
        let (x, u) =
            bicycle_flat_inverse(&BicycleParams::default(), &[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0])
                .unwrap();
        assert_eq!(&x[..], &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(&u[..], &[0.0, 0.0]);
    }

    #[test]
    fn pure_rotation_steering() {
        let p = BicycleParams::default();
        let (speed, w) = (4.0, 1.5);
        let (_, u) = bicycle_flat_inverse(&p, &[0.0, 0.0, speed, 0.0], &[0.0, w]).unwrap();
        assert!(u[0].abs() < 1e-15);
        assert!((u[1] - (p.wheelbase * w / (speed * speed)).atan()).abs() < 1e-15);
        // yaw rate (V/L) tanδ equals w / V
        assert!((speed / p.wheelbase * u[1].tan() - w / speed).abs() < 1e-14);
    }

    #[test]
    fn standstill_is_singular() {
        let p = BicycleParams::default();
        assert!(matches!(
            bicycle_flat_inverse(&p, &[1.0, 1.0, 0.0, 0.0], &[1.0, 0.0]),
            Err(Error::SingularConfiguration(_))
        ));
    }

    #[test]
    fn rejects_bad_limits() {
        let p = BicycleParams {
            steer_limits: (-2.0, 2.0),
            ..BicycleParams::default()
        };
        assert!(Bicycle::new(p).is_err());
    }
}
