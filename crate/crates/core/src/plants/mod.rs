//! Plant models `ẋ = f(x, u)`, `y = h(x)` together with their flat systems.

mod bicycle;
mod chain;
mod pendulum;

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::RngCore;

pub use bicycle::{bicycle_dynamics, bicycle_flat_inverse, Bicycle, BicycleParams, MIN_SPEED};
pub use chain::IntegratorChain;
pub use pendulum::{pendulum_dynamics, pendulum_energy, Pendulum, PendulumParams};

use crate::error::Result;
use crate::flat::{FlatSystem, FlatTransform};
use crate::linalg::Vector;

/// Closed interval for one input channel. Infinite bounds mean unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputLimit {
    pub min: f64,
    pub max: f64,
}

impl InputLimit {
    pub const UNBOUNDED: InputLimit = InputLimit {
        min: f64::NEG_INFINITY,
        max: f64::INFINITY,
    };

    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn is_bounded(&self) -> bool {
        self.min.is_finite() || self.max.is_finite()
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.min).min(self.max)
    }
}

pub trait Plant: FlatTransform + Send + Sync {
    fn name(&self) -> &str;

    fn state_dim(&self) -> usize;

    fn input_dim(&self) -> usize;

    /// `f(x, u)`
    fn dynamics(&self, x: &[f64], u: &[f64]) -> Result<Vector>;

    /// State indices selected as outputs.
    fn output_indices(&self) -> &[usize];

    /// `h(x)`, a coordinate selection of the state.
    fn output(&self, x: &[f64]) -> Vector {
        Vector(self.output_indices().iter().map(|&i| x[i]).collect())
    }

    fn input_limits(&self) -> &[InputLimit];

    fn flat_system(&self) -> &FlatSystem;

    /// Region where the flat transformations are well defined and where
    /// sampled invariants are checked.
    fn in_valid_region(&self, x: &[f64], u: &[f64]) -> bool;

    /// Draws `(x, u)` uniformly from the valid region.
    fn sample_valid(&self, rng: &mut dyn RngCore) -> (Vector, Vector);

    /// Whether `(0, 0)` lies in the valid region, so that `f(0, 0) = 0` applies.
    fn origin_admissible(&self) -> bool {
        true
    }

    /// Clamps `u` to the input limits. Returns whether any channel was clipped.
    fn saturate(&self, u: &[f64]) -> (Vector, bool) {
        let mut clipped = false;
        let out: Vec<f64> = u
            .iter()
            .zip(self.input_limits())
            .map(|(&v, lim)| {
                let c = lim.clamp(v);
                if c != v {
                    clipped = true;
                }
                c
            })
            .collect();
        (Vector(out), clipped)
    }
}

/// Resolves `"pendulum"`, `"bicycle"` or `"chain<p>"` with default parameters.
pub fn plant_by_name(name: &str) -> Option<Box<dyn Plant>> {
    match name {
        "pendulum" => Some(Box::new(Pendulum::new(PendulumParams::default()).ok()?)),
        "bicycle" => Some(Box::new(Bicycle::new(BicycleParams::default()).ok()?)),
        _ => {
            let p: usize = name.strip_prefix("chain")?.parse().ok()?;
            Some(Box::new(IntegratorChain::new(p).ok()?))
        }
    }
}
