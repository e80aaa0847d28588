use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{InputLimit, Plant};
use crate::error::{Error, Result};
use crate::flat::{FlatSystem, FlatTransform};
use crate::linalg::{Matrix, Vector};

const MAX_ORDER: usize = 6;
const BOX_BOUND: f64 = 10.0;

/// Linear chain of `p` integrators, `x₁⁽ᵖ⁾ = u`; its own flat system.
#[derive(Clone, Debug)]
pub struct IntegratorChain {
    order: usize,
    name: String,
    flat: FlatSystem,
    limits: [InputLimit; 1],
}

impl IntegratorChain {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidArgument("chain order must be within 1..=6"));
        }
        Ok(Self {
            order,
            name: alloc::format!("chain{order}"),
            flat: FlatSystem::integrator_chain(order)?,
            limits: [InputLimit::UNBOUNDED],
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl FlatTransform for IntegratorChain {
    fn phi(&self, x: &[f64]) -> Result<Vector> {
        Ok(Vector::from_slice(x))
    }

    fn phi_inv(&self, z: &[f64]) -> Result<Vector> {
        Ok(Vector::from_slice(z))
    }

    fn gamma_fwd(&self, _x: &[f64], u: &[f64]) -> Result<Vector> {
        Ok(Vector::from_slice(u))
    }

    fn gamma_inv(&self, _z: &[f64], v: &[f64]) -> Result<Vector> {
        Ok(Vector::from_slice(v))
    }

    fn dgamma_du(&self, _x: &[f64], _u: &[f64]) -> Result<Matrix> {
        Ok(Matrix::identity(1))
    }
}

impl Plant for IntegratorChain {
    fn name(&self) -> &str {
        &self.name
    }

    fn state_dim(&self) -> usize {
        self.order
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn dynamics(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        Ok(self.flat.flow(x, u))
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
        x.iter().chain(u).all(|v| v.abs() <= BOX_BOUND)
    }

    fn sample_valid(&self, rng: &mut dyn RngCore) -> (Vector, Vector) {
        let x: Vec<f64> = (0..self.order)
            .map(|_| rng.gen_range(-BOX_BOUND..=BOX_BOUND))
            .collect();
        (Vector(x), Vector(alloc::vec![rng.gen_range(-BOX_BOUND..=BOX_BOUND)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_is_pure_integrator() {
        let c = IntegratorChain::new(1).unwrap();
        assert_eq!(&c.dynamics(&[3.0], &[-2.0]).unwrap()[..], &[-2.0]);
    }

    #[test]
    fn double_integrator_shifts_state() {
        let c = IntegratorChain::new(2).unwrap();
        assert_eq!(&c.dynamics(&[1.0, 2.0], &[3.0]).unwrap()[..], &[2.0, 3.0]);
        assert_eq!(c.flat_system(), &FlatSystem::integrator_chain(2).unwrap());
    }

    #[test]
    fn order_bounds() {
        assert!(IntegratorChain::new(0).is_err());
        assert!(IntegratorChain::new(5).is_ok());
        assert!(IntegratorChain::new(7).is_err());
    }
}
