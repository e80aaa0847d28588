//! Newton–Raphson controllers.
//!
//! The dynamical form integrates `u̇ = −α (∂g/∂u)⁻¹ (g(x, u) − r(t+T))`, a
//! continuous Newton flow on the prediction residual. The statical form
//! solves `g(x, u) = r(t+T)` exactly at every instant.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::flat::FlatPredictor;
use crate::linalg::{Lu, Matrix, Vector};
use crate::plants::Plant;
use crate::sim::rk4_step;

/// Default relative step for the finite-difference Jacobian of the fixed-input predictor.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

const DIVERGENCE_NORM: f64 = 1e8;

/// Integrated input of the dynamical controller.
#[derive(Clone, Debug, PartialEq)]
pub struct DnrcState {
    pub u: Vector,
    pub alpha: f64,
}

impl DnrcState {
    pub fn new(u: Vector, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be positive"));
        }
        if !u.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { u, alpha })
    }
}

/// Output prediction obtained by simulating the plant over `horizon` with the
/// input held at `u`.
pub fn fixed_input_predict(
    plant: &dyn Plant,
    x: &[f64],
    u: &[f64],
    horizon: f64,
    dt_pred: f64,
) -> Result<Vector> {
    if !(horizon > 0.0) || !(dt_pred > 0.0) {
        return Err(Error::InvalidArgument("horizon and predictor step must be positive"));
    }
    let steps = (horizon / dt_pred).round().max(1.0) as usize;
    let h = horizon / steps as f64;
    let mut xi = Vector::from_slice(x);
    for _ in 0..steps {
        xi = rk4_step(|s| plant.dynamics(s, u), &xi, h)?;
        if !xi.is_finite() || xi.norm() > DIVERGENCE_NORM {
            return Err(Error::PredictionDiverged);
        }
    }
    Ok(plant.output(&xi))
}

/// Central-difference Jacobian of the fixed-input prediction with respect to `u`.
pub fn fixed_input_jacobian(
    plant: &dyn Plant,
    x: &[f64],
    u: &[f64],
    horizon: f64,
    dt_pred: f64,
    fd_step: f64,
) -> Result<Matrix> {
    let m = u.len();
    let mut jac = Matrix::zeros(plant.output_indices().len(), m);
    let mut probe: Vec<f64> = u.to_vec();
    for j in 0..m {
        let h = fd_step * u[j].abs().max(1.0);
        probe[j] = u[j] + h;
        let plus = fixed_input_predict(plant, x, &probe, horizon, dt_pred)?;
        probe[j] = u[j] - h;
        let minus = fixed_input_predict(plant, x, &probe, horizon, dt_pred)?;
        probe[j] = u[j];
        for i in 0..plus.dim() {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// `u̇` of the dynamical controller using the fixed-input predictor.
pub fn dnrc_generic_udot(
    plant: &dyn Plant,
    x: &[f64],
    state: &DnrcState,
    r_future: &[f64],
    horizon: f64,
    dt_pred: f64,
    fd_step: f64,
) -> Result<Vector> {
    let g = fixed_input_predict(plant, x, &state.u, horizon, dt_pred)?;
    let jac = fixed_input_jacobian(plant, x, &state.u, horizon, dt_pred, fd_step)?;
    let residual = &g - &Vector::from_slice(r_future);
    let step = Lu::new(&jac)
        .map_err(|_| Error::SingularJacobian)?
        .solve_vec(&residual)?;
    Ok(step.scale(-state.alpha))
}

/// `g_f(Φ(x), Γ(x, u))`
pub fn flat_prediction(
    plant: &dyn Plant,
    fp: &FlatPredictor,
    x: &[f64],
    u: &[f64],
) -> Result<Vector> {
    let z = plant.phi(x)?;
    let v = plant.gamma_fwd(x, u)?;
    Ok(fp.predict(&z, &v))
}

/// `u̇ = −α (∂Γ/∂u)⁻¹ (CS)⁻¹ (CR z + CS v − r(t+T))`, the dynamical
/// controller with the flat predictor; `∂g_f/∂u = CS ∂Γ/∂u` by the chain rule.
pub fn dnrc_flat_udot(
    plant: &dyn Plant,
    fp: &FlatPredictor,
    x: &[f64],
    state: &DnrcState,
    r_future: &[f64],
) -> Result<Vector> {
    let g = flat_prediction(plant, fp, x, &state.u)?;
    let residual = &g - &Vector::from_slice(r_future);
    let w = fp.solve_cs(&residual)?;
    let dgdu = plant.dgamma_du(x, &state.u)?;
    let step = Lu::new(&dgdu)
        .map_err(|_| Error::SingularJacobian)?
        .solve_vec(&w)?;
    Ok(step.scale(-state.alpha))
}

/// Statical controller `u* = γ(Φ(x), (CS)⁻¹ (r(t+T) − CR Φ(x)))`.
pub fn snrc_input(
    plant: &dyn Plant,
    fp: &FlatPredictor,
    x: &[f64],
    r_future: &[f64],
) -> Result<Vector> {
    let z = plant.phi(x)?;
    let v = fp.invert_prediction(&z, r_future)?;
    plant.gamma_inv(&z, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plants::{IntegratorChain, Pendulum, PendulumParams};
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn fixed_input_predict_on_double_integrator() {
        let plant = IntegratorChain::new(2).unwrap();
        let y = fixed_input_predict(&plant, &[1.0, 2.0], &[3.0], 1.0, 0.01).unwrap();
        assert!((y[0] - 4.5).abs() < 1e-12);
    }

    #[test]
    fn single_step_prediction_matches_taylor() {
        let plant = Pendulum::new(PendulumParams::default()).unwrap();
        let x = [0.2, 0.3];
        let t = 1e-3;
        let y = fixed_input_predict(&plant, &x, &[1.0], t, t).unwrap();
        // first order: θ + θ̇ T
        assert!((y[0] - (x[0] + x[1] * t)).abs() < 10.0 * t * t);
    }

    #[test]
    fn pendulum_prediction_converges_under_refinement() {
        let plant = Pendulum::new(PendulumParams::default()).unwrap();
        let x = [PI / 6.0, 0.0];
        let coarse = fixed_input_predict(&plant, &x, &[0.0], 0.3, 0.003).unwrap();
        let fine = fixed_input_predict(&plant, &x, &[0.0], 0.3, 0.0003).unwrap();
        assert!((coarse[0] - fine[0]).abs() <= 1e-6);
    }

    #[test]
    fn prediction_divergence_is_reported() {
        let plant = IntegratorChain::new(1).unwrap();
        assert_eq!(
            fixed_input_predict(&plant, &[0.0], &[1e9], 1.0, 0.1).unwrap_err(),
            Error::PredictionDiverged
        );
    }

    #[test]
    fn generic_flow_vanishes_at_solution() {
        let plant = IntegratorChain::new(2).unwrap();
        let x = [0.5, -0.25];
        let state = DnrcState::new(Vector(vec![0.8]), 10.0).unwrap();
        let g = fixed_input_predict(&plant, &x, &state.u, 0.5, 0.005).unwrap();
        let udot = dnrc_generic_udot(&plant, &x, &state, &g, 0.5, 0.005, DEFAULT_FD_STEP).unwrap();
        assert!(udot[0].abs() < 1e-9);
    }

    #[test]
    fn generic_flow_uses_analytic_jacobian_on_double_integrator() {
        let plant = IntegratorChain::new(2).unwrap();
        let (t, alpha) = (0.5, 10.0);
        let x = [0.5, -0.25];
        let state = DnrcState::new(Vector(vec![0.8]), alpha).unwrap();
        let r = [1.0];
        let g = x[0] + x[1] * t + 0.5 * 0.8 * t * t;
        let udot = dnrc_generic_udot(&plant, &x, &state, &r, t, t / 100.0, DEFAULT_FD_STEP).unwrap();
        let expect = -alpha * 2.0 / (t * t) * (g - r[0]);
        assert!((udot[0] - expect).abs() < 1e-6 * expect.abs());
        // prediction short of the target drives the input up
        assert!(g < r[0] && udot[0] > 0.0);
    }

    #[test]
    fn flat_flow_at_origin_is_zero() {
        let plant = Pendulum::new(PendulumParams::default()).unwrap();
        let fp = FlatPredictor::new(crate::plants::Plant::flat_system(&plant), 0.3).unwrap();
        let state = DnrcState::new(Vector(vec![0.0]), 100.0).unwrap();
        let udot = dnrc_flat_udot(&plant, &fp, &[0.0, 0.0], &state, &[0.0]).unwrap();
        assert_eq!(udot[0], 0.0);
    }

    #[test]
    fn pendulum_flat_flow_matches_explicit_law() {
        let params = PendulumParams::default();
        let plant = Pendulum::new(params).unwrap();
        let (t, alpha) = (0.3, 100.0);
        let fp = FlatPredictor::new(crate::plants::Plant::flat_system(&plant), t).unwrap();
        let (theta, rate, force) = (0.35, -0.6, 4.0);
        let state = DnrcState::new(Vector(vec![force]), alpha).unwrap();
        let udot = dnrc_flat_udot(&plant, &fp, &[theta, rate], &state, &[0.0]).unwrap();

        let (m, big_m, l, g) = (params.mass, params.cart_mass, params.length, params.gravity);
        let (s, c) = (theta.sin(), theta.cos());
        let inertia = m * l * s * s + big_m * l;
        let explicit = -alpha * 2.0 * theta * inertia / (t * t * c)
            - alpha * 2.0 * rate * inertia / (t * c)
            - alpha * (force * c + (m + big_m) * g * s - m * l * rate * rate * s * c) / c;
        assert!((udot[0] - explicit).abs() < 1e-9 * explicit.abs());
    }

    #[test]
    fn flat_and_generic_agree_on_linear_plant() {
        let plant = IntegratorChain::new(3).unwrap();
        let t = 0.8;
        let fp = FlatPredictor::new(crate::plants::Plant::flat_system(&plant), t).unwrap();
        let x = [0.3, -0.2, 0.7];
        let state = DnrcState::new(Vector(vec![-1.1]), 5.0).unwrap();
        let r = [0.4];
        let a = dnrc_flat_udot(&plant, &fp, &x, &state, &r).unwrap();
        let b = dnrc_generic_udot(&plant, &x, &state, &r, t, t / 100.0, DEFAULT_FD_STEP).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-6 * a[0].abs().max(1.0));
    }

    #[test]
    fn snrc_on_chain_is_flat_inversion() {
        let plant = IntegratorChain::new(2).unwrap();
        let t = 0.5;
        let fp = FlatPredictor::new(crate::plants::Plant::flat_system(&plant), t).unwrap();
        let x = [1.0, 0.5];
        let u = snrc_input(&plant, &fp, &x, &[2.0]).unwrap();
        let expect = fp.invert_prediction(&x, &[2.0]).unwrap();
        assert_eq!(u, expect);
    }

    #[test]
    fn singular_flat_jacobian_is_reported() {
        let plant = Pendulum::new(PendulumParams::default()).unwrap();
        let fp = FlatPredictor::new(crate::plants::Plant::flat_system(&plant), 0.3).unwrap();
        let state = DnrcState::new(Vector(vec![0.0]), 1.0).unwrap();
        assert!(dnrc_flat_udot(&plant, &fp, &[PI / 2.0, 0.0], &state, &[0.0]).is_err());
    }

    #[test]
    fn dnrc_state_validation() {
        assert!(DnrcState::new(Vector(vec![0.0]), 0.0).is_err());
        assert!(DnrcState::new(Vector(vec![f64::NAN]), 1.0).is_err());
    }
}
