use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::control::{
    dnrc_flat_udot, dnrc_generic_udot, fixed_input_jacobian, fixed_input_predict,
    flat_prediction, snrc_input, DnrcState, DEFAULT_FD_STEP,
};
use crate::error::{Error, Result};
use crate::flat::FlatPredictor;
use crate::linalg::{Lu, Vector};
use crate::plants::Plant;
use crate::reference::ReferenceSignal;
use crate::sim::rk4_step_t;

const DIVERGENCE_NORM: f64 = 1e8;
/// Pivot ratio below which a Jacobian is flagged as near-singular.
const NEAR_SINGULAR_RATIO: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerKind {
    /// Dynamical controller with the fixed-input predictor.
    DnrcGeneric,
    /// Dynamical controller with the flat predictor.
    DnrcFlat,
    /// Statical controller with the flat predictor.
    Snrc,
}

impl ControllerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ControllerKind::DnrcGeneric => "dnrc-generic",
            ControllerKind::DnrcFlat => "dnrc-flat",
            ControllerKind::Snrc => "snrc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dnrc-generic" => Some(ControllerKind::DnrcGeneric),
            "dnrc-flat" => Some(ControllerKind::DnrcFlat),
            "snrc" => Some(ControllerKind::Snrc),
            _ => None,
        }
    }

    pub fn is_dynamical(self) -> bool {
        self != ControllerKind::Snrc
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub x0: Vector,
    pub u0: Vector,
    pub controller: ControllerKind,
    /// Speedup factor of the dynamical controllers.
    pub alpha: f64,
    /// Prediction horizon `T`.
    pub horizon: f64,
    /// Internal step of the fixed-input predictor; defaults to `T / 100`.
    pub dt_pred: Option<f64>,
    pub fd_step: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(controller: ControllerKind, x0: Vector, u0: Vector, horizon: f64) -> Self {
        Self {
            dt: 1e-3,
            t_final: 10.0,
            x0,
            u0,
            controller,
            alpha: 100.0,
            horizon,
            dt_pred: None,
            fd_step: DEFAULT_FD_STEP,
            seed: 0,
        }
    }

    pub fn dt_pred(&self) -> f64 {
        self.dt_pred.unwrap_or(self.horizon / 100.0)
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self, plant: &dyn Plant) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive"));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument("t_final must be at least dt"));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidArgument("prediction horizon must be positive"));
        }
        if self.controller.is_dynamical() && !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument("alpha must be positive"));
        }
        if !(self.dt_pred() > 0.0) || !(self.fd_step > 0.0) {
            return Err(Error::InvalidArgument("predictor step sizes must be positive"));
        }
        if self.x0.dim() != plant.state_dim() {
            return Err(Error::DimensionMismatch {
                op: "SimConfig::x0",
                expected: (plant.state_dim(), 1),
                found: (self.x0.dim(), 1),
            });
        }
        if self.u0.dim() != plant.input_dim() {
            return Err(Error::DimensionMismatch {
                op: "SimConfig::u0",
                expected: (plant.input_dim(), 1),
                found: (self.u0.dim(), 1),
            });
        }
        if !self.x0.is_finite() || !self.u0.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepFlags {
    /// Input saturation clipped the controller output.
    pub saturated: bool,
    /// The controller Jacobian was close to singular.
    pub near_singular: bool,
}

/// Samples of a closed-loop run on the uniform grid `t_k = k dt`.
#[derive(Clone, Debug, Default)]
pub struct SimTrace {
    pub horizon: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    /// Inputs applied to the plant, after saturation.
    pub inputs: Vec<Vector>,
    pub outputs: Vec<Vector>,
    /// `r(t_k)`
    pub references: Vec<Vector>,
    /// `ỹ(t_k + T)` from the controller's predictor.
    pub predictions: Vec<Vector>,
    pub flags: Vec<StepFlags>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&Vector> {
        self.states.last()
    }
}

struct Runner<'a> {
    plant: &'a dyn Plant,
    fp: FlatPredictor,
    config: &'a SimConfig,
    reference: &'a dyn ReferenceSignal,
    n: usize,
}

impl Runner<'_> {
    fn r_future(&self, t: f64) -> Vector {
        self.reference.eval(t + self.config.horizon)
    }

    fn snrc_applied(&self, t: f64, x: &[f64]) -> Result<(Vector, bool)> {
        let u = snrc_input(self.plant, &self.fp, x, &self.r_future(t))?;
        Ok(self.plant.saturate(&u))
    }

    fn dnrc_udot(&self, t: f64, x: &[f64], u: &Vector) -> Result<Vector> {
        let state = DnrcState {
            u: u.clone(),
            alpha: self.config.alpha,
        };
        let r = self.r_future(t);
        match self.config.controller {
            ControllerKind::DnrcFlat => dnrc_flat_udot(self.plant, &self.fp, x, &state, &r),
            _ => dnrc_generic_udot(
                self.plant,
                x,
                &state,
                &r,
                self.config.horizon,
                self.config.dt_pred(),
                self.config.fd_step,
            ),
        }
    }

    /// Field of the stacked state `(x, u)` under a dynamical controller.
    fn coupled_field(&self, t: f64, s: &[f64]) -> Result<Vector> {
        let (x, u_raw) = s.split_at(self.n);
        let (u, _) = self.plant.saturate(u_raw);
        let xdot = self.plant.dynamics(x, &u)?;
        let udot = self.dnrc_udot(t, x, &u)?;
        Ok(Vector::concat(&xdot, &udot))
    }

    fn snrc_field(&self, t: f64, x: &[f64]) -> Result<Vector> {
        let (u, _) = self.snrc_applied(t, x)?;
        self.plant.dynamics(x, &u)
    }

    fn prediction(&self, x: &[f64], u: &[f64]) -> Result<Vector> {
        match self.config.controller {
            ControllerKind::DnrcGeneric => fixed_input_predict(
                self.plant,
                x,
                u,
                self.config.horizon,
                self.config.dt_pred(),
            ),
            _ => flat_prediction(self.plant, &self.fp, x, u),
        }
    }

    fn near_singular(&self, x: &[f64], u: &[f64]) -> bool {
        let jac = match self.config.controller {
            ControllerKind::DnrcGeneric => fixed_input_jacobian(
                self.plant,
                x,
                u,
                self.config.horizon,
                self.config.dt_pred(),
                self.config.fd_step,
            ),
            _ => self.plant.dgamma_du(x, u),
        };
        match jac.and_then(|j| Lu::new(&j)) {
            Ok(lu) => lu.pivot_ratio() < NEAR_SINGULAR_RATIO,
            Err(_) => true,
        }
    }

    fn record(
        &self,
        trace: &mut SimTrace,
        t: f64,
        x: &Vector,
        u: Vector,
        saturated: bool,
    ) -> Result<()> {
        let prediction = self.prediction(x, &u)?;
        let near_singular = self.near_singular(x, &u);
        trace.times.push(t);
        trace.outputs.push(self.plant.output(x));
        trace.references.push(self.reference.eval(t));
        trace.predictions.push(prediction);
        trace.states.push(x.clone());
        trace.inputs.push(u);
        trace.flags.push(StepFlags {
            saturated,
            near_singular,
        });
        Ok(())
    }
}

fn check_state(x: &[f64]) -> Result<()> {
    let norm = crate::linalg::norm2(x);
    if !norm.is_finite() || norm > DIVERGENCE_NORM {
        Err(Error::StateDiverged)
    } else {
        Ok(())
    }
}

fn abort(step: usize) -> impl Fn(Error) -> Error {
    move |cause| Error::SimulationAborted {
        step,
        cause: Box::new(cause),
    }
}

/// Fixed-step closed-loop simulation.
///
/// Dynamical controllers integrate the stacked state `(x, u)` with one RK4
/// step on the coupled field; the integrated input is clamped to the plant
/// limits after every step. The statical controller recomputes `u*` at each
/// RK4 stage.
pub fn run_closed_loop(
    plant: &dyn Plant,
    config: &SimConfig,
    reference: &dyn ReferenceSignal,
) -> Result<SimTrace> {
    config.validate(plant)?;
    if reference.dim() != plant.input_dim() {
        return Err(Error::DimensionMismatch {
            op: "run_closed_loop reference",
            expected: (plant.input_dim(), 1),
            found: (reference.dim(), 1),
        });
    }
    let (u0, u0_clipped) = plant.saturate(&config.u0);
    if !plant.in_valid_region(&config.x0, &u0) {
        return Err(Error::InvalidArgument("initial state outside the plant's valid region"));
    }
    let runner = Runner {
        plant,
        fp: FlatPredictor::new(plant.flat_system(), config.horizon)?,
        config,
        reference,
        n: plant.state_dim(),
    };
    let steps = config.steps();
    let mut trace = SimTrace {
        horizon: config.horizon,
        ..SimTrace::default()
    };
    let mut x = config.x0.clone();

    if config.controller.is_dynamical() {
        let mut u = u0;
        let mut clipped = u0_clipped;
        for k in 0..=steps {
            let t = k as f64 * config.dt;
            runner
                .record(&mut trace, t, &x, u.clone(), clipped)
                .map_err(abort(k))?;
            if k == steps {
                break;
            }
            let s = Vector::concat(&x, &u);
            let next = rk4_step_t(|t, s| runner.coupled_field(t, s), t, &s, config.dt)
                .map_err(abort(k))?;
            let (xn, un) = next.split_at(runner.n);
            check_state(xn).map_err(abort(k + 1))?;
            let (uc, c) = plant.saturate(un);
            x = Vector::from_slice(xn);
            u = uc;
            clipped = c;
        }
    } else {
        for k in 0..=steps {
            let t = k as f64 * config.dt;
            let (u, clipped) = runner.snrc_applied(t, &x).map_err(abort(k))?;
            runner
                .record(&mut trace, t, &x, u, clipped)
                .map_err(abort(k))?;
            if k == steps {
                break;
            }
            x = rk4_step_t(|t, s| runner.snrc_field(t, s), t, &x, config.dt)
                .map_err(abort(k))?;
            check_state(&x).map_err(abort(k + 1))?;
        }
    }
    Ok(trace)
}
