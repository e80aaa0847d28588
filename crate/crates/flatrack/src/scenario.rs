//! Scenario files: a JSON description of one closed-loop run.

use std::collections::BTreeMap;
use std::path::Path;

use flatrack_core::linalg::Vector;
use flatrack_core::plants::{
    plant_by_name, Bicycle, BicycleParams, Pendulum, PendulumParams, Plant,
};
use flatrack_core::reference::{ReferenceSignal, Sinusoid, Tabulated, ZeroReference};
use flatrack_core::sim::{ControllerKind, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub plant: PlantSpec,
    pub controller: ControllerSpec,
    pub sim: SimSpec,
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub name: String,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub kind: String,
    pub horizon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub dt_pred: Option<f64>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_final: f64,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub u0: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReferenceSpec {
    Zero,
    Sin2d {
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
    },
    Table {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub trace: Option<String>,
    #[serde(default)]
    pub metrics: Option<String>,
}

fn default_alpha() -> f64 {
    100.0
}

fn default_fd_step() -> f64 {
    flatrack_core::control::DEFAULT_FD_STEP
}

fn default_dt() -> f64 {
    1e-3
}

/// A validated scenario, ready to simulate.
pub struct Resolved {
    pub plant: Box<dyn Plant>,
    pub config: SimConfig,
    pub reference: Box<dyn ReferenceSignal>,
}

impl Scenario {
    pub fn from_json(text: &str, file: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::config(file, path, inner.to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn trace_file(&self) -> String {
        self.outputs
            .trace
            .clone()
            .unwrap_or_else(|| format!("{}_trace.csv", self.name))
    }

    pub fn metrics_file(&self) -> String {
        self.outputs
            .metrics
            .clone()
            .unwrap_or_else(|| format!("{}_metrics.json", self.name))
    }

    /// Builds the plant, configuration and reference, checking every field.
    pub fn resolve(&self, file: &str) -> Result<Resolved, CliError> {
        let err = |field: &str, msg: String| CliError::config(file, field, msg);
        let plant = build_plant(&self.plant).map_err(|(f, m)| err(&f, m))?;
        let kind = ControllerKind::parse(&self.controller.kind).ok_or_else(|| {
            err(
                "controller.kind",
                format!(
                    "unknown controller `{}` (expected dnrc-generic, dnrc-flat or snrc)",
                    self.controller.kind
                ),
            )
        })?;
        if self.sim.x0.len() != plant.state_dim() {
            return Err(err(
                "sim.x0",
                format!("expected {} entries for {}", plant.state_dim(), plant.name()),
            ));
        }
        let u0 = match &self.sim.u0 {
            Some(u) if u.len() != plant.input_dim() => {
                return Err(err(
                    "sim.u0",
                    format!("expected {} entries for {}", plant.input_dim(), plant.name()),
                ))
            }
            Some(u) => Vector(u.clone()),
            None => Vector::zeros(plant.input_dim()),
        };
        let mut config = SimConfig::new(kind, Vector(self.sim.x0.clone()), u0, self.controller.horizon);
        config.dt = self.sim.dt;
        config.t_final = self.sim.t_final;
        config.alpha = self.controller.alpha;
        config.dt_pred = self.controller.dt_pred;
        config.fd_step = self.controller.fd_step;
        config.seed = self.sim.seed;
        config.validate(plant.as_ref()).map_err(|e| err(field_of(&e), e.to_string()))?;

        let reference = build_reference(&self.reference, plant.input_dim())
            .map_err(|m| err("reference", m))?;
        Ok(Resolved {
            plant,
            config,
            reference,
        })
    }
}

fn field_of(e: &flatrack_core::Error) -> &'static str {
    match e {
        flatrack_core::Error::InvalidArgument(msg) if msg.contains("dt must") => "sim.dt",
        flatrack_core::Error::InvalidArgument(msg) if msg.contains("t_final") => "sim.t_final",
        flatrack_core::Error::InvalidArgument(msg) if msg.contains("horizon") => "controller.horizon",
        flatrack_core::Error::InvalidArgument(msg) if msg.contains("alpha") => "controller.alpha",
        flatrack_core::Error::InvalidArgument(_) => "controller",
        _ => "sim",
    }
}

fn take(
    overrides: &BTreeMap<String, f64>,
    allowed: &[&str],
) -> Result<(), (String, String)> {
    for key in overrides.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err((
                format!("plant.overrides.{key}"),
                format!("unknown parameter (expected one of {})", allowed.join(", ")),
            ));
        }
    }
    Ok(())
}

fn build_plant(spec: &PlantSpec) -> Result<Box<dyn Plant>, (String, String)> {
    let o = &spec.overrides;
    let get = |k: &str, d: f64| o.get(k).copied().unwrap_or(d);
    match spec.name.as_str() {
        "pendulum" => {
            take(o, &["mass", "cart_mass", "length", "gravity"])?;
            let d = PendulumParams::default();
            let params = PendulumParams {
                mass: get("mass", d.mass),
                cart_mass: get("cart_mass", d.cart_mass),
                length: get("length", d.length),
                gravity: get("gravity", d.gravity),
            };
            Pendulum::new(params)
                .map(|p| Box::new(p) as Box<dyn Plant>)
                .map_err(|e| ("plant.overrides".into(), e.to_string()))
        }
        "bicycle" => {
            take(o, &["wheelbase", "accel_min", "accel_max", "steer_min", "steer_max"])?;
            let d = BicycleParams::default();
            let params = BicycleParams {
                wheelbase: get("wheelbase", d.wheelbase),
                accel_limits: (get("accel_min", d.accel_limits.0), get("accel_max", d.accel_limits.1)),
                steer_limits: (get("steer_min", d.steer_limits.0), get("steer_max", d.steer_limits.1)),
            };
            Bicycle::new(params)
                .map(|p| Box::new(p) as Box<dyn Plant>)
                .map_err(|e| ("plant.overrides".into(), e.to_string()))
        }
        name => {
            take(o, &[])?;
            plant_by_name(name).ok_or_else(|| {
                (
                    "plant.name".into(),
                    format!("unknown plant `{name}` (expected pendulum, bicycle or chain1..chain6)"),
                )
            })
        }
    }
}

fn build_reference(spec: &ReferenceSpec, dim: usize) -> Result<Box<dyn ReferenceSignal>, String> {
    let r: Box<dyn ReferenceSignal> = match spec {
        ReferenceSpec::Zero => Box::new(ZeroReference::new(dim)),
        ReferenceSpec::Sin2d {
            amplitudes,
            frequencies,
        } => Box::new(
            Sinusoid::new(amplitudes.clone(), frequencies.clone()).map_err(|e| e.to_string())?,
        ),
        ReferenceSpec::Table { times, values } => Box::new(
            Tabulated::new(times.clone(), values.iter().cloned().map(Vector).collect())
                .map_err(|e| e.to_string())?,
        ),
    };
    if r.dim() != dim {
        return Err(format!("reference has {} channels, plant has {dim} outputs", r.dim()));
    }
    Ok(r)
}
