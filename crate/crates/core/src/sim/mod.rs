//! Fixed-step closed-loop simulation, run metrics and the prediction-error probe.

mod closed_loop;
mod metrics;
mod probe;
mod rk4;

pub use closed_loop::{run_closed_loop, ControllerKind, SimConfig, SimTrace, StepFlags};
pub use metrics::{
    compute_metrics, default_settle_threshold, Metrics, REGULATION_SETTLE_THRESHOLD,
    STEADY_STATE_FRACTION,
};
pub use probe::{prediction_error_probe, ProbeRow, ProbeTable, PROBE_STEPS_PER_HORIZON};
pub use rk4::{rk4_step, rk4_step_t};
