use crate::linalg::dist2;
use crate::reference::ReferenceSignal;
use crate::sim::SimTrace;

/// Settling threshold used for regulation, where `max‖r‖ = 0`.
pub const REGULATION_SETTLE_THRESHOLD: f64 = 0.01;
/// Fraction of the run, counted from the end, over which steady-state error is taken.
pub const STEADY_STATE_FRACTION: f64 = 0.2;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metrics {
    pub final_output_norm: f64,
    /// First sample time after which `‖y − r‖` stays below the threshold.
    pub settling_time: Option<f64>,
    pub settle_threshold: f64,
    /// `max ‖y − r‖` over the last 20% of the run.
    pub steady_state_error: f64,
    pub max_input_norm: f64,
    /// `max ‖ỹ(t+T) − r(t+T)‖` over steps without input saturation.
    pub prediction_residual_max: f64,
    /// `‖ỹ(t+T) − r(t+T)‖` at the last sample.
    pub final_prediction_residual: f64,
}

pub fn default_settle_threshold(trace: &SimTrace) -> f64 {
    let rmax = trace
        .references
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    if rmax > 0.0 {
        0.05 * rmax
    } else {
        REGULATION_SETTLE_THRESHOLD
    }
}

pub fn compute_metrics(
    trace: &SimTrace,
    r: &dyn ReferenceSignal,
    settle_threshold: Option<f64>,
) -> Metrics {
    let threshold = settle_threshold.unwrap_or_else(|| default_settle_threshold(trace));
    let len = trace.len();
    if len == 0 {
        return Metrics {
            settle_threshold: threshold,
            ..Metrics::default()
        };
    }
    let errors: alloc::vec::Vec<f64> = trace
        .outputs
        .iter()
        .zip(&trace.references)
        .map(|(y, r)| dist2(y, r))
        .collect();

    let settling_time = match errors.iter().rposition(|&e| e >= threshold) {
        None => Some(trace.times[0]),
        Some(k) if k + 1 < len => Some(trace.times[k + 1]),
        Some(_) => None,
    };

    let t_end = trace.times[len - 1];
    let t_start = t_end - STEADY_STATE_FRACTION * (t_end - trace.times[0]);
    let steady_state_error = trace
        .times
        .iter()
        .zip(&errors)
        .filter(|(t, _)| **t >= t_start)
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);

    let residual = |k: usize| dist2(&trace.predictions[k], &r.eval(trace.times[k] + trace.horizon));
    let prediction_residual_max = (0..len)
        .filter(|&k| !trace.flags[k].saturated)
        .map(residual)
        .fold(0.0, f64::max);

    Metrics {
        final_output_norm: trace.outputs[len - 1].norm(),
        settling_time,
        settle_threshold: threshold,
        steady_state_error,
        max_input_norm: trace.inputs.iter().map(|u| u.norm()).fold(0.0, f64::max),
        prediction_residual_max,
        final_prediction_residual: residual(len - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use crate::reference::ZeroReference;
    use crate::sim::StepFlags;
    use alloc::vec;
    use alloc::vec::Vec;

    fn constant_trace(y: &[f64], steps: usize) -> SimTrace {
        let m = y.len();
        let times: Vec<f64> = (0..steps).map(|k| k as f64 * 0.1).collect();
        SimTrace {
            horizon: 0.5,
            states: vec![Vector::from_slice(y); steps],
            inputs: vec![Vector::zeros(m); steps],
            outputs: vec![Vector::from_slice(y); steps],
            references: vec![Vector::zeros(m); steps],
            predictions: vec![Vector::zeros(m); steps],
            flags: vec![StepFlags::default(); steps],
            times,
        }
    }

    #[test]
    fn zero_trace_has_zero_metrics() {
        let trace = constant_trace(&[0.0, 0.0], 50);
        let m = compute_metrics(&trace, &ZeroReference::new(2), None);
        assert_eq!(m.final_output_norm, 0.0);
        assert_eq!(m.steady_state_error, 0.0);
        assert_eq!(m.max_input_norm, 0.0);
        assert_eq!(m.prediction_residual_max, 0.0);
        assert_eq!(m.settling_time, Some(0.0));
        assert_eq!(m.settle_threshold, REGULATION_SETTLE_THRESHOLD);
    }

    #[test]
    fn constant_offset_never_settles() {
        let trace = constant_trace(&[3.0, 4.0], 50);
        let m = compute_metrics(&trace, &ZeroReference::new(2), None);
        assert_eq!(m.steady_state_error, 5.0);
        assert_eq!(m.final_output_norm, 5.0);
        assert_eq!(m.settling_time, None);
    }

    #[test]
    fn settling_time_is_first_sample_after_last_violation() {
        let mut trace = constant_trace(&[0.0], 11);
        for k in 0..4 {
            trace.outputs[k] = Vector(vec![1.0]);
        }
        let m = compute_metrics(&trace, &ZeroReference::new(1), Some(0.5));
        assert!((m.settling_time.unwrap() - 0.4).abs() < 1e-12);
        // only the last 20% (t ≥ 0.8) counts as steady state
        assert_eq!(m.steady_state_error, 0.0);
    }

    #[test]
    fn saturated_steps_are_excluded_from_residual() {
        let mut trace = constant_trace(&[0.0], 5);
        trace.predictions[2] = Vector(vec![7.0]);
        trace.flags[2].saturated = true;
        trace.predictions[3] = Vector(vec![-2.0]);
        let m = compute_metrics(&trace, &ZeroReference::new(1), None);
        assert_eq!(m.prediction_residual_max, 2.0);
    }
}
