use alloc::vec::Vec;

use crate::control::{fixed_input_predict, flat_prediction};
use crate::error::{Error, Result};
use crate::flat::FlatPredictor;
use crate::linalg::dist2;
use crate::plants::Plant;

/// Predictor steps per horizon used for the reference fixed-input prediction,
/// ten times finer than the controller default.
pub const PROBE_STEPS_PER_HORIZON: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub horizon: f64,
    /// `‖g(x, u) − h(x)‖`
    pub e_p: f64,
    /// `‖g_f(x, u) − g(x, u)‖`
    pub e_f: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    /// Least-squares slope through the origin of `e_p` against `T`.
    pub slope_p: f64,
    pub slope_f: f64,
}

impl ProbeTable {
    /// `(max e_p/T, max e_f/T)` over the sweep.
    pub fn max_ratios(&self) -> (f64, f64) {
        self.rows.iter().fold((0.0, 0.0), |(p, f), r| {
            (p.max(r.e_p / r.horizon), f.max(r.e_f / r.horizon))
        })
    }

    /// `(max/min)` of `e_p/T` and of `e_f/T` across the sweep.
    pub fn ratio_spreads(&self) -> (f64, f64) {
        let spread = |get: fn(&ProbeRow) -> f64| {
            let ratios = self.rows.iter().map(|r| get(r) / r.horizon);
            let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi == 0.0 { 1.0 } else { hi / lo }
        };
        (spread(|r| r.e_p), spread(|r| r.e_f))
    }
}

fn slope_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    sxy / sxx
}

/// Measures the exact-prediction error `e_p` and the flat-prediction error
/// `e_f` at `(x, u)` for each horizon.
pub fn prediction_error_probe(
    plant: &dyn Plant,
    x: &[f64],
    u: &[f64],
    horizons: &[f64],
) -> Result<ProbeTable> {
    if horizons.is_empty() {
        return Err(Error::InvalidArgument("probe needs at least one horizon"));
    }
    if horizons.iter().any(|&t| !(t > 0.0) || !t.is_finite())
        || horizons.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::InvalidArgument("probe horizons must be positive and ascending"));
    }
    let y = plant.output(x);
    let mut rows = Vec::with_capacity(horizons.len());
    for &horizon in horizons {
        let fp = FlatPredictor::new(plant.flat_system(), horizon)?;
        let g = fixed_input_predict(plant, x, u, horizon, horizon / PROBE_STEPS_PER_HORIZON)?;
        let gf = flat_prediction(plant, &fp, x, u)?;
        rows.push(ProbeRow {
            horizon,
            e_p: dist2(&g, &y),
            e_f: dist2(&gf, &g),
        });
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.horizon).collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.e_p).collect();
    let efs: Vec<f64> = rows.iter().map(|r| r.e_f).collect();
    Ok(ProbeTable {
        slope_p: slope_through_origin(&ts, &eps),
        slope_f: slope_through_origin(&ts, &efs),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plants::{IntegratorChain, Pendulum};

    #[test]
    fn flat_prediction_is_exact_on_chains() {
        let plant = IntegratorChain::new(3).unwrap();
        let table =
            prediction_error_probe(&plant, &[0.4, -0.2, 0.7], &[1.5], &[0.1, 0.5, 1.0]).unwrap();
        for row in &table.rows {
            assert!(row.e_f < 1e-9, "{row:?}");
            assert!(row.e_p > 0.0);
        }
    }

    #[test]
    fn errors_vanish_as_horizon_shrinks() {
        let plant = Pendulum::default();
        let table = prediction_error_probe(&plant, &[0.3, 0.1], &[1.0], &[1e-4, 1e-3, 1e-2])
            .unwrap();
        let first = table.rows[0];
        assert!(first.e_p < 2e-5 && first.e_f < 1e-10, "{first:?}");
        assert!(table.rows.windows(2).all(|w| w[0].e_p < w[1].e_p));
    }

    #[test]
    fn rejects_unordered_horizons() {
        let plant = Pendulum::default();
        assert!(prediction_error_probe(&plant, &[0.3, 0.1], &[1.0], &[0.2, 0.1]).is_err());
        assert!(prediction_error_probe(&plant, &[0.3, 0.1], &[1.0], &[]).is_err());
    }
}
