//! The `simulate`, `analyze` and `sweep` subcommands.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use flatrack_core::flat::FlatPredictor;
use flatrack_core::linalg::Matrix;
use flatrack_core::plants::plant_by_name;
use flatrack_core::sim::{compute_metrics, run_closed_loop, Metrics};
use flatrack_core::stability::{
    alpha_threshold_search_flat, dnrc_verdict, roa_estimate, snrc_hurwitz_check, verify_bracket,
    AlphaThreshold, RoaEstimate, Threshold,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::csv::{fmt_g9, trace_csv};
use crate::error::CliError;
use crate::output::{resolve, write_atomic};
use crate::scenario::Scenario;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MetricsRecord {
    pub scenario: String,
    pub controller: String,
    pub horizon: f64,
    pub alpha: f64,
    pub steps: usize,
    pub final_output_norm: f64,
    pub settling_time: Option<f64>,
    pub settle_threshold: f64,
    pub steady_state_error: f64,
    pub max_input_norm: f64,
    pub prediction_residual_max: f64,
    pub final_prediction_residual: f64,
    pub saturated_steps: usize,
}

pub struct SimulateOutcome {
    pub metrics: MetricsRecord,
    pub trace_path: PathBuf,
    pub metrics_path: PathBuf,
}

fn record(scenario: &Scenario, steps: usize, saturated: usize, m: &Metrics) -> MetricsRecord {
    MetricsRecord {
        scenario: scenario.name.clone(),
        controller: scenario.controller.kind.clone(),
        horizon: scenario.controller.horizon,
        alpha: scenario.controller.alpha,
        steps,
        final_output_norm: m.final_output_norm,
        settling_time: m.settling_time,
        settle_threshold: m.settle_threshold,
        steady_state_error: m.steady_state_error,
        max_input_norm: m.max_input_norm,
        prediction_residual_max: m.prediction_residual_max,
        final_prediction_residual: m.final_prediction_residual,
        saturated_steps: saturated,
    }
}

/// Runs a scenario and returns its metrics together with the rendered trace.
pub fn run_scenario(scenario: &Scenario, file: &str) -> Result<(MetricsRecord, String), CliError> {
    let resolved = scenario.resolve(file)?;
    let trace = run_closed_loop(
        resolved.plant.as_ref(),
        &resolved.config,
        resolved.reference.as_ref(),
    )
    .map_err(CliError::Aborted)?;
    let metrics = compute_metrics(&trace, resolved.reference.as_ref(), None);
    let saturated = trace.flags.iter().filter(|f| f.saturated).count();
    Ok((record(scenario, trace.len(), saturated, &metrics), trace_csv(&trace)))
}

pub fn simulate(path: &Path) -> Result<SimulateOutcome, CliError> {
    let scenario = Scenario::load(path)?;
    let (metrics, csv) = run_scenario(&scenario, &path.display().to_string())?;
    let trace_path = resolve(&scenario.trace_file());
    let metrics_path = resolve(&scenario.metrics_file());
    write_atomic(&trace_path, csv.as_bytes())?;
    let json = serde_json::to_string_pretty(&metrics).expect("metrics serialise");
    write_atomic(&metrics_path, format!("{json}\n").as_bytes())?;
    Ok(SimulateOutcome {
        metrics,
        trace_path,
        metrics_path,
    })
}

pub fn metrics_summary(m: &MetricsRecord) -> String {
    let settle = m
        .settling_time
        .map_or_else(|| "none".to_string(), |t| format!("{t:.3} s"));
    format!(
        "scenario            {}\n\
         controller          {} (T = {}, alpha = {})\n\
         steps               {}\n\
         final |y|           {:.3e}\n\
         settling time       {settle} (threshold {:.3e})\n\
         steady-state error  {:.3e}\n\
         max |u|             {:.4}\n\
         prediction residual {:.3e} max, {:.3e} final\n\
         saturated steps     {}\n",
        m.scenario,
        m.controller,
        m.horizon,
        m.alpha,
        m.steps,
        m.final_output_norm,
        m.settle_threshold,
        m.steady_state_error,
        m.max_input_norm,
        m.prediction_residual_max,
        m.final_prediction_residual,
        m.saturated_steps,
    )
}

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub horizon: f64,
    pub alpha: f64,
    pub alpha_max: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            alpha: 100.0,
            alpha_max: flatrack_core::stability::DEFAULT_ALPHA_MAX,
            samples: 2000,
            seed: 0,
        }
    }
}

pub struct AnalysisReport {
    pub target: String,
    pub options: AnalyzeOptions,
    pub snrc_verdict: String,
    pub threshold: AlphaThreshold,
    pub bracket_verified: bool,
    pub roa: Result<RoaEstimate, String>,
    pub text: String,
    pub path: PathBuf,
}

impl AnalysisReport {
    /// Why the analysis could not certify anything, if it could not.
    pub fn infeasible(&self) -> Option<String> {
        if self.threshold.threshold == Threshold::NoneFound {
            return Some(format!(
                "no stabilising alpha found up to {}",
                self.threshold.search_ceiling
            ));
        }
        match &self.roa {
            Err(e) => Some(format!("region-of-attraction estimate unavailable: {e}")),
            Ok(r) if !r.ks_within_alpha_kl() => Some("K_S exceeds alpha K_L".into()),
            Ok(_) => None,
        }
    }
}

fn threshold_text(t: &AlphaThreshold) -> String {
    match t.threshold {
        Threshold::Zero { floor } => format!("0 (stable down to alpha = {floor:.3e})"),
        Threshold::Finite { alpha, lower, upper } => {
            format!("{alpha:.6} (bracket [{lower:.6}, {upper:.6}])")
        }
        Threshold::NoneFound => format!("none-found (searched up to {:.3e})", t.search_ceiling),
    }
}

pub fn analyze(target: &str, opts: AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    let plant = plant_by_name(target).ok_or_else(|| {
        CliError::config(
            "command line",
            "target",
            format!("unknown target `{target}` (expected pendulum, bicycle or chain1..chain6)"),
        )
    })?;
    let bad = |field: &str, msg: &str| CliError::config("command line", field, msg);
    if !(opts.horizon > 0.0) || !opts.horizon.is_finite() {
        return Err(bad("--T", "horizon must be positive"));
    }
    if !(opts.alpha > 0.0) || !opts.alpha.is_finite() {
        return Err(bad("--alpha", "alpha must be positive"));
    }
    if !(opts.alpha_max > 0.0) || !opts.alpha_max.is_finite() {
        return Err(bad("--alpha-max", "alpha-max must be positive"));
    }
    let fs = plant.flat_system();
    let verdict = snrc_hurwitz_check(fs, opts.horizon).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let mut threshold = alpha_threshold_search_flat(fs, opts.horizon, opts.alpha_max)
        .map_err(|e| CliError::Infeasible(e.to_string()))?;
    if let Some(p) = target.strip_prefix("chain").and_then(|p| p.parse().ok()) {
        threshold.order = Some(p);
    }
    let bracket_verified =
        verify_bracket(fs, &threshold).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let fp = FlatPredictor::new(fs, opts.horizon).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let q = Matrix::identity(fs.state_dim() + fs.input_dim());
    let roa = if !plant.origin_admissible() {
        Err(format!("the origin is outside the {} valid region", plant.name()))
    } else {
        roa_estimate(plant.as_ref(), &fp, opts.alpha, &q, opts.samples, opts.seed)
            .map_err(|e| e.to_string())
    };
    let coupled = dnrc_verdict(fs, &fp, opts.alpha)
        .map(|v| v.as_str().to_string())
        .unwrap_or_else(|e| e.to_string());

    let mut text = String::new();
    let _ = writeln!(text, "target              {}", plant.name());
    let _ = writeln!(text, "horizon T           {}", opts.horizon);
    let _ = writeln!(text, "snrc closed loop    {}", verdict.as_str());
    let _ = writeln!(text, "dnrc at alpha={}   {coupled}", opts.alpha);
    let _ = writeln!(text, "alpha threshold     {}", threshold_text(&threshold));
    let _ = writeln!(text, "bracket verified    {bracket_verified}");
    match &roa {
        Ok(r) => {
            let _ = writeln!(text, "K_S                 {}", fmt_g9(r.k_s));
            let _ = writeln!(text, "K_L                 {}", fmt_g9(r.k_l));
            let _ = writeln!(text, "delta               {}", fmt_g9(r.delta));
            let _ = writeln!(text, "L1                  {}", fmt_g9(r.l1));
            let _ = writeln!(text, "L2                  {}", fmt_g9(r.l2));
            let _ = writeln!(text, "lambda_min(Q)       {}", fmt_g9(r.lambda_min_q));
            let _ = writeln!(text, "lambda_max(P)       {}", fmt_g9(r.lambda_max_p));
            let _ = writeln!(text, "P0                  {}", fmt_g9(r.p0));
            let _ = writeln!(text, "|B_bar| (spectral)  {}", fmt_g9(r.b_bar_norm));
            let _ = writeln!(text, "K_S <= alpha K_L    {}", r.ks_within_alpha_kl());
            let _ = writeln!(text, "lmin(Q) <= 2a P0    {}", r.q_bound_holds());
            let _ = writeln!(text, "P0 <= lmax(P)       {}", r.p0_bound_holds());
            let _ = writeln!(
                text,
                "samples             {} ({} usable), seed {}",
                r.samples, r.usable_samples, r.seed
            );
        }
        Err(e) => {
            let _ = writeln!(text, "region of attraction not computed: {e}");
        }
    }
    let path = resolve(&format!("{}_T{}_analysis.txt", plant.name(), opts.horizon));
    write_atomic(&path, text.as_bytes())?;
    Ok(AnalysisReport {
        target: plant.name().to_string(),
        options: opts,
        snrc_verdict: verdict.as_str().to_string(),
        threshold,
        bracket_verified,
        roa,
        text,
        path,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepParam {
    Horizon,
    Alpha,
    InitialState(usize),
}

impl SweepParam {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "T" => Some(SweepParam::Horizon),
            "alpha" => Some(SweepParam::Alpha),
            _ => s
                .strip_prefix("x0[")?
                .strip_suffix(']')?
                .parse()
                .ok()
                .map(SweepParam::InitialState),
        }
    }

    fn label(&self) -> String {
        match self {
            SweepParam::Horizon => "T".into(),
            SweepParam::Alpha => "alpha".into(),
            SweepParam::InitialState(i) => format!("x0[{i}]"),
        }
    }

    fn apply(&self, scenario: &mut Scenario, value: f64) -> Result<(), String> {
        match self {
            SweepParam::Horizon => scenario.controller.horizon = value,
            SweepParam::Alpha => scenario.controller.alpha = value,
            SweepParam::InitialState(i) => {
                let n = scenario.sim.x0.len();
                *scenario
                    .sim
                    .x0
                    .get_mut(*i)
                    .ok_or_else(|| format!("state index {i} out of range (state has {n} entries)"))? =
                    value;
            }
        }
        Ok(())
    }
}

pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<MetricsRecord, CliError>,
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub path: PathBuf,
    pub csv: String,
}

pub const SWEEP_HEADER: &str = "param,value,status,final_output_norm,settling_time,steady_state_error,max_input_norm,prediction_residual_max,final_prediction_residual";

/// Runs the scenario once per value in parallel and writes one CSV row per value.
pub fn sweep(path: &Path, param: &str, values: &[f64]) -> Result<SweepOutcome, CliError> {
    let file = path.display().to_string();
    let param = SweepParam::parse(param).ok_or_else(|| {
        CliError::config("command line", "--param", format!("unknown parameter `{param}` (expected T, alpha or x0[i])"))
    })?;
    if values.is_empty() {
        return Err(CliError::config("command line", "--values", "at least one value is required"));
    }
    let base = Scenario::load(path)?;
    let mut variants = Vec::with_capacity(values.len());
    for &v in values {
        let mut s = base.clone();
        param
            .apply(&mut s, v)
            .map_err(|m| CliError::config("command line", "--param", m))?;
        s.resolve(&file)?;
        variants.push(s);
    }
    let rows: Vec<SweepRow> = variants
        .par_iter()
        .zip(values.par_iter())
        .map(|(s, &value)| SweepRow {
            value,
            outcome: run_scenario(s, &file).map(|(m, _)| m),
        })
        .collect();

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    let label = param.label();
    for row in &rows {
        match &row.outcome {
            Ok(m) => {
                let _ = writeln!(
                    csv,
                    "{label},{},ok,{},{},{},{},{},{}",
                    fmt_g9(row.value),
                    fmt_g9(m.final_output_norm),
                    m.settling_time.map(fmt_g9).unwrap_or_default(),
                    fmt_g9(m.steady_state_error),
                    fmt_g9(m.max_input_norm),
                    fmt_g9(m.prediction_residual_max),
                    fmt_g9(m.final_prediction_residual),
                );
            }
            Err(_) => {
                let _ = writeln!(csv, "{label},{},aborted,,,,,,", fmt_g9(row.value));
            }
        }
    }
    let safe_label = label.replace(['[', ']'], "");
    let out = resolve(&format!("{}_sweep_{safe_label}.csv", base.name));
    write_atomic(&out, csv.as_bytes())?;
    Ok(SweepOutcome { rows, path: out, csv })
}
