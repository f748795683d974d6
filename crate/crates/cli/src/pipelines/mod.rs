//! Verification pipelines. Each returns the rows it produced; a pipeline passes
//! when every row does.

mod gauge;
mod heat;
mod mc;
mod potential;

use anisohit::Result;
use clap::ValueEnum;

use crate::config::ExperimentConfig;
use crate::report::ReportRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Pipeline {
    GaugeCheck,
    VarianceScaling,
    MetricEquivalence,
    Rates,
    Capacity,
    Hausdorff,
    HitMc,
    SmallBall,
    Polarity,
}

impl Pipeline {
    pub const ALL: [Pipeline; 9] = [
        Pipeline::GaugeCheck,
        Pipeline::VarianceScaling,
        Pipeline::MetricEquivalence,
        Pipeline::Rates,
        Pipeline::Capacity,
        Pipeline::Hausdorff,
        Pipeline::HitMc,
        Pipeline::SmallBall,
        Pipeline::Polarity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::GaugeCheck => "gauge-check",
            Pipeline::VarianceScaling => "variance-scaling",
            Pipeline::MetricEquivalence => "metric-equivalence",
            Pipeline::Rates => "rates",
            Pipeline::Capacity => "capacity",
            Pipeline::Hausdorff => "hausdorff",
            Pipeline::HitMc => "hit-mc",
            Pipeline::SmallBall => "small-ball",
            Pipeline::Polarity => "polarity",
        }
    }
}

/// Validates the configuration and runs one pipeline.
pub fn run_pipeline(pipeline: Pipeline, cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    match pipeline {
        Pipeline::GaugeCheck => gauge::gauge_check(cfg),
        Pipeline::VarianceScaling => heat::variance_scaling(cfg),
        Pipeline::MetricEquivalence => heat::metric_equivalence(cfg),
        Pipeline::Rates => heat::rates(cfg),
        Pipeline::Capacity => potential::capacity_checks(cfg),
        Pipeline::Hausdorff => potential::hausdorff_checks(cfg),
        Pipeline::HitMc => mc::hit_mc(cfg),
        Pipeline::SmallBall => mc::small_ball(cfg),
        Pipeline::Polarity => mc::polarity(cfg),
    }
}

/// `H=… alpha=… d=… D=…`
fn model_label(cfg: &ExperimentConfig, hurst: f64) -> String {
    format!(
        "H={hurst} alpha={} d={} D={}",
        cfg.alpha, cfg.d, cfg.state_dim
    )
}

/// Least-squares slope of y on x.
fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `n` points from `lo` to `hi`, evenly spaced in ln.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}
