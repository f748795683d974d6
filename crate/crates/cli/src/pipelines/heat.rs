use anisohit::heat::HeatModel;
use anisohit::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{log_grid, model_label, ols_slope};
use crate::config::ExperimentConfig;
use crate::report::{Check, ReportRow};

pub fn variance_scaling(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = vec![];
    let c_max = cfg.scale_factors.iter().cloned().fold(1.0, f64::max);
    for h in cfg.hursts() {
        let model = cfg.model(h)?;
        let label = model_label(cfg, h);
        let t = cfg.t_max / c_max;
        let base = model.variance_by_quadrature(t)?;
        rows.push(ReportRow::new(
            "variance-closed-form",
            format!("{label} t={t}"),
            base,
            Check::Relative {
                reference: model.variance(t)?,
                tolerance: 1e-9,
            },
        ));
        for &c in &cfg.scale_factors {
            let ratio = model.variance_by_quadrature(c * t)? / base;
            rows.push(ReportRow::new(
                "variance-ratio",
                format!("{label} t={t} c={c}"),
                ratio,
                Check::Relative {
                    reference: c.powf(model.variance_exponent()),
                    tolerance: 1e-6,
                },
            ));
        }
    }
    Ok(rows)
}

pub fn metric_equivalence(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = vec![];
    for h in cfg.hursts() {
        let model = cfg.model(h)?;
        let label = model_label(cfg, h);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..cfg.pairs {
            let (t, x) = random_point(&model, &mut rng);
            let (s, y) = random_point(&model, &mut rng);
            let dx = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let dt = (t - s).abs();
            if dt == 0.0 && dx == 0.0 {
                continue;
            }
            let ratio = model.metric_sq_at_lag(t, s, dx)? / model.envelope_at_lag(dt, dx);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let params = format!("{label} pairs={} seed={}", cfg.pairs, cfg.seed);
        rows.push(ReportRow::new(
            "metric-ratio-min",
            params.clone(),
            lo,
            Check::Info,
        ));
        rows.push(ReportRow::new(
            "metric-ratio-max",
            params.clone(),
            hi,
            Check::Info,
        ));
        rows.push(ReportRow::new(
            "metric-ratio-spread",
            params,
            hi / lo,
            Check::AtMost(50.0),
        ));
        let hyp = model.check_hypotheses(cfg.pairs.max(100), cfg.seed)?;
        rows.push(ReportRow::verdict(
            "standing-hypotheses",
            format!("{label} pairs={}", cfg.pairs.max(100)),
            hyp.ok,
            true,
        ));
    }
    Ok(rows)
}

fn random_point(model: &HeatModel, rng: &mut ChaCha8Rng) -> (f64, Vec<f64>) {
    let p = model.params();
    let t = rng.random_range(p.t0..=p.t_max);
    let x = (0..p.d)
        .map(|_| rng.random_range(-p.half_width..=p.half_width))
        .collect();
    (t, x)
}

pub fn rates(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = vec![];
    for h in cfg.hursts() {
        let model = cfg.model(h)?;
        let label = model_label(cfg, h);
        let mid = 0.5 * (cfg.t0 + cfg.t_max);

        let lags = log_grid(2f64.powi(-14), 2f64.powi(-4), 41);
        let ln_lag: Vec<f64> = lags.iter().map(|l| l.ln()).collect();
        let ln_metric = lags
            .iter()
            .map(|&l| Ok(model.metric_at_lag(mid + l, mid, 0.0)?.ln()))
            .collect::<Result<Vec<f64>>>()?;
        let env = model.envelope_gauges()?;
        rows.push(ReportRow::new(
            "temporal-slope",
            format!("{label} t={mid} lag in [2^-14 2^-4]"),
            ols_slope(&ln_lag, &ln_metric),
            Check::Within {
                reference: env.q1.nu(),
                tolerance: 0.02,
            },
        ));

        let dists = log_grid(1e-4, 1e-1, 31);
        let ln_dist: Vec<f64> = dists.iter().map(|r| r.ln()).collect();
        let ln_metric_sq = dists
            .iter()
            .map(|&r| Ok(model.metric_sq_at_lag(mid, mid, r)?.ln()))
            .collect::<Result<Vec<f64>>>()?;
        let slope = 0.5 * ols_slope(&ln_dist, &ln_metric_sq);
        let params = format!("{label} t={mid} distance in [1e-4 1e-1]");
        if env.log_branch {
            rows.push(ReportRow::new(
                "spatial-slope",
                params.clone(),
                slope,
                Check::Info,
            ));
            // One-constant fits of ln 𝔡² to ln(r² ln(C/r)) and to ln r².
            let big_c = std::f64::consts::E * model.spatial_diameter();
            let log_model: Vec<f64> = dists
                .iter()
                .map(|r| (r * r * (big_c / r).ln()).ln())
                .collect();
            let pure: Vec<f64> = dists.iter().map(|r| 2.0 * r.ln()).collect();
            let ratio =
                rms_after_shift(&ln_metric_sq, &pure) / rms_after_shift(&ln_metric_sq, &log_model);
            rows.push(ReportRow::new(
                "spatial-log-residual-ratio",
                params,
                ratio,
                Check::AtLeast(5.0),
            ));
        } else {
            rows.push(ReportRow::new(
                "spatial-slope",
                params,
                slope,
                Check::Within {
                    reference: env.q2.nu(),
                    tolerance: 0.03,
                },
            ));
        }
    }
    Ok(rows)
}

/// RMS residual of y against model + c with c fitted by least squares.
fn rms_after_shift(y: &[f64], model: &[f64]) -> f64 {
    let n = y.len() as f64;
    let c = y.iter().zip(model).map(|(a, b)| a - b).sum::<f64>() / n;
    (y.iter()
        .zip(model)
        .map(|(a, b)| (a - b - c).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}
