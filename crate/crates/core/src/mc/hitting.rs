//! Hitting and small-ball probabilities estimated on shared replicates.

use rayon::prelude::*;

use super::estimate::Estimate;
use super::field::{FieldSample, FieldSampler, BATCH};
use crate::error::{config, Error, Result};
use crate::heat::HeatModel;
use crate::potential::TargetSet;

pub const MIN_SAMPLES: usize = 100;

/// Radius by which the target is enlarged to absorb the grid discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InflationPolicy {
    /// `factor · (q₁(Δt) + q₂(Δx)) · √(2 ln N)` from the metric envelope gauges.
    Envelope {
        factor: f64,
    },
    /// `factor · (𝔡(Δt) + 𝔡(Δx))`: the one-step canonical-metric modulus of the grid at the final time.
    GridModulus {
        factor: f64,
    },
    Fixed(f64),
}

impl Default for InflationPolicy {
    fn default() -> Self {
        InflationPolicy::Envelope { factor: 3.0 }
    }
}

impl InflationPolicy {
    pub fn radius(&self, model: &HeatModel, sampler: &FieldSampler) -> Result<f64> {
        match *self {
            InflationPolicy::Fixed(r) if r >= 0.0 && r.is_finite() => Ok(r),
            InflationPolicy::Fixed(r) => config(format!(
                "inflation radius must be finite and non-negative, got {r}"
            )),
            InflationPolicy::Envelope { factor } => {
                if !(factor >= 0.0 && factor.is_finite()) {
                    return config(format!(
                        "inflation factor must be non-negative, got {factor}"
                    ));
                }
                let env = model.envelope_gauges()?;
                let (dt, dx) = sampler.grid().spacing();
                let n = sampler.grid().len() as f64;
                let q = env.q1.eval(dt)?
                    + if dx > 0.0 {
                        env.q2.eval(dx.min(env.q2.domain_hi()))?
                    } else {
                        0.0
                    };
                Ok(factor * q * (2.0 * n.ln()).max(0.0).sqrt())
            }
            InflationPolicy::GridModulus { factor } => {
                if !(factor >= 0.0 && factor.is_finite()) {
                    return config(format!(
                        "inflation factor must be non-negative, got {factor}"
                    ));
                }
                Ok(factor * grid_modulus(model, sampler)?)
            }
        }
    }
}

/// `𝔡(Δt) + 𝔡(Δx)` for one grid step in time and in space, evaluated at the last grid time.
pub fn grid_modulus(model: &HeatModel, sampler: &FieldSampler) -> Result<f64> {
    let (dt, dx) = sampler.grid().spacing();
    let t = *sampler.grid().times().last().expect("grid has times");
    let temporal = if dt > 0.0 {
        model.metric_at_lag(t, t - dt, 0.0)?
    } else {
        0.0
    };
    let spatial = if dx > 0.0 {
        model.metric_at_lag(t, t, dx)?
    } else {
        0.0
    };
    Ok(temporal + spatial)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitEstimate {
    pub raw: Estimate,
    pub inflated: Estimate,
    pub inflation: f64,
}

/// Whether some grid value of the sample lies within `inflation` of the target.
pub fn hit_indicator(sample: &FieldSample, target: &TargetSet, inflation: f64) -> Result<bool> {
    let dist = target.distance_fn()?;
    Ok((0..sample.n_points).any(|p| dist(&sample.point(p)) <= inflation))
}

/// Distance from the sampled grid image to the target, one entry per replicate.
pub fn min_distances(
    sampler: &FieldSampler,
    target: &TargetSet,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let dim = sampler.state_dim();
    if target.ambient_dim() != Some(dim) {
        return config(format!(
            "target lives in dimension {:?}, field has {dim} components",
            target.ambient_dim()
        ));
    }
    let dist = target.distance_fn()?;
    let n_points = sampler.grid().len();
    let mut out = Vec::with_capacity(n_samples);
    let mut first = 0usize;
    while first < n_samples {
        let count = BATCH.min(n_samples - first);
        let z = sampler.sample_block(seed, first as u64, count);
        let block: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|b| {
                let cols: Vec<&[f64]> = (0..dim)
                    .map(|c| {
                        let col = b * dim + c;
                        &z.as_slice()[col * n_points..(col + 1) * n_points]
                    })
                    .collect();
                let mut point = vec![0.0; dim];
                let mut best = f64::INFINITY;
                for p in 0..n_points {
                    for (c, col) in cols.iter().enumerate() {
                        point[c] = col[p];
                    }
                    best = best.min(dist(&point));
                }
                best
            })
            .collect();
        out.extend(block);
        first += count;
    }
    Ok(out)
}

fn count_within(distances: &[f64], radius: f64) -> Estimate {
    Estimate::from_counts(
        distances.iter().filter(|&&d| d <= radius).count(),
        distances.len(),
    )
}

/// Raw (inflation 0) and inflated hitting estimates from the same replicates.
pub fn estimate_hit_prob(
    model: &HeatModel,
    sampler: &FieldSampler,
    target: &TargetSet,
    n_samples: usize,
    seed: u64,
    policy: InflationPolicy,
) -> Result<HitEstimate> {
    if n_samples < MIN_SAMPLES {
        return config(format!(
            "at least {MIN_SAMPLES} samples are required, got {n_samples}"
        ));
    }
    let inflation = policy.radius(model, sampler)?;
    let d = min_distances(sampler, target, n_samples, seed)?;
    Ok(HitEstimate {
        raw: count_within(&d, 0.0),
        inflated: count_within(&d, inflation),
        inflation,
    })
}

/// Hitting estimates of the target enlarged by each radius, on shared replicates.
pub fn hit_prob_ladder(
    sampler: &FieldSampler,
    target: &TargetSet,
    radii: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if n_samples < MIN_SAMPLES {
        return config(format!(
            "at least {MIN_SAMPLES} samples are required, got {n_samples}"
        ));
    }
    let d = min_distances(sampler, target, n_samples, seed)?;
    Ok(radii.iter().map(|&r| count_within(&d, r)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallBallFit {
    /// Fitted exponent of p(ε) ≈ C ε^slope.
    pub slope: f64,
    pub se: f64,
    pub intercept: f64,
    /// Quadratic coefficient of ln p̂ in ln ε; near zero when the power law holds.
    pub curvature: f64,
    pub radii: Vec<f64>,
    pub estimates: Vec<Estimate>,
}

/// Log-log slope of P(grid image meets B(z, ε)) over a ladder of radii.
pub fn small_ball_slope(
    sampler: &FieldSampler,
    center: &[f64],
    radii: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<SmallBallFit> {
    check_ladder(radii)?;
    let target = TargetSet::Points(vec![center.to_vec()]);
    let estimates = hit_prob_ladder(sampler, &target, radii, n_samples, seed)?;
    fit_small_ball(radii, estimates)
}

fn check_ladder(radii: &[f64]) -> Result<()> {
    if radii.len() < 3 {
        return config("small-ball ladder needs at least three radii");
    }
    if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return config("small-ball radii must be positive");
    }
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 8.0 * (1.0 - 1e-12) {
        return config("small-ball ladder must span at least three dyadic steps");
    }
    Ok(())
}

/// Least-squares fit of ln p̂ against ln ε over an already estimated ladder.
/// `se` is the Monte Carlo standard error of the slope (delta method).
pub fn fit_small_ball(radii: &[f64], estimates: Vec<Estimate>) -> Result<SmallBallFit> {
    check_ladder(radii)?;
    if radii.len() != estimates.len() {
        return config("one estimate per radius is required");
    }
    if let Some((r, e)) = radii
        .iter()
        .zip(&estimates)
        .find(|(_, e)| e.hits == 0 || e.hits == e.n)
    {
        return Err(Error::InsufficientResolution(format!(
            "estimated probability {} at radius {r:e}; adjust the ladder or sample size",
            e.p_hat
        )));
    }
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = estimates.iter().map(|e| e.p_hat.ln()).collect();
    let var: Vec<f64> = estimates.iter().map(|e| e.log_se().powi(2)).collect();
    let (intercept, slope, se) = least_squares_line(&x, &y, &var);
    let curvature = quadratic_coefficient(&x, &y);
    Ok(SmallBallFit {
        slope,
        se,
        intercept,
        curvature,
        radii: radii.to_vec(),
        estimates,
    })
}

/// Weighted least squares line; the slope error uses the binomial weights.
fn least_squares_line(x: &[f64], y: &[f64], var: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, c)| (a - mx) * (c - my)).sum();
    let slope = sxy / sxx;
    let var_slope: f64 = x
        .iter()
        .zip(var)
        .map(|(a, v)| (a - mx).powi(2) * v)
        .sum::<f64>()
        / (sxx * sxx);
    (my - slope * mx, slope, var_slope.sqrt())
}

fn quadratic_coefficient(x: &[f64], y: &[f64]) -> f64 {
    let mut a = nalgebra::Matrix3::<f64>::zeros();
    let mut b = nalgebra::Vector3::<f64>::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let row = nalgebra::Vector3::new(1.0, xi, xi * xi);
        a += row * row.transpose();
        b += yi * row;
    }
    a.lu().solve(&b).map_or(0.0, |c| c[2])
}
