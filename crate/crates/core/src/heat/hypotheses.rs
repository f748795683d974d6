//! Numerical check of the standing hypotheses on the field: bounded, non-degenerate
//! variance, correlations bounded away from one, and a Hölder-type bound for the
//! variance increments in terms of the canonical metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HeatModel, SpaceTime};
use crate::error::{config, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HoelderRatio {
    pub eta: f64,
    /// sup over pairs of |σ²(p) − σ²(q)| / 𝔡(p,q)^{1+η}.
    pub sup_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesesReport {
    pub variance_min: f64,
    pub variance_max: f64,
    /// Largest correlation among pairs separated by at least `min_separation`.
    pub max_correlation: f64,
    pub min_separation: f64,
    /// Ratios for η = (H − (d−α)/4)⁻¹ − 1, η = 1 and η = 2·0.9 − 1, in that order.
    pub holder: Vec<HoelderRatio>,
    /// The η appropriate to the model's regime (first candidate, or the last one in
    /// the critical case).
    pub regime_eta: f64,
    pub ok: bool,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

impl HeatModel {
    /// Randomly shifted Halton pairs in the observation window.
    fn halton_pairs(&self, n: usize, seed: u64) -> Vec<(SpaceTime, SpaceTime)> {
        let p = &self.params;
        let dim = 2 * (1 + p.d as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let coord =
            |i: usize, k: usize| (radical_inverse(i as u64 + 1, PRIMES[k]) + shift[k]).fract();
        let point = |i: usize, k0: usize| {
            let t = p.t0 + (p.t_max - p.t0) * coord(i, k0);
            let x = (0..p.d as usize)
                .map(|j| p.half_width * (2.0 * coord(i, k0 + 1 + j) - 1.0))
                .collect();
            SpaceTime::new(t, x)
        };
        (0..n)
            .map(|i| (point(i, 0), point(i, 1 + p.d as usize)))
            .collect()
    }

    pub fn check_hypotheses(&self, n_pairs: usize, seed: u64) -> Result<HypothesesReport> {
        if n_pairs < 100 {
            return config("check_hypotheses needs at least 100 pairs");
        }
        if self.params.d > 3 {
            return config("quasi-random pairs support spatial dimension up to 3");
        }
        let p = &self.params;
        let min_separation = 1e-3;
        let etas = [
            1.0 / (p.hurst - self.beta / 2.0) - 1.0,
            1.0,
            2.0 * 0.9 - 1.0,
        ];
        let regime = if self.envelope_gauges()?.log_branch {
            2
        } else {
            0
        };
        let mut sup = [0.0f64; 3];
        let mut var_min = f64::INFINITY;
        let mut var_max = 0.0f64;
        let mut max_corr = f64::NEG_INFINITY;
        for (a, b) in self.halton_pairs(n_pairs, seed) {
            let va = self.variance(a.t)?;
            let vb = self.variance(b.t)?;
            var_min = var_min.min(va).min(vb);
            var_max = var_max.max(va).max(vb);
            let dx = super::distance(&a.x, &b.x);
            let sep = ((a.t - b.t).powi(2) + dx * dx).sqrt();
            if sep >= min_separation {
                let c = self.covariance_at_lag(a.t, b.t, dx)?;
                max_corr = max_corr.max(c / (va * vb).sqrt());
            }
            let metric = self.metric_at_lag(a.t, b.t, dx)?;
            if metric > 0.0 {
                for (s, eta) in sup.iter_mut().zip(etas) {
                    *s = s.max((va - vb).abs() / metric.powf(1.0 + eta));
                }
            }
        }
        let holder: Vec<HoelderRatio> = etas
            .iter()
            .zip(sup)
            .map(|(&eta, sup_ratio)| HoelderRatio { eta, sup_ratio })
            .collect();
        let ok = var_min > 0.0
            && var_max.is_finite()
            && max_corr < 1.0 - 1e-6
            && holder[regime].sup_ratio.is_finite();
        Ok(HypothesesReport {
            variance_min: var_min,
            variance_max: var_max,
            max_correlation: max_corr,
            min_separation,
            holder,
            regime_eta: etas[regime],
            ok,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::model;

    #[test]
    fn hypotheses_hold_for_white_noise() {
        let m = model(0.6, 0.0, 1);
        let r = m.check_hypotheses(100, 7).unwrap();
        assert!(r.ok, "{r:?}");
        let floor = m.variance_constant() * 0.1f64.powf(m.variance_exponent());
        assert!(r.variance_min >= floor * (1.0 - 1e-12));
    }
}
