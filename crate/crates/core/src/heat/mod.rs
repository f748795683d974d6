//! Second-order structure of the linear heat equation driven by Gaussian noise that
//! is fractional in time (Hurst index H) and spatially Riesz-correlated with
//! spectral density |ξ|^{−α}.

mod covariance;
mod envelope;
mod hypotheses;

pub use envelope::MetricEnvelope;
pub use hypotheses::{HoelderRatio, HypothesesReport};

use crate::error::{config, domain, Result};
use crate::special::gamma;

/// Parameters of the heat-equation model and the observation window
/// `[t0, t_max] × [−half_width, half_width]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatParams {
    pub hurst: f64,
    pub alpha: f64,
    pub d: u32,
    /// Number of i.i.d. components of the vector field.
    pub state_dim: u32,
    pub t0: f64,
    pub t_max: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTime {
    pub t: f64,
    pub x: Vec<f64>,
}

impl SpaceTime {
    pub fn new(t: f64, x: Vec<f64>) -> Self {
        Self { t, x }
    }
}

#[derive(Debug, Clone)]
pub struct HeatModel {
    params: HeatParams,
    alpha_h: f64,
    beta: f64,
    /// (2π)^{−d} ∫ |ξ|^{−α} e^{−|ξ|²} dξ.
    kernel_const: f64,
    kappa: f64,
}

impl HeatModel {
    pub fn new(params: HeatParams) -> Result<Self> {
        let HeatParams {
            hurst,
            alpha,
            d,
            state_dim,
            t0,
            t_max,
            half_width,
        } = params;
        if !(hurst > 0.5 && hurst < 1.0) {
            return config(format!("Hurst index {hurst} must lie in (1/2, 1)"));
        }
        if d == 0 || state_dim == 0 {
            return config("dimensions must be positive");
        }
        let df = d as f64;
        if !(alpha >= 0.0 && alpha < df) {
            return config(format!("alpha {alpha} must lie in [0, d)"));
        }
        if !(df - alpha < 4.0 * hurst) {
            return config(format!(
                "need d - alpha < 4H, got d - alpha = {} and 4H = {}",
                df - alpha,
                4.0 * hurst
            ));
        }
        if !(t0 > 0.0 && t0 < t_max && t_max.is_finite()) {
            return config(format!("need 0 < t0 < T, got t0 = {t0}, T = {t_max}"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return config(format!("half width {half_width} must be positive"));
        }
        if alpha > 0.0 && d > 3 {
            return Err(crate::Error::Unsupported(
                "colored noise is supported for spatial dimension up to 3".into(),
            ));
        }
        let beta = (df - alpha) / 2.0;
        let sphere = 2.0 * std::f64::consts::PI.powf(df / 2.0) / gamma(df / 2.0);
        let kernel_const = sphere * gamma(beta) / 2.0 / (2.0 * std::f64::consts::PI).powf(df);
        let alpha_h = hurst * (2.0 * hurst - 1.0);
        let kappa = alpha_h * kernel_const * covariance::unit_time_integral(hurst, beta)?;
        Ok(Self {
            params,
            alpha_h,
            beta,
            kernel_const,
            kappa,
        })
    }

    pub fn params(&self) -> &HeatParams {
        &self.params
    }

    /// H(2H − 1).
    pub fn alpha_h(&self) -> f64 {
        self.alpha_h
    }

    /// (d − α)/2.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Exponent 2H − (d − α)/2 of the variance in t.
    pub fn variance_exponent(&self) -> f64 {
        2.0 * self.params.hurst - self.beta
    }

    /// σ²_1; the variance is κ t^{2H−(d−α)/2}.
    pub fn variance_constant(&self) -> f64 {
        self.kappa
    }

    /// Diameter of the spatial box, 2√d·M.
    pub fn spatial_diameter(&self) -> f64 {
        2.0 * (self.params.d as f64).sqrt() * self.params.half_width
    }

    pub fn variance(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.params.t_max * (1.0 + 1e-12) {
            return domain(format!("time {t} outside [0, {}]", self.params.t_max));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(self.kappa * t.powf(self.variance_exponent()))
    }

    fn check_point(&self, p: &SpaceTime) -> Result<()> {
        if !(p.t > 0.0) || p.t > self.params.t_max * (1.0 + 1e-12) {
            return domain(format!("time {} outside (0, {}]", p.t, self.params.t_max));
        }
        if p.x.len() != self.params.d as usize || p.x.iter().any(|v| !v.is_finite()) {
            return domain(format!(
                "spatial point must have {} finite coordinates",
                self.params.d
            ));
        }
        Ok(())
    }

    pub fn covariance(&self, p: &SpaceTime, q: &SpaceTime) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        self.covariance_at_lag(p.t, q.t, distance(&p.x, &q.x))
    }

    /// Canonical pseudo-metric 𝔡 = ‖u(p) − u(q)‖_{L²}.
    pub fn canonical_metric(&self, p: &SpaceTime, q: &SpaceTime) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        self.metric_at_lag(p.t, q.t, distance(&p.x, &q.x))
    }
}

pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn model(hurst: f64, alpha: f64, d: u32) -> HeatModel {
        HeatModel::new(HeatParams {
            hurst,
            alpha,
            d,
            state_dim: 1,
            t0: 0.1,
            t_max: 4.0,
            half_width: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn rejects_ill_posed_parameters() {
        let base = HeatParams {
            hurst: 0.75,
            alpha: 0.0,
            d: 1,
            state_dim: 1,
            t0: 0.1,
            t_max: 1.0,
            half_width: 1.0,
        };
        assert!(HeatModel::new(HeatParams { hurst: 0.5, ..base }).is_err());
        assert!(HeatModel::new(HeatParams {
            d: 3,
            hurst: 0.7,
            ..base
        })
        .is_err());
        assert!(HeatModel::new(HeatParams { t0: 1.0, ..base }).is_err());
        assert!(HeatModel::new(HeatParams { alpha: 1.0, ..base }).is_err());
        assert!(matches!(
            HeatModel::new(HeatParams {
                d: 4,
                alpha: 1.0,
                hurst: 0.9,
                ..base
            }),
            Err(crate::Error::Unsupported(_))
        ));
    }

    #[test]
    fn variance_scaling() {
        let m = model(0.75, 0.0, 1);
        assert_eq!(m.variance(0.0).unwrap(), 0.0);
        let r = m.variance(2.0).unwrap() / m.variance(1.0).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }
}
