use super::{distance, HeatModel, SpaceTime};
use crate::error::{domain, Result};
use crate::gauge::GaugeSpec;

/// Gauges q₁ (time) and q₂ (space) with 𝔡 ≍ q₁(|t − s|) + q₂(|x − y|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEnvelope {
    pub q1: GaugeSpec<f64>,
    pub q2: GaugeSpec<f64>,
    /// Whether the spatial gauge carries the √log factor (4H − (d − α) = 2).
    pub log_branch: bool,
}

impl HeatModel {
    fn critical(&self) -> bool {
        let p = &self.params;
        (4.0 * p.hurst - (p.d as f64 - p.alpha) - 2.0).abs() <= 1e-12
    }

    /// Spatial exponent 2 ∧ (4H − (d − α)) of 𝔡².
    pub fn spatial_exponent(&self) -> f64 {
        let p = &self.params;
        (4.0 * p.hurst - (p.d as f64 - p.alpha)).min(2.0)
    }

    pub fn envelope_gauges(&self) -> Result<MetricEnvelope> {
        let p = &self.params;
        let q1 = GaugeSpec::power(p.hurst - (p.d as f64 - p.alpha) / 4.0)?;
        let log_branch = self.critical();
        let q2 = if log_branch {
            let c = 2.0 * std::f64::consts::E * (p.d as f64).sqrt() * p.half_width;
            GaugeSpec::power_log(1.0, 0.5, c)?
        } else {
            GaugeSpec::power(self.spatial_exponent() / 2.0)?
        };
        Ok(MetricEnvelope { q1, q2, log_branch })
    }

    /// Δ = |t−s|^{2H−(d−α)/2} + (ln(2e√d M/|x−y|))^β |x−y|^{2∧(4H−(d−α))}.
    pub fn envelope(&self, p: &SpaceTime, q: &SpaceTime) -> Result<f64> {
        let m = self.params.half_width * (1.0 + 1e-12);
        for pt in [p, q] {
            let t_ok =
                pt.t >= self.params.t0 * (1.0 - 1e-12) && pt.t <= self.params.t_max * (1.0 + 1e-12);
            if !t_ok || pt.x.len() != self.params.d as usize || pt.x.iter().any(|v| !(v.abs() <= m))
            {
                return domain("envelope points must lie in the observation window");
            }
        }
        let dt = (p.t - q.t).abs();
        let dx = distance(&p.x, &q.x);
        if dt == 0.0 && dx == 0.0 {
            return domain("envelope is undefined for identical points");
        }
        Ok(self.envelope_at_lag(dt, dx))
    }

    pub fn envelope_at_lag(&self, dt: f64, dx: f64) -> f64 {
        let temporal = if dt > 0.0 {
            dt.powf(self.variance_exponent())
        } else {
            0.0
        };
        let spatial = if dx > 0.0 {
            let base = dx.powf(self.spatial_exponent());
            if self.critical() {
                let c = std::f64::consts::E * self.spatial_diameter();
                base * (c / dx).ln()
            } else {
                base
            }
        } else {
            0.0
        };
        temporal + spatial
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::model;
    use super::*;

    #[test]
    fn envelope_branches() {
        let m = model(0.75, 0.0, 1);
        let env = m.envelope_gauges().unwrap();
        assert!(env.log_branch);
        let a = SpaceTime::new(1.0, vec![0.0]);
        let b = SpaceTime::new(1.0, vec![0.1]);
        let expected = 0.01 * (2.0 * std::f64::consts::E / 0.1).ln();
        assert!((m.envelope(&a, &b).unwrap() - expected).abs() < 1e-15);
        let c = SpaceTime::new(0.5, vec![0.0]);
        assert!((m.envelope(&a, &c).unwrap() - 0.5f64).abs() < 1e-15);
        assert!(m.envelope(&a, &a).is_err());

        let m = model(0.9, 0.0, 1);
        assert!(!m.envelope_gauges().unwrap().log_branch);
        assert_eq!(m.spatial_exponent(), 2.0);
    }
}
