//! Covariance as a one-dimensional integral over the summed time lag.
//!
//! With a = t − τ, b = s − σ, u = a + b and v = a − b, the double time integral of
//! |τ − σ|^{2H−2} K(a + b, x − y) collapses to
//!
//!   E[u(t,x)u(s,y)] = (α_H/2) ∫₀^{t+s} K(u, |x − y|) W(u) du,
//!
//! where W(u) = ∫ |t − s − v|^{2H−2} dv over the admissible v-range is elementary
//! and K(u, r) = (2π)^{−d} ∫ |ξ|^{−α} e^{−u|ξ|²} cos(ξ·z) dξ is a confluent
//! hypergeometric function of r²/(4u).

use super::HeatModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, TanhSinh};
use crate::special::{kummer_neg, one_minus_kummer_neg};

fn rule() -> TanhSinh<f64> {
    TanhSinh {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_level: 12,
    }
}

/// σ²_1 / (α_H · K-constant): (2H−1)⁻¹ [ (2H−β)⁻¹ + ∫₀¹ (2−w)^{−β} w^{2H−1} dw ].
pub(super) fn unit_time_integral(hurst: f64, beta: f64) -> Result<f64> {
    let p = 2.0 * hurst - 1.0;
    let tail = rule().integrate(|w| (2.0 - w).powf(-beta) * w.powf(p), 0.0, 1.0)?;
    Ok((1.0 / (2.0 * hurst - beta) + tail.value) / p)
}

impl HeatModel {
    fn kummer_params(&self) -> (f64, f64) {
        (self.beta, self.params.d as f64 / 2.0)
    }

    /// ln of M(β, d/2, −r²/(4u)).
    fn ln_kummer(&self, u: f64, r: f64) -> f64 {
        let (a, b) = self.kummer_params();
        let x = r * r / (4.0 * u);
        if a == b {
            -x
        } else {
            kummer_neg(a, b, x).ln()
        }
    }

    /// Space-time kernel K(u, r) = (2π)^{−d} ∫ |ξ|^{−α} e^{−u|ξ|²} cos(ξ·z) dξ, |z| = r.
    pub fn heat_kernel(&self, u: f64, r: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        self.kernel_const * (self.ln_kummer(u, r) - self.beta * u.ln()).exp()
    }

    /// Weight W(u) = ∫_{lo(u)}^{hi(u)} |t − s − v|^{2H−2} dv, evaluated from the
    /// primitive sign(w)|w|^{2H−1}/(2H−1) without cancellation for short ranges.
    pub(crate) fn time_weight(&self, t: f64, s: f64, u: f64) -> f64 {
        let p = 2.0 * self.params.hurst - 1.0;
        let hi = u.min(2.0 * t - u);
        let lo = (-u).max(u - 2.0 * s);
        let width = hi - lo;
        if !(width > 0.0) {
            return 0.0;
        }
        let a = lo - (t - s);
        let b = a + width;
        let raised = if a >= 0.0 {
            if a == 0.0 {
                width.powf(p)
            } else {
                a.powf(p) * (p * (width / a).ln_1p()).exp_m1()
            }
        } else if b <= 0.0 {
            let nb = -b;
            if nb == 0.0 {
                (-a).powf(p)
            } else {
                nb.powf(p) * (p * (width / nb).ln_1p()).exp_m1()
            }
        } else {
            b.powf(p) + (-a).powf(p)
        };
        raised / p
    }

    fn breakpoints(&self, t: f64, s: f64, r: f64) -> Vec<f64> {
        let end = t + s;
        let mut pts = vec![0.0, (t - s).abs(), t.min(s), t.max(s), end];
        if r > 0.0 {
            let base = r * r;
            for k in -2..=3 {
                pts.push(base * 4f64.powi(k));
            }
        }
        pts.retain(|&p| p >= 0.0 && p <= end);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * end);
        pts
    }

    /// E[u(t,x)u(s,y)] for |x − y| = r.
    pub fn covariance_at_lag(&self, t: f64, s: f64, r: f64) -> Result<f64> {
        if !(t >= 0.0 && s >= 0.0 && r >= 0.0) {
            return Err(Error::Domain(format!(
                "invalid lag arguments t={t}, s={s}, r={r}"
            )));
        }
        if t == 0.0 || s == 0.0 {
            return Ok(0.0);
        }
        if r == 0.0 && t == s {
            return Ok(self.kappa * t.powf(self.variance_exponent()));
        }
        self.covariance_quadrature(t, s, r)
    }

    /// σ²(t) from the covariance integral instead of the closed form κ t^{2H−(d−α)/2}.
    pub fn variance_by_quadrature(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time {t} must be positive")));
        }
        self.covariance_quadrature(t, t, 0.0)
    }

    fn covariance_quadrature(&self, t: f64, s: f64, r: f64) -> Result<f64> {
        let f = |u: f64| {
            let w = self.time_weight(t, s, u);
            if w <= 0.0 {
                return 0.0;
            }
            self.kernel_const * (self.ln_kummer(u, r) - self.beta * u.ln() + w.ln()).exp()
        };
        let total = integrate_panels(&rule(), f, &self.breakpoints(t, s, r))?;
        Ok(0.5 * self.alpha_h * total.value)
    }

    /// 𝔡² for time points t, s and spatial separation r, split into a same-site
    /// temporal part and a spatial part whose integrand K(u,0) − K(u,r) ≥ 0 is
    /// evaluated directly.
    pub fn metric_sq_at_lag(&self, t: f64, s: f64, r: f64) -> Result<f64> {
        if !(t > 0.0 && s > 0.0 && r >= 0.0) {
            return Err(Error::Domain(format!(
                "invalid lag arguments t={t}, s={s}, r={r}"
            )));
        }
        let temporal = if t == s {
            0.0
        } else {
            let e = self.variance_exponent();
            self.kappa * (t.powf(e) + s.powf(e)) - 2.0 * self.covariance_at_lag(t, s, 0.0)?
        };
        let spatial = if r == 0.0 {
            0.0
        } else {
            let (a, b) = self.kummer_params();
            let f = |u: f64| {
                let w = self.time_weight(t, s, u);
                if w <= 0.0 {
                    return 0.0;
                }
                let gap = one_minus_kummer_neg(a, b, r * r / (4.0 * u));
                self.kernel_const * gap * (w.ln() - self.beta * u.ln()).exp()
            };
            self.alpha_h * integrate_panels(&rule(), f, &self.breakpoints(t, s, r))?.value
        };
        let total = temporal + spatial;
        if total < 0.0 {
            let scale = self.kappa * t.max(s).powf(self.variance_exponent());
            if total >= -1e-10 * scale {
                return Ok(0.0);
            }
            return Err(Error::Numerical(format!(
                "negative squared distance {total:e}"
            )));
        }
        Ok(total)
    }

    pub fn metric_at_lag(&self, t: f64, s: f64, r: f64) -> Result<f64> {
        Ok(self.metric_sq_at_lag(t, s, r)?.sqrt())
    }
}
