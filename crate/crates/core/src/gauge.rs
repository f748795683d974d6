//! Gauge functions q: the pure power τ^ν and the power-log τ^ν·(ln(c/τ))^δ.

use crate::error::{domain, Error, Result};
use crate::lambert::lambert_w_minus1_shifted;
use crate::quadrature::TanhSinh;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaugeFamily {
    Power,
    PowerLog,
}

/// A gauge q on the closed interval `[0, domain_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeSpec<T> {
    family: GaugeFamily,
    nu: T,
    delta: T,
    log_scale: T,
    domain_hi: T,
}

fn finite_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be finite and positive, got {v:e}"
        )))
    }
}

impl<T: Real> GaugeSpec<T> {
    pub fn power(nu: T) -> Result<Self> {
        finite_positive("nu", nu)?;
        Ok(Self {
            family: GaugeFamily::Power,
            nu,
            delta: T::zero(),
            log_scale: T::one(),
            domain_hi: T::infinity(),
        })
    }

    /// q(τ) = τ^ν (ln(c/τ))^δ. The default domain ends at
    /// c·min(e⁻¹, e^{−δ/ν}): there ln(c/τ) ≥ 1 and q is increasing.
    pub fn power_log(nu: T, delta: T, log_scale: T) -> Result<Self> {
        finite_positive("nu", nu)?;
        finite_positive("log_scale", log_scale)?;
        if !delta.is_finite() || delta < T::zero() {
            return Err(Error::Config(format!(
                "delta must be finite and >= 0, got {delta:e}"
            )));
        }
        let hi = log_scale * (-(T::one().max(delta / nu))).exp();
        Ok(Self {
            family: GaugeFamily::PowerLog,
            nu,
            delta,
            log_scale,
            domain_hi: hi,
        })
    }

    /// Shrinks the domain. Only values inside the default domain are accepted.
    pub fn with_domain_hi(mut self, hi: T) -> Result<Self> {
        finite_positive("domain_hi", hi)?;
        if self.family == GaugeFamily::PowerLog && hi > self.domain_hi {
            return Err(Error::Config(format!(
                "domain_hi {hi:e} exceeds the increasing region ending at {:e}",
                self.domain_hi
            )));
        }
        self.domain_hi = hi;
        Ok(self)
    }

    pub fn family(&self) -> GaugeFamily {
        self.family
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn log_scale(&self) -> T {
        self.log_scale
    }

    pub fn domain_hi(&self) -> T {
        self.domain_hi
    }

    fn check_arg(&self, tau: T) -> Result<()> {
        let slack = T::one() + T::epsilon() * T::lit(8.0);
        if tau.is_nan() || tau < T::zero() || tau > self.domain_hi * slack {
            return domain(format!("tau = {tau:e} outside [0, {:e}]", self.domain_hi));
        }
        Ok(())
    }

    /// ln(c/τ); only meaningful for the power-log family.
    fn log_factor(&self, tau: T) -> T {
        self.log_scale.ln() - tau.ln()
    }

    /// ln q(τ) for τ > 0.
    pub fn ln_eval(&self, tau: T) -> Result<T> {
        self.check_arg(tau)?;
        if tau == T::zero() {
            return Ok(T::neg_infinity());
        }
        Ok(match self.family {
            GaugeFamily::Power => self.nu * tau.ln(),
            GaugeFamily::PowerLog => self.nu * tau.ln() + self.delta * self.log_factor(tau).ln(),
        })
    }

    pub fn eval(&self, tau: T) -> Result<T> {
        Ok(self.ln_eval(tau)?.exp())
    }

    /// q̇(τ) for τ > 0.
    pub fn derivative(&self, tau: T) -> Result<T> {
        self.check_arg(tau)?;
        if tau == T::zero() {
            return domain("derivative requires tau > 0");
        }
        Ok(match self.family {
            GaugeFamily::Power => self.nu * tau.powf(self.nu - T::one()),
            GaugeFamily::PowerLog => {
                let l = self.log_factor(tau);
                let ln_mag = (self.nu - T::one()) * tau.ln() + (self.delta - T::one()) * l.ln();
                ln_mag.exp() * (self.nu * l - self.delta)
            }
        })
    }

    /// Elasticity τ q̇(τ)/q(τ): ν for the power, ν − δ/ln(c/τ) for the power-log.
    pub fn elasticity(&self, tau: T) -> Result<T> {
        self.check_arg(tau)?;
        Ok(match self.family {
            GaugeFamily::Power => self.nu,
            GaugeFamily::PowerLog => {
                if tau == T::zero() {
                    self.nu
                } else {
                    self.nu - self.delta / self.log_factor(tau)
                }
            }
        })
    }

    /// Largest value q(domain_hi); infinite for the unbounded power gauge.
    pub fn range_hi(&self) -> T {
        if self.domain_hi.is_infinite() {
            return T::infinity();
        }
        self.eval(self.domain_hi).unwrap_or(T::nan())
    }

    /// q⁻¹(y) for y in `[0, range_hi]`.
    pub fn inverse(&self, y: T) -> Result<T> {
        if y.is_nan() || y < T::zero() {
            return domain(format!("gauge value {y:e} must be >= 0"));
        }
        if y == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.ln_inverse(y.ln())?.exp())
    }

    /// ln q⁻¹(e^{ln_y}); usable far below the underflow threshold of `T`.
    pub fn ln_inverse(&self, ln_y: T) -> Result<T> {
        if ln_y.is_nan() {
            return domain("gauge value is NaN");
        }
        if ln_y == T::neg_infinity() {
            return Ok(T::neg_infinity());
        }
        if self.domain_hi.is_finite() {
            let top = self.ln_eval(self.domain_hi)?;
            if ln_y > top + self.residual_tol() {
                return domain(format!(
                    "gauge value e^{ln_y:e} exceeds the range bound e^{top:e}"
                ));
            }
            if ln_y >= top {
                return Ok(self.domain_hi.ln());
            }
        }
        if self.family == GaugeFamily::Power || self.delta == T::zero() {
            return Ok(ln_y / self.nu);
        }
        match self.ln_inverse_lambert(ln_y) {
            Some(s) if self.residual_ok(s, ln_y) => Ok(s),
            _ => self.ln_inverse_bisect(ln_y),
        }
    }

    /// ln q(e^s) for s = ln τ, without forming τ.
    pub fn ln_eval_at_ln(&self, s: T) -> T {
        match self.family {
            GaugeFamily::Power => self.nu * s,
            GaugeFamily::PowerLog => self.nu * s + self.delta * (self.log_scale.ln() - s).ln(),
        }
    }

    /// Elasticity at τ = e^s.
    pub fn elasticity_at_ln(&self, s: T) -> T {
        match self.family {
            GaugeFamily::Power => self.nu,
            GaugeFamily::PowerLog => self.nu - self.delta / (self.log_scale.ln() - s),
        }
    }

    fn residual_tol(&self) -> T {
        T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
    }

    /// Relative residual |q(τ) − y| / y, measured on the log scale.
    fn residual_ok(&self, s: T, ln_y: T) -> bool {
        let r = self.ln_eval_at_ln(s) - ln_y;
        r.abs() <= self.residual_tol() * T::one().max(T::lit(1e-3) * ln_y.abs())
    }

    /// τ = c·exp(δ/ν · W₋₁(−(ν/δ) c^{−ν/δ} y^{1/δ})), evaluated through the shift
    /// z = −1 − ln(−x) so tiny values of y do not underflow.
    fn ln_inverse_lambert(&self, ln_y: T) -> Option<T> {
        let ratio = self.nu / self.delta;
        let z = -ratio.ln() - T::one() + ratio * self.log_scale.ln() - ln_y / self.delta;
        let z = if z < T::zero() && z > -T::lit(1e-12) {
            T::zero()
        } else {
            z
        };
        let w = lambert_w_minus1_shifted(z).ok()?;
        let s = self.log_scale.ln() + w / ratio;
        s.is_finite().then(|| s.min(self.domain_hi.ln()))
    }

    /// Bisection on ln τ using ln q, which is increasing on the domain.
    fn ln_inverse_bisect(&self, ln_y: T) -> Result<T> {
        let mut hi = self.domain_hi.ln();
        let mut lo = hi.min(ln_y / self.nu);
        let mut step = T::one();
        while self.ln_eval_at_ln(lo) > ln_y {
            lo = lo - step;
            step = step * T::lit(2.0);
            if !lo.is_finite() {
                return Err(Error::Numerical(format!(
                    "cannot bracket gauge value e^{ln_y:e}"
                )));
            }
        }
        for _ in 0..400 {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ln_eval_at_ln(mid) < ln_y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * T::lit(0.5))
    }

    /// Verifies q(rτ) ≤ φ(τ)q(r) and q̇(rτ) ≤ ψ(τ)q(rτ)/r on a grid and evaluates
    /// ∫₀¹ log^p(1 + C̃/τ^{2d}) φ(τ)ψ(τ) dτ.
    pub fn check_hq(&self, p: T, d: u32, c_tilde: T) -> Result<HqReport<T>> {
        if !(p >= T::one()) || d == 0 {
            return Err(Error::Config("check_hq needs p >= 1 and d >= 1".into()));
        }
        finite_positive("c_tilde", c_tilde)?;
        let (cap, norm) = match self.family {
            GaugeFamily::Power => (T::one(), T::one()),
            GaugeFamily::PowerLog => {
                let cap = self.log_scale.max(T::one());
                (
                    cap,
                    (T::one() + (cap / self.log_scale).ln()).powf(self.delta),
                )
            }
        };
        let phi = |tau: T| -> T {
            match self.family {
                GaugeFamily::Power => tau.powf(self.nu),
                GaugeFamily::PowerLog => {
                    norm * tau.powf(self.nu) * (T::one() + (cap / tau).ln()).powf(self.delta)
                }
            }
        };
        let psi = |tau: T| self.nu / tau;

        let r_hi = self.domain_hi.min(T::one());
        let n = 60usize;
        let mut worst_phi = T::zero();
        let mut worst_psi = T::zero();
        for i in 0..n {
            let r = r_hi * T::lit(2.0).powi(-(i as i32) / 2);
            for j in 0..n {
                let tau = T::lit(2.0).powi(-(j as i32) / 2);
                let rt = r * tau;
                let lhs = self.eval(rt)?;
                let rhs = phi(tau) * self.eval(r)?;
                worst_phi = worst_phi.max(lhs / rhs);
                let dl = self.derivative(rt)?;
                let dr = psi(tau) * lhs / r;
                worst_psi = worst_psi.max(dl / dr);
            }
        }
        let slack = T::one() + T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
        let grid_ok = worst_phi <= slack && worst_psi <= slack;

        let two_d = T::from_u32(2 * d).expect("small integer");
        let log_term = |tau: T| -> T {
            // ln(1 + C̃ τ^{−2d}) = ln C̃ − 2d ln τ + ln(1 + τ^{2d}/C̃)
            let ln_x = c_tilde.ln() - two_d * tau.ln();
            if ln_x > T::zero() {
                ln_x + (-ln_x).exp().ln_1p()
            } else {
                ln_x.exp().ln_1p()
            }
        };
        let integral = TanhSinh::default()
            .integrate(
                |tau| log_term(tau).powf(p) * phi(tau) * psi(tau),
                T::zero(),
                T::one(),
            )
            .map(|r| r.value)
            .unwrap_or(T::infinity());
        Ok(HqReport {
            holds: grid_ok && integral.is_finite(),
            log_integral: integral,
            worst_phi_ratio: worst_phi,
            worst_psi_ratio: worst_psi,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HqReport<T> {
    pub holds: bool,
    pub log_integral: T,
    /// max over the grid of q(rτ) / (φ(τ) q(r)); at most 1 when the bound holds.
    pub worst_phi_ratio: T,
    /// max over the grid of q̇(rτ) / (ψ(τ) q(rτ) / r).
    pub worst_psi_ratio: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn evaluation_examples() {
        let q = GaugeSpec::<f64>::power(0.5).unwrap();
        assert!((q.eval(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert!((q.inverse(0.5).unwrap() - 0.25).abs() < 1e-15);

        let q = GaugeSpec::<f64>::power_log(1.0, 0.5, 2.0 * E).unwrap();
        assert!((q.domain_hi() - 2.0).abs() < 1e-15);
        assert!((q.eval(2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((q.inverse(2.0).unwrap() - 2.0).abs() < 1e-13);

        let q = GaugeSpec::<f64>::power_log(1.0, 1.0, E).unwrap();
        assert!((q.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((q.inverse(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((q.eval(0.5).unwrap() - 0.5 * (1.0 + 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let q = GaugeSpec::<f64>::power_log(1.0, 1.0, E).unwrap();
        assert!(matches!(q.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(q.eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(q.inverse(2.0), Err(Error::Domain(_))));
        assert!(GaugeSpec::<f64>::power(0.0f64).is_err());
        assert!(GaugeSpec::<f64>::power_log(1.0, -1.0, 1.0f64).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let q = GaugeSpec::<f64>::power_log(0.7, 1.3, 3.0).unwrap();
        for &t in &[1e-6, 1e-3, 0.05, 0.2] {
            let h = t * 1e-6;
            let fd = (q.eval(t + h).unwrap() - q.eval(t - h).unwrap()) / (2.0 * h);
            assert!((fd - q.derivative(t).unwrap()).abs() < 1e-7 * fd.abs());
            let el = t * q.derivative(t).unwrap() / q.eval(t).unwrap();
            assert!((el - q.elasticity(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_of_tiny_values() {
        let q = GaugeSpec::<f64>::power_log(1.0, 0.5, 2.0 * E * 1.0).unwrap();
        for &t in &[1e-300, 1e-200, 1e-60, 1e-10] {
            let y = q.eval(t).unwrap();
            let back = q.inverse(y).unwrap();
            assert!(((back - t) / t).abs() < 1e-10, "t={t} back={back}");
        }
    }

    #[test]
    fn hq_examples() {
        let q = GaugeSpec::<f64>::power(0.5).unwrap();
        let r = q.check_hq(2.0, 1, 1.0).unwrap();
        assert!(r.holds);
        let q = GaugeSpec::<f64>::power_log(1.0, 1.0, E).unwrap();
        let r = q.check_hq(1.0, 1, 1.0).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn hq_log_integral_value() {
        // ∫₀¹ ln(1 + τ⁻²)·½τ^{-1/2} dτ = ln 2 + 4∫₀¹ dx/(1+x⁴), the latter equal to
        // (π + 2 ln(1+√2))/(4√2).
        let q = GaugeSpec::<f64>::power(0.5).unwrap();
        let r = q.check_hq(1.0, 1, 1.0).unwrap();
        let quartic = (std::f64::consts::PI + 2.0 * (1.0 + 2f64.sqrt()).ln()) / (4.0 * 2f64.sqrt());
        let expected = 2f64.ln() + 4.0 * quartic;
        assert!(
            (r.log_integral - expected).abs() < 1e-10,
            "{}",
            r.log_integral
        );
    }
}
