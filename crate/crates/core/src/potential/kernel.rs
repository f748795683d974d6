use std::fmt;
use std::sync::Arc;

use crate::derived::DerivedGauge;
use crate::error::{config, Result};

/// Radial potential kernel k(|x − y|) with its order of singularity at 0:
/// `singularity = Some(s)` means k(r) behaves like r^{−s} (up to slowly varying
/// factors), `None` means k is bounded.
#[derive(Clone)]
pub struct PotentialKernel {
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    singularity: Option<f64>,
    label: String,
}

impl fmt::Debug for PotentialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialKernel")
            .field("label", &self.label)
            .field("singularity", &self.singularity)
            .finish()
    }
}

impl PotentialKernel {
    pub fn from_fn(
        label: impl Into<String>,
        singularity: Option<f64>,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            profile: Arc::new(profile),
            singularity,
            label: label.into(),
        }
    }

    /// r^{−order}; order 0 gives the constant kernel 1.
    pub fn riesz(order: f64) -> Result<Self> {
        if !(order >= 0.0 && order.is_finite()) {
            return config(format!("Riesz order {order} must be finite and >= 0"));
        }
        if order == 0.0 {
            return Ok(Self::constant(1.0));
        }
        Ok(Self::from_fn(
            format!("riesz({order})"),
            Some(order),
            move |r| r.powf(-order),
        ))
    }

    pub fn constant(value: f64) -> Self {
        Self::from_fn(format!("constant({value})"), None, move |_| value)
    }

    /// k(r) = 1/ḡ(r) for r ≤ diam_cap and 1/ḡ(diam_cap) beyond. ḡ must be
    /// non-decreasing near 0 (non-negative power exponent).
    pub fn from_gauge(dg: &DerivedGauge<f64>) -> Result<Self> {
        let e = dg.leading_exponent();
        if e < 0.0 {
            return config(format!(
                "small-ball profile decreases near 0 (exponent {e}); its reciprocal is not a potential kernel"
            ));
        }
        let cap = dg.diam_cap();
        let ln_cap = cap.ln();
        let g = *dg;
        let ln_g_cap = g.ln_g_at_ln(ln_cap)?;
        let profile = move |r: f64| {
            if r >= cap {
                (-ln_g_cap).exp()
            } else {
                g.ln_g_at_ln(r.ln()).map(|v| (-v).exp()).unwrap_or(f64::NAN)
            }
        };
        let singularity = (e > 0.0).then_some(e);
        Ok(Self::from_fn(
            format!("gauge(exponent {e})"),
            singularity,
            profile,
        ))
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            return match self.singularity {
                Some(_) => f64::INFINITY,
                None => (self.profile)(0.0),
            };
        }
        (self.profile)(r)
    }

    pub fn singularity(&self) -> Option<f64> {
        self.singularity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether k is integrable near 0 against k-dimensional Lebesgue measure.
    pub fn integrable_in_dim(&self, dim: usize) -> bool {
        match self.singularity {
            None => true,
            Some(s) => s < dim as f64,
        }
    }
}
