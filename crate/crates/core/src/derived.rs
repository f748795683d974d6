//! Functions derived from one or two gauges: the small-ball profile
//! ḡ(τ) = τ^D / (q₁⁻¹(τ)^{d₁} q₂⁻¹(τ)^{d₂}), the potential profile v̄, and the
//! growth, monotonicity and polarity diagnostics built from them.
//!
//! Internally every routine works with s = ln τ, so grids can extend far below
//! the underflow threshold of the scalar type.

use crate::error::{config, Error, Result};
use crate::gauge::{GaugeFamily, GaugeSpec};
use crate::quadrature::Adaptive;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaugeKind {
    /// One gauge acting on all `d` parameter coordinates.
    Single,
    /// Separate gauges for `d₁` and `d₂` coordinates.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedGauge<T> {
    kind: GaugeKind,
    q1: GaugeSpec<T>,
    q2: GaugeSpec<T>,
    d1: u32,
    d2: u32,
    state_dim: u32,
    diam_cap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport<T> {
    pub ok: bool,
    /// Largest value of the growth product over the grid.
    pub sup_value: T,
    /// Growth product at the smallest grid point.
    pub tail_value: T,
    /// Log-log slope of the product over the last quarter of the grid.
    pub tail_slope: T,
    /// Change of ln(product) across the last quarter of the grid.
    pub tail_drift: T,
    /// v̄(τ)ḡ(τ) at the smallest grid point (same as `tail_value` for a single gauge).
    pub tail_limit: T,
    /// `(ln τ, product)` per grid point, largest τ first.
    pub profile: Vec<(T, T)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneReport<T> {
    /// Open interval, in the argument of ḡ, on which ḡ is strictly increasing.
    /// `(0, 0)` when there is none.
    pub increasing_on: (T, T),
    /// For power-log gauges: the threshold expressed in that gauge's own argument,
    /// i.e. ḡ increases for q⁻¹(τ) below this value.
    pub gauge_threshold: Option<T>,
    pub polar_points: bool,
}

impl<T: Real> DerivedGauge<T> {
    pub fn single(q: GaugeSpec<T>, d: u32, state_dim: u32, diam_cap: T) -> Result<Self> {
        if d == 0 || state_dim == 0 {
            return config("dimensions must be positive");
        }
        let dg = Self {
            kind: GaugeKind::Single,
            q1: q,
            q2: q,
            d1: d,
            d2: 0,
            state_dim,
            diam_cap,
        };
        dg.validate_cap()?;
        Ok(dg)
    }

    /// Single gauge with the cap set to q(diameter of the parameter set).
    pub fn single_from_diameter(
        q: GaugeSpec<T>,
        d: u32,
        state_dim: u32,
        diameter: T,
    ) -> Result<Self> {
        let cap = q.eval(diameter)?;
        Self::single(q, d, state_dim, cap)
    }

    pub fn pair(
        q1: GaugeSpec<T>,
        q2: GaugeSpec<T>,
        d1: u32,
        d2: u32,
        state_dim: u32,
        diam_cap: T,
    ) -> Result<Self> {
        if d2 == 0 || state_dim == 0 {
            return config("d2 and the state dimension must be positive");
        }
        let dg = Self {
            kind: GaugeKind::Pair,
            q1,
            q2,
            d1,
            d2,
            state_dim,
            diam_cap,
        };
        dg.validate_cap()?;
        Ok(dg)
    }

    /// Two gauges with cap max(q₁(diam I), q₂(diam J)).
    pub fn pair_from_diameters(
        q1: GaugeSpec<T>,
        q2: GaugeSpec<T>,
        d1: u32,
        d2: u32,
        state_dim: u32,
        diam_time: T,
        diam_space: T,
    ) -> Result<Self> {
        let cap = q1.eval(diam_time)?.max(q2.eval(diam_space)?);
        Self::pair(q1, q2, d1, d2, state_dim, cap)
    }

    fn validate_cap(&self) -> Result<()> {
        if !(self.diam_cap.is_finite() && self.diam_cap > T::zero()) {
            return config(format!(
                "diam_cap must be finite and positive, got {:e}",
                self.diam_cap
            ));
        }
        for q in self.active_gauges() {
            let top = q.range_hi();
            if self.diam_cap > top * (T::one() + T::lit(1e-12)) {
                return config(format!(
                    "diam_cap {:e} exceeds the range {top:e} of a gauge",
                    self.diam_cap
                ));
            }
        }
        Ok(())
    }

    fn active_gauges(&self) -> Vec<GaugeSpec<T>> {
        match self.kind {
            GaugeKind::Single => vec![self.q1],
            GaugeKind::Pair => vec![self.q1, self.q2],
        }
    }

    /// (gauge, exponent) pairs entering ḡ.
    fn factors(&self) -> Vec<(GaugeSpec<T>, T)> {
        match self.kind {
            GaugeKind::Single => vec![(self.q1, T::from_u32(self.d1).unwrap())],
            GaugeKind::Pair => vec![
                (self.q1, T::from_u32(self.d1).unwrap()),
                (self.q2, T::from_u32(self.d2).unwrap()),
            ],
        }
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn gauges(&self) -> (GaugeSpec<T>, GaugeSpec<T>) {
        (self.q1, self.q2)
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.d1, self.d2)
    }

    pub fn state_dim(&self) -> u32 {
        self.state_dim
    }

    pub fn diam_cap(&self) -> T {
        self.diam_cap
    }

    fn dim_d(&self) -> T {
        T::from_u32(self.state_dim).unwrap()
    }

    fn all_power(&self) -> bool {
        self.factors()
            .iter()
            .all(|(q, _)| q.family() == GaugeFamily::Power)
    }

    /// D − Σ dᵢ/νᵢ: the power-law exponent of ḡ, ignoring logarithmic factors.
    pub fn leading_exponent(&self) -> T {
        self.factors()
            .iter()
            .fold(self.dim_d(), |acc, (q, d)| acc - *d / q.nu())
    }

    /// ln ḡ(e^s).
    pub fn ln_g_at_ln(&self, s: T) -> Result<T> {
        if self.all_power() {
            return Ok(self.leading_exponent() * s);
        }
        let mut acc = self.dim_d() * s;
        for (q, d) in self.factors() {
            if d > T::zero() {
                acc = acc - d * q.ln_inverse(s)?;
            }
        }
        Ok(acc)
    }

    fn check_tau(&self, tau: T) -> Result<()> {
        let slack = T::one() + T::lit(1e-12);
        if tau.is_nan() || tau <= T::zero() || tau > self.diam_cap * slack {
            return Err(Error::Domain(format!(
                "tau = {tau:e} outside (0, {:e}]",
                self.diam_cap
            )));
        }
        Ok(())
    }

    /// ḡ(τ) for 0 < τ ≤ diam_cap.
    pub fn eval_g(&self, tau: T) -> Result<T> {
        self.check_tau(tau)?;
        Ok(self.ln_g_at_ln(tau.ln())?.exp())
    }

    fn ln_v_density(&self, s: T) -> Result<T> {
        let mut ln_den = self.ln_g_at_ln(s)?;
        for q in self.active_gauges() {
            let e = if q.family() == GaugeFamily::Power {
                q.nu()
            } else {
                q.elasticity_at_ln(q.ln_inverse(s)?)
            };
            ln_den = ln_den + e.ln();
        }
        Ok(ln_den)
    }

    fn integrate_v(&self, s_lo: T, s_hi: T) -> Result<T> {
        if s_hi <= s_lo {
            return Ok(T::zero());
        }
        Ok(self.integrate_v_scaled(s_lo, s_hi, T::zero())?)
    }

    /// ∫ e^{−shift} × integrand over `[s_lo, s_hi]`.
    fn integrate_v_scaled(&self, s_lo: T, s_hi: T, shift: T) -> Result<T> {
        let mut failure = None;
        let rule = Adaptive::with_rel_tol(T::lit(1e-11).max(T::epsilon() * T::lit(64.0)));
        let r = rule.integrate(
            |s| match self.ln_v_density(s) {
                Ok(v) => (-v - shift).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    T::zero()
                }
            },
            s_lo,
            s_hi,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(r.value),
        }
    }

    /// Closed form of v̄ for power gauges, with s = ln τ.
    fn power_v(&self, s: T) -> T {
        let e = self.leading_exponent();
        let nus = self
            .active_gauges()
            .iter()
            .fold(T::one(), |acc, q| acc * q.nu());
        let ln_c = self.diam_cap.ln();
        if e == T::zero() {
            (ln_c - s) / nus
        } else {
            // (e^{−e s} − e^{−e ln c}) / (e ν₁ν₂), written to avoid cancellation.
            let a = -e * s;
            let b = -e * ln_c;
            if e > T::zero() {
                a.exp() * (-(b - a).exp_m1()) / (e * nus)
            } else {
                b.exp() * (-(a - b).exp_m1()) / (-e * nus)
            }
        }
    }

    /// v̄(τ) = ∫_τ^{diam_cap} ρ^{−D+1} Πᵢ [qᵢ⁻¹(ρ)]^{dᵢ−1} / q̇ᵢ(qᵢ⁻¹(ρ)) dρ, with the
    /// single-gauge form ∫_τ ρ^{−D} [q⁻¹(ρ)]^{d−1} / q̇(q⁻¹(ρ)) dρ. Zero at τ = diam_cap.
    pub fn eval_v(&self, tau: T) -> Result<T> {
        if tau == T::zero() {
            return self.v_at_zero();
        }
        self.check_tau(tau)?;
        let tau = tau.min(self.diam_cap);
        if self.all_power() {
            return Ok(self.power_v(tau.ln()));
        }
        self.integrate_v(tau.ln(), self.diam_cap.ln())
    }

    fn v_at_zero(&self) -> Result<T> {
        let e = self.leading_exponent();
        if e > T::zero() || (e == T::zero() && self.all_power()) {
            return Err(Error::Divergence(format!(
                "profile integral diverges at 0 (exponent {e:e})"
            )));
        }
        if e == T::zero() {
            return Err(Error::Unsupported(
                "borderline exponent with logarithmic gauges".into(),
            ));
        }
        if self.all_power() {
            return Ok(self.power_v(T::neg_infinity()));
        }
        // The integrand decays like e^{|e| s}; truncate where the tail is negligible.
        let s_hi = self.diam_cap.ln();
        let s_lo = s_hi - T::lit(40.0) / (-e);
        self.integrate_v(s_lo, s_hi)
    }

    /// Growth diagnostic on τ_k = diam_cap·2^{−k}, k = 1..=grid_size. The product is
    /// v(τ)g(τ) for a single gauge and v̄(τ/2)ḡ(τ) for a pair. `ok` requires finite
    /// positive values, a non-negative leading exponent and a flat tail.
    pub fn check_growth(&self, grid_size: usize) -> Result<GrowthReport<T>> {
        if grid_size < 8 {
            return config("check_growth needs at least 8 grid points");
        }
        let ln2 = T::LN_2();
        let s0 = self.diam_cap.ln();
        let s_at = |k: usize| s0 - ln2 * T::from_usize_lossy(k);
        let shift = usize::from(self.kind == GaugeKind::Pair);
        let n_v = grid_size + shift;
        // ln v̄(τ_k), accumulated piecewise with per-piece scaling so that v̄ may
        // exceed the floating-point range while the product stays finite.
        let mut ln_v = Vec::with_capacity(n_v + 1);
        ln_v.push(T::neg_infinity());
        for k in 1..=n_v {
            let (lo, hi) = (s_at(k), s_at(k - 1));
            let scale = -self.ln_v_density(lo)?;
            let piece = if self.all_power() {
                let e = self.leading_exponent();
                let nus = self
                    .active_gauges()
                    .iter()
                    .fold(T::one(), |acc, q| acc * q.nu());
                // ∫_lo^hi e^{−e s}/ν ds scaled by e^{−scale} = e^{e·lo}·ν.
                if e == T::zero() {
                    (hi - lo) / nus * (-scale).exp()
                } else {
                    -(-e * (hi - lo)).exp_m1() / (e * nus) * (-e * lo - scale).exp()
                }
            } else {
                self.integrate_v_scaled(lo, hi, scale)?
            };
            let ln_piece = piece.ln() + scale;
            let prev = ln_v[k - 1];
            ln_v.push(log_add_exp(prev, ln_piece));
        }
        let mut profile = Vec::with_capacity(grid_size);
        for k in 1..=grid_size {
            let s = s_at(k);
            let p = (ln_v[k + shift] + self.ln_g_at_ln(s)?).exp();
            profile.push((s, p));
        }
        let s_last = s_at(grid_size);
        let tail_limit = (ln_v[grid_size] + self.ln_g_at_ln(s_last)?).exp();

        let start = (3 * grid_size) / 4;
        let tail = &profile[start..];
        let tail_slope = ols_slope(tail.iter().map(|&(s, p)| (s, p.ln())));
        let tail_drift = tail[tail.len() - 1].1.ln() - tail[0].1.ln();
        let finite = profile.iter().all(|&(_, p)| p.is_finite() && p > T::zero());
        let sup_value = profile.iter().fold(T::zero(), |m, &(_, p)| m.max(p));
        let threshold = T::lit(0.05);
        let ok = finite
            && self.leading_exponent() >= T::zero()
            && tail_slope.abs() < threshold
            && tail_drift.abs() < threshold;
        Ok(GrowthReport {
            ok,
            sup_value,
            tail_value: profile[grid_size - 1].1,
            tail_slope,
            tail_drift,
            tail_limit,
            profile,
        })
    }

    /// d ln ḡ / d ln τ at τ = e^s: D − Σ dᵢ / elasticityᵢ(qᵢ⁻¹(τ)).
    pub fn log_derivative_at_ln(&self, s: T) -> Result<T> {
        let mut acc = self.dim_d();
        for (q, d) in self.factors() {
            if d > T::zero() {
                let e = q.elasticity_at_ln(q.ln_inverse(s)?);
                acc = acc - d / e;
            }
        }
        Ok(acc)
    }

    /// Interval on which ḡ increases, and whether lim_{τ↓0} ḡ(τ) = 0.
    pub fn check_monotone_and_polarity(&self) -> MonotoneReport<T> {
        let e0 = self.leading_exponent();
        // Logarithmic factors make ḡ blow up when the power exponent vanishes, so the
        // limit is zero exactly when the power exponent is positive.
        let polar_points = e0 > T::zero();
        let empty = (T::zero(), T::zero());
        let logs: Vec<(GaugeSpec<T>, T)> = self
            .factors()
            .into_iter()
            .filter(|(q, d)| {
                *d > T::zero() && q.family() == GaugeFamily::PowerLog && q.delta() > T::zero()
            })
            .collect();
        match logs.len() {
            0 => {
                let increasing_on = if e0 > T::zero() {
                    (T::zero(), T::infinity())
                } else {
                    empty
                };
                MonotoneReport {
                    increasing_on,
                    gauge_threshold: None,
                    polar_points,
                }
            }
            1 => {
                let (q, dj) = logs[0];
                // Power part of the exponent, treating the log gauge separately.
                let a = self.dim_d()
                    - self
                        .factors()
                        .iter()
                        .filter(|(g, d)| {
                            *d > T::zero()
                                && !(g.family() == GaugeFamily::PowerLog && g.delta() > T::zero())
                        })
                        .fold(T::zero(), |acc, (g, d)| acc + *d / g.nu());
                // Condition: a·(ν − δ/L) > d_j, i.e. L > δ/η with η = ν − d_j/a.
                if a <= T::zero() || q.nu() <= dj / a {
                    return MonotoneReport {
                        increasing_on: empty,
                        gauge_threshold: Some(T::zero()),
                        polar_points,
                    };
                }
                let eta = q.nu() - dj / a;
                let l_star = q.delta() / eta;
                let threshold = q.log_scale() * (-l_star).exp();
                let end = threshold.min(q.domain_hi());
                let top = q.eval(end).unwrap_or(T::zero());
                MonotoneReport {
                    increasing_on: (T::zero(), top),
                    gauge_threshold: Some(threshold),
                    polar_points,
                }
            }
            _ => {
                // Scan upward from deep in the tail until the log-derivative turns non-positive.
                let s_top = self.diam_cap.ln();
                let n = 4000usize;
                let depth = T::lit(4000.0);
                let mut end = None;
                for i in 0..=n {
                    let s = s_top - depth * T::from_usize_lossy(n - i) / T::from_usize_lossy(n);
                    match self.log_derivative_at_ln(s) {
                        Ok(v) if v > T::zero() => end = Some(s),
                        _ => break,
                    }
                }
                let increasing_on = match end {
                    Some(s) => (T::zero(), s.exp()),
                    None => empty,
                };
                MonotoneReport {
                    increasing_on,
                    gauge_threshold: None,
                    polar_points,
                }
            }
        }
    }
}

fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn ols_slope<T: Real>(points: impl Iterator<Item = (T, T)> + Clone) -> T {
    let n = T::from_usize_lossy(points.clone().count());
    let (sx, sy) = points
        .clone()
        .fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.fold((T::zero(), T::zero()), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == T::zero() {
        T::zero()
    } else {
        sxy / sxx
    }
}
