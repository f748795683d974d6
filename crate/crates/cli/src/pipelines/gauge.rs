use anisohit::lambert::lambert_w_minus1_shifted;
use anisohit::{Gauge, PairGauge, Result};

use super::{log_grid, model_label, rel_err};
use crate::config::ExperimentConfig;
use crate::report::{Check, ReportRow};

pub fn gauge_check(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = lambert_rows()?;
    for h in cfg.hursts() {
        let model = cfg.model(h)?;
        let env = model.envelope_gauges()?;
        let p = model.params();
        let label = model_label(cfg, h);

        let worst = [env.q1, env.q2]
            .iter()
            .map(|q| round_trip_error(q))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(ReportRow::new(
            "gauge-inverse-round-trip",
            format!("{label} 1000 points per gauge"),
            worst,
            Check::AtMost(1e-10),
        ));

        rows.push(v_closed_form_row(
            &label,
            env.q1.nu(),
            env.q2.nu(),
            p.d,
            p.state_dim,
        )?);

        let dg = PairGauge::pair_from_diameters(
            env.q1,
            env.q2,
            1,
            p.d,
            p.state_dim,
            p.t_max - p.t0,
            model.spatial_diameter(),
        )?;
        let exponent = dg.leading_exponent();
        let growth = dg.check_growth(cfg.growth_grid)?;
        rows.push(ReportRow::verdict(
            "growth-verdict",
            format!("{label} grid={}", cfg.growth_grid),
            growth.ok,
            exponent > 0.0,
        ));
        if exponent > 0.0 {
            let (nu1, nu2) = (env.q1.nu(), env.q2.nu());
            let limit = 1.0 / (p.state_dim as f64 * nu1 * nu2 - (nu2 + p.d as f64 * nu1));
            rows.push(ReportRow::new(
                "growth-limit",
                format!("{label} grid={}", cfg.growth_grid),
                growth.tail_limit,
                Check::Relative {
                    reference: limit,
                    tolerance: 0.02,
                },
            ));
        }

        let rep = dg.check_monotone_and_polarity();
        let (lo, hi) = rep.increasing_on;
        if hi > lo {
            let top = hi.min(dg.diam_cap());
            let bottom = lo.max(top * 1e-12);
            let mut increasing = true;
            let mut prev = f64::NEG_INFINITY;
            for tau in log_grid(bottom, top, 400) {
                let g = dg.eval_g(tau)?;
                increasing &= g > prev;
                prev = g;
            }
            rows.push(ReportRow::verdict(
                "monotone-finite-difference",
                format!("{label} 400 points"),
                increasing,
                true,
            ));
        }
        // ḡ → 0 seen directly on a far-out log grid.
        let vanishes =
            dg.ln_g_at_ln(-400.0)? < dg.ln_g_at_ln(-200.0)? && dg.ln_g_at_ln(-400.0)? < -20.0;
        rows.push(ReportRow::verdict(
            "polar-points",
            label.clone(),
            rep.polar_points,
            vanishes,
        ));

        for (name, q, d) in [("time", env.q1, 1), ("space", env.q2, p.d)] {
            let hq = q.check_hq(1.0, d, 1.0)?;
            rows.push(ReportRow::verdict(
                "hq-condition",
                format!("{label} {name} gauge"),
                hq.holds && hq.log_integral.is_finite(),
                true,
            ));
        }
    }
    Ok(rows)
}

fn lambert_rows() -> Result<Vec<ReportRow>> {
    let zs = log_grid(1e-3, 1e3, 1000);
    let mut worst = 0.0f64;
    let mut sandwich = true;
    for &z in &zs {
        let w = lambert_w_minus1_shifted(z)?;
        // w e^w = −e^{−1−z}, compared in log form where the product underflows.
        let x = -(-1.0 - z).exp();
        let residual = if x.is_normal() {
            (w * w.exp() - x).abs() / x.abs()
        } else {
            ((-w).ln() + w + 1.0 + z).abs() / (1.0 + z)
        };
        worst = worst.max(residual);
        let s = (2.0 * z).sqrt();
        sandwich &= -1.0 - s - z < w && w < -1.0 - s - 2.0 * z / 3.0;
    }
    Ok(vec![
        ReportRow::new(
            "lambert-residual",
            "z in [1e-3 1e3] 1000 points",
            worst,
            Check::AtMost(1e-12),
        ),
        ReportRow::verdict(
            "lambert-sandwich",
            "z in [1e-3 1e3] 1000 points",
            sandwich,
            true,
        ),
    ])
}

fn round_trip_error(q: &Gauge) -> Result<f64> {
    let hi = q.domain_hi().min(1e3);
    let mut worst = 0.0f64;
    for tau in log_grid(hi * 1e-12, hi, 1000) {
        worst = worst.max(rel_err(q.inverse(q.eval(tau)?)?, tau));
    }
    Ok(worst)
}

/// v̄ for power gauges q₁ = τ^{ν₁}, q₂ = τ^{ν₂} computed through the general
/// quadrature path (a log gauge with zero log exponent) against
/// (τ^{−χ} − c^{−χ})/(χν₁ν₂), χ = D − 1/ν₁ − d/ν₂, or ln(c/τ)/(ν₁ν₂) when χ = 0.
fn v_closed_form_row(label: &str, nu1: f64, nu2: f64, d: u32, big_d: u32) -> Result<ReportRow> {
    let cap = 0.5;
    let quad_gauge = Gauge::power_log(nu1, 0.0, 1e6)?;
    let dg = PairGauge::pair(quad_gauge, Gauge::power(nu2)?, 1, d, big_d, cap)?;
    let chi = big_d as f64 - 1.0 / nu1 - d as f64 / nu2;
    let mut worst = 0.0f64;
    for k in 0..100 {
        let tau = cap * 10f64.powf(-8.0 * (k as f64 + 0.5) / 100.0);
        let closed = if chi == 0.0 {
            (cap / tau).ln() / (nu1 * nu2)
        } else {
            (tau.powf(-chi) - cap.powf(-chi)) / (chi * nu1 * nu2)
        };
        worst = worst.max(rel_err(dg.eval_v(tau)?, closed));
    }
    Ok(ReportRow::new(
        "v-closed-form",
        format!("{label} nu1={nu1} nu2={nu2} 100 points"),
        worst,
        Check::AtMost(1e-8),
    ))
}
