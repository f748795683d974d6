use anisohit::heat::HeatModel;
use anisohit::mc::{
    estimate_hit_prob, fit_small_ball, grid_modulus, hit_prob_ladder, min_distances, Estimate,
    FieldSampler, InflationPolicy, SampleGrid,
};
use anisohit::potential::TargetSet;
use anisohit::{Gauge, PairGauge, Result};

use super::model_label;
use crate::config::ExperimentConfig;
use crate::report::{sig12, Check, ReportRow};

fn sampler(
    cfg: &ExperimentConfig,
    model: &HeatModel,
    n_t: usize,
    n_x: usize,
) -> Result<FieldSampler> {
    let grid = SampleGrid::uniform(model, n_t, n_x)?;
    Ok(FieldSampler::new(model, grid)?.with_mean(cfg.mean_offset))
}

fn center(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.target_center.is_empty() {
        vec![0.0; cfg.state_dim as usize]
    } else {
        cfg.target_center.clone()
    }
}

fn count_within(distances: &[f64], radius: f64) -> Estimate {
    Estimate::from_counts(
        distances.iter().filter(|&&d| d <= radius).count(),
        distances.len(),
    )
}

fn run_label(cfg: &ExperimentConfig, n_t: usize, n_x: usize) -> String {
    format!(
        "{} grid={n_t}x{n_x} n={} seed={}",
        model_label(cfg, cfg.hurst),
        cfg.n_samples,
        cfg.seed
    )
}

/// ḡ built from the metric envelope gauges of the model.
fn profile_gauge(model: &HeatModel) -> Result<PairGauge> {
    let env = model.envelope_gauges()?;
    let p = model.params();
    PairGauge::pair_from_diameters(
        env.q1,
        env.q2,
        1,
        p.d,
        p.state_dim,
        p.t_max - p.t0,
        model.spatial_diameter(),
    )
}

pub fn hit_mc(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let model = cfg.model(cfg.hurst)?;
    let s = sampler(cfg, &model, cfg.grid_t, cfg.grid_x)?;
    let label = run_label(cfg, cfg.grid_t, cfg.grid_x);
    let z = center(cfg);
    let target = if cfg.target_radius > 0.0 {
        TargetSet::ball(z.clone(), cfg.target_radius)
    } else {
        TargetSet::Points(vec![z.clone()])
    };
    let policy = InflationPolicy::Envelope {
        factor: cfg.inflation_factor,
    };
    let est = estimate_hit_prob(&model, &s, &target, cfg.n_samples, cfg.seed, policy)?;
    let params = format!("{label} target radius={}", cfg.target_radius);
    let mut rows = vec![
        ReportRow::new(
            "inflation-radius",
            params.clone(),
            est.inflation,
            Check::Info,
        ),
        ReportRow::new("hit-raw", params.clone(), est.raw.p_hat, Check::Info),
        ReportRow::new("hit-raw-ci-low", params.clone(), est.raw.ci_lo, Check::Info),
        ReportRow::new(
            "hit-raw-ci-high",
            params.clone(),
            est.raw.ci_hi,
            Check::Info,
        ),
        ReportRow::new(
            "hit-inflated",
            params.clone(),
            est.inflated.p_hat,
            Check::Info,
        ),
        ReportRow::new(
            "hit-inflated-ci-low",
            params.clone(),
            est.inflated.ci_lo,
            Check::Info,
        ),
        ReportRow::new(
            "hit-inflated-ci-high",
            params.clone(),
            est.inflated.ci_hi,
            Check::Info,
        ),
        ReportRow::verdict(
            "hit-bracket",
            params,
            est.raw.hits <= est.inflated.hits,
            true,
        ),
    ];
    if !cfg.radii.is_empty() {
        let mut radii = cfg.radii.clone();
        radii.sort_by(f64::total_cmp);
        let ladder = hit_prob_ladder(
            &s,
            &TargetSet::Points(vec![z]),
            &radii,
            cfg.n_samples,
            cfg.seed,
        )?;
        for (r, e) in radii.iter().zip(&ladder) {
            rows.push(ReportRow::new(
                "hit-ladder",
                format!("{label} eps={}", sig12(*r)),
                e.p_hat,
                Check::Info,
            ));
        }
        rows.push(ReportRow::verdict(
            "hit-ladder-monotone",
            format!("{label} radii={}", radii.len()),
            ladder.windows(2).all(|w| w[0].hits <= w[1].hits),
            true,
        ));
    }
    Ok(rows)
}

pub fn small_ball(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let model = cfg.model(cfg.hurst)?;
    let s = sampler(cfg, &model, cfg.grid_t, cfg.grid_x)?;
    let label = run_label(cfg, cfg.grid_t, cfg.grid_x);
    let radii = if cfg.radii.is_empty() {
        let base = grid_modulus(&model, &s)?;
        (0..4).map(|k| base * 2f64.powi(k)).collect()
    } else {
        let mut r = cfg.radii.clone();
        r.sort_by(f64::total_cmp);
        r
    };
    let inflation = InflationPolicy::Envelope {
        factor: cfg.inflation_factor,
    }
    .radius(&model, &s)?;
    let distances = min_distances(
        &s,
        &TargetSet::Points(vec![center(cfg)]),
        cfg.n_samples,
        cfg.seed,
    )?;

    let mut rows = vec![ReportRow::new(
        "inflation-radius",
        label.clone(),
        inflation,
        Check::Info,
    )];
    let estimates: Vec<Estimate> = radii.iter().map(|&r| count_within(&distances, r)).collect();
    for (r, e) in radii.iter().zip(&estimates) {
        let params = format!("{label} eps={}", sig12(*r));
        rows.push(ReportRow::new(
            "small-ball-p",
            params.clone(),
            e.p_hat,
            Check::Info,
        ));
        let inflated = count_within(&distances, r + inflation);
        rows.push(ReportRow::new(
            "small-ball-p-inflated",
            params.clone(),
            inflated.p_hat,
            Check::Info,
        ));
        rows.push(ReportRow::verdict(
            "small-ball-bracket",
            params,
            e.hits <= inflated.hits,
            true,
        ));
    }
    for (w, e) in radii.windows(2).zip(estimates.windows(2)) {
        if e[0].hits > 0 && e[1].hits > 0 {
            rows.push(ReportRow::new(
                "small-ball-local-slope",
                format!("{label} eps={}..{}", sig12(w[0]), sig12(w[1])),
                (e[1].p_hat / e[0].p_hat).ln() / (w[1] / w[0]).ln(),
                Check::Info,
            ));
        }
    }
    let fit = fit_small_ball(&radii, estimates)?;
    let reference = profile_gauge(&model)?.leading_exponent();
    rows.push(ReportRow::new(
        "small-ball-slope",
        format!("{label} radii={}", radii.len()),
        fit.slope,
        Check::Within {
            reference,
            tolerance: 0.3,
        },
    ));
    rows.push(ReportRow::new(
        "small-ball-slope-se",
        label.clone(),
        fit.se,
        Check::Info,
    ));
    rows.push(ReportRow::new(
        "small-ball-curvature",
        label,
        fit.curvature,
        Check::Info,
    ));
    Ok(rows)
}

pub fn polarity(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let model = cfg.model(cfg.hurst)?;
    let dg = profile_gauge(&model)?;
    let rep = dg.check_monotone_and_polarity();
    let base_label = model_label(cfg, cfg.hurst);
    let vanishes =
        dg.ln_g_at_ln(-400.0)? < dg.ln_g_at_ln(-200.0)? && dg.ln_g_at_ln(-400.0)? < -20.0;
    let mut rows = vec![ReportRow::verdict(
        "gauge-polar-points",
        format!("{base_label} exponent={}", sig12(dg.leading_exponent())),
        rep.polar_points,
        vanishes,
    )];
    // Power gauges with D − d/ν ≤ 0: ḡ does not vanish at 0.
    for (nu, d, big_d) in [(0.5, 1, 2), (0.5, 1, 1), (0.25, 2, 8)] {
        let single = PairGauge::single(Gauge::power(nu)?, d, big_d, 1.0)?;
        rows.push(ReportRow::verdict(
            "nonpolar-power-config",
            format!(
                "nu={nu} d={d} D={big_d} exponent={}",
                sig12(single.leading_exponent())
            ),
            single.check_monotone_and_polarity().polar_points,
            false,
        ));
    }

    let z = TargetSet::Points(vec![center(cfg)]);
    let mut raw = vec![];
    let mut grid_scale = vec![];
    for &n in &cfg.refinements {
        let s = sampler(cfg, &model, n, n)?;
        let label = run_label(cfg, n, n);
        let modulus = grid_modulus(&model, &s)?;
        let envelope = InflationPolicy::Envelope {
            factor: cfg.inflation_factor,
        }
        .radius(&model, &s)?;
        let distances = min_distances(&s, &z, cfg.n_samples, cfg.seed)?;
        let e_raw = count_within(&distances, 0.0);
        let e_grid = count_within(&distances, modulus);
        let e_env = count_within(&distances, envelope);
        rows.push(ReportRow::new(
            "point-hit-raw",
            label.clone(),
            e_raw.p_hat,
            Check::Info,
        ));
        rows.push(ReportRow::new(
            "grid-modulus",
            label.clone(),
            modulus,
            Check::Info,
        ));
        rows.push(ReportRow::new(
            "point-hit-grid-scale",
            label.clone(),
            e_grid.p_hat,
            Check::Info,
        ));
        rows.push(ReportRow::new(
            "inflation-radius",
            label.clone(),
            envelope,
            Check::Info,
        ));
        rows.push(ReportRow::new(
            "point-hit-inflated",
            label,
            e_env.p_hat,
            Check::Info,
        ));
        raw.push(e_raw);
        grid_scale.push(e_grid);
    }
    let refinements = cfg
        .refinements
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let label = format!(
        "{base_label} grids=[{refinements}] n={} seed={}",
        cfg.n_samples, cfg.seed
    );
    rows.push(ReportRow::verdict(
        "point-hit-raw-trend",
        label.clone(),
        raw.windows(2).all(|w| w[1].hits <= w[0].hits),
        true,
    ));
    if rep.polar_points {
        rows.push(ReportRow::verdict(
            "point-hit-trend",
            label,
            grid_scale.len() >= 2 && grid_scale.windows(2).all(|w| w[1].hits < w[0].hits),
            true,
        ));
    }
    Ok(rows)
}
