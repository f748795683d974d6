use anisohit::potential::{
    capacity, hausdorff_upper, minimize_energy, CapacityOptions, PotentialKernel, TargetSet,
};
use anisohit::special::gamma;
use anisohit::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::config::ExperimentConfig;
use crate::report::{Check, ReportRow};

pub fn capacity_checks(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = vec![];
    let opts = CapacityOptions {
        n_cells: cfg.n_cells,
        ..CapacityOptions::default()
    };

    let s = cfg.riesz_order;
    if s > 0.0 && s < 1.0 {
        // Riesz-s capacity of [0, 1]: 1/(2^s W_s), W_s = √π Γ(1 + s/2) / (cos(πs/2) Γ((1 + s)/2)).
        let w = PI.sqrt() * gamma(1.0 + s / 2.0) / ((PI * s / 2.0).cos() * gamma((1.0 + s) / 2.0));
        let exact = 1.0 / (2f64.powf(s) * w);
        let kernel = PotentialKernel::riesz(s)?;
        let seg = TargetSet::segment_box(vec![0.0], vec![1.0]);
        let c = capacity(&kernel, &seg, opts)?.capacity;
        rows.push(ReportRow::new(
            "riesz-segment-capacity",
            format!("order={s} cells={}", cfg.n_cells),
            c,
            Check::Relative {
                reference: exact,
                tolerance: 1e-2,
            },
        ));
    }

    let kernel = PotentialKernel::riesz(1.0)?;
    let square = TargetSet::segment_box(vec![0.0, 0.0], vec![1.0, 1.0]);
    let base = capacity(&kernel, &square, opts)?.capacity;
    for lambda in [0.5, 2.0, 3.0] {
        let scaled = capacity(&kernel, &square.scaled(lambda), opts)?.capacity;
        rows.push(ReportRow::new(
            "riesz-homogeneity",
            format!("unit square order=1 lambda={lambda}"),
            scaled / (lambda * base),
            Check::Relative {
                reference: 1.0,
                tolerance: 1e-2,
            },
        ));
    }

    let nest = CapacityOptions {
        n_cells: 512,
        tol: 1e-6,
        ..CapacityOptions::default()
    };
    let kernel = PotentialKernel::riesz(0.7)?;
    let outer = capacity(&kernel, &TargetSet::segment_box(vec![0.0], vec![1.0]), nest)?;
    // Half the cells over half the segment, so the inner mesh is part of the outer one.
    let inner = capacity(
        &kernel,
        &TargetSet::segment_box(vec![0.0], vec![0.5]),
        CapacityOptions {
            n_cells: 256,
            ..nest
        },
    )?;
    let slack = outer.capacity * (outer.gap / outer.energy + inner.gap / inner.energy);
    rows.push(ReportRow::new(
        "capacity-nesting",
        "[0 0.5] inside [0 1] order=0.7 tol=1e-6",
        inner.capacity - outer.capacity,
        Check::AtMost(slack),
    ));
    let dust = TargetSet::CantorDust {
        level: 4,
        lo: vec![0.0],
        hi: vec![1.0],
    };
    let c_dust = capacity(&kernel, &dust, nest)?;
    let slack = outer.capacity * (outer.gap / outer.energy + c_dust.gap / c_dust.energy);
    rows.push(ReportRow::new(
        "capacity-nesting",
        "Cantor level 4 inside [0 1] order=0.7 tol=1e-6",
        c_dust.capacity - outer.capacity,
        Check::AtMost(slack),
    ));

    let pts = TargetSet::Points(vec![
        vec![0.0, 0.0, 0.0],
        vec![1.0, 2.0, 0.5],
        vec![-1.0, 0.0, 3.0],
    ]);
    rows.push(ReportRow::new(
        "point-set-capacity",
        "3 points in R^3 riesz order=0.5",
        capacity(&PotentialKernel::riesz(0.5)?, &pts, opts)?.capacity,
        Check::Within {
            reference: 0.0,
            tolerance: 0.0,
        },
    ));
    rows.push(ReportRow::new(
        "constant-kernel-capacity",
        "3 points in R^3 kernel=1",
        capacity(&PotentialKernel::constant(1.0), &pts, opts)?.capacity,
        Check::Within {
            reference: 1.0,
            tolerance: 1e-12,
        },
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for trial in 0..10 {
        let n = 4 + trial % 5;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        let k: Vec<f64> = (0..n * n)
            .map(|ij| {
                let (a, b) = (pts[ij / n], pts[ij % n]);
                (-3.0 * (a[0] - b[0]).hypot(a[1] - b[1])).exp()
            })
            .collect();
        let (_, energy, gap, _, _) = minimize_energy(&k, n, 1e-10, 1_000_000);
        let oracle = dense_oracle(&k, n)?;
        rows.push(ReportRow::new(
            "energy-vs-dense-oracle",
            format!("instance {trial} points={n} kernel=exp(-3r) gap={gap:.3e}"),
            energy - oracle,
            Check::Between(-1e-12 * oracle, gap + 1e-14),
        ));
    }
    Ok(rows)
}

/// Exact minimum of μᵀKμ over the simplex by enumerating supports and solving
/// the KKT system on each.
fn dense_oracle(k: &[f64], n: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let m = idx.len();
        let sub = nalgebra::DMatrix::from_fn(m, m, |a, b| k[idx[a] * n + idx[b]]);
        let Some(w) = sub.lu().solve(&nalgebra::DVector::from_element(m, 1.0)) else {
            continue;
        };
        let total: f64 = w.iter().sum();
        if total <= 0.0 || w.iter().any(|&x| x < -1e-14) {
            continue;
        }
        let mu: Vec<f64> = w.iter().map(|x| x / total).collect();
        let energy = 1.0 / total;
        let optimal = (0..n).all(|i| {
            let v: f64 = idx.iter().zip(&mu).map(|(&j, m)| k[i * n + j] * m).sum();
            v >= energy * (1.0 - 1e-10)
        });
        if optimal {
            best = best.min(energy);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Numerical("dense oracle found no KKT point".into()))
    }
}

pub fn hausdorff_checks(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut rows = vec![];
    let gamma = 2f64.ln() / 3f64.ln();
    let level = cfg.cantor_level.max(9);
    let set = TargetSet::CantorDust {
        level,
        lo: vec![0.0],
        hi: vec![1.0],
    };
    let ladder: Vec<f64> = (3..=8).map(|k| 3f64.powi(-k)).collect();
    for (k, p) in (3..=8).zip(hausdorff_upper(|r| r.powf(gamma), &set, &ladder)?) {
        rows.push(ReportRow::new(
            "cantor-premeasure-ratio",
            format!("level={level} eps=3^-{k} balls={}", p.n_balls),
            p.sum / 2f64.powf(gamma),
            Check::Between(0.5, 2.0),
        ));
    }

    let pts = TargetSet::Points(vec![vec![0.1, 0.2], vec![0.7, 0.7], vec![0.4, 0.9]]);
    let ladder: Vec<f64> = (1..=4).map(|k| 10f64.powi(-2 * k)).collect();
    let sums = hausdorff_upper(|r| r.powf(gamma), &pts, &ladder)?;
    for p in &sums {
        rows.push(ReportRow::new(
            "point-set-premeasure",
            format!("3 points in R^2 eps={:e} balls={}", p.eps, p.n_balls),
            p.sum,
            Check::Info,
        ));
    }
    let decreasing = sums.windows(2).all(|w| w[1].sum < w[0].sum);
    rows.push(ReportRow::verdict(
        "point-set-premeasure-decreasing",
        "3 points in R^2 eps 1e-2 to 1e-8",
        decreasing,
        true,
    ));
    rows.push(ReportRow::new(
        "point-set-premeasure-limit",
        "3 points in R^2 eps=1e-8",
        sums.last().map_or(f64::NAN, |p| p.sum),
        Check::AtMost(1e-3),
    ));
    Ok(rows)
}
