use anisohit::heat::{HeatModel, HeatParams};
use anisohit::mc::{
    estimate_hit_prob, hit_indicator, hit_prob_ladder, min_distances, small_ball_slope, Estimate,
    FieldSampler, InflationPolicy, SampleGrid,
};
use anisohit::potential::TargetSet;
use anisohit::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(state_dim: u32) -> HeatModel {
    HeatModel::new(HeatParams {
        hurst: 0.75,
        alpha: 0.0,
        d: 1,
        state_dim,
        t0: 0.5,
        t_max: 1.5,
        half_width: 1.0,
    })
    .unwrap()
}

fn sampler(m: &HeatModel, n_t: usize, n_x: usize) -> FieldSampler {
    FieldSampler::new(m, SampleGrid::uniform(m, n_t, n_x).unwrap()).unwrap()
}

#[test]
fn grid_validation() {
    let m = model(2);
    assert!(matches!(
        SampleGrid::uniform(&m, 65, 64),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        SampleGrid::new(&m, vec![0.1], vec![vec![0.0]]),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        SampleGrid::new(&m, vec![1.0], vec![vec![1.5]]),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        SampleGrid::new(&m, vec![1.0, 0.9], vec![vec![0.0]]),
        Err(Error::Config(_))
    ));
    let g = SampleGrid::uniform(&m, 64, 64).unwrap();
    assert_eq!(g.len(), 4096);
    let (dt, dx) = g.spacing();
    assert!((dt - 1.0 / 63.0).abs() < 1e-12 && (dx - 2.0 / 63.0).abs() < 1e-12);
}

#[test]
fn marginal_moments_on_every_grid_point() {
    let m = model(1);
    let s = sampler(&m, 4, 4);
    let n = 10_000;
    let grid = s.grid().clone();
    let samples: Vec<Vec<f64>> = (0..n).map(|r| s.sample(5, r as u64).values).collect();
    for p in 0..grid.len() {
        let var = m.variance(grid.point(p).0).unwrap();
        let mean = samples.iter().map(|v| v[p]).sum::<f64>() / n as f64;
        let second = samples.iter().map(|v| v[p] * v[p]).sum::<f64>() / n as f64;
        assert!(
            mean.abs() <= 4.0 * (var / n as f64).sqrt(),
            "point {p}: mean {mean}"
        );
        // SE of the second moment of a centred Gaussian: var·√(2/n).
        assert!(
            (second - var).abs() <= 3.0 * var * (2.0 / n as f64).sqrt(),
            "point {p}: {second} vs {var}"
        );
    }
}

#[test]
fn correlation_of_distant_sites() {
    let m = model(1);
    let grid = SampleGrid::new(&m, vec![1.0], vec![vec![-1.0], vec![1.0]]).unwrap();
    let s = FieldSampler::new(&m, grid).unwrap();
    let n = 10_000;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for r in 0..n {
        let v = s.sample(9, r).values;
        sxy += v[0] * v[1];
        sxx += v[0] * v[0];
        syy += v[1] * v[1];
    }
    let rho_hat = sxy / (sxx * syy).sqrt();
    let rho = m.covariance_at_lag(1.0, 1.0, 2.0).unwrap() / m.variance(1.0).unwrap();
    let se = (1.0 - rho * rho) / (n as f64).sqrt();
    assert!((rho_hat - rho).abs() <= 3.0 * se, "{rho_hat} vs {rho}");
}

#[test]
fn components_are_independent_draws() {
    let m = model(3);
    let s = sampler(&m, 2, 2);
    let a = s.sample(1, 0);
    let b = s.sample(1, 0);
    assert_eq!(a, b);
    assert_ne!(a.point(0)[0], a.point(0)[1]);
    assert_ne!(s.sample(1, 1).values, a.values);
    assert_ne!(s.sample(2, 0).values, a.values);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let m = model(2);
    let s = sampler(&m, 8, 8);
    let target = TargetSet::ball(vec![0.0, 0.0], 0.2);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| min_distances(&s, &target, 300, 17).unwrap())
    };
    let one = run(1);
    let three = run(3);
    assert!(one
        .iter()
        .zip(&three)
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn trivial_targets() {
    let m = model(2);
    let s = sampler(&m, 4, 4);
    let huge = TargetSet::segment_box(vec![-1e6, -1e6], vec![1e6, 1e6]);
    let far = TargetSet::ball(vec![1e3, 1e3], 1.0);
    let sample = s.sample(3, 0);
    assert!(hit_indicator(&sample, &huge, 0.0).unwrap());
    assert!(!hit_indicator(&sample, &far, 0.0).unwrap());
    assert!(hit_indicator(&sample, &far, 2e3).unwrap());

    let all = estimate_hit_prob(&m, &s, &huge, 200, 1, InflationPolicy::Fixed(0.0)).unwrap();
    assert_eq!(all.raw.p_hat, 1.0);
    let empty = TargetSet::Union(vec![]);
    assert!(estimate_hit_prob(&m, &s, &empty, 200, 1, InflationPolicy::default()).is_err());
    let none = estimate_hit_prob(&m, &s, &far, 200, 1, InflationPolicy::default()).unwrap();
    assert_eq!(none.raw.p_hat, 0.0);
    assert!(matches!(
        estimate_hit_prob(&m, &s, &huge, 99, 1, InflationPolicy::default()),
        Err(Error::Config(_))
    ));
}

#[test]
fn hitting_is_monotone_in_the_target() {
    let m = model(2);
    let s = sampler(&m, 8, 8);
    let radii = [0.05, 0.1, 0.2, 0.4, 0.8];
    let est =
        hit_prob_ladder(&s, &TargetSet::Points(vec![vec![0.0, 0.0]]), &radii, 500, 4).unwrap();
    assert!(est.windows(2).all(|w| w[0].hits <= w[1].hits));
    let small = TargetSet::ball(vec![0.3, 0.0], 0.1);
    let big = TargetSet::Union(vec![small.clone(), TargetSet::ball(vec![-0.5, 0.2], 0.2)]);
    let a = estimate_hit_prob(&m, &s, &small, 500, 4, InflationPolicy::default()).unwrap();
    let b = estimate_hit_prob(&m, &s, &big, 500, 4, InflationPolicy::default()).unwrap();
    assert!(a.raw.hits <= b.raw.hits && a.inflated.hits <= b.inflated.hits);
    assert!(a.raw.hits <= a.inflated.hits && a.inflation > 0.0);
}

#[test]
fn wilson_interval_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let reps = 200;
    let mut covered = 0;
    for _ in 0..reps {
        let hits = (0..100).filter(|_| rng.random_bool(0.3)).count();
        let e = Estimate::from_counts(hits, 100);
        assert!(e.ci_lo <= e.p_hat && e.p_hat <= e.ci_hi);
        covered += usize::from(e.ci_lo <= 0.3 && 0.3 <= e.ci_hi);
    }
    assert!(
        covered as f64 >= 0.9 * reps as f64,
        "coverage {covered}/{reps}"
    );
    let wide = Estimate::from_counts(30, 100);
    let narrow = Estimate::from_counts(3000, 10_000);
    let ratio = (wide.ci_hi - wide.ci_lo) / (narrow.ci_hi - narrow.ci_lo);
    assert!((ratio - 10.0).abs() < 0.5);
}

#[test]
fn small_ball_guards() {
    let m = model(2);
    let s = sampler(&m, 4, 4);
    let r = small_ball_slope(&s, &[0.0, 0.0], &[0.1, 0.2, 0.4], 200, 1);
    assert!(matches!(r, Err(Error::Config(_))));
    let r = small_ball_slope(&s, &[0.0, 0.0], &[1e-9, 2e-9, 4e-9, 8e-9], 200, 1);
    assert!(matches!(r, Err(Error::InsufficientResolution(_))));
    let fit = small_ball_slope(&s, &[0.0, 0.0], &[0.05, 0.1, 0.2, 0.4], 2000, 1).unwrap();
    assert!(fit.slope > 0.0 && fit.se > 0.0 && fit.se.is_finite());
}

#[test]
fn mean_offset_shifts_samples() {
    let m = model(2);
    let s = sampler(&m, 2, 2);
    let shifted = s.clone().with_mean(5.0);
    let a = s.sample(8, 3);
    let b = shifted.sample(8, 3);
    assert!(a
        .values
        .iter()
        .zip(&b.values)
        .all(|(x, y)| (y - x - 5.0).abs() < 1e-12));
}
