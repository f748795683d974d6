use anisohit::potential::{
    capacity, hausdorff_upper, minimize_energy, CapacityOptions, PotentialKernel, TargetSet,
};
use anisohit::special::gamma;
use anisohit::{Error, Gauge, PairGauge};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn opts(n_cells: usize) -> CapacityOptions {
    CapacityOptions {
        n_cells,
        ..CapacityOptions::default()
    }
}

/// Exact minimum of μᵀKμ over the simplex by enumerating supports (KKT conditions).
fn dense_oracle(k: &[f64], n: usize) -> f64 {
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
    best
}

#[test]
fn frank_wolfe_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10 {
        let n = 4 + trial % 5;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        let k: Vec<f64> = (0..n * n)
            .map(|ij| {
                let (a, b) = (pts[ij / n], pts[ij % n]);
                let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                (-3.0 * r).exp()
            })
            .collect();
        let (_, energy, gap, _, converged) = minimize_energy(&k, n, 1e-10, 1_000_000);
        let oracle = dense_oracle(&k, n);
        assert!(converged);
        assert!(
            energy >= oracle * (1.0 - 1e-12) && energy - oracle <= gap + 1e-14,
            "{energy} {oracle} {gap}"
        );
    }
}

#[test]
fn point_set_energy_matches_dense_oracle() {
    let pts: Vec<Vec<f64>> = vec![
        vec![0.0, 0.0],
        vec![0.3, 0.0],
        vec![0.0, 0.5],
        vec![0.9, 0.9],
        vec![0.31, 0.02],
    ];
    let kernel = PotentialKernel::from_fn("exp", None, |r| (-2.0 * r).exp());
    let r = capacity(
        &kernel,
        &TargetSet::Points(pts.clone()),
        CapacityOptions {
            tol: 1e-10,
            ..Default::default()
        },
    )
    .unwrap();
    let n = pts.len();
    let k: Vec<f64> = (0..n * n)
        .map(|ij| {
            let (a, b) = (&pts[ij / n], &pts[ij % n]);
            kernel.eval(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
        })
        .collect();
    let oracle = dense_oracle(&k, n);
    assert!(r.energy >= oracle * (1.0 - 1e-12) && r.energy - oracle <= r.gap + 1e-14);
}

#[test]
fn point_sets_and_constant_kernel() {
    let pts = TargetSet::Points(vec![vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 0.5]]);
    assert_eq!(
        capacity(&PotentialKernel::riesz(0.5).unwrap(), &pts, opts(16))
            .unwrap()
            .capacity,
        0.0
    );
    assert!(
        (capacity(&PotentialKernel::constant(1.0), &pts, opts(16))
            .unwrap()
            .capacity
            - 1.0)
            .abs()
            < 1e-12
    );
    let cube = TargetSet::segment_box(vec![0.0; 3], vec![1.0; 3]);
    assert!(
        (capacity(&PotentialKernel::riesz(0.0).unwrap(), &cube, opts(64))
            .unwrap()
            .capacity
            - 1.0)
            .abs()
            < 1e-12
    );
    assert!(matches!(
        capacity(
            &PotentialKernel::constant(1.0),
            &TargetSet::Points(vec![]),
            opts(4)
        ),
        Err(Error::Domain(_))
    ));
}

#[test]
fn riesz_capacity_of_segment_converges_to_closed_form() {
    // Riesz-s capacity of [0, 1] for 0 < s < 1: 1/(2^s W_s),
    // W_s = √π Γ(1 + s/2) / (cos(πs/2) Γ((1 + s)/2)).
    let s = 0.5f64;
    let w = PI.sqrt() * gamma(1.0 + s / 2.0) / ((PI * s / 2.0).cos() * gamma((1.0 + s) / 2.0));
    let exact = 1.0 / (2f64.powf(s) * w);
    let kernel = PotentialKernel::riesz(s).unwrap();
    let seg = TargetSet::segment_box(vec![0.0], vec![1.0]);
    let caps: Vec<f64> = [64, 256, 1024]
        .iter()
        .map(|&n| capacity(&kernel, &seg, opts(n)).unwrap().capacity)
        .collect();
    let errs: Vec<f64> = caps.iter().map(|c| c - exact).collect();
    assert!(errs.iter().all(|&e| e > 0.0));
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    // Error decays like h^{1/2}: quartering h halves the error.
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 2.0).abs() < 0.35, "{ratio}");
    }
    assert!(errs[2] / exact < 5e-3);
}

#[test]
fn riesz_capacity_is_homogeneous() {
    let kernel = PotentialKernel::riesz(1.0).unwrap();
    let square = TargetSet::segment_box(vec![0.0, 0.0], vec![1.0, 1.0]);
    let base = capacity(&kernel, &square, opts(400)).unwrap().capacity;
    for lambda in [0.5, 2.0, 3.0] {
        let scaled = capacity(&kernel, &square.scaled(lambda), opts(400))
            .unwrap()
            .capacity;
        assert!((scaled / (lambda * base) - 1.0).abs() < 1e-2, "λ={lambda}");
    }
}

#[test]
fn capacity_is_monotone_under_nesting() {
    let kernel = PotentialKernel::riesz(0.7).unwrap();
    let options = CapacityOptions {
        n_cells: 512,
        tol: 1e-8,
        ..Default::default()
    };
    let outer = TargetSet::segment_box(vec![0.0], vec![1.0]);
    // Nested unions of cells of the same mesh, so the discretizations are nested too.
    let inner = TargetSet::segment_box(vec![0.0], vec![0.5]);
    let c_outer = capacity(&kernel, &outer, options).unwrap();
    let c_inner = capacity(
        &kernel,
        &inner,
        CapacityOptions {
            n_cells: 256,
            ..options
        },
    )
    .unwrap();
    let slack =
        c_outer.capacity * (c_outer.gap / c_outer.energy + c_inner.gap / c_inner.energy) + 1e-12;
    assert!(c_inner.capacity <= c_outer.capacity + slack);
    let dust = TargetSet::CantorDust {
        level: 4,
        lo: vec![0.0],
        hi: vec![1.0],
    };
    let c_dust = capacity(
        &kernel,
        &dust,
        CapacityOptions {
            n_cells: 512,
            ..options
        },
    )
    .unwrap();
    assert!(c_dust.capacity <= c_outer.capacity * (1.0 + 1e-6));
}

#[test]
fn gauge_kernel_capacity() {
    // Power gauges give a Riesz kernel of order −(D − d/ν).
    let dg = PairGauge::single(Gauge::power(0.5).unwrap(), 1, 3, 1.0).unwrap();
    let k = PotentialKernel::from_gauge(&dg).unwrap();
    assert_eq!(k.singularity(), Some(1.0));
    assert!((k.eval(0.25) - 4.0).abs() < 1e-12);
    let seg = TargetSet::segment_box(vec![0.0, 0.0], vec![0.5, 0.0]);
    assert_eq!(capacity(&k, &seg, opts(64)).unwrap().capacity, 0.0);
    let negative = PairGauge::single(Gauge::power(0.5).unwrap(), 1, 1, 1.0).unwrap();
    assert!(matches!(
        PotentialKernel::from_gauge(&negative),
        Err(Error::Config(_))
    ));
}

#[test]
fn hausdorff_cantor_and_points() {
    let gamma = 2f64.ln() / 3f64.ln();
    let set = TargetSet::CantorDust {
        level: 12,
        lo: vec![0.0],
        hi: vec![1.0],
    };
    let ladder: Vec<f64> = (3..=8).map(|k| 3f64.powi(-k)).collect();
    for p in hausdorff_upper(|r| r.powf(gamma), &set, &ladder).unwrap() {
        let ratio = p.sum / 2f64.powf(gamma);
        assert!((0.5..=2.0).contains(&ratio), "{p:?}");
    }
    let pts = TargetSet::Points(vec![vec![0.1, 0.2], vec![0.7, 0.7]]);
    let sums = hausdorff_upper(|r| r, &pts, &[1e-2, 1e-4, 1e-6]).unwrap();
    assert!(sums.iter().all(|p| p.n_balls <= 2 * 4));
    assert!(sums.last().unwrap().sum < 1e-4);
    let segment = TargetSet::segment_box(vec![0.0, 0.0], vec![1.0, 0.0]);
    for p in hausdorff_upper(|r| r, &segment, &[1e-2, 1e-3]).unwrap() {
        assert!((0.5..=4.0).contains(&p.sum), "{p:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_energy_not_above_uniform(seed in 0u64..1000, n in 3usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let k: Vec<f64> = (0..n * n).map(|ij| 1.0 / (1.0 + (pts[ij / n] - pts[ij % n]).abs())).collect();
        let (mu, energy, _, _, _) = minimize_energy(&k, n, 1e-9, 200_000);
        let uniform: f64 = k.iter().sum::<f64>() / (n * n) as f64;
        prop_assert!(energy <= uniform + 1e-12);
        prop_assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(mu.iter().all(|&m| m >= 0.0));
    }
}
