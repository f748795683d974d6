//! Exact Gaussian sampling of the D-component heat field on a space-time grid.

use std::collections::HashMap;

use nalgebra::{DMatrix, DMatrixView};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{config, Error, Result};
use crate::heat::{distance, HeatModel};

pub const MAX_GRID_POINTS: usize = 4096;

/// Product grid `times × sites`; point index = time index · #sites + site index.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    times: Vec<f64>,
    sites: Vec<Vec<f64>>,
}

impl SampleGrid {
    pub fn new(model: &HeatModel, times: Vec<f64>, sites: Vec<Vec<f64>>) -> Result<Self> {
        let p = model.params();
        if times.is_empty() || sites.is_empty() {
            return config("grid needs at least one time and one site");
        }
        if times.len() * sites.len() > MAX_GRID_POINTS {
            return config(format!(
                "grid has {} points; at most {MAX_GRID_POINTS} are supported",
                times.len() * sites.len()
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return config("grid times must be strictly increasing");
        }
        let slack = 1e-12;
        if times[0] < p.t0 * (1.0 - slack) || times[times.len() - 1] > p.t_max * (1.0 + slack) {
            return config("grid times must lie in [t0, T]");
        }
        let m = p.half_width * (1.0 + slack);
        if sites
            .iter()
            .any(|s| s.len() != p.d as usize || s.iter().any(|v| !(v.abs() <= m)))
        {
            return config("grid sites must lie in [-M, M]^d");
        }
        Ok(Self { times, sites })
    }

    /// `n_t` equally spaced times on [t0, T] and an `n_x`-per-axis lattice on [−M, M]^d.
    pub fn uniform(model: &HeatModel, n_t: usize, n_x: usize) -> Result<Self> {
        let p = model.params();
        if n_t == 0 || n_x == 0 {
            return config("grid sizes must be positive");
        }
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        };
        let times = if n_t == 1 {
            vec![p.t_max]
        } else {
            lin(p.t0, p.t_max, n_t)
        };
        let axis = lin(-p.half_width, p.half_width, n_x);
        let mut sites = vec![vec![]];
        for _ in 0..p.d {
            sites = sites
                .into_iter()
                .flat_map(|s| axis.iter().map(move |&a| [s.clone(), vec![a]].concat()))
                .collect();
        }
        Self::new(model, times, sites)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.times.len() * self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (time, site) of a point index.
    pub fn point(&self, index: usize) -> (f64, &[f64]) {
        let s = self.sites.len();
        (self.times[index / s], &self.sites[index % s])
    }

    /// Largest gap between consecutive times and largest nearest-neighbour
    /// distance between sites (0 when there is a single time or site).
    pub fn spacing(&self) -> (f64, f64) {
        let dt = self
            .times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        let mut dx = 0.0f64;
        if self.sites.len() > 1 {
            for (i, a) in self.sites.iter().enumerate() {
                let nearest = self
                    .sites
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, b)| distance(a, b))
                    .fold(f64::INFINITY, f64::min);
                dx = dx.max(nearest);
            }
        }
        (dt, dx)
    }
}

/// One replicate of the field: `values[c * n_points + p]` is component `c` at point `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub values: Vec<f64>,
    pub n_points: usize,
    pub state_dim: usize,
    pub seed: u64,
    pub replicate: u64,
}

impl FieldSample {
    pub fn point(&self, p: usize) -> Vec<f64> {
        (0..self.state_dim)
            .map(|c| self.values[c * self.n_points + p])
            .collect()
    }
}

/// Cholesky factor of the grid covariance, shared by all replicates.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    grid: SampleGrid,
    state_dim: usize,
    factor: DMatrix<f64>,
    jitter: f64,
    mean: f64,
}

const BLOCK: usize = 256;
/// Replicates drawn per batch; fixed so results do not depend on scheduling.
pub(crate) const BATCH: usize = 128;

/// Generator for one (seed, component) pair; replicate r reads stream r.
fn component_rng(seed: u64, component: usize, replicate: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(component as u64).to_le_bytes());
    key[16..].copy_from_slice(b"heat-field-draws");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replicate);
    rng
}

impl FieldSampler {
    pub fn new(model: &HeatModel, grid: SampleGrid) -> Result<Self> {
        let cov = covariance_matrix(model, &grid)?;
        let max_diag = (0..cov.nrows()).map(|i| cov[(i, i)]).fold(0.0, f64::max);
        for rel in [0.0, 1e-10, 1e-9] {
            let mut m = cov.clone();
            let jitter = rel * max_diag;
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
            if let Some(ch) = m.cholesky() {
                return Ok(Self {
                    grid,
                    state_dim: model.params().state_dim as usize,
                    factor: ch.unpack(),
                    jitter,
                    mean: 0.0,
                });
            }
        }
        Err(Error::Numerical(
            "grid covariance is not positive definite after jitter".into(),
        ))
    }

    /// Adds a constant to every component (a non-centred field).
    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = mean;
        self
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    /// Diagonal jitter added before factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> FieldSample {
        let z = self.sample_block(seed, replicate, 1);
        FieldSample {
            values: z.as_slice().to_vec(),
            n_points: self.grid.len(),
            state_dim: self.state_dim,
            seed,
            replicate,
        }
    }

    /// Draws `count` consecutive replicates starting at `first`. Column
    /// `b·D + c` of the result holds component `c` of replicate `first + b`.
    pub(crate) fn sample_block(&self, seed: u64, first: u64, count: usize) -> DMatrix<f64> {
        let n = self.grid.len();
        let cols = count * self.state_dim;
        let mut xi = DMatrix::<f64>::zeros(n, cols);
        xi.as_mut_slice()
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(col, out)| {
                let replicate = first + (col / self.state_dim) as u64;
                let mut rng = component_rng(seed, col % self.state_dim, replicate);
                for v in out.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
            });
        let mut z = lower_times(&self.factor, &xi);
        if self.mean != 0.0 {
            z.add_scalar_mut(self.mean);
        }
        z
    }
}

/// L·X for lower-triangular L, skipping the zero blocks above the diagonal.
fn lower_times(l: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let starts: Vec<usize> = (0..n).step_by(BLOCK).collect();
    let blocks: Vec<DMatrix<f64>> = starts
        .par_iter()
        .map(|&i0| {
            let bi = BLOCK.min(n - i0);
            let mut out = DMatrix::<f64>::zeros(bi, x.ncols());
            let width = i0 + bi;
            let lv: DMatrixView<f64> = l.view((i0, 0), (bi, width));
            out.gemm(1.0, &lv, &x.rows(0, width), 0.0);
            out
        })
        .collect();
    let mut z = DMatrix::<f64>::zeros(n, x.ncols());
    for (&i0, b) in starts.iter().zip(blocks) {
        z.rows_mut(i0, b.nrows()).copy_from(&b);
    }
    z
}

/// Grid covariance, evaluating each (time pair, spatial lag) combination once.
fn covariance_matrix(model: &HeatModel, grid: &SampleGrid) -> Result<DMatrix<f64>> {
    let sites = grid.sites();
    let ns = sites.len();
    let nt = grid.times().len();
    let mut lag_of = vec![0usize; ns * ns];
    let mut lags: Vec<f64> = Vec::new();
    let mut index: HashMap<i64, usize> = HashMap::new();
    let scale = model.spatial_diameter();
    for i in 0..ns {
        for j in 0..ns {
            let r = distance(&sites[i], &sites[j]);
            let key = (r / scale * 2f64.powi(40)).round() as i64;
            let k = *index.entry(key).or_insert_with(|| {
                lags.push(r);
                lags.len() - 1
            });
            lag_of[i * ns + j] = k;
        }
    }
    let times = grid.times();
    let nl = lags.len();
    let tasks: Vec<(usize, usize, usize)> = (0..nt)
        .flat_map(|a| (a..nt).flat_map(move |b| (0..nl).map(move |k| (a, b, k))))
        .collect();
    let values: Vec<f64> = tasks
        .par_iter()
        .map(|&(a, b, k)| model.covariance_at_lag(times[a], times[b], lags[k]))
        .collect::<Result<_>>()?;
    let row_offset: Vec<usize> = (0..nt).map(|a| (0..a).map(|r| nt - r).sum()).collect();
    let table = |a: usize, b: usize, k: usize| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        values[(row_offset[a] + b - a) * nl + k]
    };
    let n = nt * ns;
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            let (a, i) = (p / ns, p % ns);
            let (b, j) = (q / ns, q % ns);
            cov[(p, q)] = table(a, b, lag_of[i * ns + j]);
        }
    }
    Ok(cov)
}
