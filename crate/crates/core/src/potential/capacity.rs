//! Energy-minimizing probability measures on discretized target sets.
//!
//! The set is split into cells; the energy matrix has the kernel evaluated at
//! cell-center distances off the diagonal and the exact cell self-energy on the
//! diagonal. The energy μᵀKμ is minimized over the probability simplex with an
//! away-step Frank–Wolfe method; capacity is the reciprocal of the minimum.

use rayon::prelude::*;

use super::kernel::PotentialKernel;
use super::target::{Cell, TargetSet};
use crate::error::{config, Error, Result};
use crate::quadrature::TanhSinh;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Largest cell side length.
    pub cell_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub capacity: f64,
    pub energy: f64,
    /// Frank–Wolfe duality gap at termination.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub minimizer: GridMeasure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityOptions {
    pub n_cells: usize,
    /// Stop once gap ≤ tol·energy.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            n_cells: 256,
            tol: 1e-6,
            max_iter: 200_000,
        }
    }
}

/// Mean of k(|X − Y|) for X, Y independent and uniform on the cell.
pub fn cell_self_energy(kernel: &PotentialKernel, cell: &Cell) -> Result<f64> {
    let widths: Vec<f64> = cell.widths.iter().copied().filter(|&w| w > 0.0).collect();
    if !kernel.integrable_in_dim(widths.len()) {
        return Ok(f64::INFINITY);
    }
    if widths.is_empty() {
        return Ok(kernel.eval(0.0));
    }
    // The coordinate differences are independent with triangular densities
    // (w − |δ|)/w² on [−w, w]; fold to the positive orthant.
    let rule = TanhSinh {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        max_level: 10,
    };
    match widths.len() {
        1 => {
            let w = widths[0];
            let r = rule.integrate(|x| kernel.eval(x) * 2.0 * (w - x) / (w * w), 0.0, w)?;
            Ok(r.value)
        }
        2 => {
            let (a, b) = (widths[0], widths[1]);
            // Polar coordinates absorb the singularity at the origin; the
            // diagonal angle splits the rectangle into two triangles.
            let radial = |theta: f64, rho_max: f64| -> f64 {
                let (sin, cos) = theta.sin_cos();
                let f = |rho: f64| match rho {
                    0.0 => 0.0,
                    _ => kernel.eval(rho) * (a - rho * cos) * (b - rho * sin) * rho,
                };
                rule.integrate(f, 0.0, rho_max)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            };
            let diag = b.atan2(a);
            let lower = rule.integrate(|th| radial(th, a / th.cos()), 0.0, diag)?;
            let upper = rule.integrate(
                |th| radial(th, b / th.sin()),
                diag,
                std::f64::consts::FRAC_PI_2,
            )?;
            Ok((lower.value + upper.value) * 4.0 / (a * a * b * b))
        }
        m => {
            // Quasi-Monte Carlo over the product of triangular laws (inverse CDF).
            const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
            if m > PRIMES.len() {
                return Err(Error::Unsupported(format!(
                    "self-energy of {m}-dimensional cells"
                )));
            }
            let n = 1 << 14;
            let mut sum = 0.0;
            for i in 1..=n {
                let mut r2 = 0.0;
                for (k, &w) in widths.iter().enumerate() {
                    let u = radical_inverse(i as u64, PRIMES[k]);
                    let delta = w * (1.0 - (1.0 - u).sqrt());
                    r2 += delta * delta;
                }
                sum += kernel.eval(r2.sqrt());
            }
            Ok(sum / n as f64)
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Energy matrix on the finite-energy cells, returned row-major with the
/// indices of the retained cells.
fn energy_matrix(kernel: &PotentialKernel, cells: &[Cell]) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut shapes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut diag = Vec::with_capacity(cells.len());
    for c in cells {
        let v = match shapes.iter().find(|(w, _)| *w == c.widths) {
            Some((_, v)) => *v,
            None => {
                let v = cell_self_energy(kernel, c)?;
                shapes.push((c.widths.clone(), v));
                v
            }
        };
        diag.push(v);
    }
    let keep: Vec<usize> = (0..cells.len()).filter(|&i| diag[i].is_finite()).collect();
    let n = keep.len();
    let rows: Vec<Result<Vec<f64>>> = keep
        .par_iter()
        .map(|&i| {
            keep.iter()
                .map(|&j| {
                    if i == j {
                        return Ok(diag[i]);
                    }
                    let v = kernel.eval(super::euclid(&cells[i].center, &cells[j].center));
                    if v.is_finite() && v >= 0.0 {
                        Ok(v)
                    } else {
                        Err(Error::Kernel(format!(
                            "kernel value {v} between distinct cells"
                        )))
                    }
                })
                .collect()
        })
        .collect();
    let mut k = Vec::with_capacity(n * n);
    for r in rows {
        k.extend(r?);
    }
    Ok((keep, k))
}

/// Minimizes μᵀKμ over the probability simplex. Returns (weights, energy, gap,
/// iterations, converged).
pub fn minimize_energy(
    k: &[f64],
    n: usize,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, f64, usize, bool) {
    let col = |j: usize| &k[j * n..(j + 1) * n];
    let mut mu = vec![1.0 / n as f64; n];
    let recompute = |mu: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| col(i).iter().zip(mu).map(|(a, b)| a * b).sum())
            .collect()
    };
    let mut kmu = recompute(&mu);
    let mut gap = f64::INFINITY;
    let mut energy = 0.0;
    for it in 0..max_iter {
        if it % 1000 == 999 {
            kmu = recompute(&mu);
        }
        energy = mu.iter().zip(&kmu).map(|(a, b)| a * b).sum::<f64>();
        let (s, ks) =
            kmu.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
            );
        let (a, ka) = kmu.iter().enumerate().filter(|(i, _)| mu[*i] > 0.0).fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
        gap = 2.0 * (energy - ks);
        if gap <= tol * energy {
            return (mu, energy, gap.max(0.0), it, true);
        }
        let away_gain = 2.0 * (ka - energy);
        if gap >= away_gain {
            // Toward vertex s: μ ← (1 − γ)μ + γ e_s.
            let curv = k[s * n + s] - 2.0 * ks + energy;
            let gamma = if curv > 0.0 {
                (gap / (2.0 * curv)).min(1.0)
            } else {
                1.0
            };
            for (m, v) in mu.iter_mut().zip(kmu.iter_mut()) {
                *m *= 1.0 - gamma;
                *v *= 1.0 - gamma;
            }
            mu[s] += gamma;
            for (v, c) in kmu.iter_mut().zip(col(s)) {
                *v += gamma * c;
            }
        } else {
            // Away from vertex a: μ ← (1 + γ)μ − γ e_a.
            let gamma_max = mu[a] / (1.0 - mu[a]);
            let curv = energy - 2.0 * ka + k[a * n + a];
            let gamma = if curv > 0.0 {
                (away_gain / (2.0 * curv)).min(gamma_max)
            } else {
                gamma_max
            };
            for (m, v) in mu.iter_mut().zip(kmu.iter_mut()) {
                *m *= 1.0 + gamma;
                *v *= 1.0 + gamma;
            }
            mu[a] -= gamma;
            if gamma == gamma_max {
                mu[a] = 0.0;
            }
            for (v, c) in kmu.iter_mut().zip(col(a)) {
                *v -= gamma * c;
            }
        }
    }
    (mu, energy, gap, max_iter, false)
}

/// Capacity 1 / inf_μ ∫∫ k dμ dμ of the target set.
pub fn capacity(
    kernel: &PotentialKernel,
    set: &TargetSet,
    options: CapacityOptions,
) -> Result<CapacityResult> {
    if set.is_empty() {
        return Err(Error::Domain("capacity of an empty set".into()));
    }
    if !(options.tol > 0.0) || options.max_iter == 0 {
        return config("capacity tolerance and iteration budget must be positive");
    }
    let cells = set.cells(options.n_cells)?;
    let cell_width = cells
        .iter()
        .flat_map(|c| c.widths.iter().copied())
        .fold(0.0, f64::max);
    let (keep, k) = energy_matrix(kernel, &cells)?;
    if keep.is_empty() {
        // Every cell carries infinite self-energy: the set is polar for this kernel.
        return Ok(CapacityResult {
            capacity: 0.0,
            energy: f64::INFINITY,
            gap: 0.0,
            iterations: 0,
            converged: true,
            minimizer: GridMeasure {
                atoms: vec![],
                weights: vec![],
                cell_width,
            },
        });
    }
    let n = keep.len();
    let (weights, energy, gap, iterations, converged) =
        minimize_energy(&k, n, options.tol, options.max_iter);
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::Numerical(format!(
            "minimal energy {energy} is not positive and finite"
        )));
    }
    Ok(CapacityResult {
        capacity: 1.0 / energy,
        energy,
        gap,
        iterations,
        converged,
        minimizer: GridMeasure {
            atoms: keep.iter().map(|&i| cells[i].center.clone()).collect(),
            weights,
            cell_width,
        },
    })
}
