//! Compact target sets in ℝ^D and their discretizations.

use std::collections::HashSet;

use crate::error::{config, domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSet {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Axis-aligned box; degenerate axes (lo = hi) lower the intrinsic dimension.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Points(Vec<Vec<f64>>),
    /// Product of middle-third Cantor sets of the given level over the
    /// non-degenerate axes of the box.
    CantorDust {
        level: u32,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Union(Vec<TargetSet>),
}

/// A discretization cell: an axis-aligned box given by its center and side lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub center: Vec<f64>,
    pub widths: Vec<f64>,
}

impl Cell {
    /// Number of axes with positive width.
    pub fn intrinsic_dim(&self) -> usize {
        self.widths.iter().filter(|&&w| w > 0.0).count()
    }
}

const MAX_CELLS: usize = 20_000_000;

impl TargetSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        TargetSet::Ball { center, radius }
    }

    pub fn segment_box(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        TargetSet::Box { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            TargetSet::Points(p) => p.is_empty(),
            TargetSet::Union(parts) => parts.iter().all(|p| p.is_empty()),
            _ => false,
        }
    }

    /// Ambient dimension, if the set is non-empty.
    pub fn ambient_dim(&self) -> Option<usize> {
        match self {
            TargetSet::Ball { center, .. } => Some(center.len()),
            TargetSet::Box { lo, .. } | TargetSet::CantorDust { lo, .. } => Some(lo.len()),
            TargetSet::Points(p) => p.first().map(|x| x.len()),
            TargetSet::Union(parts) => parts.iter().find_map(|p| p.ambient_dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            TargetSet::Ball { center, radius } => {
                if center.is_empty() || !finite(center) || !(radius.is_finite() && *radius >= 0.0) {
                    return domain("ball needs a finite center and a finite radius >= 0");
                }
            }
            TargetSet::Box { lo, hi } | TargetSet::CantorDust { lo, hi, .. } => {
                if lo.is_empty() || lo.len() != hi.len() || !finite(lo) || !finite(hi) {
                    return domain("box corners must be finite and of equal dimension");
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return domain("box corners must satisfy lo <= hi");
                }
            }
            TargetSet::Points(pts) => {
                if pts.iter().any(|p| !finite(p)) {
                    return domain("points must be finite");
                }
                if let Some(first) = pts.first() {
                    if pts.iter().any(|p| p.len() != first.len()) {
                        return domain("points must share one dimension");
                    }
                }
            }
            TargetSet::Union(parts) => {
                for p in parts {
                    p.validate()?;
                }
                let dims: HashSet<usize> = parts.iter().filter_map(|p| p.ambient_dim()).collect();
                if dims.len() > 1 {
                    return domain("union members must share one dimension");
                }
            }
        }
        Ok(())
    }

    /// Uniformly scaled copy λA.
    pub fn scaled(&self, lambda: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| x * lambda).collect::<Vec<_>>();
        match self {
            TargetSet::Ball { center, radius } => TargetSet::Ball {
                center: s(center),
                radius: radius * lambda,
            },
            TargetSet::Box { lo, hi } => TargetSet::Box {
                lo: s(lo),
                hi: s(hi),
            },
            TargetSet::Points(p) => TargetSet::Points(p.iter().map(s).collect()),
            TargetSet::CantorDust { level, lo, hi } => TargetSet::CantorDust {
                level: *level,
                lo: s(lo),
                hi: s(hi),
            },
            TargetSet::Union(parts) => {
                TargetSet::Union(parts.iter().map(|p| p.scaled(lambda)).collect())
            }
        }
    }

    /// Boxes making up a Cantor dust of the given level.
    fn cantor_boxes(level: u32, lo: &[f64], hi: &[f64]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let active: Vec<usize> = (0..lo.len()).filter(|&i| hi[i] > lo[i]).collect();
        let count = 2f64.powi((level as usize * active.len()) as i32);
        if count > MAX_CELLS as f64 {
            return config(format!("Cantor dust of level {level} has too many boxes"));
        }
        // Left endpoints of level-k middle-third intervals on [0, 1].
        let mut starts = vec![0.0f64];
        let mut len = 1.0f64;
        for _ in 0..level {
            len /= 3.0;
            starts = starts.iter().flat_map(|&a| [a, a + 2.0 * len]).collect();
        }
        let mut boxes = vec![(lo.to_vec(), hi.to_vec())];
        for &axis in &active {
            let span = hi[axis] - lo[axis];
            boxes = boxes
                .into_iter()
                .flat_map(|(blo, bhi)| {
                    starts
                        .iter()
                        .map(|&a| {
                            let mut l = blo.clone();
                            let mut h = bhi.clone();
                            l[axis] = lo[axis] + span * a;
                            h[axis] = lo[axis] + span * (a + len);
                            (l, h)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        Ok(boxes)
    }

    /// Euclidean distance from `p` to the set; +∞ for the empty set.
    pub fn distance(&self, p: &[f64]) -> f64 {
        match self {
            TargetSet::Ball { center, radius } => (super::euclid(p, center) - radius).max(0.0),
            TargetSet::Box { lo, hi } => box_distance(p, lo, hi),
            TargetSet::Points(pts) => pts
                .iter()
                .map(|q| super::euclid(p, q))
                .fold(f64::INFINITY, f64::min),
            TargetSet::CantorDust { level, lo, hi } => Self::cantor_boxes(*level, lo, hi)
                .map(|b| {
                    b.iter()
                        .map(|(l, h)| box_distance(p, l, h))
                        .fold(f64::INFINITY, f64::min)
                })
                .unwrap_or(f64::NAN),
            TargetSet::Union(parts) => parts
                .iter()
                .map(|q| q.distance(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// A distance function that precomputes any internal structure once.
    pub fn distance_fn(&self) -> Result<Box<dyn Fn(&[f64]) -> f64 + Send + Sync>> {
        self.validate()?;
        Ok(match self {
            TargetSet::CantorDust { level, lo, hi } => {
                let boxes = Self::cantor_boxes(*level, lo, hi)?;
                Box::new(move |p: &[f64]| {
                    boxes
                        .iter()
                        .map(|(l, h)| box_distance(p, l, h))
                        .fold(f64::INFINITY, f64::min)
                })
            }
            TargetSet::Union(parts) => {
                let fs = parts
                    .iter()
                    .map(|q| q.distance_fn())
                    .collect::<Result<Vec<_>>>()?;
                Box::new(move |p: &[f64]| fs.iter().map(|f| f(p)).fold(f64::INFINITY, f64::min))
            }
            other => {
                let set = other.clone();
                Box::new(move |p: &[f64]| set.distance(p))
            }
        })
    }

    /// Splits the set into roughly `n_cells` cells (point sets and Cantor dusts may
    /// use more).
    pub fn cells(&self, n_cells: usize) -> Result<Vec<Cell>> {
        self.validate()?;
        if self.is_empty() {
            return domain("cannot discretize an empty set");
        }
        if n_cells == 0 {
            return config("n_cells must be positive");
        }
        match self {
            TargetSet::Ball { center, radius } => Ok(ball_cells(center, *radius, n_cells)),
            TargetSet::Box { lo, hi } => Ok(box_cells(lo, hi, n_cells)),
            TargetSet::Points(pts) => {
                let mut uniq: Vec<Vec<f64>> = Vec::new();
                for p in pts {
                    if !uniq.contains(p) {
                        uniq.push(p.clone());
                    }
                }
                Ok(uniq
                    .into_iter()
                    .map(|c| Cell {
                        widths: vec![0.0; c.len()],
                        center: c,
                    })
                    .collect())
            }
            TargetSet::CantorDust { level, lo, hi } => {
                let boxes = Self::cantor_boxes(*level, lo, hi)?;
                let per_box = n_cells.div_ceil(boxes.len()).max(1);
                Ok(boxes
                    .iter()
                    .flat_map(|(l, h)| box_cells(l, h, per_box))
                    .collect())
            }
            TargetSet::Union(parts) => {
                let parts: Vec<&TargetSet> = parts.iter().filter(|p| !p.is_empty()).collect();
                let share = (n_cells / parts.len()).max(1);
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.cells(share)?);
                }
                Ok(out)
            }
        }
    }

    /// Integer indices of the grid cells `[k s, (k+1) s)` (anchored at the origin)
    /// that meet the set. Boundary contacts within `1e-9·s` are ignored.
    pub fn occupied_cells(&self, side: f64) -> Result<HashSet<Vec<i64>>> {
        self.validate()?;
        if !(side > 0.0 && side.is_finite()) {
            return config("cell side must be positive");
        }
        let tol = 1e-9 * side;
        let mut out = HashSet::new();
        let add_box = |lo: &[f64], hi: &[f64], out: &mut HashSet<Vec<i64>>| -> Result<()> {
            let ranges: Vec<(i64, i64)> = lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| {
                    let a = ((l + tol) / side).floor() as i64;
                    let b = ((h - tol) / side).floor().max(a as f64) as i64;
                    (a, b)
                })
                .collect();
            let total: f64 = ranges.iter().map(|(a, b)| (b - a + 1) as f64).product();
            if total + out.len() as f64 > MAX_CELLS as f64 {
                return config("covering needs too many cells; use a coarser scale");
            }
            for_each_index(&ranges, |idx| {
                out.insert(idx.to_vec());
            });
            Ok(())
        };
        match self {
            TargetSet::Ball { center, radius } => {
                let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
                let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
                let mut cand = HashSet::new();
                add_box(&lo, &hi, &mut cand)?;
                for idx in cand {
                    let cl: Vec<f64> = idx.iter().map(|&k| k as f64 * side).collect();
                    let ch: Vec<f64> = cl.iter().map(|v| v + side).collect();
                    if box_distance(center, &cl, &ch) <= *radius - tol || *radius == 0.0 {
                        out.insert(idx);
                    }
                }
            }
            TargetSet::Box { lo, hi } => add_box(lo, hi, &mut out)?,
            TargetSet::Points(pts) => {
                for p in pts {
                    out.insert(p.iter().map(|v| (v / side).floor() as i64).collect());
                }
            }
            TargetSet::CantorDust { level, lo, hi } => {
                for (l, h) in Self::cantor_boxes(*level, lo, hi)? {
                    add_box(&l, &h, &mut out)?;
                }
            }
            TargetSet::Union(parts) => {
                for p in parts {
                    out.extend(p.occupied_cells(side)?);
                }
            }
        }
        Ok(out)
    }
}

fn box_distance(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    p.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| {
            let d = if x < l {
                l - x
            } else if x > h {
                x - h
            } else {
                0.0
            };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn for_each_index(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&idx);
        let mut axis = 0;
        loop {
            if axis == ranges.len() {
                return;
            }
            if idx[axis] < ranges[axis].1 {
                idx[axis] += 1;
                break;
            }
            idx[axis] = ranges[axis].0;
            axis += 1;
        }
    }
}

fn box_cells(lo: &[f64], hi: &[f64], n_cells: usize) -> Vec<Cell> {
    let spans: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
    let active: Vec<usize> = (0..spans.len()).filter(|&i| spans[i] > 0.0).collect();
    if active.is_empty() {
        return vec![Cell {
            center: lo.to_vec(),
            widths: vec![0.0; lo.len()],
        }];
    }
    let volume: f64 = active.iter().map(|&i| spans[i]).product();
    let h = (volume / n_cells as f64).powf(1.0 / active.len() as f64);
    let counts: Vec<i64> = (0..spans.len())
        .map(|i| {
            if spans[i] > 0.0 {
                (spans[i] / h).round().max(1.0) as i64
            } else {
                1
            }
        })
        .collect();
    let widths: Vec<f64> = (0..spans.len())
        .map(|i| spans[i] / counts[i] as f64)
        .collect();
    let ranges: Vec<(i64, i64)> = counts.iter().map(|&c| (0, c - 1)).collect();
    let mut out = Vec::new();
    for_each_index(&ranges, |idx| {
        let center = (0..spans.len())
            .map(|i| lo[i] + widths[i] * (idx[i] as f64 + 0.5))
            .collect();
        out.push(Cell {
            center,
            widths: widths.clone(),
        });
    });
    out
}

fn ball_cells(center: &[f64], radius: f64, n_cells: usize) -> Vec<Cell> {
    let dim = center.len();
    if radius == 0.0 {
        return vec![Cell {
            center: center.to_vec(),
            widths: vec![0.0; dim],
        }];
    }
    let unit_ball =
        std::f64::consts::PI.powf(dim as f64 / 2.0) / crate::special::gamma(dim as f64 / 2.0 + 1.0);
    let volume = unit_ball * radius.powi(dim as i32);
    let h = (volume / n_cells as f64).powf(1.0 / dim as f64);
    let k = (radius / h).ceil() as i64;
    let ranges = vec![(-k, k - 1); dim];
    let mut out = Vec::new();
    for_each_index(&ranges, |idx| {
        let c: Vec<f64> = idx
            .iter()
            .zip(center)
            .map(|(&i, &x)| x + h * (i as f64 + 0.5))
            .collect();
        if super::euclid(&c, center) <= radius {
            out.push(Cell {
                center: c,
                widths: vec![h; dim],
            });
        }
    });
    if out.is_empty() {
        out.push(Cell {
            center: center.to_vec(),
            widths: vec![0.0; dim],
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_structure() {
        let c = TargetSet::CantorDust {
            level: 3,
            lo: vec![0.0],
            hi: vec![1.0],
        };
        let cells = c.cells(8).unwrap();
        assert_eq!(cells.len(), 8);
        assert!((cells[1].center[0] - (2.0 / 27.0 + 1.0 / 54.0)).abs() < 1e-15);
        assert!((c.distance(&[0.5]) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.occupied_cells(1.0 / 27.0).unwrap().len(), 8);
        assert_eq!(c.occupied_cells(1.0 / 3.0).unwrap().len(), 2);
    }

    #[test]
    fn box_and_ball_discretizations() {
        let b = TargetSet::Box {
            lo: vec![0.0, 0.0, 1.0],
            hi: vec![2.0, 1.0, 1.0],
        };
        let cells = b.cells(50).unwrap();
        assert_eq!(cells.len(), 50);
        assert_eq!(cells[0].intrinsic_dim(), 2);
        let ball = TargetSet::ball(vec![0.0, 0.0], 1.0);
        let n = ball.cells(400).unwrap().len();
        assert!((300..500).contains(&n), "{n}");
        assert_eq!(ball.distance(&[3.0, 4.0]), 4.0);
    }

    #[test]
    fn invalid_sets() {
        assert!(TargetSet::ball(vec![f64::INFINITY], 1.0)
            .validate()
            .is_err());
        assert!(TargetSet::Box {
            lo: vec![1.0],
            hi: vec![0.0]
        }
        .validate()
        .is_err());
        assert!(TargetSet::Points(vec![]).cells(4).is_err());
        assert_eq!(TargetSet::Points(vec![]).distance(&[0.0]), f64::INFINITY);
    }
}
