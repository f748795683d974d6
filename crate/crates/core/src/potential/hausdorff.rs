use super::target::TargetSet;
use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffPoint {
    pub eps: f64,
    pub n_balls: usize,
    /// Σ g(2ε) over the covering balls.
    pub sum: f64,
}

/// Upper estimates of the g-Hausdorff measure from coverings by ε-balls centred at
/// grid cells of side min(ε, 2ε/√D) that meet the set.
pub fn hausdorff_upper(
    g: impl Fn(f64) -> f64,
    set: &TargetSet,
    ladder: &[f64],
) -> Result<Vec<HausdorffPoint>> {
    set.validate()?;
    let dim = match set.ambient_dim() {
        Some(d) => d,
        None => {
            return Ok(ladder
                .iter()
                .map(|&eps| HausdorffPoint {
                    eps,
                    n_balls: 0,
                    sum: 0.0,
                })
                .collect())
        }
    };
    let mut out = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        if !(eps > 0.0 && eps.is_finite()) {
            return config(format!("covering radius {eps} must be positive"));
        }
        let side = eps.min(2.0 * eps / (dim as f64).sqrt());
        let n = set.occupied_cells(side)?.len();
        out.push(HausdorffPoint {
            eps,
            n_balls: n,
            sum: n as f64 * g(2.0 * eps),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_set_sums() {
        let gamma = 2f64.ln() / 3f64.ln();
        let set = TargetSet::CantorDust {
            level: 10,
            lo: vec![0.0],
            hi: vec![1.0],
        };
        let ladder: Vec<f64> = (3..=8).map(|k| 3f64.powi(-k)).collect();
        for p in hausdorff_upper(|r| r.powf(gamma), &set, &ladder).unwrap() {
            assert!((p.sum - 2f64.powf(gamma)).abs() < 1e-9, "{p:?}");
        }
    }
}
