/// Binomial proportion with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p_hat: f64,
    pub n: usize,
    pub hits: usize,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

impl Estimate {
    pub fn from_counts(hits: usize, n: usize) -> Self {
        assert!(n > 0 && hits <= n, "invalid binomial counts {hits}/{n}");
        let nf = n as f64;
        let p = hits as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let center = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
        Self {
            p_hat: p,
            n,
            hits,
            ci_lo: (center - half).max(0.0).min(p),
            ci_hi: (center + half).min(1.0).max(p),
        }
    }

    /// Standard error of ln p̂ by the delta method; infinite when p̂ = 0.
    pub fn log_se(&self) -> f64 {
        if self.hits == 0 {
            return f64::INFINITY;
        }
        ((1.0 - self.p_hat) / (self.n as f64 * self.p_hat)).sqrt()
    }
}
