//! Special functions for the heat kernel: Γ and the confluent hypergeometric
//! function M(a, b, −x) on the negative real axis.

pub use statrs::function::gamma::{gamma, ln_gamma};

const SERIES_LIMIT: f64 = 1.0;
const ASYMPTOTIC_FROM: f64 = 40.0;

/// M(a, b, −x) for x ≥ 0 and 0 < a ≤ b.
pub fn kummer_neg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0 && a > 0.0 && a <= b);
    if a == b {
        return (-x).exp();
    }
    if x <= SERIES_LIMIT {
        1.0 - alternating_tail(a, b, x)
    } else if x <= ASYMPTOTIC_FROM {
        kummer_transformed(a, b, x)
    } else {
        kummer_asymptotic(a, b, x)
    }
}

/// 1 − M(a, b, −x), accurate when x is small and M is close to 1.
pub fn one_minus_kummer_neg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0 && a > 0.0 && a <= b);
    if a == b {
        return -(-x).exp_m1();
    }
    if x <= SERIES_LIMIT {
        alternating_tail(a, b, x)
    } else {
        1.0 - kummer_neg(a, b, x)
    }
}

/// −Σ_{n≥1} (a)_n/(b)_n (−x)^n/n!.
fn alternating_tail(a: f64, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..200 {
        let nf = n as f64;
        term *= -(a + nf) / (b + nf) * x / (nf + 1.0);
        sum -= term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    sum
}

/// e^{−x} M(b − a, b, x), a positive series.
fn kummer_transformed(a: f64, b: f64, x: f64) -> f64 {
    let c = b - a;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..1000 {
        let nf = n as f64;
        term *= (c + nf) / (b + nf) * x / (nf + 1.0);
        sum += term;
        if nf > x && term <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    sum * (-x).exp()
}

/// Γ(b)/Γ(b−a) x^{−a} Σ_s (a)_s (1+a−b)_s / s! x^{−s}, truncated at the smallest term.
fn kummer_asymptotic(a: f64, b: f64, x: f64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for s in 0..200 {
        let sf = s as f64;
        let next = term * (a + sf) * (1.0 + a - b + sf) / ((sf + 1.0) * x);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        sum += next;
        term = next;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    let ln_pref = ln_gamma(b) - ln_gamma(b - a) - a * x.ln();
    ln_pref.exp() * sum
}
