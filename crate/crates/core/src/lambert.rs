//! Lower real branch W₋₁ of the Lambert W function.
//!
//! Writing W₋₁(x) = −1 − y with x = −e^{−1−z} turns w·e^w = x into
//! y − ln(1 + y) = z, y ≥ 0, which stays well conditioned both at the branch
//! point (z → 0) and deep in the tail where x itself underflows.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// y − ln(1 + y) without cancellation for small y.
fn excess<T: Real>(y: T) -> T {
    if y < T::lit(0.1) {
        let mut power = y * y;
        let mut sum = T::zero();
        let mut k = 2usize;
        loop {
            let term = power / T::from_usize_lossy(k);
            let signed = if k % 2 == 0 { term } else { -term };
            sum = sum + signed;
            if term <= T::epsilon() * sum.abs() * T::lit(0.25) || k > 60 {
                return sum;
            }
            power = power * y;
            k += 1;
        }
    }
    y - y.ln_1p()
}

/// Root y ≥ 0 of y − ln(1 + y) = z.
fn excess_root<T: Real>(z: T) -> T {
    if z == T::zero() {
        return T::zero();
    }
    let s = (T::lit(2.0) * z).sqrt();
    // Known enclosure: √(2z) + 2z/3 < y < √(2z) + z.
    let lower = s + z * T::lit(2.0 / 3.0);
    let mut y = s + z;
    for _ in 0..200 {
        let phi = excess(y) - z;
        let step = phi * (T::one() + y) / y;
        let next = (y - step).max(lower);
        if next >= y || (y - next) <= T::lit(2.0) * T::epsilon() * y {
            return next.min(y);
        }
        y = next;
    }
    y
}

/// W₋₁(−e^{−1−z}) for z ≥ 0. Accepts arbitrarily large z.
pub fn lambert_w_minus1_shifted<T: Real>(z: T) -> Result<T> {
    if z.is_nan() || z < T::zero() {
        return Err(Error::Domain(format!("shift {z:e} must be non-negative")));
    }
    if z.is_infinite() {
        return Ok(T::neg_infinity());
    }
    Ok(-T::one() - excess_root(z))
}

/// W₋₁(x) for x ∈ [−1/e, 0). Arguments within a few ulps below −1/e are
/// treated as the branch point.
pub fn lambert_w_minus1<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || x >= T::zero() {
        return Err(Error::Domain(format!(
            "W-1 argument {x:e} must lie in [-1/e, 0)"
        )));
    }
    let z = -(T::one() + (-x).ln());
    if z < T::zero() {
        if z > -T::epsilon() * T::lit(64.0) {
            return Ok(-T::one());
        }
        return Err(Error::Domain(format!("W-1 argument {x:e} is below -1/e")));
    }
    lambert_w_minus1_shifted(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Values cross-checked against the defining equation with mpmath-style series.
        let w = lambert_w_minus1(-0.1f64).unwrap();
        assert!((w - (-3.577152063957297)).abs() < 1e-13);
        let w = lambert_w_minus1(-(-2.0f64).exp() * 2.0).unwrap();
        assert!((w + 2.0).abs() < 1e-13);
        let w = lambert_w_minus1(-(-1.0f64).exp()).unwrap();
        assert!((w + 1.0).abs() < 1e-7);
    }

    #[test]
    fn residual_small() {
        for &x in &[-0.3678, -0.3, -0.2, -1e-3, -1e-10, -1e-100, -1e-300] {
            let w: f64 = lambert_w_minus1(x).unwrap();
            let r = w * w.exp() - x;
            assert!(r.abs() <= 1e-12 * x.abs(), "x={x} w={w} r={r}");
            assert!(w <= -1.0);
        }
    }

    #[test]
    fn shifted_sandwich() {
        for &z in &[1e-3, 0.01, 0.5, 3.0, 50.0, 1e3] {
            let w: f64 = lambert_w_minus1_shifted(z).unwrap();
            let lo = -1.0 - (2.0 * z).sqrt() - z;
            let hi = -1.0 - (2.0 * z).sqrt() - 2.0 * z / 3.0;
            assert!(lo < w && w < hi, "z={z} w={w}");
        }
    }

    #[test]
    fn outside_domain() {
        assert!(lambert_w_minus1(0.0f64).is_err());
        assert!(lambert_w_minus1(0.1f64).is_err());
        assert!(lambert_w_minus1(-0.4f64).is_err());
        assert!(lambert_w_minus1(f64::NAN).is_err());
    }

    #[test]
    fn single_precision() {
        let w: f32 = lambert_w_minus1(-0.1f32).unwrap();
        assert!((w + 3.577_152).abs() < 1e-4);
    }
}
