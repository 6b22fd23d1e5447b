//! Small numerical helpers shared across modules.

use crate::{Error, Result};

/// Neumaier-compensated sum.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Decimal exponent of the last kept digit and the mantissa scaled to an
/// integer-valued float.
fn sig_split(x: f64, digits: i32) -> (f64, i32) {
    let e = x.abs().log10().floor() as i32;
    let p = e - digits + 1;
    let m = if p >= 0 {
        x / 10f64.powi(p)
    } else {
        x * 10f64.powi(-p)
    };
    (m, p)
}

/// `m·10^p` correctly rounded.
fn from_decimal(m: f64, p: i32) -> f64 {
    format!("{}e{}", m, p).parse().expect("decimal literal")
}

fn apply_sig(x: f64, digits: i32, op: impl Fn(f64) -> f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let (m, p) = sig_split(x, digits);
    from_decimal(op(m), p)
}

/// Round a positive number down to `digits` significant figures.
pub fn floor_sig(x: f64, digits: i32) -> f64 {
    apply_sig(x, digits, |m| (m * (1.0 + 8.0 * f64::EPSILON)).floor())
}

/// Round a positive number up to `digits` significant figures.
pub fn ceil_sig(x: f64, digits: i32) -> f64 {
    apply_sig(x, digits, |m| (m * (1.0 - 8.0 * f64::EPSILON)).ceil())
}

/// Round to `digits` significant figures (nearest).
pub fn round_sig(x: f64, digits: i32) -> f64 {
    apply_sig(x, digits, f64::round)
}

/// Bisection for a sign change of `f` on `[lo, hi]`, stopping when the
/// bracket is below `rel_tol` relative to its upper end.
///
/// Returns the end of the final bracket on the side where `f` has the same
/// sign as `f(lo)`.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::Invalid(format!(
            "bisection bracket [{lo:e}, {hi:e}] does not straddle a sign change"
        )));
    }
    let s = flo.signum();
    for _ in 0..400 {
        if (hi - lo).abs() <= rel_tol * hi.abs().max(lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Polynomial extrapolation to `x = 0` by Neville's scheme.
///
/// Returns the extrapolated value and the difference between the two
/// highest-order estimates.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut p = ys.to_vec();
    let mut prev_top = p[0];
    let mut top = p[0];
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
        prev_top = top;
        top = p[0];
    }
    (top, (top - prev_top).abs())
}
