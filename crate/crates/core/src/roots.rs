//! Scalar root finding and one-dimensional maximization.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Bisection on `[lo, hi]` until the bracket is no wider than `tol`.
///
/// Returns the midpoint of the final bracket, or an endpoint if `f`
/// vanishes there exactly.
pub fn bisect_root(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, RootError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(RootError::BadTolerance(tol));
    }
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(RootError::NoBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    // 200 halvings exhaust f64 resolution on any finite bracket
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// The interior optimum is compared against both endpoints, so monotone
/// functions return the better endpoint exactly. Returns `(argmax, max)`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let f_lo = f(lo);
    let f_hi = f(hi);
    let mut best = if f_hi > f_lo { (hi, f_hi) } else { (lo, f_lo) };
    if hi - lo <= tol {
        return best;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    let f_mid = f(mid);
    for cand in [(x1, f1), (x2, f2), (mid, f_mid)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}
