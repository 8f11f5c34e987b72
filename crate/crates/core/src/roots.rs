//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Outcome of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub evals: usize,
}

/// Bisection on `[lo, hi]` until the bracket is narrower than `xtol` or cannot
/// be split further in floating point.
///
/// `f(lo)` and `f(hi)` must have opposite signs (a zero at either end is
/// returned directly).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    let mut evals = 2;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, fx: 0.0, evals });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, fx: 0.0, evals });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        evals += 1;
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid == 0.0 {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Root { x: best.0, fx: best.1, evals })
}

/// Newton iteration safeguarded by a bisection bracket.
///
/// `fdf` returns `(f(x), f'(x))`. A Newton step is taken whenever it stays
/// strictly inside the current bracket, otherwise the bracket is halved.
/// Terminates when `|f| <= ftol`, when a step is shorter than `xtol`, or when
/// the bracket width drops below `xtol`.
pub fn newton_bisect<F>(mut fdf: F, lo: f64, hi: f64, ftol: f64, xtol: f64) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let (f_lo, _) = fdf(lo);
    let (f_hi, _) = fdf(hi);
    let mut evals = 2;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, fx: 0.0, evals });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, fx: 0.0, evals });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let lo_sign = f_lo.signum();
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = fdf(x);
        evals += 1;
        if fx.abs() <= best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= ftol || fx == 0.0 {
            break;
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= xtol {
            break;
        }
        let newton = x - fx / dfx;
        let next = if dfx.is_finite() && dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next <= lo || next >= hi {
            break;
        }
        let converged = (next - x).abs() <= xtol;
        x = next;
        if converged {
            let (fx, _) = fdf(x);
            evals += 1;
            if fx.abs() <= best.1.abs() {
                best = (x, fx);
            }
            break;
        }
    }
    Ok(Root { x: best.0, fx: best.1, evals })
}
