use crate::error::{domain, Result};
use crate::model::Params;

use super::Order;

/// Three-way sign with `sign(0) = 0`.
pub fn sign3(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Bound on the slope of the delayed segment `theta -> u(theta + t - a - c u(theta + t))`
/// when the solution stays in `[x, y]` (or `[y, x]`):
/// `(|mu|+|sigma|) [1 + (|mu|+|sigma|) max(|x|,|y|) c] max(|x|,|y|)`.
pub fn slope_bound(x: f64, y: f64, params: &Params) -> f64 {
    let rate = params.mu.abs() + params.sigma.abs();
    let m = x.abs().max(y.abs());
    rate * (1.0 + rate * m * params.c) * m
}

/// Left end of the ramp of `H_2`, as a nonnegative length `w`: the ramp covers
/// `theta in (-w, 0]`. Zero when `y == x` or when the ramp would start after 0.
pub(crate) fn ramp_length(params: &Params, v: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let s = sign3(y - x);
    if s == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let d = slope_bound(x, y, params);
    let w = -s * (x + params.mu * v / params.sigma) / d;
    (s, d, w.max(0.0))
}

pub(crate) fn h_unchecked(k: Order, params: &Params, v: f64, x: f64, y: f64, theta: f64) -> f64 {
    let pinned = -(params.mu / params.sigma) * v;
    if theta == 0.0 {
        return pinned;
    }
    match k {
        Order::One => x,
        Order::Two => {
            let (s, d, w) = ramp_length(params, v, x, y);
            if w > 0.0 && theta > -w {
                pinned + s * d * theta
            } else {
                x
            }
        }
    }
}

/// Extremal profile `H_k(v, x, y)(theta)` for the delayed segment at an
/// extremum of value `v`, for `theta in [-(a + c v), 0]`.
///
/// At `theta = 0` both orders return the pinned value `-(mu/sigma) v`.
/// Order one is the constant `x` elsewhere; order two ramps linearly with
/// slope `sign(y - x) D(x, y)` from `x` to the pinned value.
pub fn h_profile(k: Order, v: f64, x: f64, y: f64, theta: f64, params: &Params) -> Result<f64> {
    let span = params.a + params.c * v;
    if !(span > 0.0) {
        return Err(domain(format!("a + c v = {span} must be positive")));
    }
    if !(theta >= -span && theta <= 0.0) {
        return Err(domain(format!("theta = {theta} outside [{}, 0]", -span)));
    }
    Ok(h_unchecked(k, params, v, x, y, theta))
}
