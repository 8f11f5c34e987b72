use std::f64::consts::E;

use crate::error::{domain, Result};
use crate::model::Params;
use crate::roots::newton_bisect;

use super::functional::{dq_value, q_value};
use super::lambert::lambert_w_restricted;
use super::profile::{sign3, slope_bound};
use super::{eval_domain, require_bound_regime, ExtremumCase, Order};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

fn solve(k: Order, p: &Params, x: f64, y: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let xtol = 8.0 * f64::EPSILON * (1.0 + lo.abs().max(hi.abs()));
    let root = newton_bisect(
        |v| (q_value(k, p, v, x, y), dq_value(k, p, v, x, y)),
        lo,
        hi,
        tol * 1e-4,
        xtol,
    )?;
    Ok(root.x)
}

/// New lower bound `M_k(x, y)`: the unique root of `Q_k(., x, y)` in
/// `[max(m0, -sigma x / mu), 0]`, given an upper bound `x in [0, n0]` and the
/// current lower bound `y in [m0, 0]`.
///
/// `Q_k` is negative below the root and positive above it (up to 0), so any
/// negative local minimum confined by `[y, x]` is at least the root.
pub fn bound_root_m(k: Order, x: f64, y: f64, params: &Params, tol: f64) -> Result<f64> {
    require_bound_regime(params)?;
    let (m0, n0) = (params.m0(), params.n0());
    if !(x >= 0.0 && x <= n0 * (1.0 + 1e-12) && y >= m0 && y <= 0.0) {
        return Err(domain(format!("M_k needs x in [0, {n0}] and y in [{m0}, 0] (got {x}, {y})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let lo = m0.max(-params.sigma * x / params.mu);
    solve(k, params, x, y, lo, 0.0, tol)
}

/// New upper bound `N_k(x, y)`: the unique root of `Q_k(., x, y)` in
/// `[0, -sigma x / mu]`, given a lower bound `x in [m0, 0]` and the current
/// upper bound `y in [0, n0]`.
pub fn bound_root_n(k: Order, x: f64, y: f64, params: &Params, tol: f64) -> Result<f64> {
    require_bound_regime(params)?;
    let (m0, n0) = (params.m0(), params.n0());
    if !(x >= m0 && x <= 0.0 && y >= 0.0 && y <= n0 * (1.0 + 1e-12)) {
        return Err(domain(format!("N_k needs x in [{m0}, 0] and y in [0, {n0}] (got {x}, {y})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let hi = (-params.sigma * x / params.mu).min(n0);
    solve(k, params, x, y, 0.0, hi, tol)
}

/// Candidate sign change of `dQ_k/dv` in the maximum case, from the
/// restricted Lambert W function.
///
/// Setting the derivative to zero and substituting
/// `p = 1 + mu c v - sigma^2 c x / mu` gives `(r p) e^{r p} = z` where `r = 1`
/// for order one and `r = 1 + mu / (sigma c D(x, y))` on the ramp branch of
/// order two. Only the branch `W <= -1` can satisfy the equation inside the
/// domain, so there is at most one candidate; it exists iff `z >= -1/e`.
pub fn critical_point_v_star(k: Order, x: f64, y: f64, params: &Params) -> Result<Option<f64>> {
    if eval_domain(params, 0.0, x, y)? != ExtremumCase::Max && x != 0.0 {
        return Err(domain("critical point is defined for the maximum case only"));
    }
    let Params { a, c, mu, sigma } = *params;
    let s2cx = sigma * sigma * c * x / mu;
    let s = sign3(y - x);
    let (r, extra) = match k {
        Order::Two if s != 0.0 => {
            let d = slope_bound(x, y, params);
            (1.0 + mu * s / (sigma * c * d), -mu * s * x / d)
        }
        _ => (1.0, 0.0),
    };
    let z = -r * (sigma / mu) * (r - mu * a + extra - r * s2cx).exp();
    if !(z >= -1.0 / E) || z >= 0.0 {
        return Ok(None);
    }
    let w = lambert_w_restricted(z)?;
    Ok(Some((w / r - 1.0 + s2cx) / (mu * c)))
}
