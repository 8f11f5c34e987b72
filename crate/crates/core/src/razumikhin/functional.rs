use crate::error::{domain, Result};
use crate::model::Params;
use crate::quadrature;

use super::profile::{h_unchecked, ramp_length, sign3, slope_bound};
use super::{eval_domain, Order};

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

fn q1(p: &Params, v: f64, x: f64) -> f64 {
    let mu_l = p.mu * (p.a + p.c * v);
    let e = mu_l.exp();
    (1.0 + p.mu / p.sigma * e) * v - p.sigma / p.mu * x * mu_l.exp_m1()
}

fn dq1(p: &Params, v: f64, x: f64) -> f64 {
    let e = (p.mu * (p.a + p.c * v)).exp();
    1.0 + p.mu / p.sigma * (1.0 + p.mu * p.c * v - p.sigma * p.sigma * p.c * x / p.mu) * e
}

/// Order-two value when the flat part of the profile is nonempty (`w < L`).
fn q2_ramp(p: &Params, v: f64, x: f64, s: f64, d: f64, w: f64) -> f64 {
    let e = (p.mu * (p.a + p.c * v)).exp();
    p.mu / p.sigma * v * e - p.sigma / p.mu * (s * d / p.mu * (p.mu * w).exp_m1() + x * e)
}

/// Order-two value when the ramp covers the whole window (`w >= L`).
fn q2_full(p: &Params, v: f64, s: f64, d: f64) -> f64 {
    let span = p.a + p.c * v;
    let e = (p.mu * span).exp();
    v * e * (1.0 + p.mu / p.sigma)
        - s * p.sigma / p.mu * d * ((p.mu * span).exp_m1() / p.mu - span * e)
}

fn dq2_ramp(p: &Params, v: f64, x: f64, w: f64) -> f64 {
    dq1(p, v, x) - 1.0 + (p.mu * w).exp()
}

fn dq2_full(p: &Params, v: f64, s: f64, d: f64) -> f64 {
    let span = p.a + p.c * v;
    let e = (p.mu * span).exp();
    ((1.0 + p.mu * p.c * v) * (1.0 + p.mu / p.sigma) + s * p.sigma * p.c * d * span) * e
}

/// `Q_k(v, x, y)` without domain checks.
pub(crate) fn q_value(k: Order, p: &Params, v: f64, x: f64, y: f64) -> f64 {
    match k {
        Order::One => q1(p, v, x),
        Order::Two => {
            let (s, d, w) = ramp_length(p, v, x, y);
            if w <= 0.0 {
                // no ramp inside the window: the profile is the constant x
                q1(p, v, x)
            } else if w < p.a + p.c * v {
                q2_ramp(p, v, x, s, d, w)
            } else {
                q2_full(p, v, s, d)
            }
        }
    }
}

/// `dQ_k/dv` without domain checks.
pub(crate) fn dq_value(k: Order, p: &Params, v: f64, x: f64, y: f64) -> f64 {
    match k {
        Order::One => dq1(p, v, x),
        Order::Two => {
            let (s, d, w) = ramp_length(p, v, x, y);
            if w <= 0.0 {
                dq1(p, v, x)
            } else if w < p.a + p.c * v {
                dq2_ramp(p, v, x, w)
            } else {
                dq2_full(p, v, s, d)
            }
        }
    }
}

/// Closed form of the extremum functional
///
/// ```text
/// Q_k(v, x, y) = v + (mu/sigma) v e^{mu (a + c v)}
///                - sigma * integral_{-(a+cv)}^{0} e^{-mu theta} H_k(v, x, y)(theta) dtheta
/// ```
///
/// A positive maximum `v` of a solution confined to `[M, N]` over the
/// preceding `(k+1)` delays satisfies `Q_k(v, M, N) <= 0`; a negative minimum
/// satisfies `Q_k(v, N, M) >= 0`.
pub fn q_closed(k: Order, v: f64, x: f64, y: f64, params: &Params) -> Result<f64> {
    eval_domain(params, v, x, y)?;
    Ok(q_value(k, params, v, x, y))
}

/// Closed form of `dQ_k/dv`.
pub fn dq_dv(k: Order, v: f64, x: f64, y: f64, params: &Params) -> Result<f64> {
    eval_domain(params, v, x, y)?;
    Ok(dq_value(k, params, v, x, y))
}

/// The defining integral of `Q_k` evaluated numerically, with the order-two
/// profile split exactly at its kink. Independent of [`q_closed`].
pub fn q_quadrature(k: Order, v: f64, x: f64, y: f64, params: &Params, panels: usize) -> Result<f64> {
    q_quadrature_with_tol(k, v, x, y, params, panels, DEFAULT_QUADRATURE_TOL)
}

pub fn q_quadrature_with_tol(
    k: Order,
    v: f64,
    x: f64,
    y: f64,
    params: &Params,
    panels: usize,
    tol: f64,
) -> Result<f64> {
    eval_domain(params, v, x, y)?;
    if panels < 2 {
        return Err(domain(format!("quadrature needs at least 2 panels (got {panels})")));
    }
    let p = *params;
    let span = p.a + p.c * v;
    // The pinned value at theta = 0 has measure zero; integrate the open interval.
    let integrand = move |theta: f64| {
        let theta = theta.min(-f64::MIN_POSITIVE);
        (-p.mu * theta).exp() * h_unchecked(k, &p, v, x, y, theta)
    };
    let mut cuts = vec![-span];
    if k == Order::Two && sign3(y - x) != 0.0 {
        let d = slope_bound(x, y, &p);
        let kink = sign3(y - x) * (x + p.mu * v / p.sigma) / d;
        if kink > -span && kink < 0.0 {
            cuts.push(kink);
        }
    }
    cuts.push(0.0);
    let integral: f64 = cuts
        .windows(2)
        .map(|w| quadrature::integrate(integrand, w[0], w[1], panels, tol))
        .sum();
    Ok(v + p.mu / p.sigma * v * (p.mu * span).exp() - p.sigma * integral)
}

/// Agreement of the two order-two branch formulas at the switch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchGap {
    /// Trial value where the ramp length equals the window `a + c v`.
    pub v_switch: f64,
    pub q_gap: f64,
    pub dq_gap: f64,
}

/// Locates the point where the order-two profile switches between the
/// flat-plus-ramp and the all-ramp form, and evaluates both branch formulas
/// (for `Q_2` and `dQ_2/dv`) there. `None` if the switch lies outside the
/// domain for this `(x, y)`.
pub fn switch_continuity_gap(x: f64, y: f64, params: &Params) -> Result<Option<SwitchGap>> {
    let p = *params;
    let s = sign3(y - x);
    if s == 0.0 {
        return Ok(None);
    }
    let d = slope_bound(x, y, &p);
    // -s (x + mu v / sigma) / d = a + c v is linear in v
    let denom = p.c + s * p.mu / (p.sigma * d);
    if denom == 0.0 {
        return Ok(None);
    }
    let v = (-s * x / d - p.a) / denom;
    if eval_domain(&p, v, x, y).is_err() {
        return Ok(None);
    }
    let span = p.a + p.c * v;
    Ok(Some(SwitchGap {
        v_switch: v,
        q_gap: (q2_ramp(&p, v, x, s, d, span) - q2_full(&p, v, s, d)).abs(),
        dq_gap: (dq2_ramp(&p, v, x, span) - dq2_full(&p, v, s, d)).abs(),
    }))
}
