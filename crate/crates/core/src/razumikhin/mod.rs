//! Extremum-based Razumikhin bounds for the sawtooth equation.
//!
//! At a local extremum `u(t) = v` the delayed value is pinned to
//! `-(mu/sigma) v`. Integrating the equation backwards over one delay and
//! replacing the delayed segment by its extremal profile `H_k` turns this into
//! a scalar inequality on `v`, expressed through the functional `Q_k(v, x, y)`.
//! Its roots give maps from a bound pair `[M, N]` to a tighter pair, and the
//! limit of the resulting monotone iteration bounds all persistent dynamics.
//! When the limit is `(0, 0)` the steady state is globally asymptotically
//! stable.

mod bound_maps;
mod functional;
mod iteration;
mod lambert;
mod profile;

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::model::Params;

pub use bound_maps::{bound_root_m, bound_root_n, critical_point_v_star, DEFAULT_ROOT_TOL};
pub use functional::{
    dq_dv, q_closed, q_quadrature, q_quadrature_with_tol, switch_continuity_gap, SwitchGap,
    DEFAULT_QUADRATURE_TOL,
};
pub use iteration::{
    fixed_point_residual, is_gas, iterate_bounds, limit_bounds, GasVerdict, IterationTrace,
    LimitBounds, BURN_IN_DELAYS, DEFAULT_FIXED_POINT_TOL, DEFAULT_GAS_TOL, DEFAULT_MAX_ITER,
};
pub use lambert::lambert_w_restricted;
pub use profile::{h_profile, sign3, slope_bound};

/// Order of the extremal profile: `One` uses only value bounds on the delayed
/// segment, `Two` also its slope bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    One,
    Two,
}

impl Order {
    pub const BOTH: [Order; 2] = [Order::One, Order::Two];

    pub fn k(self) -> u32 {
        match self {
            Order::One => 1,
            Order::Two => 2,
        }
    }
}

impl TryFrom<u32> for Order {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            _ => Err(domain(format!("order k must be 1 or 2 (got {k})"))),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.k())
    }
}

/// A bound interval `[m, n]` with `m0 <= m <= 0 <= n <= n0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub m: f64,
    pub n: f64,
}

impl BoundPair {
    pub fn width(&self) -> f64 {
        self.n - self.m
    }

    pub fn contains(&self, other: &BoundPair) -> bool {
        self.m <= other.m && other.n <= self.n
    }
}

/// Which side of the extremum functional's domain a `(v, x, y)` triple sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumCase {
    /// Negative minimum: `x in [0, n0]`, `y in [m0, 0]`, `v in [m0, 0]`.
    Min,
    /// Positive maximum: `x in [m0, 0]`, `y in [0, n0]`, `v in [0, n0]`.
    Max,
}

fn slack(bound: f64) -> f64 {
    1e-12 * (1.0 + bound.abs())
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo - slack(lo) && v <= hi + slack(hi)
}

pub(crate) fn require_bound_regime(params: &Params) -> Result<()> {
    params.validate()?;
    if !params.in_bound_regime() {
        return Err(domain(format!(
            "bound machinery needs sigma <= mu < 0 (mu = {}, sigma = {})",
            params.mu, params.sigma
        )));
    }
    Ok(())
}

/// Checks that `(v, x, y)` lies in the domain of `Q_k` and reports the case.
///
/// The trial value `v` may range over the whole half interval `[m0, 0]`
/// (resp. `[0, n0]`), which is where the bound maps search for roots.
pub fn eval_domain(params: &Params, v: f64, x: f64, y: f64) -> Result<ExtremumCase> {
    require_bound_regime(params)?;
    let (m0, n0) = (params.m0(), params.n0());
    if !(v.is_finite() && x.is_finite() && y.is_finite()) {
        return Err(domain("non-finite argument to Q"));
    }
    if within(x, 0.0, n0) && within(y, m0, 0.0) && within(v, m0, 0.0) {
        Ok(ExtremumCase::Min)
    } else if within(x, m0, 0.0) && within(y, 0.0, n0) && within(v, 0.0, n0) {
        Ok(ExtremumCase::Max)
    } else {
        Err(domain(format!(
            "(v, x, y) = ({v}, {x}, {y}) outside the extremum domain for m0 = {m0}, n0 = {n0}"
        )))
    }
}
