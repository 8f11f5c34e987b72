//! Model coefficients, derived constants and the analytic stability region.
//!
//! The model is the scalar sawtooth equation
//!
//! ```text
//! u'(t) = mu * u(t) + sigma * u(t - a - c * u(t)),   t > 0
//! u(t)  = phi(t),                                    t <= 0
//! ```
//!
//! Its steady state `u = 0` is locally exponentially stable exactly on the
//! open region bounded by the line `sigma = -mu` (for `mu <= 1/a`) and the
//! parametric curve `(s cot(a s), -s csc(a s))`, `s in (0, pi/a)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::roots::bisect;

/// Absolute width (in sigma) of the band around the region boundaries that is
/// reported as a boundary label rather than a side.
pub const BOUNDARY_EPS: f64 = 1e-9;

const CURVE_PARAM_EPS: f64 = 1e-12;

/// Model coefficients `(a, c, mu, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Delay offset, `> 0`.
    pub a: f64,
    /// State-dependence slope of the delay, `> 0`.
    pub c: f64,
    /// Instantaneous feedback rate, `< 0`.
    pub mu: f64,
    /// Delayed feedback rate, with `mu + sigma < 0`.
    pub sigma: f64,
}

impl Params {
    /// Builds and validates a parameter set.
    pub fn new(a: f64, c: f64, mu: f64, sigma: f64) -> Result<Self> {
        Params { a, c, mu, sigma }.validate()
    }

    /// Returns `self` unchanged if every model constraint holds, otherwise a
    /// [`Error::Domain`] naming the first violated one.
    pub fn validate(self) -> Result<Self> {
        let Params { a, c, mu, sigma } = self;
        if !(a.is_finite() && c.is_finite() && mu.is_finite() && sigma.is_finite()) {
            return Err(domain("parameters must be finite"));
        }
        if a <= 0.0 {
            return Err(domain(format!("a <= 0 (a = {a})")));
        }
        if c <= 0.0 {
            return Err(domain(format!("c <= 0 (c = {c})")));
        }
        if mu >= 0.0 {
            return Err(domain(format!("mu >= 0 (mu = {mu})")));
        }
        if mu + sigma >= 0.0 {
            return Err(domain(format!("mu + sigma >= 0 (mu + sigma = {})", mu + sigma)));
        }
        Ok(self)
    }

    /// `true` when `sigma <= mu < 0`, the setting of the bound iteration.
    pub fn in_bound_regime(&self) -> bool {
        self.sigma <= self.mu && self.mu < 0.0
    }

    /// `true` when `|sigma| < -mu`.
    pub fn in_cone(&self) -> bool {
        self.sigma.abs() < -self.mu
    }

    pub fn region(&self) -> RegionLabel {
        classify_region(self.mu, self.sigma, self.a)
    }

    /// Lower solution bound `M0 = -a/c`.
    pub fn m0(&self) -> f64 {
        -self.a / self.c
    }

    /// Canonical upper bound `N0 = a sigma / (c mu)`.
    pub fn n0(&self) -> f64 {
        self.a * self.sigma / (self.c * self.mu)
    }
}

/// Constants that frame the dynamics: the absorbing interval and delay ceilings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub m0: f64,
    pub n0: f64,
    /// `a + c * n0`.
    pub tau0: f64,
    /// `a + c * N` for the active upper bound `N`.
    pub tau: f64,
}

/// Computes `M0`, `N0`, `tau0` and the delay ceiling `tau`.
///
/// For `sigma <= 0`, `N0 = a sigma / (c mu)` and `tau` uses
/// `max(N0, n_override)`. For `sigma > 0` the upper bound depends on the
/// initial data, so the caller must pass it as `n_override`; it then plays
/// the role of `N0` as well.
pub fn derived_constants(params: &Params, n_override: Option<f64>) -> Result<DerivedConstants> {
    let Params { a, c, sigma, .. } = *params;
    if let Some(n) = n_override {
        if !(n >= 0.0) {
            return Err(domain(format!("upper bound override must be >= 0 (got {n})")));
        }
    }
    let n0 = if sigma <= 0.0 {
        params.n0()
    } else {
        n_override.ok_or_else(|| {
            domain("sigma > 0: the upper bound N depends on the history and must be supplied")
        })?
    };
    let n = n_override.map_or(n0, |n| n.max(n0));
    Ok(DerivedConstants { m0: params.m0(), n0, tau0: a + c * n0, tau: a + c * n })
}

/// Point `(s cot(a s), -s csc(a s))` of the curved stability boundary.
pub fn stability_boundary_point(s: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(domain(format!("a must be > 0 (got {a})")));
    }
    if !(s > 0.0 && s < PI / a) {
        return Err(domain(format!("curve parameter s = {s} outside (0, pi/a)")));
    }
    let (sin, cos) = (a * s).sin_cos();
    Ok((s * cos / sin, -s / sin))
}

/// Curve parameter `s` with `s cot(a s) = mu`, if `mu < 1/a`.
///
/// `s cot(a s)` decreases from `1/a` to `-inf` on `(0, pi/a)`, so the solution
/// is unique and bisection is exact up to floating point.
pub fn boundary_curve_param(mu: f64, a: f64) -> Option<f64> {
    if !(mu < 1.0 / a) || !mu.is_finite() {
        return None;
    }
    let lo = CURVE_PARAM_EPS;
    let hi = PI / a - CURVE_PARAM_EPS;
    let f = |s: f64| s / (a * s).tan() - mu;
    bisect(f, lo, hi, 0.0).ok().map(|r| r.x)
}

/// Sigma value of the curved stability boundary at the given `mu`, if any.
pub fn boundary_sigma(mu: f64, a: f64) -> Option<f64> {
    boundary_curve_param(mu, a).map(|s| -s / (a * s).sin())
}

/// Position of a `(mu, sigma)` point relative to the analytic stability region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// `|sigma| < -mu`: stable for every delay.
    Cone,
    /// Delay-dependent part of the region with `mu < 0`.
    Wedge,
    /// Delay-dependent part of the region with `mu >= 0`.
    Cusp,
    /// Within [`BOUNDARY_EPS`] of the straight boundary `sigma = -mu`, `mu <= 1/a`.
    BoundaryLine,
    /// Within [`BOUNDARY_EPS`] of the curved boundary.
    BoundaryCurve,
    Outside,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 6] = [
        RegionLabel::Cone,
        RegionLabel::Wedge,
        RegionLabel::Cusp,
        RegionLabel::BoundaryLine,
        RegionLabel::BoundaryCurve,
        RegionLabel::Outside,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Cone => "Cone",
            RegionLabel::Wedge => "Wedge",
            RegionLabel::Cusp => "Cusp",
            RegionLabel::BoundaryLine => "BoundaryLine",
            RegionLabel::BoundaryCurve => "BoundaryCurve",
            RegionLabel::Outside => "Outside",
        }
    }

    /// Strictly inside the stability region.
    pub fn is_stable(&self) -> bool {
        matches!(self, RegionLabel::Cone | RegionLabel::Wedge | RegionLabel::Cusp)
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegionLabel::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown region label {s:?}")))
    }
}

/// Classifies `(mu, sigma)` for delay offset `a`.
///
/// Accepts any `mu` (including `mu >= 0`) so that diagnostic sweeps can label
/// the cusp; the bound machinery itself still requires `mu < 0`.
pub fn classify_region(mu: f64, sigma: f64, a: f64) -> RegionLabel {
    let corner = 1.0 / a;
    // The endpoint (1/a, -1/a) shared with the curve is reported as the line.
    if (sigma + mu).abs() <= BOUNDARY_EPS && mu <= corner + BOUNDARY_EPS {
        return RegionLabel::BoundaryLine;
    }
    if sigma > -mu {
        return RegionLabel::Outside;
    }
    if sigma.abs() < -mu {
        return RegionLabel::Cone;
    }
    let Some(sigma_b) = boundary_sigma(mu, a) else {
        return RegionLabel::Outside;
    };
    if (sigma - sigma_b).abs() <= BOUNDARY_EPS {
        RegionLabel::BoundaryCurve
    } else if sigma > sigma_b {
        if mu < 0.0 {
            RegionLabel::Wedge
        } else {
            RegionLabel::Cusp
        }
    } else {
        RegionLabel::Outside
    }
}
