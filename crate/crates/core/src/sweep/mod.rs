//! Parameter-plane computations: limit-bound grids, the certified-stability
//! boundary in `sigma` for each `mu`, and bound-versus-orbit tables.

mod csv;
mod heatmap;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::model::{boundary_sigma, classify_region, Params, RegionLabel};
use crate::razumikhin::{
    is_gas, iterate_bounds, limit_bounds, BoundPair, Order, DEFAULT_FIXED_POINT_TOL,
    DEFAULT_GAS_TOL, DEFAULT_MAX_ITER,
};
use crate::sdde::{integrate, tail_amplitude, HistoryFunction};

pub use csv::{emit_compare_csv, emit_csv, parse_csv, write_compare_csv, write_csv, CSV_HEADER};
pub use heatmap::{emit_heatmap_svg, render_heatmap_svg, HeatField};

/// Resolution of the `sigma` bisection in [`gas_boundary`].
pub const GAS_BOUNDARY_SIGMA_TOL: f64 = 1e-6;

/// Evenly spaced samples `lo, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = Axis { lo, hi, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(domain(format!("axis needs lo < hi (got {}, {})", self.lo, self.hi)));
        }
        if self.count < 2 {
            return Err(domain(format!("axis needs at least 2 points (got {})", self.count)));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub mu: Axis,
    pub sigma: Axis,
    pub a: f64,
    pub c: f64,
    pub k: Order,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.mu.validate()?;
        self.sigma.validate()?;
        if !(self.a > 0.0 && self.a.is_finite() && self.c > 0.0 && self.c.is_finite()) {
            return Err(domain(format!("grid needs a, c > 0 (got {}, {})", self.a, self.c)));
        }
        Ok(())
    }

    /// Grid points in row-major order: `mu` outer, `sigma` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let sigmas = self.sigma.values();
        self.mu.values().into_iter().flat_map(|mu| sigmas.iter().map(move |&s| (mu, s))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowStatus {
    Ok,
    Skipped,
    Failed,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "Ok",
            RowStatus::Skipped => "Skipped",
            RowStatus::Failed => "Failed",
        }
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RowStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ok" => Ok(RowStatus::Ok),
            "Skipped" => Ok(RowStatus::Skipped),
            "Failed" => Ok(RowStatus::Failed),
            _ => Err(Error::Parse(format!("unknown row status `{s}`"))),
        }
    }
}

/// One grid point of a limit-bound sweep. Failed rows carry the last
/// iterate; skipped rows carry no bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub mu: f64,
    pub sigma: f64,
    pub m_inf: Option<f64>,
    pub n_inf: Option<f64>,
    pub iters: usize,
    pub residual: f64,
    pub gas: bool,
    pub region: RegionLabel,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub tol: f64,
    pub gas_tol: f64,
    pub max_iter: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            tol: DEFAULT_FIXED_POINT_TOL,
            gas_tol: DEFAULT_GAS_TOL,
            max_iter: DEFAULT_MAX_ITER,
            threads: None,
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers when requested.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads.map(|n| rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}

/// Limit bounds at a single point, never failing.
pub fn sweep_point(mu: f64, sigma: f64, a: f64, c: f64, k: Order, opts: &SweepOptions) -> SweepRow {
    let region = classify_region(mu, sigma, a);
    let mut row = SweepRow {
        mu,
        sigma,
        m_inf: None,
        n_inf: None,
        iters: 0,
        residual: 0.0,
        gas: false,
        region,
        status: RowStatus::Skipped,
    };
    let Ok(p) = Params::new(a, c, mu, sigma) else { return row };
    if p.in_cone() {
        return SweepRow { m_inf: Some(0.0), n_inf: Some(0.0), gas: true, status: RowStatus::Ok, ..row };
    }
    if !p.in_bound_regime() {
        return row;
    }
    match iterate_bounds(k, &p, opts.max_iter, opts.tol) {
        Ok(trace) => {
            let last = trace.last();
            row.m_inf = Some(last.m);
            row.n_inf = Some(last.n);
            row.iters = trace.iterations();
            row.residual = trace.residual;
            if trace.converged {
                row.status = RowStatus::Ok;
                row.gas = last.m.abs().max(last.n) <= opts.gas_tol;
            } else {
                row.status = RowStatus::Failed;
            }
        }
        Err(_) => {
            row.residual = f64::NAN;
            row.status = RowStatus::Failed;
        }
    }
    row
}

/// Limit bounds over a `(mu, sigma)` grid in row-major order.
pub fn sweep_limit_bounds(spec: &GridSpec, tol: f64) -> Result<Vec<SweepRow>> {
    sweep_limit_bounds_with(spec, &SweepOptions { tol, ..SweepOptions::default() })
}

pub fn sweep_limit_bounds_with(spec: &GridSpec, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    let (a, c, k) = (spec.a, spec.c, spec.k);
    Ok(with_threads(opts.threads, || {
        points.par_iter().map(|&(mu, sigma)| sweep_point(mu, sigma, a, c, k, opts)).collect()
    }))
}

fn certified(p: &Params, k: Order, tol: f64) -> bool {
    matches!(is_gas(p, k, tol), Ok(v) if v.is_certified())
}

/// Bisects in `sigma` on `[sigma_curve(mu), mu]` for the transition between
/// certified and uncertified stability. `None` when both ends agree.
pub fn gas_boundary_point(mu: f64, k: Order, tol: f64, a: f64, c: f64) -> Result<Option<f64>> {
    if !(mu < 0.0) {
        return Err(domain(format!("gas boundary needs mu < 0 (got {mu})")));
    }
    let Some(lo) = boundary_sigma(mu, a) else { return Ok(None) };
    let check = |sigma: f64| -> Result<bool> { Ok(certified(&Params::new(a, c, mu, sigma)?, k, tol)) };
    let (mut lo, mut hi) = (lo, mu);
    let (c_lo, c_hi) = (check(lo)?, check(hi)?);
    if c_lo == c_hi {
        return Ok(None);
    }
    while hi - lo > GAS_BOUNDARY_SIGMA_TOL {
        let mid = 0.5 * (lo + hi);
        if check(mid)? == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// [`gas_boundary_point`] for each `mu`, evaluated in parallel.
pub fn gas_boundary(
    mu_values: &[f64],
    k: Order,
    tol: f64,
    a: f64,
    c: f64,
    threads: Option<usize>,
) -> Result<Vec<(f64, Option<f64>)>> {
    with_threads(threads, || {
        mu_values
            .par_iter()
            .map(|&mu| gas_boundary_point(mu, k, tol, a, c).map(|s| (mu, s)))
            .collect()
    })
}

/// Simulation settings for [`compare_bounds_vs_orbit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRun {
    pub t_end: f64,
    pub step: f64,
    /// Length of the final stretch whose range is reported.
    pub window: f64,
    /// Constant history as a multiple of `N0`.
    pub phi_factor: f64,
}

impl Default for OrbitRun {
    fn default() -> Self {
        OrbitRun { t_end: 200.0, step: 1e-3, window: 50.0, phi_factor: 0.99 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub sigma: f64,
    pub k1: Option<BoundPair>,
    pub k2: Option<BoundPair>,
    pub sim: Option<(f64, f64)>,
    pub status: RowStatus,
}

fn compare_point(p: &Params, tol: f64, run: &OrbitRun) -> CompareRow {
    let bounds = |k| -> Option<BoundPair> {
        if p.in_cone() {
            Some(BoundPair { m: 0.0, n: 0.0 })
        } else {
            limit_bounds(k, p, tol, DEFAULT_MAX_ITER).ok().map(|l| l.pair)
        }
    };
    let (k1, k2) = (bounds(Order::One), bounds(Order::Two));
    let phi = HistoryFunction::Constant(run.phi_factor * p.n0());
    let sim = integrate(p, &phi, run.t_end, run.step).ok().map(|tr| tail_amplitude(&tr, run.window));
    let status = if k1.is_some() && k2.is_some() && sim.is_some() { RowStatus::Ok } else { RowStatus::Failed };
    CompareRow { sigma: p.sigma, k1, k2, sim, status }
}

/// Limit bounds for both orders next to the simulated tail range, for a
/// family of `sigma` at fixed `mu`.
pub fn compare_bounds_vs_orbit(
    mu: f64,
    sigma_values: &[f64],
    a: f64,
    c: f64,
    tol: f64,
    run: &OrbitRun,
    threads: Option<usize>,
) -> Result<Vec<CompareRow>> {
    let params: Vec<Params> =
        sigma_values.iter().map(|&s| Params::new(a, c, mu, s)).collect::<Result<_>>()?;
    Ok(with_threads(threads, || params.par_iter().map(|p| compare_point(p, tol, run)).collect()))
}
