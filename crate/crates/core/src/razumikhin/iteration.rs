use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io_util::write_atomic;
use crate::model::Params;

use super::bound_maps::{bound_root_m, bound_root_n, DEFAULT_ROOT_TOL};
use super::functional::q_value;
use super::{require_bound_regime, BoundPair, Order};

pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-9;
pub const DEFAULT_GAS_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Multiple of `tau0` used as the first settle time. The boundedness theorem
/// only says the solution enters `(M0, N0]` after some finite time; this is a
/// reporting heuristic, not a guarantee.
pub const BURN_IN_DELAYS: f64 = 5.0;

/// Bound pairs produced by the recursion
/// `M_{n+1} = M_k(N_n, M_n)`, `N_{n+1} = N_k(M_n, N_n)` from `(M0, N0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub order: Order,
    pub pairs: Vec<BoundPair>,
    /// Heuristic times after which the pair with the same index applies.
    pub settle_times: Vec<f64>,
    pub converged: bool,
    /// Fixed-point residual at the last pair, see [`fixed_point_residual`].
    pub residual: f64,
}

impl IterationTrace {
    pub fn last(&self) -> BoundPair {
        *self.pairs.last().expect("trace always holds the initial pair")
    }

    /// Number of map applications performed.
    pub fn iterations(&self) -> usize {
        self.pairs.len() - 1
    }

    /// Index of the newest pair whose extremum inequalities are in force at
    /// time `t`: pair `n` needs the solution confined for `(k+1)` delays
    /// after it settles, which is exactly when pair `n + 1` settles.
    pub fn pair_index_at(&self, t: f64) -> Option<usize> {
        let settled = self.settle_times.partition_point(|&s| s <= t);
        settled.checked_sub(2)
    }

    /// `n,t_settle,m,n` rows, one per bound pair.
    pub fn write_csv_to(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "n,t_settle,m,n")?;
        for (i, (pair, t)) in self.pairs.iter().zip(&self.settle_times).enumerate() {
            writeln!(out, "{i},{t:.16e},{:.16e},{:.16e}", pair.m, pair.n)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| self.write_csv_to(w))
    }
}

/// `max(|Q_k(N, M, N)|, |Q_k(M, N, M)|)`: zero exactly at fixed points of the
/// bound maps.
pub fn fixed_point_residual(k: Order, params: &Params, pair: BoundPair) -> f64 {
    let upper = q_value(k, params, pair.n, pair.m, pair.n).abs();
    let lower = q_value(k, params, pair.m, pair.n, pair.m).abs();
    upper.max(lower)
}

/// Runs the bound recursion until the fixed-point residual and the
/// extrapolated distance to the limit both drop below `tol`, or `max_n`
/// steps have been taken.
///
/// The sequences are monotone and bracketed, so the iteration always
/// converges to the outermost fixed point in `[M0, 0] x [0, N0]`. The
/// distance to the limit is estimated from the geometric rate of the last two
/// steps.
pub fn iterate_bounds(k: Order, params: &Params, max_n: usize, tol: f64) -> Result<IterationTrace> {
    require_bound_regime(params)?;
    let p = *params;
    let mut pair = BoundPair { m: p.m0(), n: p.n0() };
    let tau0 = p.a + p.c * pair.n;
    let spacing = (k.k() + 1) as f64;
    let mut pairs = vec![pair];
    let mut settle_times = vec![BURN_IN_DELAYS * tau0];
    let mut residual = fixed_point_residual(k, &p, pair);
    let mut prev_step = f64::INFINITY;
    let mut converged = false;
    let scale = 1.0 + p.n0();

    for _ in 0..max_n {
        let next = BoundPair {
            m: bound_root_m(k, pair.n, pair.m, &p, DEFAULT_ROOT_TOL)?,
            n: bound_root_n(k, pair.m, pair.n, &p, DEFAULT_ROOT_TOL)?,
        };
        // Monotonicity holds exactly; clamp rounding-level violations.
        let next = BoundPair { m: next.m.max(pair.m), n: next.n.min(pair.n) };
        let t_next = settle_times.last().unwrap() + spacing * (p.a + p.c * pair.n);
        let step = (next.m - pair.m).abs() + (next.n - pair.n).abs();
        pair = next;
        pairs.push(pair);
        settle_times.push(t_next);
        residual = fixed_point_residual(k, &p, pair);

        let rate = step / prev_step;
        let remaining = if step <= 1e-15 * scale {
            0.0
        } else if rate < 1.0 {
            step * rate / (1.0 - rate)
        } else {
            f64::INFINITY
        };
        prev_step = step;
        if residual <= tol && step <= tol && remaining <= 0.1 * tol {
            converged = true;
            break;
        }
    }
    Ok(IterationTrace { order: k, pairs, settle_times, converged, residual })
}

/// Limit of the bound iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitBounds {
    pub pair: BoundPair,
    pub residual: f64,
    pub iterations: usize,
}

/// Limit `[M_inf, N_inf]` of the bound iteration; solves
/// `Q_k(N, M, N) = Q_k(M, N, M) = 0` for the outermost root in the box.
pub fn limit_bounds(k: Order, params: &Params, tol: f64, max_n: usize) -> Result<LimitBounds> {
    let trace = iterate_bounds(k, params, max_n, tol)?;
    if !trace.converged {
        return Err(Error::Convergence { iters: trace.iterations(), residual: trace.residual });
    }
    Ok(LimitBounds { pair: trace.last(), residual: trace.residual, iterations: trace.iterations() })
}

/// Global stability verdict for a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GasVerdict {
    /// `|sigma| < -mu`: stable for every delay, no computation needed.
    Cone,
    /// The bound iteration collapses to `(0, 0)`.
    FixedPoint,
    NotCertified,
}

impl GasVerdict {
    pub fn is_certified(&self) -> bool {
        !matches!(self, GasVerdict::NotCertified)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GasVerdict::Cone => "GAS_cone",
            GasVerdict::FixedPoint => "GAS_fixed_point",
            GasVerdict::NotCertified => "NotCertified",
        }
    }
}

impl fmt::Display for GasVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Certifies global asymptotic stability of `u = 0`, either through the cone
/// condition or because the only fixed point of the bound maps is `(0, 0)`.
pub fn is_gas(params: &Params, k: Order, tol: f64) -> Result<GasVerdict> {
    params.validate()?;
    if params.in_cone() {
        return Ok(GasVerdict::Cone);
    }
    if !params.in_bound_regime() {
        return Ok(GasVerdict::NotCertified);
    }
    let limit = limit_bounds(k, params, tol, DEFAULT_MAX_ITER)?;
    if limit.pair.m.abs().max(limit.pair.n) <= tol {
        Ok(GasVerdict::FixedPoint)
    } else {
        Ok(GasVerdict::NotCertified)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4a() -> Params {
        Params::new(1.0, 1.0, -0.25, -1.75).unwrap()
    }

    #[test]
    fn trace_is_nested_and_timed() {
        for k in Order::BOTH {
            let trace = iterate_bounds(k, &fig4a(), 500, 1e-9).unwrap();
            assert!(trace.converged);
            assert_eq!(trace.pairs[0], BoundPair { m: -1.0, n: 7.0 });
            for (w, t) in trace.pairs.windows(2).zip(trace.settle_times.windows(2)) {
                assert!(w[0].m <= w[1].m && w[1].m <= 0.0);
                assert!(0.0 <= w[1].n && w[1].n <= w[0].n);
                let gap = (k.k() + 1) as f64 * (1.0 + w[0].n);
                assert!(t[1] - t[0] >= gap * (1.0 - 1e-12));
            }
            assert_eq!(trace.settle_times[0], 40.0);
        }
    }

    #[test]
    fn upper_bound_decreases_to_positive_limit() {
        let trace = iterate_bounds(Order::One, &fig4a(), 1000, 1e-9).unwrap();
        let last = trace.last();
        assert!(last.n > 1.0 && last.n < 7.0);
        assert!(last.m < 0.0);
    }

    #[test]
    fn order_two_dominates_order_one() {
        let p = fig4a();
        let t1 = iterate_bounds(Order::One, &p, 60, 0.0).unwrap();
        let t2 = iterate_bounds(Order::Two, &p, 60, 0.0).unwrap();
        for (a, b) in t1.pairs.iter().zip(&t2.pairs) {
            assert!(a.m <= b.m + 1e-13 && b.m <= 0.0);
            assert!(0.0 <= b.n && b.n <= a.n + 1e-13);
        }
    }

    #[test]
    fn limit_is_a_fixed_point() {
        let p = fig4a();
        for k in Order::BOTH {
            let lim = limit_bounds(k, &p, 1e-9, DEFAULT_MAX_ITER).unwrap();
            assert!(lim.residual <= 1e-9);
            assert!(lim.pair.m < 0.0 && lim.pair.n > 0.0);
            let again = BoundPair {
                m: bound_root_m(k, lim.pair.n, lim.pair.m, &p, 1e-12).unwrap(),
                n: bound_root_n(k, lim.pair.m, lim.pair.n, &p, 1e-12).unwrap(),
            };
            let moved = (again.m - lim.pair.m).abs() + (again.n - lim.pair.n).abs();
            assert!(moved <= 2e-9);
        }
    }

    #[test]
    fn trivial_pair_has_zero_residual() {
        let p = fig4a();
        for k in Order::BOTH {
            assert_eq!(fixed_point_residual(k, &p, BoundPair { m: 0.0, n: 0.0 }), 0.0);
        }
    }

    #[test]
    fn gas_verdicts() {
        let p = |mu, sigma| Params::new(1.0, 1.0, mu, sigma).unwrap();
        assert_eq!(is_gas(&p(-2.0, -1.0), Order::One, 1e-9).unwrap(), GasVerdict::Cone);
        assert_eq!(is_gas(&p(-2.0, 1.5), Order::Two, 1e-9).unwrap(), GasVerdict::Cone);
        assert_eq!(is_gas(&p(-1.0, 0.0), Order::Two, 1e-9).unwrap(), GasVerdict::Cone);
        assert_eq!(is_gas(&p(-2.0, -2.8), Order::Two, 1e-9).unwrap(), GasVerdict::NotCertified);
        assert_eq!(is_gas(&p(-0.25, -1.75), Order::One, 1e-9).unwrap(), GasVerdict::NotCertified);
        assert_eq!(is_gas(&p(-2.0, -2.2), Order::One, 1e-9).unwrap(), GasVerdict::FixedPoint);
        assert_eq!(is_gas(&p(-1.0, -1.0), Order::Two, 1e-9).unwrap(), GasVerdict::FixedPoint);
    }

    #[test]
    fn pair_lookup_by_time() {
        let trace = iterate_bounds(Order::One, &fig4a(), 5, 0.0).unwrap();
        let t = &trace.settle_times;
        assert_eq!(trace.pair_index_at(t[0] - 1.0), None);
        assert_eq!(trace.pair_index_at(t[1] - 1e-9), None);
        assert_eq!(trace.pair_index_at(t[1]), Some(0));
        assert_eq!(trace.pair_index_at(t[3] + 1e-9), Some(2));
        assert_eq!(trace.pair_index_at(1e9), Some(trace.pairs.len() - 2));
    }

    #[test]
    fn trace_csv() {
        let trace = iterate_bounds(Order::One, &fig4a(), 3, 0.0).unwrap();
        let mut buf = Vec::new();
        trace.write_csv_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "n,t_settle,m,n");
        assert!(lines[1].starts_with("0,4.0000000000000000e1,-1.0000000000000000e0,7.0000000000000000e0"));
    }

    #[test]
    fn rejects_cone_parameters() {
        let cone = Params::new(1.0, 1.0, -2.0, -1.0).unwrap();
        assert!(iterate_bounds(Order::One, &cone, 10, 1e-9).is_err());
    }
}
