use std::io::{self, Write};
use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::io_util::write_atomic;
use crate::model::Params;

use super::analysis::{find_extrema, ExtremumRecord};
use super::history::{hermite, HistoryFunction};

/// Default step: `min(1e-3, a/100)`.
pub fn default_step(params: &Params) -> f64 {
    (1e-3f64).min(params.a / 100.0)
}

/// Right-hand side `mu u + sigma u(t - a - c u)`, with `lookup` supplying
/// the solution at the deviated time.
pub fn rhs(params: &Params, t: f64, u: f64, lookup: impl Fn(f64) -> f64) -> Result<f64> {
    let delay = params.a + params.c * u;
    if !(delay > 0.0) {
        return Err(Error::DelayCollapse { t, u });
    }
    Ok(params.mu * u + params.sigma * lookup(t - delay))
}

/// One dense-output piece `[t0, t1]` with end values and slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub u0: f64,
    pub u1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl Segment {
    pub fn eval(&self, t: f64) -> f64 {
        hermite(self.t0, self.t1, self.u0, self.u1, self.d0, self.d1, t)
    }
}

/// Numerical solution: accepted step nodes `(t, u, u')` on `[0, t_end]`
/// joined by cubic Hermite segments, plus the history it started from.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: Params,
    history: HistoryFunction,
    step: f64,
    t: Vec<f64>,
    u: Vec<f64>,
    udot: Vec<f64>,
    extrema: Vec<ExtremumRecord>,
}

struct Nodes<'a> {
    history: &'a HistoryFunction,
    t: &'a [f64],
    u: &'a [f64],
    udot: &'a [f64],
}

impl Nodes<'_> {
    fn segment(&self, i: usize) -> Segment {
        Segment {
            t0: self.t[i],
            t1: self.t[i + 1],
            u0: self.u[i],
            u1: self.u[i + 1],
            d0: self.udot[i],
            d1: self.udot[i + 1],
        }
    }

    /// `phi` for `s <= 0`, dense output inside the stored range, and
    /// extrapolation of the last segment beyond it.
    fn value(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.history.eval(s);
        }
        let n = self.t.len();
        if n == 1 {
            return self.u[0] + (s - self.t[0]) * self.udot[0];
        }
        let i = self.t.partition_point(|&ti| ti < s).clamp(1, n - 1) - 1;
        self.segment(i).eval(s)
    }
}

/// Integrates the equation on `[0, t_end]` with the classical fixed-step
/// Runge–Kutta scheme. Delayed values at the stages come from the dense
/// output built so far; when the deviated time falls inside the live step the
/// previous segment is extrapolated.
pub fn integrate(params: &Params, phi: &HistoryFunction, t_end: f64, step: f64) -> Result<Trajectory> {
    let p = params.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(domain(format!("step must be positive (got {step})")));
    }
    if step > p.a / 4.0 {
        return Err(Error::StepTooLarge { step, limit: p.a / 4.0 });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(domain(format!("t_end must be positive (got {t_end})")));
    }
    let (lo, _) = phi.range();
    if !lo.is_finite() || lo < p.m0() {
        return Err(domain(format!("history must stay >= M0 = {} (min {lo})", p.m0())));
    }

    let full = (t_end / step).floor() as usize;
    let tail = t_end - full as f64 * step;
    let n_steps = if tail > 1e-9 * step { full + 1 } else { full };
    let time_of = |i: usize| if i == n_steps { t_end } else { i as f64 * step };

    let mut t = Vec::with_capacity(n_steps + 1);
    let mut u = Vec::with_capacity(n_steps + 1);
    let mut udot = Vec::with_capacity(n_steps + 1);
    let u0 = phi.at_zero();
    t.push(0.0);
    u.push(u0);
    udot.push(rhs(&p, 0.0, u0, |s| phi.eval(s))?);

    for i in 0..n_steps {
        let (t0, t1) = (t[i], time_of(i + 1));
        let h = t1 - t0;
        let y0 = u[i];
        let nodes = Nodes { history: phi, t: &t, u: &u, udot: &udot };
        let f = |ts: f64, us: f64| rhs(&p, ts, us, |s| nodes.value(s));
        let k1 = udot[i];
        let k2 = f(t0 + 0.5 * h, y0 + 0.5 * h * k1)?;
        let k3 = f(t0 + 0.5 * h, y0 + 0.5 * h * k2)?;
        let k4 = f(t1, y0 + h * k3)?;
        let y1 = y0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let d1 = f(t1, y1)?;
        t.push(t1);
        u.push(y1);
        udot.push(d1);
    }

    let mut traj = Trajectory { params: p, history: phi.clone(), step, t, u, udot, extrema: Vec::new() };
    traj.extrema = find_extrema(&traj, 0.0);
    Ok(traj)
}

impl Trajectory {
    fn nodes(&self) -> Nodes<'_> {
        Nodes { history: &self.history, t: &self.t, u: &self.u, udot: &self.udot }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn history(&self) -> &HistoryFunction {
        &self.history
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn slopes(&self) -> &[f64] {
        &self.udot
    }

    /// Extrema on `(0, t_end)`, alternating in kind.
    pub fn extrema(&self) -> &[ExtremumRecord] {
        &self.extrema
    }

    pub fn segment_count(&self) -> usize {
        self.t.len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment {
        self.nodes().segment(i)
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.segment_count()).map(|i| self.segment(i))
    }

    /// Index of the segment containing `t`, for `t` in `[0, t_end]`.
    pub fn segment_index(&self, t: f64) -> usize {
        let n = self.t.len();
        self.t.partition_point(|&ti| ti < t).clamp(1, n - 1) - 1
    }

    /// `u(t)`: history for `t <= 0`, dense output on `[0, t_end]`.
    pub fn value(&self, t: f64) -> f64 {
        self.nodes().value(t)
    }

    /// `u'(t)` evaluated from the equation along the dense output.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        rhs(&self.params, t, self.value(t), |s| self.value(s))
    }

    /// Smallest and largest stored node value.
    pub fn node_range(&self) -> (f64, f64) {
        self.u
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn write_csv_to(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "t,u,udot")?;
        for ((t, u), d) in self.t.iter().zip(&self.u).zip(&self.udot) {
            writeln!(out, "{t:.16e},{u:.16e},{d:.16e}")?;
        }
        Ok(())
    }

    /// Writes `t,u,udot` rows, one per node.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| self.write_csv_to(w))
    }
}

/// Interval that the existence theorem confines the solution to:
/// `[M0, max(N0, phi(0))]` when `sigma <= 0`. For `sigma > 0` the solution
/// cannot exceed `max(0, sup phi)`.
pub fn state_envelope(params: &Params, phi: &HistoryFunction) -> (f64, f64) {
    let hi = if params.sigma <= 0.0 {
        params.n0().max(phi.at_zero())
    } else {
        phi.range().1.max(0.0)
    };
    (params.m0(), hi)
}
