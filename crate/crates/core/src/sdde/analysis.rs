use std::fmt;

use crate::razumikhin::sign3;

use super::trajectory::Trajectory;

/// Time resolution of located extrema.
pub const EXTREMUM_TIME_TOL: f64 = 1e-10;

/// Swing ratio (last over first, within the window) above which alternating
/// extrema count as sustained oscillation.
pub const SUSTAINED_SWING_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumRecord {
    pub t: f64,
    pub v: f64,
    pub kind: ExtremumKind,
}

fn refine(traj: &Trajectory, mut lo: f64, mut hi: f64, s_lo: f64) -> f64 {
    let g = |t: f64| traj.derivative(t).map(sign3).unwrap_or(0.0);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo == 0.0 {
        return lo;
    }
    if g_hi == 0.0 {
        return hi;
    }
    if g_lo != s_lo || g_hi == g_lo {
        // The equation-based slope disagrees with the stored node slopes at
        // rounding level; the node bracket is the best available answer.
        return 0.5 * (lo + hi);
    }
    while hi - lo > EXTREMUM_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match g(mid) {
            0.0 => return mid,
            s if s == g_lo => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo + hi)
}

/// Local extrema after `t_start`, located as sign changes of `u'` and refined
/// by bisection on the equation's right-hand side along the dense output.
pub fn find_extrema(traj: &Trajectory, t_start: f64) -> Vec<ExtremumRecord> {
    let (t, d) = (traj.times(), traj.slopes());
    let mut out = Vec::new();
    if t_start >= traj.t_end() {
        return out;
    }
    let first = traj.segment_index(t_start.max(0.0));
    let mut last: Option<(usize, f64)> = None;
    for i in first..t.len() {
        let s = sign3(d[i]);
        if s == 0.0 {
            continue;
        }
        if let Some((j, s_prev)) = last {
            if s != s_prev {
                let te = refine(traj, t[j], t[i], s_prev);
                if te > t_start {
                    let kind = if s_prev > 0.0 { ExtremumKind::Max } else { ExtremumKind::Min };
                    out.push(ExtremumRecord { t: te, v: traj.value(te), kind });
                }
            }
        }
        last = Some((i, s));
    }
    out
}

/// Long-run behaviour read off the final window of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Behaviour {
    MonotoneConverging,
    Oscillatory,
    Undetermined,
}

impl Behaviour {
    pub fn as_str(&self) -> &'static str {
        match self {
            Behaviour::MonotoneConverging => "MonotoneConverging",
            Behaviour::Oscillatory => "Oscillatory",
            Behaviour::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for Behaviour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies the final `window` of the run.
///
/// * no extrema and `|u|` not growing: `MonotoneConverging`;
/// * four or more extrema whose swing has not decayed below
///   [`SUSTAINED_SWING_RATIO`] of its value at the start of the window:
///   `Oscillatory`;
/// * anything else, including decaying oscillations: `Undetermined`.
pub fn classify_behaviour(traj: &Trajectory, window: f64) -> Behaviour {
    let t_end = traj.t_end();
    if !(window > 0.0) || t_end < 2.0 * window {
        return Behaviour::Undetermined;
    }
    let t0 = t_end - window;
    let ext: Vec<&ExtremumRecord> = traj.extrema().iter().filter(|e| e.t >= t0).collect();
    if ext.is_empty() {
        return if traj.value(t_end).abs() <= traj.value(t0).abs() {
            Behaviour::MonotoneConverging
        } else {
            Behaviour::Undetermined
        };
    }
    if ext.len() >= 4 {
        let first = (ext[1].v - ext[0].v).abs();
        let last = (ext[ext.len() - 1].v - ext[ext.len() - 2].v).abs();
        if first > 0.0 && last >= SUSTAINED_SWING_RATIO * first {
            return Behaviour::Oscillatory;
        }
    }
    Behaviour::Undetermined
}

/// `(min u, max u)` over `[t_end - window, t_end]`.
pub fn tail_amplitude(traj: &Trajectory, window: f64) -> (f64, f64) {
    let t_end = traj.t_end();
    let t0 = (t_end - window).max(0.0);
    let start = traj.value(t0);
    let mut range = (start, start);
    let mut take = |v: f64| range = (range.0.min(v), range.1.max(v));
    let first = traj.segment_index(t0) + 1;
    traj.values()[first..].iter().for_each(|&v| take(v));
    traj.extrema().iter().filter(|e| e.t >= t0).for_each(|e| take(e.v));
    range
}
