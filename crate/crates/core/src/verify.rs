//! Self-checks of the closed forms against independent oracles: adaptive
//! quadrature, finite differences, the defining equation of Lambert W, the
//! monotonicity lemmas of the bound maps, and extremum inequalities on a
//! simulated orbit.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::Params;
use crate::razumikhin::{
    bound_root_m, bound_root_n, dq_dv, iterate_bounds, lambert_w_restricted, q_closed, q_quadrature,
    switch_continuity_gap, Order, BURN_IN_DELAYS,
};
use crate::sdde::{integrate, ExtremumKind, HistoryFunction};

/// Settings for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    /// Relative perturbation applied to the closed form before comparison.
    /// Zero in normal use; nonzero values exist to prove the suites can fail.
    pub perturb: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 20_240_601, samples: 1000, perturb: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    /// Largest error seen, in the suite's own normalisation.
    pub worst: f64,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, checks: 0, failures: 0, worst: 0.0 }
    }

    fn record(&mut self, err: f64, limit: f64) {
        self.checks += 1;
        if err.is_nan() || err > limit {
            self.failures += 1;
        }
        if err.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(err);
        }
    }

    fn fail(&mut self) {
        self.record(f64::NAN, 0.0);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// A random evaluation point of `Q_k(v, x, y)` in its extremum domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSample {
    pub params: Params,
    pub k: Order,
    pub v: f64,
    pub x: f64,
    pub y: f64,
}

/// Draws `mu` in `[-3, -0.05]`, `sigma` in `[-3.2, mu]` with `a = c = 1`, then
/// a minimum- or maximum-case tuple with `v` between the near bound and 0.
pub fn sample_q_point(rng: &mut impl Rng, k: Order) -> QSample {
    let mu = rng.gen_range(-3.0..-0.05);
    let sigma = rng.gen_range(-3.2..=mu);
    let params = Params { a: 1.0, c: 1.0, mu, sigma };
    let (m0, n0) = (params.m0(), params.n0());
    let (v, x, y) = if rng.gen_bool(0.5) {
        let y = rng.gen_range(m0..=0.0);
        (rng.gen_range(y..=0.0), rng.gen_range(0.0..=n0), y)
    } else {
        let y = rng.gen_range(0.0..=n0);
        (rng.gen_range(0.0..=y), rng.gen_range(m0..=0.0), y)
    };
    QSample { params, k, v, x, y }
}

pub fn suite_quadrature(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("q_closed_vs_quadrature");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for k in Order::BOTH {
        for _ in 0..cfg.samples {
            let s = sample_q_point(&mut rng, k);
            match (q_closed(k, s.v, s.x, s.y, &s.params), q_quadrature(k, s.v, s.x, s.y, &s.params, 4)) {
                (Ok(q), Ok(oracle)) => {
                    let q = q * (1.0 + cfg.perturb);
                    rep.record((q - oracle).abs() / (1.0 + q.abs()), 1e-8);
                }
                _ => rep.fail(),
            }
        }
    }
    rep
}

pub fn suite_derivative(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("dq_dv_vs_finite_difference");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let h = 1e-6;
    let n = (cfg.samples / 2).max(1);
    for k in Order::BOTH {
        let mut taken = 0;
        while taken < n {
            let s = sample_q_point(&mut rng, k);
            let (lo, hi) = if s.y <= 0.0 { (s.y, 0.0) } else { (0.0, s.y) };
            if s.v - h <= lo || s.v + h >= hi {
                continue;
            }
            if k == Order::Two {
                if let Ok(Some(gap)) = switch_continuity_gap(s.x, s.y, &s.params) {
                    if (s.v - gap.v_switch).abs() < 1e-4 {
                        continue;
                    }
                }
            }
            taken += 1;
            let q = |v: f64| q_closed(k, v, s.x, s.y, &s.params).map(|q| q * (1.0 + cfg.perturb));
            match (dq_dv(k, s.v, s.x, s.y, &s.params), q(s.v + h), q(s.v - h)) {
                (Ok(d), Ok(qp), Ok(qm)) => {
                    let fd = (qp - qm) / (2.0 * h);
                    rep.record((d - fd).abs() / d.abs().max(1.0), 1e-5);
                }
                _ => rep.fail(),
            }
        }
    }
    rep
}

pub fn suite_switch_continuity(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("order_two_branch_switch");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5717);
    let mut attempts = 0;
    while rep.checks < cfg.samples.clamp(1, 200) && attempts < 100 * cfg.samples.max(1) {
        attempts += 1;
        let s = sample_q_point(&mut rng, Order::Two);
        match switch_continuity_gap(s.x, s.y, &s.params) {
            Ok(Some(gap)) => rep.record(gap.q_gap.max(gap.dq_gap), 1e-10),
            Ok(None) => {}
            Err(_) => rep.fail(),
        }
    }
    rep
}

pub fn suite_lambert(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("lambert_w_restricted");
    let n = (10 * cfg.samples).max(2);
    for i in 0..n {
        let z = -1.0 / E * (1.0 - i as f64 / n as f64);
        match lambert_w_restricted(z) {
            Ok(w) if w <= -1.0 => rep.record((w * w.exp() - z).abs(), 1e-12),
            _ => rep.fail(),
        }
    }
    match lambert_w_restricted(-1.0 / E) {
        Ok(w) => rep.record((w + 1.0).abs(), 1e-10),
        Err(_) => rep.fail(),
    }
    rep
}

/// Monotonicity in the far bound, root intervals and the sign structure of
/// `Q_k` on both sides of each root.
pub fn suite_lemmas(cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("bound_map_lemmas");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1e77);
    let points = (cfg.samples / 100).clamp(1, 20);
    for _ in 0..points {
        let mu: f64 = rng.gen_range(-3.0..-0.05);
        let sigma = rng.gen_range(-3.2..=mu);
        let p = Params { a: 1.0, c: 1.0, mu, sigma };
        let (m0, n0) = (p.m0(), p.n0());
        for k in Order::BOTH {
            let y_lo = rng.gen_range(m0..=0.0);
            let y_hi = rng.gen_range(0.0..=n0);
            let mut prev_m = f64::INFINITY;
            let mut prev_n = f64::INFINITY;
            for i in 0..100 {
                let t = i as f64 / 99.0;
                let x_pos = n0 * t;
                let x_neg = m0 * (1.0 - t);
                let (Ok(m), Ok(n)) =
                    (bound_root_m(k, x_pos, y_lo, &p, 1e-12), bound_root_n(k, x_neg, y_hi, &p, 1e-12))
                else {
                    rep.fail();
                    continue;
                };
                rep.record((m - prev_m).max(0.0), 1e-9);
                rep.record((n - prev_n).max(0.0), 1e-9);
                prev_m = m;
                prev_n = n;
                let m_lo = m0.max(-sigma * x_pos / mu);
                let n_hi = -sigma * x_neg / mu;
                rep.record((m_lo - m).max(0.0) + m.max(0.0), 1e-12);
                rep.record((-n).max(0.0) + (n - n_hi).max(0.0), 1e-12);
                if i % 33 == 17 {
                    sign_structure(&mut rep, k, &p, m, m_lo, 0.0, x_pos, y_lo);
                    sign_structure(&mut rep, k, &p, n, 0.0, n_hi, x_neg, y_hi);
                }
            }
        }
    }
    rep
}

#[allow(clippy::too_many_arguments)]
fn sign_structure(rep: &mut SuiteReport, k: Order, p: &Params, root: f64, lo: f64, hi: f64, x: f64, y: f64) {
    for i in 0..50 {
        let f = (i as f64 + 0.5) / 50.0;
        for (v, below) in [(lo + f * (root - lo), true), (root + f * (hi - root), false)] {
            if v == root {
                continue;
            }
            match q_closed(k, v, x, y, p) {
                Ok(q) => rep.record(if below { q.max(0.0) } else { (-q).max(0.0) }, 1e-14),
                Err(_) => rep.fail(),
            }
        }
    }
}

/// Extremum inequalities on a simulated orbit: after burn-in every maximum
/// `v` has `Q_k(v, M, N) <= eps` and every minimum `Q_k(v, N, M) >= -eps`,
/// with `(M, N)` the bound pair in force at that time.
pub fn suite_extremum_inequalities(params: &Params, t_end: f64, eps: f64) -> SuiteReport {
    let mut rep = SuiteReport::new("extremum_q_inequalities");
    let phi = HistoryFunction::Constant(0.99 * params.n0());
    let Ok(traj) = integrate(params, &phi, t_end, 1e-3) else {
        rep.fail();
        return rep;
    };
    let burn_in = BURN_IN_DELAYS * (params.a + params.c * params.n0());
    for k in Order::BOTH {
        let Ok(trace) = iterate_bounds(k, params, 200, 0.0) else {
            rep.fail();
            continue;
        };
        for e in traj.extrema().iter().filter(|e| e.t >= burn_in) {
            let pair = trace.pairs[trace.pair_index_at(e.t).unwrap_or(0)];
            let q = match e.kind {
                ExtremumKind::Max => q_closed(k, e.v, pair.m, pair.n, params),
                ExtremumKind::Min => q_closed(k, e.v, pair.n, pair.m, params).map(|q| -q),
            };
            match q {
                Ok(q) => rep.record(q.max(0.0), eps),
                Err(_) => rep.fail(),
            }
        }
    }
    rep
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    let fig = Params { a: 1.0, c: 1.0, mu: -0.25, sigma: -1.75 };
    vec![
        suite_quadrature(cfg),
        suite_derivative(cfg),
        suite_switch_continuity(cfg),
        suite_lambert(cfg),
        suite_lemmas(cfg),
        suite_extremum_inequalities(&fig, 100.0, 1e-4),
    ]
}
