//! End-to-end acceptance criteria. Runs as a plain binary so that every
//! criterion prints its own PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::E;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use razbound_core::model::{boundary_sigma, stability_boundary_point, Params};
use razbound_core::razumikhin::{
    bound_root_m, bound_root_n, dq_dv, is_gas, iterate_bounds, lambert_w_restricted, limit_bounds,
    q_closed, q_quadrature, switch_continuity_gap, GasVerdict, LimitBounds, Order, DEFAULT_MAX_ITER,
};
use razbound_core::sdde::{
    classify_behaviour, integrate, tail_amplitude, Behaviour, ExtremumKind, HistoryFunction,
    Trajectory,
};
use razbound_core::sweep::{sweep_limit_bounds, Axis, GridSpec, RowStatus, SweepRow};
use razbound_core::verify::sample_q_point;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(mu: f64, sigma: f64) -> Params {
    Params::new(1.0, 1.0, mu, sigma).unwrap()
}

fn limit(k: Order, p: &Params) -> LimitBounds {
    limit_bounds(k, p, 1e-9, DEFAULT_MAX_ITER).unwrap()
}

/// Every simulation made by the suite, for the boundedness criterion.
type Criterion = (&'static str, fn() -> Outcome);
type RunLog = Mutex<Vec<(String, Params, f64, f64, f64)>>;

fn runs() -> &'static RunLog {
    static RUNS: OnceLock<RunLog> = OnceLock::new();
    RUNS.get_or_init(|| Mutex::new(Vec::new()))
}

fn simulate(label: &str, p: &Params, phi0: f64, t_end: f64) -> Trajectory {
    let traj = integrate(p, &HistoryFunction::Constant(phi0), t_end, 1e-3).unwrap();
    let (lo, hi) = traj.node_range();
    runs().lock().unwrap().push((label.to_string(), *p, phi0, lo, hi));
    traj
}

fn fig4a() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| {
        let p = params(-0.25, -1.75);
        simulate("fig4a", &p, 0.99 * p.n0(), 200.0)
    })
}

fn grids() -> &'static (Vec<SweepRow>, Vec<SweepRow>, Duration) {
    static GRIDS: OnceLock<(Vec<SweepRow>, Vec<SweepRow>, Duration)> = OnceLock::new();
    GRIDS.get_or_init(|| {
        let spec = |k| GridSpec {
            mu: Axis::new(-3.0, -0.05, 100).unwrap(),
            sigma: Axis::new(-3.2, -0.05, 100).unwrap(),
            a: 1.0,
            c: 1.0,
            k,
        };
        let start = Instant::now();
        let one = sweep_limit_bounds(&spec(Order::One), 1e-9).unwrap();
        let two = sweep_limit_bounds(&spec(Order::Two), 1e-9).unwrap();
        (one, two, start.elapsed())
    })
}

fn c01_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for k in Order::BOTH {
        for _ in 0..1000 {
            let s = sample_q_point(&mut rng, k);
            let q = q_closed(k, s.v, s.x, s.y, &s.params).unwrap();
            let oracle = q_quadrature(k, s.v, s.x, s.y, &s.params, 4).unwrap();
            let err = (q - oracle).abs() / (1.0 + q.abs());
            ensure(err <= 1e-8, || format!("k={k} {s:?}: closed {q} quadrature {oracle}"))?;
            worst = worst.max(err);
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("2000 tuples, worst scaled error {worst:.1e}, {took:.2?}"))
}

fn c02_derivative() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < 500 {
        let k = if taken % 2 == 0 { Order::One } else { Order::Two };
        let s = sample_q_point(&mut rng, k);
        let (lo, hi) = if s.y <= 0.0 { (s.y, 0.0) } else { (0.0, s.y) };
        if s.v - 10.0 * h <= lo || s.v + 10.0 * h >= hi {
            continue;
        }
        if k == Order::Two {
            if let Some(gap) = switch_continuity_gap(s.x, s.y, &s.params).unwrap() {
                if (s.v - gap.v_switch).abs() < 1e-4 {
                    continue;
                }
            }
        }
        taken += 1;
        let q = |v| q_closed(k, v, s.x, s.y, &s.params).unwrap();
        let fd = (q(s.v + h) - q(s.v - h)) / (2.0 * h);
        let d = dq_dv(k, s.v, s.x, s.y, &s.params).unwrap();
        let err = (d - fd).abs() / d.abs().max(1.0);
        ensure(err <= 1e-5, || format!("k={k} {s:?}: dq {d} fd {fd}"))?;
        worst = worst.max(err);
    }
    let mut switches = 0;
    let mut gap_worst: f64 = 0.0;
    while switches < 200 {
        let s = sample_q_point(&mut rng, Order::Two);
        if let Some(gap) = switch_continuity_gap(s.x, s.y, &s.params).unwrap() {
            switches += 1;
            let g = gap.q_gap.max(gap.dq_gap);
            ensure(g <= 1e-10, || format!("{s:?}: {gap:?}"))?;
            gap_worst = gap_worst.max(g);
        }
    }
    Ok(format!("500 points, worst relative error {worst:.1e}; 200 switches, worst gap {gap_worst:.1e}"))
}

fn c03_lambert() -> Outcome {
    let n = 10_000;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let z = -1.0 / E + (1.0 / E) * i as f64 / n as f64;
        let w = lambert_w_restricted(z).map_err(|e| format!("z={z}: {e}"))?;
        ensure(w <= -1.0, || format!("W({z}) = {w} > -1"))?;
        let r = (w * w.exp() - z).abs();
        ensure(r <= 1e-12, || format!("W({z}) residual {r}"))?;
        worst = worst.max(r);
    }
    let w = lambert_w_restricted(-1.0 / E).unwrap();
    ensure((w + 1.0).abs() <= 1e-10, || format!("W(-1/e) = {w}"))?;
    Ok(format!("worst residual {worst:.1e}, W(-1/e) + 1 = {:.1e}", w + 1.0))
}

fn c04_lemmas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut grids = 0;
    let mut signs = 0;
    for _ in 0..10 {
        let mu: f64 = rng.gen_range(-3.0..-0.05);
        let sigma = rng.gen_range(-3.2..=mu);
        let p = params(mu, sigma);
        let (m0, n0) = (p.m0(), p.n0());
        for k in Order::BOTH {
            let y_lo = rng.gen_range(m0..=0.0);
            let y_hi = rng.gen_range(0.0..=n0);
            let (mut prev_m, mut prev_n) = (f64::INFINITY, f64::INFINITY);
            for i in 0..100 {
                let t = i as f64 / 99.0;
                let (x_pos, x_neg) = (n0 * t, m0 * (1.0 - t));
                let m = bound_root_m(k, x_pos, y_lo, &p, 1e-12).unwrap();
                let n = bound_root_n(k, x_neg, y_hi, &p, 1e-12).unwrap();
                ensure(m <= prev_m + 1e-9, || format!("M not nonincreasing at x={x_pos} ({p:?}, k={k})"))?;
                ensure(n <= prev_n + 1e-9, || format!("N not nonincreasing at x={x_neg} ({p:?}, k={k})"))?;
                prev_m = m;
                prev_n = n;
                let m_lo = m0.max(-sigma * x_pos / mu);
                let n_hi = -sigma * x_neg / mu;
                ensure(m_lo <= m && m <= 0.0, || format!("M={m} outside [{m_lo}, 0]"))?;
                ensure(0.0 <= n && n <= n_hi, || format!("N={n} outside [0, {n_hi}]"))?;
                for (root, lo, hi, x, y) in [(m, m_lo, 0.0, x_pos, y_lo), (n, 0.0, n_hi, x_neg, y_hi)] {
                    for j in 0..50 {
                        let f = (j as f64 + 0.5) / 50.0;
                        let below = lo + f * (root - lo);
                        let above = root + f * (hi - root);
                        if below < root {
                            let q = q_closed(k, below, x, y, &p).unwrap();
                            ensure(q <= 1e-14, || format!("Q({below}) = {q} > 0 below root {root}"))?;
                        }
                        if above > root {
                            let q = q_closed(k, above, x, y, &p).unwrap();
                            ensure(q >= -1e-14, || format!("Q({above}) = {q} < 0 above root {root}"))?;
                        }
                        signs += 2;
                    }
                }
            }
            grids += 2;
        }
    }
    Ok(format!("{grids} x-grids of 100 points, {signs} sign samples"))
}

fn c05_k_ordering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compared = 0;
    for _ in 0..20 {
        let mu: f64 = rng.gen_range(-3.0..-0.05);
        let p = params(mu, rng.gen_range(-3.2..=mu));
        let t1 = iterate_bounds(Order::One, &p, 200, 1e-12).unwrap();
        let t2 = iterate_bounds(Order::Two, &p, 200, 1e-12).unwrap();
        let last1 = t1.last();
        let last2 = t2.last();
        for n in 0..t1.pairs.len().max(t2.pairs.len()) {
            let a = t1.pairs.get(n).copied().unwrap_or(last1);
            let b = t2.pairs.get(n).copied().unwrap_or(last2);
            ensure(a.m <= b.m + 1e-12 && b.m <= 0.0 && 0.0 <= b.n && b.n <= a.n + 1e-12, || {
                format!("{p:?} n={n}: k1 {a:?} k2 {b:?}")
            })?;
            compared += 1;
        }
    }
    Ok(format!("20 parameter points, {compared} iterate pairs"))
}

fn c06_fixed_point() -> Outcome {
    let (one, two, took) = grids();
    let mut ok = 0;
    let mut failed = 0;
    let mut worst: f64 = 0.0;
    for row in one.iter().chain(two) {
        match row.status {
            RowStatus::Ok => {
                ensure(row.residual <= 1e-9, || format!("{row:?}"))?;
                worst = worst.max(row.residual);
                ok += 1;
            }
            RowStatus::Failed => failed += 1,
            RowStatus::Skipped => {}
        }
    }
    ensure(*took < Duration::from_secs(300), || format!("sweeps took {took:?}"))?;
    Ok(format!("{ok} converged rows (both k), {failed} not converged, worst residual {worst:.1e}, {took:.2?}"))
}

fn c07_fig4a() -> Outcome {
    let traj = fig4a();
    let p = *traj.params();
    let behaviour = classify_behaviour(traj, 50.0);
    ensure(behaviour == Behaviour::Oscillatory, || format!("classified {behaviour}"))?;
    let (lo, hi) = tail_amplitude(traj, 50.0);
    let (l1, l2) = (limit(Order::One, &p).pair, limit(Order::Two, &p).pair);
    ensure(l1.m <= l2.m && l2.m <= lo && lo < 0.0 && 0.0 < hi && hi <= l2.n && l2.n <= l1.n, || {
        format!("k1 {l1:?} k2 {l2:?} tail ({lo}, {hi})")
    })?;
    Ok(format!(
        "Oscillatory; {:.4} <= {:.4} <= {lo:.4} < 0 < {hi:.4} <= {:.4} <= {:.4}",
        l1.m, l2.m, l2.n, l1.n
    ))
}

fn c08_fig4c() -> Outcome {
    let p = params(-2.0, -2.8);
    let traj = simulate("fig4c", &p, 0.99 * p.n0(), 500.0);
    let (lo, hi) = tail_amplitude(&traj, 50.0);
    let amp = lo.abs().max(hi.abs());
    ensure(amp <= 1e-4, || format!("tail amplitude {amp}"))?;
    let behaviour = classify_behaviour(&traj, 50.0);
    ensure(behaviour != Behaviour::Oscillatory, || "classified Oscillatory".into())?;
    let l = limit(Order::Two, &p).pair;
    ensure(l.n >= 1e-3, || format!("limit {l:?} is trivial"))?;
    let note = match behaviour {
        Behaviour::MonotoneConverging => "MonotoneConverging",
        _ => "Undetermined-then-converged",
    };
    Ok(format!("{note}; tail amplitude {amp:.1e}; k=2 limit ({:.4}, {:.4})", l.m, l.n))
}

fn c09_cone() -> Outcome {
    let mut out = Vec::new();
    for sigma in [1.5, -1.5] {
        let p = params(-2.0, sigma);
        let traj = simulate("cone", &p, 0.5, 500.0);
        let end = traj.value(500.0);
        ensure(end.abs() <= 1e-6, || format!("sigma={sigma}: u(500) = {end}"))?;
        for k in Order::BOTH {
            let v = is_gas(&p, k, 1e-9).unwrap();
            ensure(v == GasVerdict::Cone, || format!("sigma={sigma}: {v}"))?;
        }
        out.push(format!("sigma={sigma}: |u(500)|={:.1e}", end.abs()));
    }
    Ok(format!("{}; GAS_cone", out.join(", ")))
}

fn c10_boundedness() -> Outcome {
    let runs = runs().lock().unwrap();
    ensure(runs.len() >= 6, || format!("only {} runs recorded", runs.len()))?;
    for (label, p, phi0, lo, hi) in runs.iter() {
        let upper = p.n0().max(*phi0);
        ensure(*lo >= p.m0() - 1e-6 && *hi <= upper + 1e-6, || {
            format!("{label} {p:?}: range [{lo}, {hi}] vs [{}, {upper}]", p.m0())
        })?;
    }
    Ok(format!("{} runs inside [m0, max(n0, phi(0))]", runs.len()))
}

fn c11_linear_boundary() -> Outcome {
    let (mu, sigma) = stability_boundary_point(2.0, 1.0).unwrap();
    ensure((mu + 0.915_315_108_720_571_5).abs() < 1e-12 && (sigma + 2.199_500_340_589_233).abs() < 1e-12, || {
        format!("boundary point ({mu}, {sigma})")
    })?;
    let swing = |traj: &Trajectory, t0: f64, t1: f64| {
        let (t, u) = (traj.times(), traj.values());
        let inside = t.iter().zip(u).filter(|(&ti, _)| ti >= t0 && ti <= t1).map(|(_, &ui)| ui);
        let (lo, hi) = inside.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let stable = simulate("boundary-in", &params(mu, sigma + 0.05), 0.01, 400.0);
    let unstable = simulate("boundary-out", &params(mu, sigma - 0.05), 0.01, 400.0);
    let (s_early, s_late) = (swing(&stable, 50.0, 100.0), swing(&stable, 350.0, 400.0));
    let (u_early, u_late) = (swing(&unstable, 50.0, 100.0), swing(&unstable, 350.0, 400.0));
    ensure(s_late < s_early, || format!("inside: swing {s_early} -> {s_late}"))?;
    ensure(u_late >= u_early, || format!("outside: swing {u_early} -> {u_late}"))?;
    Ok(format!(
        "({mu:.5}, {sigma:.5}); inside swing {s_early:.2e} -> {s_late:.2e}, outside {u_early:.2e} -> {u_late:.2e}"
    ))
}

fn c12_gas_nesting() -> Outcome {
    let (one, two, _) = grids();
    let mut certified = (0, 0);
    let mut cones = 0;
    for (r1, r2) in one.iter().zip(two) {
        ensure((r1.mu, r1.sigma) == (r2.mu, r2.sigma), || "grids misaligned".into())?;
        ensure(!r1.gas || r2.gas, || format!("k=1 certified but not k=2 at ({}, {})", r1.mu, r1.sigma))?;
        if let Ok(p) = Params::new(1.0, 1.0, r1.mu, r1.sigma) {
            if p.in_cone() {
                ensure(r1.gas && r2.gas, || format!("cone point ({}, {}) not certified", r1.mu, r1.sigma))?;
                cones += 1;
            }
        }
        certified.0 += r1.gas as usize;
        certified.1 += r2.gas as usize;
    }
    ensure(certified.1 >= certified.0, || format!("counts {certified:?}"))?;
    Ok(format!("certified k=1 {}, k=2 {} (cone points {cones})", certified.0, certified.1))
}

fn c13_wedge_corner() -> Outcome {
    let p = params(-0.05, -1.5);
    let l = limit(Order::Two, &p).pair;
    let (rm, rn) = (l.m / p.m0(), l.n / p.n0());
    ensure((0.9..=1.0).contains(&rm) && (0.5..=0.7).contains(&rn), || {
        format!("m_inf/m0 = {rm}, n_inf/n0 = {rn}")
    })?;
    Ok(format!("m_inf/m0 = {rm:.4}, n_inf/n0 = {rn:.4}"))
}

fn c14_deep_wedge() -> Outcome {
    let edge = boundary_sigma(-5.0, 1.0).unwrap();
    ensure((edge + 5.660_558_641_232_645).abs() < 1e-9, || format!("wedge edge at mu=-5: {edge}"))?;
    let p = params(-5.0, -5.3);
    ensure(edge < p.sigma && p.sigma <= p.mu, || "point not inside the wedge".into())?;
    let full = p.n0() - p.m0();
    let mut ratios = Vec::new();
    for k in Order::BOTH {
        let l = limit(k, &p).pair;
        let ratio = (l.n - l.m) / full;
        ensure(ratio < 0.6, || format!("k={k}: width ratio {ratio}"))?;
        ratios.push(format!("k={k} {ratio:.4}"));
    }
    Ok(format!("edge sigma {edge:.6}; width ratios {}", ratios.join(", ")))
}

fn c15_extremum_inequalities() -> Outcome {
    let traj = fig4a();
    let p = *traj.params();
    let burn_in = 5.0 * (p.a + p.c * p.n0());
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in Order::BOTH {
        let trace = iterate_bounds(k, &p, 500, 1e-12).unwrap();
        for e in traj.extrema().iter().filter(|e| e.t >= burn_in) {
            let pair = trace.pairs[trace.pair_index_at(e.t).unwrap_or(0)];
            let excess = match e.kind {
                ExtremumKind::Max => q_closed(k, e.v, pair.m, pair.n, &p).unwrap(),
                ExtremumKind::Min => -q_closed(k, e.v, pair.n, pair.m, &p).unwrap(),
            };
            ensure(excess <= 1e-4, || format!("k={k} {e:?} bounds {pair:?}: excess {excess}"))?;
            worst = worst.max(excess);
            checked += 1;
        }
    }
    Ok(format!("{checked} extrema after t = {burn_in}, largest signed excess {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("oracle equivalence of Q", c01_oracle_equivalence),
        ("derivative and branch switch", c02_derivative),
        ("restricted Lambert W", c03_lambert),
        ("bound map lemmas", c04_lemmas),
        ("order-two dominance", c05_k_ordering),
        ("fixed-point residual on sweep", c06_fixed_point),
        ("periodic orbit inside bounds", c07_fig4a),
        ("convergence outside certificate", c08_fig4c),
        ("cone theorem", c09_cone),
        ("boundedness invariant", c10_boundedness),
        ("linear stability boundary", c11_linear_boundary),
        ("certified set nesting", c12_gas_nesting),
        ("wedge-corner ratios", c13_wedge_corner),
        ("deep-wedge width", c14_deep_wedge),
        ("extremum inequalities on orbit", c15_extremum_inequalities),
    ];
    // The boundedness check reads runs recorded by the simulation criteria.
    let order = [0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 13, 14, 11, 9];
    let mut results: Vec<Option<(bool, String)>> = vec![None; criteria.len()];
    for &i in &order {
        let (_, f) = criteria[i];
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        results[i] = Some(match outcome {
            Ok(d) => (true, format!("{d} [{secs:.2}s]")),
            Err(d) => (false, format!("{d} [{secs:.2}s]")),
        });
    }
    let mut failed = 0;
    println!();
    for (i, ((name, _), r)) in criteria.iter().zip(&results).enumerate() {
        let (ok, detail) = r.clone().unwrap();
        failed += !ok as usize;
        println!("criterion {:>2} {:<34} {}  {detail}", i + 1, name, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
