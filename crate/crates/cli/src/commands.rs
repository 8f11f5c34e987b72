use std::env;
use std::fmt::Display;
use std::io::Write;

use razbound_core::model::{boundary_sigma, classify_region, derived_constants, Params};
use razbound_core::razumikhin::{
    dq_dv, eval_domain, iterate_bounds, q_closed, q_quadrature, ExtremumCase, Order,
    DEFAULT_FIXED_POINT_TOL, DEFAULT_GAS_TOL, DEFAULT_MAX_ITER,
};
use razbound_core::sdde::{
    classify_behaviour, default_step, integrate, tail_amplitude, HistoryFunction,
};
use razbound_core::sweep::{
    compare_bounds_vs_orbit, emit_compare_csv, emit_csv, emit_heatmap_svg, gas_boundary, Axis,
    GridSpec, HeatField, OrbitRun, RowStatus, SweepOptions,
};
use razbound_core::verify::{run_all, VerifyConfig};
use razbound_core::write_atomic;

use crate::config::Config;
use crate::{Cli, CliError, Command, ModelArgs, ShapeArgs};

type Res<T = ()> = Result<T, CliError>;
type BoundaryColumn = Vec<(f64, Option<f64>)>;

struct Report<'a, W: Write> {
    out: &'a mut W,
}

impl<W: Write> Report<'_, W> {
    fn kv(&mut self, key: &str, value: impl Display) -> Res {
        writeln!(self.out, "{key}={value}").map_err(|e| CliError::failure(format!("stdout: {e}")))
    }

    fn line(&mut self, pairs: &[(&str, String)]) -> Res {
        let text: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(self.out, "{}", text.join(" ")).map_err(|e| CliError::failure(format!("stdout: {e}")))
    }
}

/// Shortest round-trip form, switching to exponent notation for very small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".into())
}

/// Worker count from `RAZ_THREADS`, if set.
fn threads() -> Res<Option<usize>> {
    match env::var("RAZ_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("RAZ_THREADS must be a positive integer (got `{s}`)"))),
        },
    }
}

fn order(k: u32) -> Res<Order> {
    Order::try_from(k).map_err(|e| CliError::usage(e.to_string()))
}

fn shape(cfg: &Config, s: &ShapeArgs) -> Res<(f64, f64)> {
    Ok((cfg.f64_or("a", s.a, 1.0)?, cfg.f64_or("c", s.c, 1.0)?))
}

fn model(cfg: &Config, m: &ModelArgs) -> Res<Params> {
    let (a, c) = shape(cfg, &m.shape)?;
    let mu = cfg.req_f64("mu", m.mu)?;
    let sigma = cfg.req_f64("sigma", m.sigma)?;
    Ok(Params::new(a, c, mu, sigma)?)
}

fn k_arg(cfg: &Config, k: Option<u32>) -> Res<Order> {
    order(cfg.usize_or("k", k.map(|k| k as usize), 1)? as u32)
}

fn positive(name: &str, x: f64) -> Res<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::usage(format!("--{name} must be positive (got {x})")))
    }
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Res {
    let cfg = Config::load(cli.config.as_deref())?;
    let mut r = Report { out };
    match cli.command {
        Command::Constants { model: m, n } => {
            let p = model(&cfg, &m)?;
            let n = cfg.f64("n", n)?;
            let dc = derived_constants(&p, n)?;
            r.kv("m0", num(dc.m0))?;
            r.kv("n0", num(dc.n0))?;
            r.kv("tau0", num(dc.tau0))?;
            r.kv("tau", num(dc.tau))?;
            r.kv("region", p.region())?;
        }
        Command::Region { mu, sigma, a } => {
            let mu = cfg.req_f64("mu", mu)?;
            let sigma = cfg.req_f64("sigma", sigma)?;
            let a = positive("a", cfg.f64_or("a", a, 1.0)?)?;
            let label = classify_region(mu, sigma, a);
            r.kv("region", label)?;
            r.kv("stable", label.is_stable())?;
            r.kv("cone", sigma.abs() < -mu)?;
            if mu < 0.0 {
                r.kv("curve_sigma", opt(boundary_sigma(mu, a)))?;
            }
        }
        Command::QEval { model: m, k, v, x, y } => {
            let p = model(&cfg, &m)?;
            let k = k_arg(&cfg, k)?;
            let v = cfg.req_f64("v", v)?;
            let x = cfg.req_f64("x", x)?;
            let y = cfg.req_f64("y", y)?;
            let case = eval_domain(&p, v, x, y)?;
            let q = q_closed(k, v, x, y, &p)?;
            let dq = dq_dv(k, v, x, y, &p)?;
            let quad = q_quadrature(k, v, x, y, &p, 4)?;
            r.kv("k", k)?;
            r.kv("case", if case == ExtremumCase::Max { "max" } else { "min" })?;
            r.kv("q", num(q))?;
            r.kv("dq_dv", num(dq))?;
            r.kv("q_quadrature", num(quad))?;
            r.kv("abs_diff", num((q - quad).abs()))?;
        }
        Command::Bounds { model: m, k, tol, gas_tol, max_iter, out } => {
            let p = model(&cfg, &m)?;
            let k = k_arg(&cfg, k)?;
            let tol = positive("tol", cfg.f64_or("tol", tol, DEFAULT_FIXED_POINT_TOL)?)?;
            let gas_tol = positive("gas-tol", cfg.f64_or("gas-tol", gas_tol, DEFAULT_GAS_TOL)?)?;
            let max_iter = cfg.usize_or("max-iter", max_iter, DEFAULT_MAX_ITER)?;
            let out = cfg.path("out", out)?;
            r.kv("k", k)?;
            r.kv("m0", num(p.m0()))?;
            r.kv("n0", num(p.n0()))?;
            if p.in_cone() {
                if let Some(path) = &out {
                    write_atomic(path, |w| writeln!(w, "n,t_settle,m,n"))?;
                }
                r.kv("m_inf", num(0.0))?;
                r.kv("n_inf", num(0.0))?;
                r.kv("iters", 0)?;
                r.kv("residual", num(0.0))?;
                r.kv("converged", true)?;
                r.kv("gas", true)?;
                r.kv("verdict", "GAS_cone")?;
                return Ok(());
            }
            let trace = iterate_bounds(k, &p, max_iter, tol)?;
            if let Some(path) = &out {
                trace.write_csv(path)?;
            }
            let last = trace.last();
            let gas = trace.converged && last.m.abs().max(last.n) <= gas_tol;
            r.kv("m_inf", num(last.m))?;
            r.kv("n_inf", num(last.n))?;
            r.kv("iters", trace.iterations())?;
            r.kv("residual", num(trace.residual))?;
            r.kv("converged", trace.converged)?;
            r.kv("gas", gas)?;
            r.kv("verdict", if gas { "GAS_fixed_point" } else { "NotCertified" })?;
            if !trace.converged {
                return Err(CliError::failure(format!(
                    "bound iteration did not converge in {} steps (residual {:e})",
                    trace.iterations(),
                    trace.residual
                )));
            }
        }
        Command::Simulate { model: m, phi, phi_factor, phi_table, t_end, step, window, out } => {
            let p = model(&cfg, &m)?;
            let phi = match (cfg.f64("phi", phi)?, cfg.path("phi-table", phi_table)?) {
                (Some(v), None) => HistoryFunction::Constant(v),
                (None, Some(path)) => HistoryFunction::load_table(&path)?,
                (Some(_), Some(_)) => return Err(CliError::usage("give either --phi or --phi-table")),
                (None, None) => HistoryFunction::Constant(cfg.f64_or("phi-factor", phi_factor, 0.99)? * p.n0()),
            };
            let t_end = positive("t-end", cfg.f64_or("t-end", t_end, 200.0)?)?;
            let step = cfg.f64_or("step", step, default_step(&p))?;
            let window = positive("window", cfg.f64_or("window", window, 50.0)?)?;
            let out = cfg.path("out", out)?;
            let traj = integrate(&p, &phi, t_end, step)?;
            if let Some(path) = &out {
                traj.write_csv(path)?;
            }
            let (lo, hi) = tail_amplitude(&traj, window);
            r.kv("behaviour", classify_behaviour(&traj, window))?;
            r.kv("tail_min", num(lo))?;
            r.kv("tail_max", num(hi))?;
            r.kv("tail_amplitude", num(lo.abs().max(hi.abs())))?;
            r.kv("u_end", num(traj.value(traj.t_end())))?;
            r.kv("extrema", traj.extrema().len())?;
            r.kv("steps", traj.segment_count())?;
            let (umin, umax) = traj.node_range();
            r.kv("u_min", num(umin))?;
            r.kv("u_max", num(umax))?;
        }
        Command::Sweep {
            shape: s,
            mu_min,
            mu_max,
            mu_count,
            sigma_min,
            sigma_max,
            sigma_count,
            k,
            tol,
            gas_tol,
            max_iter,
            out,
            svg,
            field,
        } => {
            let (a, c) = shape(&cfg, &s)?;
            let spec = GridSpec {
                mu: Axis::new(
                    cfg.f64_or("mu-min", mu_min, -3.0)?,
                    cfg.f64_or("mu-max", mu_max, -0.05)?,
                    cfg.usize_or("mu-count", mu_count, 200)?,
                )?,
                sigma: Axis::new(
                    cfg.f64_or("sigma-min", sigma_min, -3.2)?,
                    cfg.f64_or("sigma-max", sigma_max, -0.05)?,
                    cfg.usize_or("sigma-count", sigma_count, 200)?,
                )?,
                a,
                c,
                k: k_arg(&cfg, k)?,
            };
            spec.validate()?;
            let field: HeatField = cfg
                .string("field", field)?
                .map(|f| f.parse())
                .transpose()?
                .unwrap_or(HeatField::UpperImprovement);
            let opts = SweepOptions {
                tol: positive("tol", cfg.f64_or("tol", tol, DEFAULT_FIXED_POINT_TOL)?)?,
                gas_tol: positive("gas-tol", cfg.f64_or("gas-tol", gas_tol, DEFAULT_GAS_TOL)?)?,
                max_iter: cfg.usize_or("max-iter", max_iter, DEFAULT_MAX_ITER)?,
                threads: threads()?,
            };
            let (out, svg) = (cfg.path("out", out)?, cfg.path("svg", svg)?);
            let rows = razbound_core::sweep::sweep_limit_bounds_with(&spec, &opts)?;
            if let Some(path) = &out {
                emit_csv(&rows, path)?;
            }
            if let Some(path) = &svg {
                emit_heatmap_svg(&rows, field, a, c, path)?;
            }
            let count = |st: RowStatus| rows.iter().filter(|r| r.status == st).count();
            r.kv("rows", rows.len())?;
            r.kv("ok", count(RowStatus::Ok))?;
            r.kv("skipped", count(RowStatus::Skipped))?;
            r.kv("failed", count(RowStatus::Failed))?;
            r.kv("gas", rows.iter().filter(|r| r.gas).count())?;
        }
        Command::GasBoundary { shape: s, mu_values, mu_min, mu_max, mu_count, k, tol, out } => {
            let (a, c) = shape(&cfg, &s)?;
            let mut mus = cfg.f64_list("mu-values", mu_values)?;
            if mus.is_empty() {
                mus = Axis::new(
                    cfg.f64_or("mu-min", mu_min, -3.0)?,
                    cfg.f64_or("mu-max", mu_max, -0.05)?,
                    cfg.usize_or("mu-count", mu_count, 30)?,
                )?
                .values();
            }
            let orders = match cfg.string("k", k)?.as_deref().unwrap_or("both") {
                "1" => vec![Order::One],
                "2" => vec![Order::Two],
                "both" => Order::BOTH.to_vec(),
                other => return Err(CliError::usage(format!("--k must be 1, 2 or both (got `{other}`)"))),
            };
            let tol = positive("tol", cfg.f64_or("tol", tol, DEFAULT_GAS_TOL)?)?;
            let out = cfg.path("out", out)?;
            let threads = threads()?;
            let mut columns: [Option<BoundaryColumn>; 2] = [None, None];
            for k in orders {
                let col = gas_boundary(&mus, k, tol, a, c, threads)?;
                columns[k.k() as usize - 1] = Some(col);
            }
            let cell = |col: &Option<BoundaryColumn>, i: usize| col.as_ref().and_then(|c| c[i].1);
            let mut csv = String::from("mu,sigma_k1,sigma_k2\n");
            for (i, &mu) in mus.iter().enumerate() {
                let (s1, s2) = (cell(&columns[0], i), cell(&columns[1], i));
                r.line(&[("mu", num(mu)), ("sigma_k1", opt(s1)), ("sigma_k2", opt(s2))])?;
                let f = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
                csv.push_str(&format!("{mu:.16e},{},{}\n", f(s1), f(s2)));
            }
            if let Some(path) = &out {
                write_atomic(path, |w| w.write_all(csv.as_bytes()))?;
            }
        }
        Command::Compare {
            shape: s,
            mu,
            sigma_values,
            sigma_min,
            sigma_max,
            sigma_count,
            tol,
            t_end,
            step,
            window,
            out,
        } => {
            let (a, c) = shape(&cfg, &s)?;
            let mu = cfg.req_f64("mu", mu)?;
            let mut sigmas = cfg.f64_list("sigma-values", sigma_values)?;
            if sigmas.is_empty() {
                let lo = match cfg.f64("sigma-min", sigma_min)? {
                    Some(v) => v,
                    None if mu < 0.0 => boundary_sigma(mu, a).unwrap_or(mu - 1.0),
                    None => return Err(CliError::usage("missing --sigma-min")),
                };
                let hi = cfg.f64_or("sigma-max", sigma_max, mu)?;
                sigmas = Axis::new(lo, hi, cfg.usize_or("sigma-count", sigma_count, 20)?)?.values();
            }
            let tol = positive("tol", cfg.f64_or("tol", tol, DEFAULT_FIXED_POINT_TOL)?)?;
            let base = Params::new(a, c, -1.0, -2.0)?;
            let run = OrbitRun {
                t_end: positive("t-end", cfg.f64_or("t-end", t_end, 200.0)?)?,
                step: cfg.f64_or("step", step, default_step(&base))?,
                window: positive("window", cfg.f64_or("window", window, 50.0)?)?,
                ..OrbitRun::default()
            };
            let out = cfg.path("out", out)?;
            let rows = compare_bounds_vs_orbit(mu, &sigmas, a, c, tol, &run, threads()?)?;
            if let Some(path) = &out {
                emit_compare_csv(&rows, path)?;
            }
            for row in &rows {
                r.line(&[
                    ("sigma", num(row.sigma)),
                    ("m1", opt(row.k1.map(|b| b.m))),
                    ("n1", opt(row.k1.map(|b| b.n))),
                    ("m2", opt(row.k2.map(|b| b.m))),
                    ("n2", opt(row.k2.map(|b| b.n))),
                    ("sim_min", opt(row.sim.map(|s| s.0))),
                    ("sim_max", opt(row.sim.map(|s| s.1))),
                    ("status", row.status.to_string()),
                ])?;
            }
        }
        Command::Verify { seed, samples, perturb } => {
            let defaults = VerifyConfig::default();
            let vc = VerifyConfig {
                seed: cfg.u64_or("seed", seed, defaults.seed)?,
                samples: cfg.usize_or("samples", samples, defaults.samples)?,
                perturb: cfg.f64_or("perturb", perturb, 0.0)?,
            };
            if vc.samples == 0 {
                return Err(CliError::usage("--samples must be positive"));
            }
            let reports = run_all(&vc);
            let mut failed = 0;
            for rep in &reports {
                failed += !rep.passed() as usize;
                r.line(&[
                    ("suite", rep.name.to_string()),
                    ("checks", rep.checks.to_string()),
                    ("failures", rep.failures.to_string()),
                    ("worst", format!("{:e}", rep.worst)),
                    ("status", if rep.passed() { "PASS" } else { "FAIL" }.to_string()),
                ])?;
            }
            r.kv("result", if failed == 0 { "PASS" } else { "FAIL" })?;
            if failed > 0 {
                return Err(CliError::failure(format!("{failed} verification suite(s) failed")));
            }
        }
    }
    Ok(())
}
