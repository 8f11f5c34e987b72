use std::fs;
use std::path::Path;

use crate::error::{domain, Error, Result};

/// Monotone piecewise-cubic interpolant (Fritsch–Carlson) through `(t, u)`
/// knots. Outside the knot range the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryTable {
    t: Vec<f64>,
    u: Vec<f64>,
    slope: Vec<f64>,
}

impl HistoryTable {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(domain("history table needs at least two knots"));
        }
        if knots.iter().any(|&(t, u)| !t.is_finite() || !u.is_finite()) {
            return Err(domain("history table has non-finite entries"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(domain("history knots must have strictly increasing t"));
        }
        let t: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let u: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let slope = fritsch_carlson(&t, &u);
        Ok(Self { t, u, slope })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.u.iter().copied())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.u[0];
        }
        if t >= self.t[n - 1] {
            return self.u[n - 1];
        }
        let i = self.t.partition_point(|&ti| ti <= t) - 1;
        hermite(self.t[i], self.t[i + 1], self.u[i], self.u[i + 1], self.slope[i], self.slope[i + 1], t)
    }

    fn min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn fritsch_carlson(t: &[f64], u: &[f64]) -> Vec<f64> {
    let n = t.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (u[i + 1] - u[i]) / (t[i + 1] - t[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let alpha = m[i] / delta[i];
        let beta = m[i + 1] / delta[i];
        let r2 = alpha * alpha + beta * beta;
        if r2 > 9.0 {
            let scale = 3.0 / r2.sqrt();
            m[i] = scale * alpha * delta[i];
            m[i + 1] = scale * beta * delta[i];
        }
    }
    m
}

/// Cubic Hermite interpolant on `[t0, t1]`, also valid as an extrapolant.
pub(crate) fn hermite(t0: f64, t1: f64, u0: f64, u1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * u0 + h10 * h * d0 + h01 * u1 + h11 * h * d1
}

/// Initial history `u(t) = phi(t)` for `t <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum HistoryFunction {
    Constant(f64),
    Table(HistoryTable),
}

impl HistoryFunction {
    pub fn table(knots: &[(f64, f64)]) -> Result<Self> {
        HistoryTable::new(knots).map(HistoryFunction::Table)
    }

    /// Reads `t,u` rows from a CSV file. A non-numeric first line is taken
    /// as a header.
    pub fn load_table(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut knots = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let parsed = match (cols.next(), cols.next()) {
                (Some(t), Some(u)) => t.parse::<f64>().ok().zip(u.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some(knot) => knots.push(knot),
                None if knots.is_empty() && lineno == 0 => continue,
                None => {
                    return Err(Error::Parse(format!(
                        "{}:{}: expected `t,u`, got `{line}`",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Self::table(&knots)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            HistoryFunction::Constant(v) => *v,
            HistoryFunction::Table(tab) => tab.eval(t),
        }
    }

    pub fn at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// Range of values taken; exact because the monotone interpolant never
    /// overshoots its knots.
    pub fn range(&self) -> (f64, f64) {
        match self {
            HistoryFunction::Constant(v) => (*v, *v),
            HistoryFunction::Table(tab) => (tab.min(), tab.max()),
        }
    }
}
