use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io_util::write_atomic;

use super::{CompareRow, RowStatus, SweepRow};

pub const CSV_HEADER: &str = "mu,sigma,m_inf,n_inf,iters,residual,gas,region,status";

const COMPARE_HEADER: &str = "sigma,m1,n1,m2,n2,sim_min,sim_max,status";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_csv(rows: &[SweepRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(r.mu),
            num(r.sigma),
            opt(r.m_inf),
            opt(r.n_inf),
            r.iters,
            num(r.residual),
            r.gas,
            r.region,
            r.status
        )?;
    }
    Ok(())
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_atomic(path, |w| write_csv(rows, w))
}

fn field<T: std::str::FromStr>(line: usize, name: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("line {line}: bad {name} `{s}`")))
}

fn opt_field(line: usize, name: &str, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        field(line, name, s).map(Some)
    }
}

/// Parses text written by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{CSV_HEADER}`, got `{}`",
                other.map(|(_, h)| h).unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 9 {
            return Err(Error::Parse(format!("line {n}: expected 9 columns, got {}", cols.len())));
        }
        rows.push(SweepRow {
            mu: field(n, "mu", cols[0])?,
            sigma: field(n, "sigma", cols[1])?,
            m_inf: opt_field(n, "m_inf", cols[2])?,
            n_inf: opt_field(n, "n_inf", cols[3])?,
            iters: field(n, "iters", cols[4])?,
            residual: field(n, "residual", cols[5])?,
            gas: field(n, "gas", cols[6])?,
            region: field(n, "region", cols[7])?,
            status: field::<RowStatus>(n, "status", cols[8])?,
        });
    }
    Ok(rows)
}

pub fn write_compare_csv(rows: &[CompareRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{COMPARE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.sigma),
            opt(r.k1.map(|b| b.m)),
            opt(r.k1.map(|b| b.n)),
            opt(r.k2.map(|b| b.m)),
            opt(r.k2.map(|b| b.n)),
            opt(r.sim.map(|s| s.0)),
            opt(r.sim.map(|s| s.1)),
            r.status
        )?;
    }
    Ok(())
}

pub fn emit_compare_csv(rows: &[CompareRow], path: &Path) -> Result<()> {
    write_atomic(path, |w| write_compare_csv(rows, w))
}
