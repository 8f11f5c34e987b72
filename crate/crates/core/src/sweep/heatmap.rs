use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::io_util::write_atomic;
use crate::model::Params;

use super::{RowStatus, SweepRow};

/// Quantity drawn by the heatmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatField {
    /// `1 - m_inf / m0`, on `[0, 1]`.
    LowerImprovement,
    /// `1 - n_inf / n0`, on `[0, 1]`.
    UpperImprovement,
    MInf,
    NInf,
}

impl HeatField {
    pub fn as_str(&self) -> &'static str {
        match self {
            HeatField::LowerImprovement => "lower-improvement",
            HeatField::UpperImprovement => "upper-improvement",
            HeatField::MInf => "m-inf",
            HeatField::NInf => "n-inf",
        }
    }

    fn value(&self, row: &SweepRow, a: f64, c: f64) -> Option<f64> {
        if row.status != RowStatus::Ok {
            return None;
        }
        let (m, n) = (row.m_inf?, row.n_inf?);
        let p = Params { a, c, mu: row.mu, sigma: row.sigma };
        match self {
            HeatField::LowerImprovement => Some(1.0 - m / p.m0()),
            HeatField::UpperImprovement if p.in_cone() => Some(1.0),
            HeatField::UpperImprovement => Some(1.0 - n / p.n0()),
            HeatField::MInf => Some(m),
            HeatField::NInf => Some(n),
        }
    }

    fn fixed_range(&self) -> Option<(f64, f64)> {
        match self {
            HeatField::LowerImprovement | HeatField::UpperImprovement => Some((0.0, 1.0)),
            _ => None,
        }
    }
}

impl FromStr for HeatField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [HeatField::LowerImprovement, HeatField::UpperImprovement, HeatField::MInf, HeatField::NInf]
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown heatmap field `{s}`")))
    }
}

const STOPS: [(f64, [f64; 3]); 3] =
    [(0.0, [53.0, 42.0, 135.0]), (0.5, [33.0, 177.0, 167.0]), (1.0, [249.0, 251.0, 14.0])];
const MISSING: &str = "#bdbdbd";

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (lo, hi) = if t <= STOPS[1].0 { (STOPS[0], STOPS[1]) } else { (STOPS[1], STOPS[2]) };
    let w = (t - lo.0) / (hi.0 - lo.0);
    let ch = |i: usize| (lo.1[i] + w * (hi.1[i] - lo.1[i])).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(0), ch(1), ch(2))
}

/// Renders rows from a row-major sweep (`mu` outer, `sigma` inner) as an SVG
/// heatmap with `mu` on the horizontal axis and `sigma` increasing upwards.
pub fn render_heatmap_svg(rows: &[SweepRow], field: HeatField, a: f64, c: f64) -> Result<String> {
    if rows.is_empty() {
        return Err(domain("heatmap needs at least one row"));
    }
    let n_sigma = rows.iter().take_while(|r| r.mu == rows[0].mu).count();
    if !rows.len().is_multiple_of(n_sigma) {
        return Err(domain("rows do not form a rectangular grid"));
    }
    let n_mu = rows.len() / n_sigma;
    let values: Vec<Option<f64>> = rows.iter().map(|r| field.value(r, a, c)).collect();
    let (vmin, vmax) = field.fixed_range().unwrap_or_else(|| {
        values.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    });
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };

    let (mu_lo, mu_hi) = (rows[0].mu, rows[rows.len() - 1].mu);
    let (s_lo, s_hi) = (rows[0].sigma, rows[n_sigma - 1].sigma);
    let (left, top, plot, bar) = (70.0, 20.0, 500.0, 20.0);
    let (cw, ch) = (plot / n_mu as f64, plot / n_sigma as f64);
    let width = left + plot + 30.0 + bar + 70.0;
    let height = top + plot + 50.0;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        "<!-- field: {}; a = {a}, c = {c}; grid {n_mu} x {n_sigma}; linear colour map over [{vmin}, {vmax}] \
         through #352a87 (low), #21b1a7 (mid), #f9fb0e (high); grey cells are skipped or failed points -->",
        field.as_str()
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<g shape-rendering="crispEdges">"#);
    for (idx, v) in values.iter().enumerate() {
        let (i, j) = (idx / n_sigma, idx % n_sigma);
        let x = left + i as f64 * cw;
        let y = top + plot - (j + 1) as f64 * ch;
        let fill = v.map(|v| color((v - vmin) / span)).unwrap_or_else(|| MISSING.to_string());
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            cw + 0.01,
            ch + 0.01
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    let text = |svg: &mut String, x: f64, y: f64, anchor: &str, body: &str| {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{body}</text>"#
        );
    };
    let base = top + plot;
    text(&mut svg, left, base + 16.0, "start", &format!("{mu_lo:.3}"));
    text(&mut svg, left + plot, base + 16.0, "end", &format!("{mu_hi:.3}"));
    text(&mut svg, left + plot / 2.0, base + 36.0, "middle", "mu");
    text(&mut svg, left - 6.0, base, "end", &format!("{s_lo:.3}"));
    text(&mut svg, left - 6.0, top + 12.0, "end", &format!("{s_hi:.3}"));
    text(&mut svg, left - 40.0, top + plot / 2.0, "middle", "sigma");

    let bx = left + plot + 30.0;
    let steps = 64;
    for s in 0..steps {
        let t = (s as f64 + 0.5) / steps as f64;
        let y = top + plot * (1.0 - (s + 1) as f64 / steps as f64);
        let _ = writeln!(
            svg,
            r#"<rect x="{bx}" y="{y:.3}" width="{bar}" height="{:.3}" fill="{}"/>"#,
            plot / steps as f64 + 0.01,
            color(t)
        );
    }
    text(&mut svg, bx + bar + 4.0, base, "start", &format!("{vmin:.3}"));
    text(&mut svg, bx + bar + 4.0, top + 12.0, "start", &format!("{vmax:.3}"));
    text(&mut svg, bx + bar / 2.0, base + 36.0, "middle", field.as_str());
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn emit_heatmap_svg(rows: &[SweepRow], field: HeatField, a: f64, c: f64, path: &Path) -> Result<()> {
    let svg = render_heatmap_svg(rows, field, a, c)?;
    write_atomic(path, |w| w.write_all(svg.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::razumikhin::Order;
    use crate::sweep::{sweep_limit_bounds, Axis, GridSpec};

    #[test]
    fn colour_map_endpoints() {
        assert_eq!(color(0.0), "#352a87");
        assert_eq!(color(0.5), "#21b1a7");
        assert_eq!(color(1.0), "#f9fb0e");
        assert_eq!(color(7.0), "#f9fb0e");
    }

    #[test]
    fn renders_grid() {
        let spec = GridSpec {
            mu: Axis::new(-3.0, -0.5, 6).unwrap(),
            sigma: Axis::new(-3.0, -0.5, 5).unwrap(),
            a: 1.0,
            c: 1.0,
            k: Order::Two,
        };
        let rows = sweep_limit_bounds(&spec, 1e-9).unwrap();
        let svg = render_heatmap_svg(&rows, HeatField::UpperImprovement, 1.0, 1.0).unwrap();
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains(">mu</text>") && svg.contains(">sigma</text>"));
        assert!(svg.contains("linear colour map"));
        assert_eq!(svg.matches("<rect").count(), 30 + 1 + 64);
        assert!(svg.contains("#f9fb0e"));
    }

    #[test]
    fn field_names_parse() {
        assert_eq!("n-inf".parse::<HeatField>().unwrap(), HeatField::NInf);
        assert!("bogus".parse::<HeatField>().is_err());
        assert!(render_heatmap_svg(&[], HeatField::MInf, 1.0, 1.0).is_err());
    }
}
