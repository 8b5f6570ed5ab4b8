//! Static line plots of averaged metrics against rounds (log-scaled x).

use std::fmt::Write as _;
use std::path::Path;

use super::runner::{RoundRecord, Trace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    DgapAvg,
    NeregAvg,
}

impl PlotMetric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DgapAvg => "dgap_avg",
            Self::NeregAvg => "nereg_avg",
        }
    }

    fn title(&self) -> &'static str {
        match self {
            Self::DgapAvg => "Average D-Gap",
            Self::NeregAvg => "Average NE-Reg",
        }
    }

    fn read(&self, r: &RoundRecord) -> Option<f64> {
        match self {
            Self::DgapAvg => Some(r.dgap_avg),
            Self::NeregAvg => r.nereg_avg,
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders one panel; identical inputs give identical bytes.
pub fn render_svg(traces: &[Trace], metric: PlotMetric, title: &str) -> Result<String> {
    if traces.is_empty() {
        return Err(Error::Config("render_svg needs at least one trace".into()));
    }
    let points: Vec<Vec<(f64, f64)>> = traces
        .iter()
        .map(|tr| tr.records.iter().filter_map(|r| metric.read(r).map(|v| (r.t as f64, v))).collect())
        .collect();
    let t_max = points.iter().flatten().map(|p| p.0).fold(10.0, f64::max);
    let decades = t_max.log10().ceil().max(1.0);
    let mut y_lo = points.iter().flatten().map(|p| p.1).fold(0.0, f64::min);
    let mut y_hi = points.iter().flatten().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if !y_hi.is_finite() || y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_hi += pad;
    if y_lo < 0.0 {
        y_lo -= pad;
    }

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + t.max(1.0).log10() / decades * plot_w;
    let sy = |v: f64| TOP + (y_hi - v) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{} — {}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title),
        metric.title()
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=decades as u32 {
        let x = sx(10f64.powi(k as i32));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{k}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0
        );
    }
    for k in 0..=5 {
        let v = y_lo + (y_hi - y_lo) * k as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.4}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            v
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">round t (log scale)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );

    for (i, (trace, pts)) in traces.iter().zip(&points).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 14.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&trace.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(traces: &[Trace], metric: PlotMetric, title: &str, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(traces, metric, title)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(label: &str, values: &[(u64, f64)]) -> Trace {
        Trace {
            label: label.into(),
            records: values
                .iter()
                .map(|&(t, v)| RoundRecord {
                    t,
                    x: vec![0.0],
                    y: vec![0.0],
                    x_br: vec![0.0],
                    y_br: vec![0.0],
                    dgap_avg: v,
                    nereg_avg: Some(v / 2.0),
                    reg1_avg: 0.0,
                    reg2_avg: 0.0,
                    path: 0.0,
                    vt: None,
                    eta: 1.0,
                    gamma: 1.0,
                    stages: vec![0],
                    doubled: false,
                    weights: None,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_zero_is_horizontal() {
        let svg = render_svg(&[trace("flat", &[(1, 0.0), (10, 0.0), (100, 0.0)])], PlotMetric::DgapAvg, "t").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn two_traces_two_legends() {
        let a = trace("oppm", &[(1, 2.0), (100, 1.0)]);
        let b = trace("opt<1>", &[(1, 3.0), (100, 0.5)]);
        let svg = render_svg(&[a.clone(), b.clone()], PlotMetric::NeregAvg, "case1").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">oppm</text>") && svg.contains(">opt&lt;1&gt;</text>"));
        assert_eq!(svg, render_svg(&[a, b], PlotMetric::NeregAvg, "case1").unwrap());
    }

    #[test]
    fn needs_a_trace() {
        assert!(render_svg(&[], PlotMetric::DgapAvg, "x").is_err());
    }
}
