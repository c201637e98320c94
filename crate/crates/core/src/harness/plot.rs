use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Snapshot CSV `t,x,u,v`: both densities against `x`.
    Profile,
    /// Trace CSV `t,x_front,threshold,direction`: front position against `t`.
    FrontTrace,
    /// Sweep CSV: predicted speeds against the first axis, with background
    /// bands coloured by case tag.
    SpeedCurve,
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "profile" => Ok(PlotKind::Profile),
            "front_trace" | "front-trace" => Ok(PlotKind::FrontTrace),
            "speed_curve" | "speed-curve" => Ok(PlotKind::SpeedCurve),
            other => Err(Error::invalid(
                "kind",
                format!("unknown plot kind `{other}`; expected profile, front_trace or speed_curve"),
            )),
        }
    }
}

const MAX_POINTS: usize = 2000;
const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const LINE_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const BAND_COLORS: [&str; 5] = ["#fde0c5", "#d5e8d4", "#dae8fc", "#f8cecc", "#e1d5e7"];

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

struct Band {
    x0: f64,
    x1: f64,
    label: String,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str, source: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec?.iter().map(str::to_string).collect());
        }
        if rows.is_empty() {
            return Err(Error::invalid(source, "CSV has no data rows"));
        }
        Ok(Table { headers, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, names: &[&str], source: &str) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.col(n).ok_or_else(|| {
                    Error::invalid(
                        source,
                        format!("missing column `{n}`; found {:?}", self.headers),
                    )
                })
            })
            .collect()
    }

    /// Finite `(x, y)` pairs; blank or unparsable cells are skipped.
    fn pairs(&self, xc: usize, yc: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| {
                let x: f64 = r.get(xc)?.parse().ok()?;
                let y: f64 = r.get(yc)?.parse().ok()?;
                (x.is_finite() && y.is_finite()).then_some((x, y))
            })
            .collect()
    }
}

fn thin(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points;
    }
    let stride = points.len().div_ceil(MAX_POINTS);
    let last = *points.last().unwrap();
    let mut out: Vec<_> = points.into_iter().step_by(stride).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Renders CSV text as a standalone SVG document.
pub fn render_plot(csv_text: &str, kind: PlotKind, title: &str) -> Result<String> {
    let table = Table::parse(csv_text, title)?;
    let (x_label, y_label, series, bands) = match kind {
        PlotKind::Profile => {
            let c = table.require(&["t", "x", "u", "v"], title)?;
            let series = vec![
                Series {
                    name: "u".into(),
                    points: thin(table.pairs(c[1], c[2])),
                },
                Series {
                    name: "v".into(),
                    points: thin(table.pairs(c[1], c[3])),
                },
            ];
            ("x", "density", series, vec![])
        }
        PlotKind::FrontTrace => {
            let c = table.require(&["t", "x_front", "threshold", "direction"], title)?;
            let series = vec![Series {
                name: "front".into(),
                points: thin(table.pairs(c[0], c[1])),
            }];
            ("t", "front position", series, vec![])
        }
        PlotKind::SpeedCurve => {
            let c = table.require(&["point", "case_tag", "c1", "c2"], title)?;
            if c[0] != 0 || table.headers.len() < 2 {
                return Err(Error::invalid(title, "first column must be `point`"));
            }
            let xc = 1;
            let mut series = Vec::new();
            for name in ["c1", "c2", "c3"] {
                if let Some(yc) = table.col(name) {
                    let pts = table.pairs(xc, yc);
                    if !pts.is_empty() {
                        series.push(Series {
                            name: name.into(),
                            points: pts,
                        });
                    }
                }
            }
            let mut bands: Vec<Band> = Vec::new();
            for r in &table.rows {
                let Some(x) = r.get(xc).and_then(|s| s.parse::<f64>().ok()) else {
                    continue;
                };
                let tag = r.get(c[1]).cloned().unwrap_or_default();
                match bands.last_mut() {
                    Some(b) if b.label == tag => b.x1 = x,
                    _ => bands.push(Band {
                        x0: x,
                        x1: x,
                        label: tag,
                    }),
                }
            }
            // Split the gap between neighbouring bands at its midpoint.
            for i in 1..bands.len() {
                let mid = 0.5 * (bands[i - 1].x1 + bands[i].x0);
                bands[i - 1].x1 = mid;
                bands[i].x0 = mid;
            }
            let x_label = table.headers[xc].clone();
            return Ok(render_svg(title, &x_label, "speed", &series, &bands));
        }
    };
    Ok(render_svg(title, x_label, y_label, &series, &bands))
}

/// Reads `csv_path` and writes the plot to `svg_path`.
pub fn emit_plot(csv_path: &Path, kind: PlotKind, svg_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let title = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("plot")
        .to_string();
    let svg = render_plot(&text, kind, &title)?;
    std::fs::write(svg_path, svg).map_err(|e| Error::io(svg_path, e))
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series], bands: &[Band]) -> String {
    let (x0, x1) = range(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .chain(bands.iter().flat_map(|b| [b.x0, b.x1])),
    );
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );

    let mut legend_y = TOP + 10.0;
    let mut seen: Vec<&str> = Vec::new();
    for b in bands {
        let k = match seen.iter().position(|l| *l == b.label) {
            Some(k) => k,
            None => {
                seen.push(&b.label);
                let k = seen.len() - 1;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.1}" y="{:.1}" width="14" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                    W - RIGHT + 12.0,
                    legend_y - 9.0,
                    BAND_COLORS[k % BAND_COLORS.len()],
                    W - RIGHT + 32.0,
                    legend_y,
                    escape(if b.label.is_empty() { "none" } else { &b.label })
                );
                legend_y += 18.0;
                k
            }
        };
        let (a, c) = (sx(b.x0), sx(b.x1));
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{TOP:.2}" width="{:.2}" height="{ph:.2}" fill="{}"/>"#,
            a,
            (c - a).max(1.0),
            BAND_COLORS[k % BAND_COLORS.len()]
        );
    }

    let (xt, xd) = ticks(x0, x1);
    for x in xt {
        let px = sx(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.xd$}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0
        );
    }
    let (yt, yd) = ticks(y0, y1);
    for y in yt {
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="#000"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.yd$}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (k, ser) in series.iter().enumerate() {
        let color = LINE_COLORS[k % LINE_COLORS.len()];
        let mut pts = String::new();
        for &(x, y) in &ser.points {
            let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            W - RIGHT + 12.0,
            legend_y - 4.0,
            W - RIGHT + 26.0,
            legend_y - 4.0,
            W - RIGHT + 32.0,
            legend_y,
            escape(&ser.name)
        );
        legend_y += 18.0;
    }
    s.push_str("</svg>\n");
    s
}
