//! Self-contained SVG renderings of traces and linear fits.

use std::fmt::Write as _;

use thiserror::Error;

use crate::format::g17;

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("log scale needs a reference energy")]
    LogWithoutReference,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Reads the first two columns of a headed CSV as numbers.
pub fn read_xy_csv(text: &str) -> Result<(String, String, Vec<(f64, f64)>), PlotError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(PlotError::Empty)?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 {
        return Err(PlotError::Csv {
            line: 1,
            message: "header needs at least two columns".into(),
        });
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |k: usize| -> Result<f64, PlotError> {
            let raw = fields.get(k).ok_or_else(|| PlotError::Csv {
                line: i + 1,
                message: format!("expected {} fields, got {}", cols.len(), fields.len()),
            })?;
            raw.parse::<f64>().map_err(|_| PlotError::Csv {
                line: i + 1,
                message: format!("'{raw}' is not a number"),
            })
        };
        points.push((num(0)?, num(1)?));
    }
    if points.is_empty() {
        return Err(PlotError::Empty);
    }
    Ok((cols[0].to_string(), cols[1].to_string(), points))
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if hi > lo {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = span(&mut xs.clone());
        let (y0, y1) = span(&mut ys.clone());
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<path class="axes" d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let x = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let y = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            f.px(x),
            b + 16.0,
            tick(x)
        );
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            l - 6.0,
            f.py(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Embeds the plotted numbers so the figure carries its own data.
fn embed(out: &mut String, header: &str, rows: &[(f64, f64)]) {
    let _ = writeln!(out, "<metadata class=\"data\"><![CDATA[");
    let _ = writeln!(out, "{header}");
    for (x, y) in rows {
        let _ = writeln!(out, "{},{}", g17(*x), g17(*y));
    }
    let _ = writeln!(out, "]]></metadata>");
}

/// Best-so-far energy against evaluation index. With `e0` a reference line is
/// drawn; with `log` the ordinate becomes `log10(best - e0)`.
pub fn trace_svg(points: &[(f64, f64)], e0: Option<f64>, log: bool) -> Result<String, PlotError> {
    if points.is_empty() {
        return Err(PlotError::Empty);
    }
    let (ys, ylabel): (Vec<f64>, &str) = if log {
        let e0 = e0.ok_or(PlotError::LogWithoutReference)?;
        let ys = points.iter().map(|p| (p.1 - e0).max(1e-16).log10()).collect();
        (ys, "log10(best - E0)")
    } else {
        (points.iter().map(|p| p.1).collect(), "best energy")
    };
    let reference = if log { None } else { e0 };
    let frame = Frame::new(
        points.iter().map(|p| p.0),
        ys.iter().copied().chain(reference),
    );
    let mut out = String::new();
    open(&mut out, "optimization progress");
    axes(&mut out, &frame, "evaluation", ylabel);
    if let Some(e) = reference {
        let _ = writeln!(
            out,
            r#"<line class="e0" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2" data-value="{}"/>"#,
            LEFT,
            frame.py(e),
            WIDTH - RIGHT,
            frame.py(e),
            g17(e)
        );
    }
    let coords: Vec<String> = points
        .iter()
        .zip(&ys)
        .map(|(p, y)| format!("{:.2},{:.2}", frame.px(p.0), frame.py(*y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline class="trace" fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    embed(&mut out, "eval,best", points);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Points with the least-squares line through them.
pub fn scatter_fit_svg(
    points: &[(f64, f64)],
    slope: f64,
    intercept: f64,
    residual: f64,
    labels: (&str, &str),
) -> Result<String, PlotError> {
    if points.is_empty() {
        return Err(PlotError::Empty);
    }
    let frame = Frame::new(points.iter().map(|p| p.0), points.iter().map(|p| p.1));
    let mut out = String::new();
    open(&mut out, "linear fit");
    axes(&mut out, &frame, labels.0, labels.1);
    for (x, y) in points {
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3.5" fill="firebrick"/>"#,
            frame.px(*x),
            frame.py(*y)
        );
    }
    let (xa, xb) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let _ = writeln!(
        out,
        r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" data-slope="{}" data-intercept="{}"/>"#,
        frame.px(xa),
        frame.py(intercept + slope * xa),
        frame.px(xb),
        frame.py(intercept + slope * xb),
        g17(slope),
        g17(intercept)
    );
    let _ = writeln!(
        out,
        r#"<text class="annotation" x="{:.2}" y="{:.2}" font-size="12">slope {} intercept {} residual {}</text>"#,
        LEFT + 10.0,
        TOP + 4.0,
        g17(slope),
        g17(intercept),
        g17(residual)
    );
    embed(&mut out, &format!("{},{}", labels.0, labels.1), points);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polyline_ys(svg: &str) -> Vec<f64> {
        let start = svg.find("<polyline").unwrap();
        let attr = &svg[start..];
        let p = attr.find("points=\"").unwrap() + 8;
        let end = attr[p..].find('"').unwrap();
        attr[p..p + end]
            .split(' ')
            .map(|xy| xy.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    }

    #[test]
    fn trace_has_one_nonincreasing_polyline() {
        let pts: Vec<(f64, f64)> = (1..=30).map(|k| (k as f64, -8.0 + 4.0 / k as f64)).collect();
        let svg = trace_svg(&pts, Some(-8.0), false).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        // SVG y grows downward, so falling energies give growing pixel rows.
        let ys = polyline_ys(&svg);
        assert!(ys.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(svg.matches(r#"<line class="e0""#).count(), 1);
        assert!(svg.contains(r#"data-value="-8""#));
        assert!(svg.contains("30,-7.8666666666666663"));
    }

    #[test]
    fn log_trace_needs_reference() {
        let pts = [(1.0, -3.0), (2.0, -3.5)];
        assert_eq!(trace_svg(&pts, None, true), Err(PlotError::LogWithoutReference));
        let svg = trace_svg(&pts, Some(-4.0), true).unwrap();
        assert!(!svg.contains("class=\"e0\""));
    }

    #[test]
    fn collinear_fit_passes_through_points() {
        let pts: Vec<(f64, f64)> = (2..7).map(|n| (n as f64, 3.0 * n as f64 - 1.0)).collect();
        let svg = scatter_fit_svg(&pts, 3.0, -1.0, 0.0, ("n", "energy")).unwrap();
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.contains("residual 0<"));
        let line = &svg[svg.find("<line class=\"fit\"").unwrap()..];
        let attr = |name: &str| -> f64 {
            let p = line.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
            line[p..p + line[p..].find('"').unwrap()].parse().unwrap()
        };
        let (x1, y1, x2, y2) = (attr("x1"), attr("y1"), attr("x2"), attr("y2"));
        for c in svg.match_indices("<circle").map(|(i, _)| &svg[i..]) {
            let get = |name: &str| -> f64 {
                let p = c.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
                c[p..p + c[p..].find('"').unwrap()].parse().unwrap()
            };
            let (cx, cy) = (get("cx"), get("cy"));
            let on_line = y1 + (y2 - y1) * (cx - x1) / (x2 - x1);
            assert!((cy - on_line).abs() < 0.02);
        }
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        assert!(matches!(
            read_xy_csv("eval,best\n1,2\n2,abc\n"),
            Err(PlotError::Csv { line: 3, .. })
        ));
        assert_eq!(read_xy_csv(""), Err(PlotError::Empty));
        let (a, b, pts) = read_xy_csv("n,energy\n4,-8\n6,-11.2\n").unwrap();
        assert_eq!((a.as_str(), b.as_str(), pts.len()), ("n", "energy", 2));
    }
}
