//! Minimal deterministic SVG line / scatter plots.

use std::fmt::Write as _;
use std::io::Write;

use super::AnalysisError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 55.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStyle {
    Line,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: SeriesStyle::Line }
    }

    pub fn markers(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: SeriesStyle::Markers }
    }
}

/// Axis range snapped outward to a 1-2-5 tick step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    pub fn covering(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let raw = (hi - lo) / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        Axis { lo: (lo / step).floor() * step, hi: (hi / step).ceil() * step, step }
    }

    pub fn ticks(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// Axes that cover every point of every series.
pub fn plot_axes(series: &[Series]) -> Option<(Axis, Axis)> {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut any = false;
    for &(x, y) in pts {
        any = true;
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    any.then(|| (Axis::covering(x0, x1), Axis::covering(y0, y1)))
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{:.*}", decimals, v);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes an SVG plot and returns its byte count.
pub fn render_plot<W: Write>(
    series: &[Series],
    x_label: &str,
    y_label: &str,
    out: &mut W,
) -> Result<usize, AnalysisError> {
    let (xa, ya) = plot_axes(series).ok_or(AnalysisError::EmptySeries)?;
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - xa.lo) / (xa.hi - xa.lo) * pw;
    let sy = |y: f64| MARGIN_T + (1.0 - (y - ya.lo) / (ya.hi - ya.lo)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ =
        writeln!(s, r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for x in xa.ticks() {
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0,
            MARGIN_T + ph + 18.0,
            fmt_tick(x, xa.step)
        );
    }
    for y in ya.ticks() {
        let py = sy(y);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{:.2}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            py + 4.0,
            fmt_tick(y, ya.step)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        MARGIN_T + ph / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        match ser.style {
            SeriesStyle::Line => {
                let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            SeriesStyle::Markers => {
                for &(x, y) in &ser.points {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
                }
            }
        }
        let ly = MARGIN_T + 14.0 + 18.0 * i as f64;
        let lx = MARGIN_L + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{:.2}" width="14" height="4" fill="{color}"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 5.0,
            lx + 20.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(s.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_polyline() {
        let mut buf = Vec::new();
        let n = render_plot(&[Series::line("a", vec![(0.0, 0.0), (1.0, 2.0)])], "x", "y", &mut buf).unwrap();
        assert_eq!(n, buf.len());
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("<polyline").count(), 1);
        let start = text.find("points=\"").unwrap() + 8;
        let end = start + text[start..].find('"').unwrap();
        assert_eq!(text[start..end].split(' ').count(), 2);
    }

    #[test]
    fn deterministic() {
        let s = vec![
            Series::line("force", vec![(0.0, 1.0), (2.0, 3.5), (4.0, 0.2)]),
            Series::markers("pts", vec![(1.0, 1.0)]),
        ];
        let (mut a, mut b) = (Vec::new(), Vec::new());
        render_plot(&s, "t [s]", "F [N]", &mut a).unwrap();
        render_plot(&s, "t [s]", "F [N]", &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(render_plot(&[], "x", "y", &mut Vec::new()), Err(AnalysisError::EmptySeries)));
        assert!(matches!(
            render_plot(&[Series::line("e", vec![])], "x", "y", &mut Vec::new()),
            Err(AnalysisError::EmptySeries)
        ));
    }

    #[test]
    fn axes_cover_data() {
        let (xa, ya) = plot_axes(&[Series::line("f", vec![(0.0, 0.0), (13.0, 42.0)])]).unwrap();
        assert!(ya.lo <= 0.0 && ya.hi >= 42.0);
        assert!(xa.lo <= 0.0 && xa.hi >= 13.0);
        let flat = Axis::covering(3.0, 3.0);
        assert!(flat.lo < 3.0 && flat.hi > 3.0);
    }

    #[test]
    fn labels_escaped() {
        let mut buf = Vec::new();
        render_plot(&[Series::line("a<b", vec![(0.0, 0.0), (1.0, 1.0)])], "x & y", "y", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("a&lt;b") && text.contains("x &amp; y"));
    }
}
