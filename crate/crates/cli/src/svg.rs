//! Static SVG plots written by hand: a small data-space plot model and a
//! renderer, plus builders for bifurcation maps and decay series.

use std::fmt::Write as _;

use homolog_core::homogeneous::{ClassKind, ClassificationMap};
use homolog_core::simulator::DecayReport;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvgError {
    #[error("nothing to plot")]
    EmptyData,
}

impl SvgError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EmptyData => "EmptyData",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub font_size: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self { width: 720.0, height: 540.0, margin: 64.0, font_size: 13.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    /// Axis-aligned filled rectangles `(x0, x1, y0, y1)`.
    Cells {
        rects: Vec<[f64; 4]>,
        colors: Vec<&'static str>,
    },
    Line {
        points: Vec<(f64, f64)>,
        color: &'static str,
        dashed: bool,
        label: String,
    },
    Markers {
        points: Vec<(f64, f64)>,
        color: &'static str,
        label: String,
    },
}

/// A plot in data coordinates. With `log_y` the `y` data are already
/// `log₁₀` values and tick labels are rendered as powers of ten.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub log_y: bool,
    pub layers: Vec<Layer>,
    /// Legend entries `(color, text)`.
    pub legend: Vec<(&'static str, String)>,
}

/// What to draw.
pub enum PlotSource<'a> {
    Bifurcation(&'a ClassificationMap),
    /// A positive series (e.g. `ℰ(s)`) with its exponential fit.
    Decay {
        times: &'a [f64],
        values: &'a [f64],
        fit: &'a DecayReport,
        window: (f64, f64),
        time_label: &'a str,
    },
}

const KINDS: [ClassKind; 6] = [
    ClassKind::SelfSimilarExpansion,
    ClassKind::SelfSimilarCollapse,
    ClassKind::LinearExpansion,
    ClassKind::LinearCollapse,
    ClassKind::AffineExpansion,
    ClassKind::LaneEmdenSteady,
];

/// Stable numeric code of a class (used in CSV output).
pub fn kind_code(kind: ClassKind) -> usize {
    KINDS.iter().position(|k| *k == kind).expect("all kinds listed")
}

pub fn kind_from_code(code: usize) -> Option<ClassKind> {
    KINDS.get(code).copied()
}

fn kind_color(kind: ClassKind) -> &'static str {
    match kind {
        ClassKind::SelfSimilarExpansion => "#2ca02c",
        ClassKind::SelfSimilarCollapse => "#f4a582",
        ClassKind::LinearExpansion => "#92c5de",
        ClassKind::LinearCollapse => "#d6604d",
        ClassKind::AffineExpansion => "#4393c3",
        ClassKind::LaneEmdenSteady => "#000000",
    }
}

fn cell_edges(samples: &[f64]) -> Vec<f64> {
    match samples {
        [] => Vec::new(),
        [x] => vec![x - 0.5, x + 0.5],
        _ => {
            let n = samples.len();
            let mut e = Vec::with_capacity(n + 1);
            e.push(samples[0] - 0.5 * (samples[1] - samples[0]));
            e.extend(samples.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            e.push(samples[n - 1] + 0.5 * (samples[n - 1] - samples[n - 2]));
            e
        }
    }
}

pub fn bifurcation_plot(map: &ClassificationMap) -> Result<Plot, SvgError> {
    if map.deltas.is_empty() || map.lambda1s.is_empty() || map.kinds.is_empty() {
        return Err(SvgError::EmptyData);
    }
    let (xe, ye) = (cell_edges(&map.deltas), cell_edges(&map.lambda1s));
    let mut rects = Vec::new();
    let mut colors = Vec::new();
    for (j, row) in map.kinds.iter().enumerate() {
        for (i, kind) in row.iter().enumerate() {
            rects.push([xe[i], xe[i + 1], ye[j], ye[j + 1]]);
            colors.push(kind_color(*kind));
        }
    }
    let x_range = (xe[0], *xe.last().expect("non-empty"));
    let y_range = (ye[0], *ye.last().expect("non-empty"));
    let upper: Vec<(f64, f64)> = map.parabola.clone();
    // the zero-energy parabola λ₁² = −2δ/λ₀ has both signs of λ₁
    let mut parabola: Vec<(f64, f64)> = upper.iter().rev().map(|&(d, l)| (d, -l)).collect();
    parabola.extend(upper.iter().copied());
    let mut layers = vec![Layer::Cells { rects, colors }];
    if !upper.is_empty() {
        layers.push(Layer::Line { points: parabola, color: "#000000", dashed: true, label: "e = 0".into() });
        layers.push(Layer::Line {
            points: upper,
            color: "#7b3294",
            dashed: false,
            label: format!("λ₁* = √(2|δ|/λ₀), λ₀ = {}", map.lambda0),
        });
    }
    let mut legend: Vec<(&'static str, String)> = Vec::new();
    for kind in KINDS {
        if map.kinds.iter().flatten().any(|k| *k == kind) {
            legend.push((kind_color(kind), kind.label().to_string()));
        }
    }
    for layer in &layers {
        if let Layer::Line { color, label, .. } = layer {
            legend.push((color, label.clone()));
        }
    }
    Ok(Plot {
        title: format!("Homogeneous solutions, λ₀ = {}", map.lambda0),
        x_label: "δ".into(),
        y_label: "λ₁".into(),
        x_range,
        y_range,
        log_y: false,
        layers,
        legend,
    })
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn decay_plot(
    times: &[f64],
    values: &[f64],
    fit: &DecayReport,
    window: (f64, f64),
    time_label: &str,
) -> Result<Plot, SvgError> {
    let data: Vec<(f64, f64)> =
        times.iter().zip(values).filter(|(_, v)| **v > 0.0 && v.is_finite()).map(|(t, v)| (*t, v.log10())).collect();
    if data.is_empty() {
        return Err(SvgError::EmptyData);
    }
    let t0 = data.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t1 = data.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let (w0, w1) = (window.0.max(t0), window.1.min(t1));
    let line = |t: f64| (fit.log_amplitude - fit.rate * t) / std::f64::consts::LN_10;
    let fitted = vec![(w0, line(w0)), (w1, line(w1))];
    let y_lo = data.iter().map(|p| p.1).chain(fitted.iter().map(|p| p.1)).fold(f64::INFINITY, f64::min);
    let y_hi = data.iter().map(|p| p.1).chain(fitted.iter().map(|p| p.1)).fold(f64::NEG_INFINITY, f64::max);
    let label = format!("fit: slope {:.4} (rate {:.4})", -fit.rate, fit.rate);
    Ok(Plot {
        title: "Decay of the high-order energy".into(),
        x_label: time_label.into(),
        y_label: "ℰ".into(),
        x_range: padded(t0, t1),
        y_range: padded(y_lo.floor(), y_hi.ceil()),
        log_y: true,
        layers: vec![
            Layer::Markers { points: data, color: "#1f77b4", label: "ℰ".into() },
            Layer::Line { points: fitted, color: "#d62728", dashed: false, label: label.clone() },
        ],
        legend: vec![("#1f77b4", "ℰ".into()), ("#d62728", label)],
    })
}

impl Plot {
    /// Pixel coordinates of a data point.
    pub fn to_pixel(&self, style: &Style, x: f64, y: f64) -> (f64, f64) {
        let w = style.width - 2.0 * style.margin - 180.0;
        let h = style.height - 2.0 * style.margin;
        let px = style.margin + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * w;
        let py = style.margin + (1.0 - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0)) * h;
        (px, py)
    }

    pub fn render(&self, style: &Style) -> String {
        let mut s = String::new();
        let (w, h, m, fs) = (style.width, style.height, style.margin, style.font_size);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ =
            writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, m / 2.0, escape(&self.title));
        let (x0, y0) = self.to_pixel(style, self.x_range.0, self.y_range.0);
        let (x1, y1) = self.to_pixel(style, self.x_range.1, self.y_range.1);
        let _ = writeln!(
            s,
            r##"<clipPath id="plot"><rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}"/></clipPath>"##,
            x1 - x0,
            y0 - y1
        );
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        for layer in &self.layers {
            self.render_layer(&mut s, style, layer);
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x_range.0 + f * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + f * (self.y_range.1 - self.y_range.0);
            let (px, _) = self.to_pixel(style, xv, self.y_range.0);
            let (_, py) = self.to_pixel(style, self.x_range.0, yv);
            let _ =
                writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
            let _ =
                writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 5.0 + fs, tick(xv));
            let _ =
                writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
            let label = if self.log_y { format!("1e{}", tick(yv)) } else { tick(yv) };
            let _ =
                writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + fs / 3.0, label);
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            y0 + 2.5 * fs + 5.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            m / 3.0,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
        for (i, (color, text)) in self.legend.iter().enumerate() {
            let ly = y1 + i as f64 * (fs + 6.0);
            let _ =
                writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="{fs}" height="{fs}" fill="{color}"/>"#, x1 + 12.0, ly);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x1 + 18.0 + fs, ly + fs - 2.0, escape(text));
        }
        s.push_str("</svg>\n");
        s
    }

    fn render_layer(&self, s: &mut String, style: &Style, layer: &Layer) {
        match layer {
            Layer::Cells { rects, colors } => {
                for (r, c) in rects.iter().zip(colors) {
                    let (ax, ay) = self.to_pixel(style, r[0], r[3]);
                    let (bx, by) = self.to_pixel(style, r[1], r[2]);
                    let _ = writeln!(
                        s,
                        r#"<rect x="{ax:.2}" y="{ay:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
                        bx - ax,
                        by - ay
                    );
                }
            }
            Layer::Line { points, color, dashed, label } => {
                let pts: Vec<String> = points
                    .iter()
                    .map(|&(x, y)| {
                        let (px, py) = self.to_pixel(style, x, y);
                        format!("{px:.2},{py:.2}")
                    })
                    .collect();
                let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
                let _ = writeln!(
                    s,
                    r#"<polyline data-label="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                    escape(label),
                    pts.join(" ")
                );
            }
            Layer::Markers { points, color, label } => {
                let _ = writeln!(s, r#"<g data-label="{}" fill="{color}">"#, escape(label));
                for &(x, y) in points {
                    let (px, py) = self.to_pixel(style, x, y);
                    let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2"/>"#);
                }
                let _ = writeln!(s, "</g>");
            }
        }
    }
}

fn tick(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Build and render the plot for `source`.
pub fn emit_svg(source: &PlotSource<'_>, style: &Style) -> Result<String, SvgError> {
    let plot = match source {
        PlotSource::Bifurcation(map) => bifurcation_plot(map)?,
        PlotSource::Decay { times, values, fit, window, time_label } => {
            decay_plot(times, values, fit, *window, time_label)?
        }
    };
    Ok(plot.render(style))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_codes_round_trip() {
        for k in KINDS {
            assert_eq!(kind_from_code(kind_code(k)), Some(k));
        }
        assert_eq!(kind_from_code(KINDS.len()), None);
    }

    #[test]
    fn cell_edges_bracket_the_samples() {
        assert_eq!(cell_edges(&[0.0, 1.0, 2.0]), vec![-0.5, 0.5, 1.5, 2.5]);
        assert_eq!(cell_edges(&[3.0]), vec![2.5, 3.5]);
    }

    #[test]
    fn pixels_map_the_range_corners() {
        let plot = Plot {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 2.0),
            log_y: false,
            layers: vec![],
            legend: vec![],
        };
        let st = Style::default();
        assert_eq!(plot.to_pixel(&st, 0.0, 0.0), (st.margin, st.height - st.margin));
        assert_eq!(plot.to_pixel(&st, 1.0, 2.0), (st.width - st.margin - 180.0, st.margin));
    }

    #[test]
    fn text_is_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
