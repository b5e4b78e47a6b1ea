//! Hand-rolled SVG line plots. Output is a pure function of the input
//! series, so regenerating from the same ledger reproduces plot files
//! byte for byte.

/// A line with a symmetric confidence band. `half[i]` is the band
/// half-width at `x[i]`; all three vectors share one length and x is
/// strictly increasing.
pub struct BandSeries {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub half: Vec<f64>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 62.0;
const RIGHT: f64 = 620.0;
const TOP: f64 = 46.0;
const BOTTOM: f64 = 352.0;
const LINE_COLOR: &str = "#3465a4";
const BAND_COLOR: &str = "#3465a4";

fn fmt_coord(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick label: two decimals with trailing zeros trimmed.
fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, lo_px: f64, hi_px: f64, pad: f64) -> Scale {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        if !min.is_finite() || !max.is_finite() {
            min = 0.0;
            max = 1.0;
        }
        if min == max {
            min -= 0.5;
            max += 0.5;
        } else {
            let span = max - min;
            min -= pad * span;
            max += pad * span;
        }
        Scale { min, max, lo_px, hi_px }
    }

    fn px(&self, v: f64) -> f64 {
        self.lo_px + (v - self.min) / (self.max - self.min) * (self.hi_px - self.lo_px)
    }

    fn ticks(&self) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.min + (self.max - self.min) * i as f64 / 4.0;
        }
        out
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one series as a complete SVG document.
pub fn band_line_plot(title: &str, x_label: &str, y_label: &str, s: &BandSeries) -> String {
    assert_eq!(s.x.len(), s.mean.len());
    assert_eq!(s.x.len(), s.half.len());
    assert!(!s.x.is_empty(), "a plot needs at least one point");

    let xs = Scale::new(s.x.iter().copied(), LEFT, RIGHT, 0.04);
    // Screen y grows downward, so the pixel range is inverted.
    let band_extent = s
        .mean
        .iter()
        .zip(&s.half)
        .flat_map(|(&m, &h)| [m - h, m + h]);
    let ys = Scale::new(band_extent, BOTTOM, TOP, 0.08);

    let mut svg = String::with_capacity(4096);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        fmt_coord((LEFT + RIGHT) / 2.0),
        escape(title)
    ));

    for t in ys.ticks() {
        let y = fmt_coord(ys.px(t));
        svg.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y}\" x2=\"{RIGHT}\" y2=\"{y}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            fmt_coord(LEFT - 8.0),
            fmt_coord(ys.px(t) + 4.0),
            fmt_tick(t)
        ));
    }
    for t in xs.ticks() {
        let x = fmt_coord(xs.px(t));
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{BOTTOM}\" x2=\"{x}\" y2=\"{}\" \
             stroke=\"#999999\" stroke-width=\"1\"/>\n",
            fmt_coord(BOTTOM + 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt_coord(BOTTOM + 20.0),
            fmt_tick(t)
        ));
    }

    // Band polygon: along the upper edge, back along the lower.
    if s.x.len() > 1 {
        let mut pts = String::new();
        for (&x, (&m, &h)) in s.x.iter().zip(s.mean.iter().zip(&s.half)) {
            pts.push_str(&format!("{},{} ", fmt_coord(xs.px(x)), fmt_coord(ys.px(m + h))));
        }
        for (&x, (&m, &h)) in s.x.iter().zip(s.mean.iter().zip(&s.half)).rev() {
            pts.push_str(&format!("{},{} ", fmt_coord(xs.px(x)), fmt_coord(ys.px(m - h))));
        }
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"{BAND_COLOR}\" fill-opacity=\"0.18\" \
             stroke=\"none\"/>\n",
            pts.trim_end()
        ));
        let line: Vec<String> = s
            .x
            .iter()
            .zip(&s.mean)
            .map(|(&x, &m)| format!("{},{}", fmt_coord(xs.px(x)), fmt_coord(ys.px(m))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{LINE_COLOR}\" \
             stroke-width=\"1.8\"/>\n",
            line.join(" ")
        ));
    }
    for (&x, &m) in s.x.iter().zip(&s.mean) {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.6\" fill=\"{LINE_COLOR}\"/>\n",
            fmt_coord(xs.px(x)),
            fmt_coord(ys.px(m))
        ));
    }

    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" \
         stroke=\"#333333\" stroke-width=\"1\"/>\n\
         <line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" \
         stroke=\"#333333\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">{}</text>\n",
        fmt_coord((LEFT + RIGHT) / 2.0),
        fmt_coord(HEIGHT - 10.0),
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        fmt_coord((TOP + BOTTOM) / 2.0),
        fmt_coord((TOP + BOTTOM) / 2.0),
        escape(y_label)
    ));
    svg.push_str("</svg>\n");
    svg
}
