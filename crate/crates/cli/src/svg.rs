//! Hand-rolled SVG polyline plots.
//!
//! One fixed-size chart per file: axes, linear ticks, one polyline per
//! series, and a legend.  All coordinates are emitted with fixed precision
//! so identical data renders identical bytes.

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    /// File stem for `<name>.svg`.
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 64.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub fn render(plot: &Plot) -> String {
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &plot.series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                x_lo = x_lo.min(x);
                x_hi = x_hi.max(x);
                y_lo = y_lo.min(y);
                y_hi = y_hi.max(y);
            }
        }
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    pad(&mut x_lo, &mut x_hi);
    pad(&mut y_lo, &mut y_hi);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = move |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"17\">{}</text>\n",
        WIDTH / 2.0,
        escape(&plot.title)
    ));

    // Axes box.
    out.push_str(&format!(
        "  <rect x=\"{LEFT:.1}\" y=\"{TOP:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" \
         fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n"
    ));

    // Ticks and grid.
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let xp = sx(xv);
        let yp = sy(yv);
        out.push_str(&format!(
            "  <line x1=\"{xp:.2}\" y1=\"{TOP:.1}\" x2=\"{xp:.2}\" y2=\"{:.1}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            TOP + plot_h
        ));
        out.push_str(&format!(
            "  <line x1=\"{LEFT:.1}\" y1=\"{yp:.2}\" x2=\"{:.1}\" y2=\"{yp:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            LEFT + plot_w
        ));
        out.push_str(&format!(
            "  <text x=\"{xp:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            TOP + plot_h + 22.0,
            tick(xv)
        ));
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            LEFT - 8.0,
            yp + 5.0,
            tick(yv)
        ));
    }

    // Axis labels.
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0,
        escape(&plot.x_label)
    ));
    out.push_str(&format!(
        "  <text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 20 {:.1})\">{}</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&plot.y_label)
    ));

    // Series.
    for (si, s) in plot.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if pts.len() >= 2 {
            out.push_str(&format!(
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                 stroke-width=\"1.8\"/>\n",
                pts.join(" ")
            ));
        } else {
            for p in &pts {
                let (xs, ys) = p.split_once(',').expect("point format");
                out.push_str(&format!(
                    "  <circle cx=\"{xs}\" cy=\"{ys}\" r=\"3.5\" fill=\"{color}\"/>\n"
                ));
            }
        }
        // Legend entry.
        let ly = TOP + 16.0 + 20.0 * si as f64;
        out.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" \
             stroke=\"{color}\" stroke-width=\"3\"/>\n",
            LEFT + plot_w - 150.0,
            LEFT + plot_w - 126.0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            LEFT + plot_w - 120.0,
            ly + 5.0,
            escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn pad(lo: &mut f64, hi: &mut f64) {
    if *hi - *lo <= f64::EPSILON * (1.0 + lo.abs() + hi.abs()) {
        let c = 0.5 * (*lo + *hi);
        *lo = c - 0.5 - c.abs() * 0.05;
        *hi = c + 0.5 + c.abs() * 0.05;
    } else {
        let span = *hi - *lo;
        *lo -= 0.05 * span;
        *hi += 0.05 * span;
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        return format!("{v:.2e}");
    }
    let text = format!("{v:.3}");
    let trimmed = text.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_deterministic_well_formed_svg() {
        let plot = Plot {
            name: "demo".into(),
            title: "margins & bounds".into(),
            x_label: "r".into(),
            y_label: "margin".into(),
            series: vec![
                Series { label: "first".into(), points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, 0.5)] },
                Series { label: "second".into(), points: vec![(0.5, 1.5)] },
            ],
        };
        let a = render(&plot);
        let b = render(&plot);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
        assert!(a.contains("circle"));
        assert!(a.contains("&amp;"));
        assert!(a.ends_with("</svg>\n"));
    }
}
