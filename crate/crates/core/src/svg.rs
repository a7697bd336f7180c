//! Minimal standalone SVG line plots for the diagnostic curves.  No
//! styling knobs: fixed canvas, a small palette, optional log-scale y.

use std::path::Path;

use crate::error::{Error, Result};

/// One named curve.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Renders a line plot; `log_y` plots `log10(y)` and drops nonpositive
/// values.
pub fn line_plot_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_y: bool,
) -> String {
    let mut cleaned: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for (idx, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || *y > 0.0))
            .map(|&(x, y)| (x, if log_y { y.log10() } else { y }))
            .collect();
        if !pts.is_empty() {
            cleaned.push((idx, pts));
        }
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));

    if cleaned.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">no data</text>\n</svg>\n",
            WIDTH / 2.0,
            HEIGHT / 2.0
        ));
        return svg;
    }

    let all = cleaned.iter().flat_map(|(_, pts)| pts.iter());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if x_max == x_min {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max == y_min {
        y_min -= 0.5;
        y_max += 0.5;
    }

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w,
            MARGIN_T + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h,
        )
    };

    // Axes.
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\"/>\n"
    ));
    // Ticks with labels.
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x_min + f * (x_max - x_min);
        let yv = y_min + f * (y_max - y_min);
        let (px, _) = to_px(xv, y_min);
        let (_, py) = to_px(x_min, yv);
        let y_text = if log_y { format!("1e{yv:.1}") } else { format!("{yv:.3}") };
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{0}\" x2=\"{px:.1}\" y2=\"{1}\" stroke=\"#333\"/>\n\
             <text x=\"{px:.1}\" y=\"{2}\" text-anchor=\"middle\" font-size=\"11\">{xv:.3}</text>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0,
            MARGIN_T + plot_h + 20.0,
        ));
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{py:.1}\" x2=\"{1}\" y2=\"{py:.1}\" stroke=\"#333\"/>\n\
             <text x=\"{2}\" y=\"{3:.1}\" text-anchor=\"end\" font-size=\"11\">{y_text}</text>\n",
            MARGIN_L - 5.0,
            MARGIN_L,
            MARGIN_L - 9.0,
            py + 4.0,
        ));
    }
    // Axis labels.
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" \
         transform=\"rotate(-90 18 {0})\">{1}</text>\n",
        MARGIN_T + plot_h / 2.0,
        escape(y_label)
    ));

    // Curves and legend.
    for (slot, (idx, pts)) in cleaned.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        let ly = MARGIN_T + 16.0 + 18.0 * slot as f64;
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{ly:.1}\" x2=\"{1}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"3\"/>\n\
             <text x=\"{2}\" y=\"{3:.1}\" font-size=\"12\">{4}</text>\n",
            MARGIN_L + plot_w - 150.0,
            MARGIN_L + plot_w - 120.0,
            MARGIN_L + plot_w - 112.0,
            ly + 4.0,
            escape(&series[*idx].label),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders and writes a plot in one step.
pub fn write_line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_y: bool,
) -> Result<()> {
    let svg = line_plot_svg(title, x_label, y_label, series, log_y);
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_svg() {
        let series = vec![
            Series { label: "a<b>".into(), points: vec![(1.0, 1.0), (2.0, 4.0), (3.0, 9.0)] },
            Series { label: "flat".into(), points: vec![(1.0, 2.0), (3.0, 2.0)] },
        ];
        let svg = line_plot_svg("squares & friends", "n", "value", &series, false);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("a&lt;b&gt;"));
        assert!(svg.contains("squares &amp; friends"));
    }

    #[test]
    fn log_scale_drops_nonpositive_points() {
        let series = vec![Series {
            label: "eps".into(),
            points: vec![(1.0, 1e-14), (2.0, 0.0), (3.0, 1e-10)],
        }];
        let svg = line_plot_svg("t", "n", "eps", &series, true);
        // Two valid points survive -> one polyline with two coordinates.
        assert_eq!(svg.matches("polyline").count(), 1);
    }

    #[test]
    fn empty_input_renders_placeholder() {
        let svg = line_plot_svg("t", "x", "y", &[], false);
        assert!(svg.contains("no data"));
        let svg = line_plot_svg("t", "x", "y", &[Series { label: "e".into(), points: vec![] }], false);
        assert!(svg.contains("no data"));
    }
}
