//! Hand-emitted SVG line charts: fixed 800x500 canvas, 10% margins,
//! linear axes, one polyline per series, legend with per-series AUC.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_X: f64 = 80.0;
const MARGIN_Y: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

pub struct ChartSeries {
    pub name: String,
    /// (k, score) points, sorted by k.
    pub points: Vec<(f64, f64)>,
    pub auc: Option<f64>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_values(min: f64, max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Render the chart. Panics if `series` is empty or any series has no
/// points; callers validate first.
pub fn render_chart(series: &[ChartSeries], x_label: &str, y_label: &str) -> String {
    assert!(!series.is_empty() && series.iter().all(|s| !s.points.is_empty()));

    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    let (mut x_min, mut x_max) = min_max(&xs);
    let (mut y_min, mut y_max) = min_max(&ys);
    if x_max == x_min {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max == y_min {
        y_min -= 0.05;
        y_max += 0.05;
    }
    let y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    let plot_w = WIDTH - 2.0 * MARGIN_X;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let to_x = |v: f64| MARGIN_X + (v - x_min) / (x_max - x_min) * plot_w;
    let to_y = |v: f64| HEIGHT - MARGIN_Y - (v - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg version="1.1" width="{WIDTH}" height="{HEIGHT}" xmlns="http://www.w3.org/2000/svg">"#
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    ));
    svg.push('\n');

    // Axes.
    svg.push_str(&format!(
        r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black" stroke-width="1.5"/>"#,
        x0 = MARGIN_X,
        x1 = WIDTH - MARGIN_X,
        y1 = HEIGHT - MARGIN_Y,
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1.5"/>"#,
        x0 = MARGIN_X,
        y0 = MARGIN_Y,
        y1 = HEIGHT - MARGIN_Y,
    ));
    svg.push('\n');

    // Ticks and grid.
    for v in tick_values(x_min, x_max, 6) {
        let x = to_x(v);
        svg.push_str(&format!(
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="black" stroke-width="1"/>"#,
            y0 = HEIGHT - MARGIN_Y,
            y1 = HEIGHT - MARGIN_Y + 5.0,
        ));
        svg.push_str(&format!(
            r#"<text x="{x}" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="12">{v:.1}</text>"#,
            y = HEIGHT - MARGIN_Y + 20.0,
        ));
        svg.push('\n');
    }
    for v in tick_values(y_min, y_max, 6) {
        let y = to_y(v);
        svg.push_str(&format!(
            r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#dddddd" stroke-width="1"/>"##,
            x0 = MARGIN_X,
            x1 = WIDTH - MARGIN_X,
        ));
        svg.push_str(&format!(
            r#"<text x="{x}" y="{yt}" text-anchor="end" font-family="sans-serif" font-size="12">{v:.3}</text>"#,
            x = MARGIN_X - 8.0,
            yt = y + 4.0,
        ));
        svg.push('\n');
    }

    // Axis labels.
    svg.push_str(&format!(
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="14">{label}</text>"#,
        x = WIDTH / 2.0,
        y = HEIGHT - 10.0,
        label = escape(x_label),
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="18" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 18 {y})">{label}</text>"#,
        y = HEIGHT / 2.0,
        label = escape(y_label),
    ));
    svg.push('\n');

    // Series polylines, markers, legend.
    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", to_x(x), to_y(y)))
            .collect();
        svg.push_str(&format!(
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        ));
        svg.push('\n');
        for &(x, y) in &s.points {
            svg.push_str(&format!(
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                to_x(x),
                to_y(y)
            ));
        }
        svg.push('\n');

        let legend_y = MARGIN_Y + 16.0 + idx as f64 * 20.0;
        let label = match s.auc {
            Some(auc) => format!("{} (AUC={:.4})", s.name, auc),
            None => s.name.clone(),
        };
        svg.push_str(&format!(
            r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{color}"/>"#,
            x = WIDTH - MARGIN_X - 200.0,
            y = legend_y - 10.0,
        ));
        svg.push_str(&format!(
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="13">{label}</text>"#,
            x = WIDTH - MARGIN_X - 182.0,
            y = legend_y,
            label = escape(&label),
        ));
        svg.push('\n');
    }

    svg.push_str("</svg>\n");
    svg
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_series_three_points_has_one_polyline() {
        let series = vec![ChartSeries {
            name: "chbs".into(),
            points: vec![(2.0, 0.8), (4.0, 0.9), (6.0, 0.95)],
            auc: Some(0.88),
        }];
        let svg = render_chart(&series, "selected bands (k)", "overall accuracy");
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("AUC=0.8800"));
        assert!(svg.contains("selected bands (k)"));
    }

    #[test]
    fn escapes_markup_in_labels() {
        let series = vec![ChartSeries {
            name: "a<b&c".into(),
            points: vec![(1.0, 0.5), (2.0, 0.6)],
            auc: None,
        }];
        let svg = render_chart(&series, "x", "y");
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b"));
    }
}
