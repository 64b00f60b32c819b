//! Minimal SVG line plots for ROC and calibration curves: a unit-square
//! plot area, a diagonal reference, and one polyline.

fn map_x(x: f64, width: f64, margin: f64) -> f64 {
    margin + x * (width - 2.0 * margin)
}

fn map_y(y: f64, height: f64, margin: f64) -> f64 {
    height - margin - y * (height - 2.0 * margin)
}

/// Render points with x and y in [0,1] as a simple framed line plot.
pub fn unit_line_plot(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let (width, height, margin) = (480.0, 480.0, 48.0);
    let path: Vec<String> = points
        .iter()
        .map(|&(x, y)| {
            format!(
                "{:.2},{:.2}",
                map_x(x.clamp(0.0, 1.0), width, margin),
                map_y(y.clamp(0.0, 1.0), height, margin)
            )
        })
        .collect();
    let polyline = path.join(" ");
    let (x0, y0) = (map_x(0.0, width, margin), map_y(0.0, height, margin));
    let (x1, y1) = (map_x(1.0, width, margin), map_y(1.0, height, margin));
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect x=\"{x0}\" y=\"{y1}\" width=\"{side}\" height=\"{side}\" ",
            "fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n",
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" ",
            "stroke=\"#bbbbbb\" stroke-dasharray=\"6,4\"/>\n",
            "<polyline points=\"{points}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\"/>\n",
            "<text x=\"{cx}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n",
            "<text x=\"{cx}\" y=\"{h_lab}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n",
            "<text x=\"16\" y=\"{cy}\" text-anchor=\"middle\" font-size=\"12\" ",
            "transform=\"rotate(-90 16 {cy})\">{y_label}</text>\n",
            "</svg>\n"
        ),
        w = width,
        h = height,
        x0 = x0,
        y0 = y0,
        x1 = x1,
        y1 = y1,
        side = x1 - x0,
        points = polyline,
        cx = width / 2.0,
        cy = height / 2.0,
        h_lab = height - 12.0,
        title = title,
        x_label = x_label,
        y_label = y_label,
    )
}

/// Render a value grid (rows x columns, values in [0,1]) as a colored
/// heatmap with row/column labels. Empty cells stay white.
pub fn heatmap(
    row_labels: &[String],
    col_labels: &[String],
    cells: &[Vec<Option<f64>>],
    title: &str,
) -> String {
    let cell = 72.0;
    let (left, top) = (140.0, 72.0);
    let width = left + col_labels.len() as f64 * cell + 16.0;
    let height = top + row_labels.len() as f64 * cell + 16.0;
    let mut body = String::new();
    for (j, label) in col_labels.iter().enumerate() {
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{label}</text>\n",
            left + (j as f64 + 0.5) * cell,
            top - 10.0
        ));
    }
    for (i, row_label) in row_labels.iter().enumerate() {
        let y = top + i as f64 * cell;
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{row_label}</text>\n",
            left - 8.0,
            y + cell / 2.0 + 4.0
        ));
        for (j, value) in cells[i].iter().enumerate() {
            let x = left + j as f64 * cell;
            let (fill, text) = match value {
                Some(v) => {
                    let v = v.clamp(0.0, 1.0);
                    // white -> blue ramp
                    let channel = (255.0 - 175.0 * v) as u8;
                    (
                        format!("rgb({channel},{},255)", (255.0 - 100.0 * v) as u8),
                        format!("{v:.3}"),
                    )
                }
                None => ("white".to_string(), String::new()),
            };
            body.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell}\" height=\"{cell}\" \
                 fill=\"{fill}\" stroke=\"#888888\"/>\n"
            ));
            if !text.is_empty() {
                body.push_str(&format!(
                    "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{text}</text>\n",
                    x + cell / 2.0,
                    y + cell / 2.0 + 4.0
                ));
            }
        }
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n\
         {body}</svg>\n",
        width / 2.0
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_contains_points_and_labels() {
        let svg = unit_line_plot(&[(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)], "ROC", "FPR", "TPR");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("ROC"));
        assert!(svg.contains("FPR"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn heatmap_renders_cells_and_labels() {
        let svg = heatmap(
            &["logreg".into(), "rf".into()],
            &["a".into(), "b".into()],
            &[vec![Some(0.91), Some(0.74)], vec![Some(0.88), None]],
            "AUROC",
        );
        assert!(svg.contains("logreg"));
        assert!(svg.contains("0.910"));
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.ends_with("</svg>\n"));
    }
}
