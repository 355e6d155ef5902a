//! Plain-text SVG plots with a fixed viewBox.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(title: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\">\n"
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi == lo {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Scatter of `(x, y)` points, one dot each.
pub fn scatter(points: &[[f64; 2]], title: &str, x_label: &str, y_label: &str) -> String {
    let (x0, x1) = range(points.iter().map(|p| p[0]));
    let (y0, y1) = range(points.iter().map(|p| p[1]));
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let mut s = open(title);
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    );
    for p in points {
        if !(p[0].is_finite() && p[1].is_finite()) {
            continue;
        }
        let cx = MARGIN + (p[0] - x0) / (x1 - x0) * pw;
        let cy = HEIGHT - MARGIN - (p[1] - y0) / (y1 - y0) * ph;
        let _ = writeln!(s, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>");
    }
    let _ = writeln!(
        s,
        "<text x=\"{MARGIN}\" y=\"{}\" font-size=\"11\">{x0:.4}</text>",
        HEIGHT - MARGIN + 16.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{x1:.4}</text>",
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{y0:.4}</text>",
        MARGIN - 4.0,
        HEIGHT - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{y1:.4}</text>",
        MARGIN - 4.0,
        MARGIN + 10.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 {})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0))
}

/// Square heatmap with row/column names.
pub fn heatmap(values: &[Vec<f64>], names: &[String], title: &str) -> String {
    let k = values.len().max(1);
    let (lo, hi) = range(values.iter().flatten().copied());
    let side = (HEIGHT - 2.0 * MARGIN).min(WIDTH - 2.0 * MARGIN);
    let cell = side / k as f64;
    let x_off = (WIDTH - side) / 2.0;
    let mut s = open(title);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"{}\"><title>{} → {}: {v}</title></rect>",
                x_off + j as f64 * cell,
                MARGIN + i as f64 * cell,
                color((v - lo) / (hi - lo)),
                escape(names.get(i).map_or("", String::as_str)),
                escape(names.get(j).map_or("", String::as_str)),
            );
        }
    }
    let font = (cell * 0.6).clamp(4.0, 11.0);
    for (i, name) in names.iter().enumerate().take(k) {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"{font:.1}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>",
            x_off - 4.0,
            MARGIN + (i as f64 + 0.5) * cell,
            escape(name)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">min {lo:.4}, max {hi:.4}</text>",
        WIDTH / 2.0,
        HEIGHT - MARGIN + 20.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_has_one_dot_per_point() {
        let svg = scatter(&[[0.0, 1.0], [1.0, 2.0], [2.0, 0.5]], "t", "d", "drop");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("viewBox=\"0 0 640 480\""));
    }

    #[test]
    fn heatmap_has_one_cell_per_entry_and_escapes_names() {
        let names = vec!["a<1>".to_owned(), "b".to_owned()];
        let svg = heatmap(&[vec![0.0, 1.0], vec![1.0, 0.0]], &names, "D");
        assert_eq!(svg.matches("<rect x=").count(), 4);
        assert!(svg.contains("a&lt;1&gt;"));
        assert_eq!(color(0.0), "#f7fbff");
        assert_eq!(color(1.0), "#08306b");
    }
}
