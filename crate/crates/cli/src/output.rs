//! CSV emission (12 significant digits, LF line endings) and a minimal
//! self-contained SVG scatter writer.

use std::fs;
use std::io::Write;
use std::path::Path;

/// One value at 12 significant digits, locale-free.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

/// Write a CSV file: header row, then rows of 12-significant-digit numbers.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        buf.push_str(&cells.join(","));
        buf.push('\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(buf.as_bytes())
}

/// A named point cloud for the scatter writer.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Static scatter plot: axes box, tick labels at the corners, one circle per
/// point, legend in the top-left. No styling dependencies.
pub fn write_scatter_svg(path: &Path, title: &str, series: &[Series<'_>]) -> std::io::Result<()> {
    let (w, h, margin) = (640.0, 640.0, 60.0);
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in s.points {
            lo.0 = lo.0.min(x);
            lo.1 = lo.1.min(y);
            hi.0 = hi.0.max(x);
            hi.1 = hi.1.max(y);
        }
    }
    if !lo.0.is_finite() {
        lo = (0.0, 0.0);
        hi = (1.0, 1.0);
    }
    let pad = |a: f64, b: f64| if (b - a).abs() < 1e-12 { (a - 0.5, b + 0.5) } else { (a, b) };
    let (x0, x1) = pad(lo.0, hi.0);
    let (y0, y1) = pad(lo.1, hi.1);
    let sx = (w - 2.0 * margin) / (x1 - x0);
    let sy = (h - 2.0 * margin) / (y1 - y0);
    let px = |x: f64| margin + (x - x0) * sx;
    let py = |y: f64| h - margin - (y - y0) * sy;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">{title}</text>\n",
        w / 2.0
    ));
    svg.push_str(&format!(
        "<rect x=\"{margin}\" y=\"{margin}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>\n",
        w - 2.0 * margin,
        h - 2.0 * margin
    ));
    for (v, x, y, anchor) in [
        (x0, margin, h - margin + 18.0, "middle"),
        (x1, w - margin, h - margin + 18.0, "middle"),
        (y0, margin - 6.0, h - margin, "end"),
        (y1, margin - 6.0, margin + 4.0, "end"),
    ] {
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"{anchor}\">{v:.3}</text>\n"
        ));
    }
    // Zero axes when inside the box.
    if x0 < 0.0 && x1 > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{margin}\" x2=\"{0}\" y2=\"{1}\" stroke=\"#cccccc\"/>\n",
            px(0.0),
            h - margin
        ));
    }
    if y0 < 0.0 && y1 > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{margin}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#cccccc\"/>\n",
            py(0.0),
            w - margin
        ));
    }
    for s in series {
        for &(x, y) in s.points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                px(x),
                py(y),
                s.color
            ));
        }
    }
    for (i, s) in series.iter().enumerate() {
        let y = margin + 16.0 * (i as f64 + 1.0);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{} ({})</text>\n",
            margin + 10.0,
            y,
            s.color,
            margin + 20.0,
            y + 4.0,
            s.label,
            s.points.len()
        ));
    }
    svg.push_str("</svg>\n");
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(1.0), "1.00000000000e0");
        assert_eq!(fmt_sig(-0.125), "-1.25000000000e-1");
        assert_eq!(fmt_sig(12345.6789), "1.23456789000e4");
    }

    #[test]
    fn round_trip_keeps_twelve_digits() {
        for &x in &[std::f64::consts::PI, -1.0 / 3.0, 6.02214076e23, 1e-9] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs(), "{x} -> {back}");
        }
    }
}
