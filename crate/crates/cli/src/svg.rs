//! Tiny SVG chart rendering.
//!
//! The report needs three fixed chart shapes (histogram, bar chart, grid
//! heatmap), so the markup is assembled by hand; output is a plain string
//! the caller writes to disk. All numeric formatting is fixed-precision,
//! keeping re-renders byte-identical.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 50.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = escape(title),
    );
}

fn close(out: &mut String) {
    out.push_str("</svg>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Histogram of `samples` over `bins` equal intervals of [lo, hi].
/// Samples outside the range clamp into the boundary bins; a sample at
/// exactly `hi` lands in the last bin.
pub fn histogram(title: &str, samples: &[f64], bins: usize, lo: f64, hi: f64) -> String {
    assert!(bins > 0 && hi > lo);
    let mut counts = vec![0u64; bins];
    for &s in samples {
        let t = ((s - lo) / (hi - lo) * bins as f64).floor();
        let idx = (t as i64).clamp(0, bins as i64 - 1) as usize;
        counts[idx] += 1;
    }
    let peak = counts.iter().copied().max().unwrap_or(0).max(1);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let bar_w = plot_w / bins as f64;

    let mut out = String::new();
    open(&mut out, title);
    for (i, &c) in counts.iter().enumerate() {
        let h = plot_h * c as f64 / peak as f64;
        let x = MARGIN_LEFT + i as f64 * bar_w;
        let y = MARGIN_TOP + plot_h - h;
        let _ = write!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"#4878a8\" stroke=\"white\" stroke-width=\"1\"/>\n",
            w = bar_w,
        );
    }
    axis_labels(&mut out, lo, hi, peak as f64, "count");
    close(&mut out);
    out
}

/// Bar chart of labeled values in [0, 1].
pub fn bar_chart(title: &str, labels: &[String], values: &[f64]) -> String {
    assert_eq!(labels.len(), values.len());
    let n = labels.len().max(1);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let slot = plot_w / n as f64;
    let bar_w = slot * 0.7;

    let mut out = String::new();
    open(&mut out, title);
    for (i, (label, &v)) in labels.iter().zip(values).enumerate() {
        let h = plot_h * v.clamp(0.0, 1.0);
        let x = MARGIN_LEFT + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = MARGIN_TOP + plot_h - h;
        let cx = x + bar_w / 2.0;
        let _ = write!(
            out,
            concat!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"#4878a8\"/>\n",
                "<text x=\"{cx:.2}\" y=\"{vy:.2}\" font-size=\"11\" text-anchor=\"middle\">{v:.3}</text>\n",
                "<text x=\"{cx:.2}\" y=\"{ly:.2}\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n"
            ),
            x = x,
            y = y,
            w = bar_w,
            h = h,
            cx = cx,
            vy = y - 4.0,
            v = v,
            ly = HEIGHT - MARGIN_BOTTOM + 16.0,
            label = escape(label),
        );
    }
    axis_labels(&mut out, 0.0, 1.0, 1.0, "score");
    close(&mut out);
    out
}

/// Row-major square heatmap; darker cells were visited more.
pub fn grid_heatmap(title: &str, dim: usize, counts: &[u64]) -> String {
    assert_eq!(counts.len(), dim * dim);
    let peak = counts.iter().copied().max().unwrap_or(0).max(1);
    let plot = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM).min(WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let cell = plot / dim as f64;
    let x0 = (WIDTH - plot) / 2.0;

    let mut out = String::new();
    open(&mut out, title);
    for row in 0..dim {
        for col in 0..dim {
            let c = counts[row * dim + col];
            let v = c as f64 / peak as f64;
            let shade = (255.0 - 200.0 * v).round() as u8;
            let x = x0 + col as f64 * cell;
            let y = MARGIN_TOP + row as f64 * cell;
            let _ = write!(
                out,
                concat!(
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{s:.2}\" height=\"{s:.2}\" ",
                    "fill=\"rgb({shade},{shade},255)\" stroke=\"#888\" stroke-width=\"0.5\"/>\n",
                    "<text x=\"{cx:.2}\" y=\"{cy:.2}\" font-size=\"11\" text-anchor=\"middle\">{c}</text>\n"
                ),
                x = x,
                y = y,
                s = cell,
                shade = shade,
                cx = x + cell / 2.0,
                cy = y + cell / 2.0 + 4.0,
                c = c,
            );
        }
    }
    close(&mut out);
    out
}

fn axis_labels(out: &mut String, lo: f64, hi: f64, peak: f64, y_name: &str) {
    let _ = write!(
        out,
        concat!(
            "<text x=\"{lx:.1}\" y=\"{by:.1}\" font-size=\"11\" text-anchor=\"middle\">{lo:.2}</text>\n",
            "<text x=\"{rx:.1}\" y=\"{by:.1}\" font-size=\"11\" text-anchor=\"middle\">{hi:.2}</text>\n",
            "<text x=\"{ax:.1}\" y=\"{ty:.1}\" font-size=\"11\" text-anchor=\"end\">{peak:.0}</text>\n",
            "<text x=\"{ax:.1}\" y=\"{my:.1}\" font-size=\"11\" text-anchor=\"end\" ",
            "transform=\"rotate(-90 {rox:.1} {my:.1})\">{name}</text>\n"
        ),
        lx = MARGIN_LEFT,
        rx = WIDTH - MARGIN_RIGHT,
        by = HEIGHT - MARGIN_BOTTOM + 32.0,
        ax = MARGIN_LEFT - 6.0,
        ty = MARGIN_TOP + 4.0,
        my = (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        rox = MARGIN_LEFT - 6.0,
        peak = peak,
        lo = lo,
        hi = hi,
        name = y_name,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_bins_cover_edges() {
        let svg = histogram("h", &[0.0, 0.049, 0.05, 1.0, 1.2, -0.3], 20, 0.0, 1.0);
        assert_eq!(svg.matches("<rect").count(), 21, "20 bars plus background");
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn bar_chart_labels_every_bar() {
        let labels = vec!["alpha".to_string(), "beta".to_string()];
        let svg = bar_chart("b", &labels, &[0.25, 0.75]);
        assert!(svg.contains(">alpha<") && svg.contains(">beta<"));
        assert!(svg.contains(">0.250<") && svg.contains(">0.750<"));
    }

    #[test]
    fn heatmap_is_deterministic() {
        let counts: Vec<u64> = (0..49).collect();
        let a = grid_heatmap("m", 7, &counts);
        let b = grid_heatmap("m", 7, &counts);
        assert_eq!(a, b);
        assert_eq!(a.matches("<rect").count(), 50, "49 cells plus background");
    }

    #[test]
    fn titles_are_escaped() {
        let svg = histogram("a < b & c", &[], 5, 0.0, 1.0);
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
