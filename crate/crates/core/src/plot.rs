//! Deterministic SVG comparison charts: real-versus-generated histograms for
//! continuous columns and grouped bar charts for discrete ones. Output is a
//! pure function of the inputs — same data, same bytes.

use std::collections::BTreeSet;

use crate::data::{ColumnData, RawTable};
use crate::{Error, Result};

pub const REAL_COLOR: &str = "#ff8c00";
pub const GENERATED_COLOR: &str = "#1f77b4";

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

fn plot_width() -> f64 {
    WIDTH - MARGIN_LEFT - MARGIN_RIGHT
}

fn plot_height() -> f64 {
    HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Fixed-precision coordinate so the output never depends on float display
/// quirks.
fn c(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick label with trailing zeros trimmed.
fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Number of histogram bins for a sample of size `n`: the usual
/// log2-plus-one rule with a floor of 10.
pub fn bin_count(n: usize) -> usize {
    if n <= 1 {
        return 10;
    }
    let sturges = (n as f64).log2().ceil() as usize + 1;
    sturges.max(10)
}

struct Frame {
    out: String,
    y_max: f64,
}

impl Frame {
    fn new(title: &str, y_max: f64) -> Self {
        let mut out = String::with_capacity(8192);
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
        ));
        out.push_str(&format!(
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" fill=\"#333333\">{}</text>\n",
            c(WIDTH / 2.0),
            esc(title)
        ));
        // legend
        let lx = WIDTH - MARGIN_RIGHT - 150.0;
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"12\" width=\"12\" height=\"12\" fill=\"{REAL_COLOR}\"/>\n",
            c(lx)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"22\" font-size=\"11\" fill=\"#333333\">real</text>\n",
            c(lx + 16.0)
        ));
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"12\" width=\"12\" height=\"12\" fill=\"{GENERATED_COLOR}\"/>\n",
            c(lx + 60.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"22\" font-size=\"11\" fill=\"#333333\">generated</text>\n",
            c(lx + 76.0)
        ));
        // axes
        let x0 = MARGIN_LEFT;
        let y0 = MARGIN_TOP + plot_height();
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>\n",
            c(x0),
            c(MARGIN_TOP),
            c(x0),
            c(y0)
        ));
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>\n",
            c(x0),
            c(y0),
            c(x0 + plot_width()),
            c(y0)
        ));
        let mut frame = Frame { out, y_max };
        frame.y_ticks();
        frame
    }

    fn y_px(&self, v: f64) -> f64 {
        MARGIN_TOP + plot_height() * (1.0 - v / self.y_max)
    }

    fn y_ticks(&mut self) {
        for j in 0..=4 {
            let v = self.y_max * j as f64 / 4.0;
            let y = self.y_px(v);
            self.out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
                c(MARGIN_LEFT),
                c(y),
                c(MARGIN_LEFT + plot_width()),
                c(y)
            ));
            self.out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"10\" fill=\"#333333\">{}</text>\n",
                c(MARGIN_LEFT - 6.0),
                c(y + 3.0),
                tick(v)
            ));
        }
    }

    fn bar(&mut self, x: f64, w: f64, p: f64, color: &str) {
        if p <= 0.0 {
            return;
        }
        let y = self.y_px(p);
        let h = MARGIN_TOP + plot_height() - y;
        self.out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\" fill-opacity=\"0.85\"/>\n",
            c(x),
            c(y),
            c(w),
            c(h)
        ));
    }

    fn x_label(&mut self, x: f64, text: &str) {
        self.out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\" fill=\"#333333\">{}</text>\n",
            c(x),
            c(MARGIN_TOP + plot_height() + 16.0),
            esc(text)
        ));
    }

    fn finish(mut self, y_axis_label: &str) -> String {
        self.out.push_str(&format!(
            "<text x=\"14\" y=\"{}\" font-size=\"11\" fill=\"#333333\" \
             transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>\n",
            c(MARGIN_TOP + plot_height() / 2.0),
            c(MARGIN_TOP + plot_height() / 2.0),
            esc(y_axis_label)
        ));
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Overlaid share-per-bin histogram of two samples on a common range.
pub fn histogram_svg(title: &str, real: &[f64], generated: &[f64]) -> Result<String> {
    if real.is_empty() || generated.is_empty() {
        return Err(Error::Argument(
            "histogram needs non-empty samples on both sides".into(),
        ));
    }
    let all = real.iter().chain(generated);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in all {
        if !v.is_finite() {
            return Err(Error::Argument("histogram samples must be finite".into()));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let bins = bin_count(real.len().max(generated.len()));
    let share = |sample: &[f64]| -> Vec<f64> {
        let mut counts = vec![0usize; bins];
        for &v in sample {
            let mut b = ((v - lo) / (hi - lo) * bins as f64) as usize;
            if b >= bins {
                b = bins - 1;
            }
            counts[b] += 1;
        }
        counts
            .iter()
            .map(|&k| k as f64 / sample.len() as f64)
            .collect()
    };
    let real_p = share(real);
    let gen_p = share(generated);
    let y_max = real_p
        .iter()
        .chain(&gen_p)
        .fold(0.0f64, |a, &b| a.max(b))
        .max(1e-9)
        * 1.05;

    let mut frame = Frame::new(title, y_max);
    let bw = plot_width() / bins as f64;
    let half = (bw - 2.0).max(1.0) / 2.0;
    for i in 0..bins {
        let x = MARGIN_LEFT + i as f64 * bw + 1.0;
        frame.bar(x, half, real_p[i], REAL_COLOR);
        frame.bar(x + half, half, gen_p[i], GENERATED_COLOR);
    }
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let x = MARGIN_LEFT + plot_width() * t as f64 / 4.0;
        frame.x_label(x, &tick(v));
    }
    Ok(frame.finish("share of rows"))
}

/// Grouped per-category share chart of two discrete samples.
pub fn bar_chart_svg(
    title: &str,
    categories: &[String],
    real_counts: &[usize],
    generated_counts: &[usize],
) -> Result<String> {
    if categories.is_empty()
        || categories.len() != real_counts.len()
        || categories.len() != generated_counts.len()
    {
        return Err(Error::Argument(
            "bar chart needs aligned non-empty categories and counts".into(),
        ));
    }
    let real_n: usize = real_counts.iter().sum();
    let gen_n: usize = generated_counts.iter().sum();
    if real_n == 0 || gen_n == 0 {
        return Err(Error::Argument(
            "bar chart needs at least one count on each side".into(),
        ));
    }
    let real_p: Vec<f64> = real_counts.iter().map(|&k| k as f64 / real_n as f64).collect();
    let gen_p: Vec<f64> = generated_counts
        .iter()
        .map(|&k| k as f64 / gen_n as f64)
        .collect();
    let y_max = real_p
        .iter()
        .chain(&gen_p)
        .fold(0.0f64, |a, &b| a.max(b))
        .max(1e-9)
        * 1.05;

    let mut frame = Frame::new(title, y_max);
    let k = categories.len();
    let slot = plot_width() / k as f64;
    let pad = (slot * 0.1).max(1.0);
    let half = (slot - 2.0 * pad) / 2.0;
    for i in 0..k {
        let x = MARGIN_LEFT + i as f64 * slot + pad;
        frame.bar(x, half, real_p[i], REAL_COLOR);
        frame.bar(x + half, half, gen_p[i], GENERATED_COLOR);
        let label: String = if categories[i].chars().count() > 12 {
            let cut: String = categories[i].chars().take(11).collect();
            format!("{cut}\u{2026}")
        } else {
            categories[i].clone()
        };
        frame.x_label(x + half, &label);
    }
    Ok(frame.finish("share of rows"))
}

/// Renders the right chart kind for one column of a real/generated table
/// pair sharing a schema.
pub fn column_comparison_svg(
    real: &RawTable,
    generated: &RawTable,
    column: &str,
) -> Result<String> {
    if real.schema != generated.schema {
        return Err(Error::State(
            "real and generated tables must share a schema".into(),
        ));
    }
    let Some((idx, _)) = real.schema.column(column) else {
        return Err(Error::Argument(format!(
            "column `{column}` is not in the schema"
        )));
    };
    match (&real.columns[idx], &generated.columns[idx]) {
        (ColumnData::Continuous(r), ColumnData::Continuous(g)) => histogram_svg(column, r, g),
        (ColumnData::Discrete(r), ColumnData::Discrete(g)) => {
            let cats: Vec<String> = r
                .iter()
                .chain(g)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .cloned()
                .collect();
            let count = |vals: &[String]| -> Vec<usize> {
                cats.iter()
                    .map(|cat| vals.iter().filter(|v| *v == cat).count())
                    .collect()
            };
            bar_chart_svg(column, &cats, &count(r), &count(g))
        }
        _ => unreachable!("schema equality guarantees matching column kinds"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin, make_standin_dataset};
    use crate::rng;

    #[test]
    fn sturges_floor_is_ten() {
        assert_eq!(bin_count(1), 10);
        assert_eq!(bin_count(100), 10);
        assert_eq!(bin_count(2027), 12);
        assert_eq!(bin_count(20000), 16);
    }

    #[test]
    fn histogram_is_deterministic_and_well_formed() {
        let real: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin() * 10.0 + 60.0).collect();
        let generated: Vec<f64> = (0..400).map(|i| (i as f64 * 0.51).cos() * 12.0 + 58.0).collect();
        let a = histogram_svg("age", &real, &generated).unwrap();
        let b = histogram_svg("age", &real, &generated).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains(REAL_COLOR));
        assert!(a.contains(GENERATED_COLOR));
    }

    #[test]
    fn empty_samples_are_rejected() {
        assert!(histogram_svg("x", &[], &[1.0]).is_err());
        assert!(histogram_svg("x", &[1.0], &[]).is_err());
        assert!(histogram_svg("x", &[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn bar_chart_shows_categories() {
        let cats = vec!["alpha".to_string(), "beta".to_string()];
        let svg = bar_chart_svg("group", &cats, &[30, 70], &[40, 60]).unwrap();
        assert!(svg.contains("alpha"));
        assert!(svg.contains("beta"));
        assert!(svg.contains(REAL_COLOR));
    }

    #[test]
    fn long_category_names_are_truncated() {
        let cats = vec!["a-very-long-category-name".to_string()];
        let svg = bar_chart_svg("group", &cats, &[10], &[10]).unwrap();
        assert!(svg.contains("a-very-long\u{2026}"));
        assert!(!svg.contains("a-very-long-category-name"));
    }

    #[test]
    fn column_dispatch_by_kind() {
        let spec = builtin("icu_age_by_ethnicity").unwrap();
        let real = make_standin_dataset(&spec, 300, &mut rng::seeded(1)).unwrap();
        let generated = make_standin_dataset(&spec, 200, &mut rng::seeded(2)).unwrap();
        let cont = column_comparison_svg(&real, &generated, "age").unwrap();
        assert!(cont.contains("share of rows"));
        let disc = column_comparison_svg(&real, &generated, "ethnicity").unwrap();
        assert!(disc.contains("Caucasian"));
        assert!(column_comparison_svg(&real, &generated, "missing").is_err());
    }

    #[test]
    fn xml_escaping_in_titles() {
        let svg = histogram_svg("a<b & c", &[1.0, 2.0], &[1.5]).unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(!svg.contains("a<b"));
    }
}
