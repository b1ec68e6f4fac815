//! Self-contained SVG summary plots, written without a plotting library.
//!
//! Output is deterministic: fixed layout, fixed-precision coordinates, and
//! data taken from the report in order.

use crate::error::{Error, Result};
use crate::harness::report::{ExperimentReport, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Polylines from `report.curves`.
    Line,
    /// One marker with a vertical error bar per aggregate row
    /// (x = mean excess kurtosis, y = mean IPR, bar = std IPR).
    ScatterErrorBars,
    /// Cell grid of `report.final_weights` (units by dimension).
    WeightHeatmap,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 52.0;

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

struct AxisScale {
    min: f64,
    max: f64,
    span_px: f64,
    offset_px: f64,
    flip: bool,
}

impl AxisScale {
    fn new(min: f64, max: f64, span_px: f64, offset_px: f64, flip: bool) -> Self {
        let (min, max) = if (max - min).abs() < 1e-300 { (min - 1.0, max + 1.0) } else { (min, max) };
        AxisScale { min, max, span_px, offset_px, flip }
    }

    fn to_px(&self, v: f64) -> f64 {
        let t = (v - self.min) / (self.max - self.min);
        let t = if self.flip { 1.0 - t } else { t };
        self.offset_px + t * self.span_px
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4).map(|i| self.min + (self.max - self.min) * i as f64 / 4.0).collect()
    }
}

fn open_svg(out: &mut String, title: &str, config_hash: u64) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!("<desc>config_hash={config_hash:016x}</desc>\n"));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
}

fn axes(out: &mut String, x: &AxisScale, y: &AxisScale, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for tick in x.ticks() {
        let px = x.to_px(tick);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y0}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt(px),
            fmt(px),
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            fmt(px),
            y0 + 17.0,
            fmt(tick)
        ));
    }
    for tick in y.ticks() {
        let py = y.to_px(tick);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{x0}\" y2=\"{}\" stroke=\"black\"/>\n",
            x0 - 5.0,
            fmt(py),
            fmt(py)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            x0 - 8.0,
            fmt(py + 3.0),
            fmt(tick)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        x_label
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        y_label
    ));
}

fn series_bounds(curves: &[Series]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in curves {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let e = s.yerr.as_ref().map(|e| e[i]).unwrap_or(0.0);
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y - e);
            ymax = ymax.max(y + e);
        }
    }
    (xmin, xmax, ymin, ymax)
}

/// Render the report with the requested plot kind. Errors when the report
/// lacks the data the kind needs.
pub fn emit_svg(report: &ExperimentReport, kind: PlotKind) -> Result<String> {
    match kind {
        PlotKind::Line => emit_lines(report, &report.curves, "x", "value"),
        PlotKind::ScatterErrorBars => emit_scatter(report),
        PlotKind::WeightHeatmap => emit_heatmap(report),
    }
}

fn emit_lines(
    report: &ExperimentReport,
    curves: &[Series],
    x_label: &str,
    y_label: &str,
) -> Result<String> {
    if curves.is_empty() || curves.iter().all(|s| s.points.is_empty()) {
        return Err(Error::EmptyReport(format!("{}: no curves to draw", report.id)));
    }
    let (xmin, xmax, ymin, ymax) = series_bounds(curves);
    let x = AxisScale::new(xmin, xmax, WIDTH - MARGIN_LEFT - MARGIN_RIGHT, MARGIN_LEFT, false);
    let y = AxisScale::new(ymin, ymax, HEIGHT - MARGIN_TOP - MARGIN_BOTTOM, MARGIN_TOP, true);
    let mut out = String::new();
    open_svg(&mut out, &report.id, report.config_hash);
    axes(&mut out, &x, &y, x_label, y_label);
    for (si, s) in curves.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let pts: Vec<String> =
            s.points.iter().map(|&(px, py)| format!("{},{}", fmt(x.to_px(px)), fmt(y.to_px(py)))).collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN_RIGHT - 150.0,
            MARGIN_TOP + 14.0 * (si as f64 + 1.0),
            s.label
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn emit_scatter(report: &ExperimentReport) -> Result<String> {
    if report.aggregates.is_empty() {
        return Err(Error::EmptyReport(format!("{}: no aggregates to draw", report.id)));
    }
    let series: Vec<Series> = vec![Series {
        label: "mean IPR +- std".into(),
        points: report.aggregates.iter().map(|a| (a.mean_excess_kurtosis, a.mean_ipr)).collect(),
        yerr: Some(report.aggregates.iter().map(|a| a.std_ipr).collect()),
    }];
    let (xmin, xmax, ymin, ymax) = series_bounds(&series);
    let x = AxisScale::new(xmin, xmax, WIDTH - MARGIN_LEFT - MARGIN_RIGHT, MARGIN_LEFT, false);
    let y = AxisScale::new(ymin.min(0.0), ymax.max(1.0), HEIGHT - MARGIN_TOP - MARGIN_BOTTOM, MARGIN_TOP, true);
    let mut out = String::new();
    open_svg(&mut out, &report.id, report.config_hash);
    axes(&mut out, &x, &y, "excess kurtosis", "IPR");
    let s = &series[0];
    for (i, &(px, py)) in s.points.iter().enumerate() {
        let e = s.yerr.as_ref().expect("built above")[i];
        let cx = x.to_px(px);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#1f77b4\"/>\n",
            fmt(cx),
            fmt(y.to_px(py - e)),
            fmt(cx),
            fmt(y.to_px(py + e))
        ));
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#1f77b4\"/>\n",
            fmt(cx),
            fmt(y.to_px(py))
        ));
        let label = report.aggregates[i].config_id.as_str();
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"middle\">{}</text>\n",
            fmt(cx),
            fmt(y.to_px(py) - 8.0),
            label
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn emit_heatmap(report: &ExperimentReport) -> Result<String> {
    let weights = report
        .final_weights
        .as_ref()
        .ok_or_else(|| Error::EmptyReport(format!("{}: no weights to draw", report.id)))?;
    let (units, n) = weights.dim();
    if units == 0 || n == 0 {
        return Err(Error::EmptyReport(format!("{}: empty weight matrix", report.id)));
    }
    let vmax = weights.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let cell_w = plot_w / n as f64;
    let cell_h = plot_h / units as f64;
    let mut out = String::new();
    open_svg(&mut out, &report.id, report.config_hash);
    for u in 0..units {
        for j in 0..n {
            let v = weights[(u, j)] / vmax;
            // diverging blue-white-red
            let (r, g, b) = if v >= 0.0 {
                let t = v.min(1.0);
                (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
            } else {
                let t = (-v).min(1.0);
                (255.0 * (1.0 - t), 255.0 * (1.0 - t), 255.0)
            };
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},{})\"/>\n",
                fmt(MARGIN_LEFT + j as f64 * cell_w),
                fmt(MARGIN_TOP + u as f64 * cell_h),
                fmt(cell_w + 0.5),
                fmt(cell_h + 0.5),
                r as u8,
                g as u8,
                b as u8
            ));
        }
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">input dimension</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">unit</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn line_report() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo", 0xabc);
        r.curves.push(Series {
            label: "w".into(),
            points: (0..12).map(|i| (i as f64, (i as f64 * 0.7).sin())).collect(),
            yerr: None,
        });
        r
    }

    #[test]
    fn line_plot_has_one_polyline_with_all_points() {
        let svg = emit_svg(&line_report(), PlotKind::Line).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points_attr = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points_attr.split(' ').count(), 12);
    }

    #[test]
    fn scatter_has_marker_and_bar_per_config() {
        let mut r = ExperimentReport::new("sweep", 1);
        for (i, id) in ["a", "b", "c"].iter().enumerate() {
            r.rows.push(crate::harness::report::MetricRow {
                seed: i as u64,
                config_id: id.to_string(),
                ipr: 0.1 * (i as f64 + 1.0),
                excess_kurtosis: i as f64 - 1.0,
                fit_k: 1,
                fit_rel_residual: 0.3,
                peak: 0,
            });
        }
        r.compute_aggregates();
        let svg = emit_svg(&r, PlotKind::ScatterErrorBars).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn identical_reports_give_byte_identical_svg() {
        let a = emit_svg(&line_report(), PlotKind::Line).unwrap();
        let b = emit_svg(&line_report(), PlotKind::Line).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heatmap_needs_weights() {
        let r = ExperimentReport::new("empty", 2);
        assert!(matches!(emit_svg(&r, PlotKind::WeightHeatmap), Err(Error::EmptyReport(_))));
        let mut r2 = ExperimentReport::new("w", 3);
        r2.final_weights = Some(Array2::from_shape_fn((2, 8), |(u, j)| {
            if u == 0 { (j as f64 / 8.0) - 0.5 } else { 0.25 }
        }));
        let svg = emit_svg(&r2, PlotKind::WeightHeatmap).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1 + 16); // background + cells
    }
}
