//! Per-delta line charts as static SVG.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::analysis::{AggregateTable, GroupDeltaRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Accuracy,
    Time,
    Confidence,
}

impl PlotMetric {
    pub const ALL: [PlotMetric; 3] = [PlotMetric::Accuracy, PlotMetric::Time, PlotMetric::Confidence];

    pub fn name(self) -> &'static str {
        match self {
            PlotMetric::Accuracy => "accuracy",
            PlotMetric::Time => "time",
            PlotMetric::Confidence => "confidence",
        }
    }

    fn label(self) -> &'static str {
        match self {
            PlotMetric::Accuracy => "mean accuracy (0-5)",
            PlotMetric::Time => "mean time (s)",
            PlotMetric::Confidence => "mean confidence (0-10)",
        }
    }

    fn value(self, row: &GroupDeltaRow) -> f64 {
        match self {
            PlotMetric::Accuracy => row.mean_accuracy,
            PlotMetric::Time => row.mean_time,
            PlotMetric::Confidence => row.mean_confidence,
        }
    }

    /// Fixed y range for bounded scales; time scales to the data.
    fn y_max(self, rows: &[&GroupDeltaRow]) -> f64 {
        match self {
            PlotMetric::Accuracy => 5.0,
            PlotMetric::Confidence => 10.0,
            PlotMetric::Time => {
                let top = rows.iter().map(|r| r.mean_time).fold(0.0, f64::max);
                if top > 0.0 {
                    (top * 1.1).ceil()
                } else {
                    1.0
                }
            }
        }
    }
}

const PALETTE: [&str; 6] = ["#1b6ac9", "#d9481c", "#2a9d3f", "#8e44ad", "#c29a00", "#555555"];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const MAX_DELTA: f64 = 0.4;

/// One line per (group, size) series, delta on the x axis.
pub fn render_line_chart(table: &AggregateTable, metric: PlotMetric) -> String {
    let mut series: BTreeMap<(String, usize), Vec<&GroupDeltaRow>> = BTreeMap::new();
    for row in &table.groups {
        series.entry((row.group.clone(), row.size)).or_default().push(row);
    }
    let rows: Vec<&GroupDeltaRow> = table.groups.iter().collect();
    let y_max = metric.y_max(&rows);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |d: f64| LEFT + d / MAX_DELTA * plot_w;
    let sy = |v: f64| TOP + plot_h - v / y_max * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g stroke="black"><line x1="{LEFT}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b}"/></g>"#,
        b = TOP + plot_h,
        r = LEFT + plot_w
    );
    for k in 0..=8 {
        let d = k as f64 * 0.05;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{d:.2}</text>"#,
            sx(d),
            TOP + plot_h + 18.0
        );
    }
    for k in 0..=5 {
        let v = y_max * k as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(v) + 4.0,
            (v * 100.0).round() / 100.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">KSM difference</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.label()
    );
    for (k, ((group, size), rows)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut rows = rows.clone();
        rows.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.delta), sy(metric.value(r))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 16.0 * k as f64 + 8.0;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{group} n={size}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
