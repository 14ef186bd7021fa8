//! Deterministic SVG rendering of drawings.

use std::fmt::Write as _;

use crate::drawing::Drawing;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub node_radius: f64,
    pub edge_width: f64,
    pub node_stroke_width: f64,
    /// Extra space around the unit square, in drawing units.
    pub margin: f64,
    /// Rendered width and height in pixels.
    pub pixel_size: u32,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            node_radius: 0.015,
            edge_width: 0.004,
            node_stroke_width: 0.003,
            margin: 0.05,
            pixel_size: 480,
        }
    }
}

// Fixed precision keeps the output byte-stable across platforms.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

/// Renders edges first, then nodes, with the y axis pointing up.
pub fn render_svg(drawing: &Drawing, style: &SvgStyle) -> String {
    let m = style.margin;
    let side = 1.0 + 2.0 * m;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px}" viewBox="{} {} {} {}">"#,
        num(-m),
        num(-m),
        num(side),
        num(side),
        px = style.pixel_size
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        num(-m),
        num(-m),
        num(side),
        num(side)
    );
    let pos = drawing.pos();
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="{}" stroke-linecap="round">"#,
        num(style.edge_width)
    );
    for &(a, b) in drawing.graph().edges() {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(pos[a].x),
            num(1.0 - pos[a].y),
            num(pos[b].x),
            num(1.0 - pos[b].y)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r##"<g fill="#4a7bd0" stroke="black" stroke-width="{}">"##,
        num(style.node_stroke_width)
    );
    for p in pos {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(p.x),
            num(1.0 - p.y),
            num(style.node_radius)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
