//! SVG rendering of a laid-out map.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::export::{palette_hex, write_text};
use crate::factors::FactorAssignment;
use crate::graph::{EdgeStyle, Graph};
use crate::layout::Layout;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub min_stroke: f64,
    pub max_stroke: f64,
    pub font_size: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 1000.0,
            height: 1000.0,
            margin: 60.0,
            min_radius: 3.0,
            max_radius: 18.0,
            min_stroke: 0.5,
            max_stroke: 4.0,
            font_size: 11.0,
        }
    }
}

pub const UNASSIGNED_FILL: &str = "white";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Fill for each node: the factor color from `assignment` when the node's
/// label is a factored variable, else the node's own group color, else
/// white.
fn fills(g: &Graph, assignment: Option<&FactorAssignment>) -> Vec<&'static str> {
    g.nodes()
        .iter()
        .map(|node| {
            let group = match assignment.and_then(|a| a.get(&node.label)) {
                Some(assigned) => assigned.map(|a| a.factor),
                None => node.group,
            };
            group.map_or(UNASSIGNED_FILL, palette_hex)
        })
        .collect()
}

/// Radius `max_radius · √(f / f_max)`, clamped below by `min_radius`.
/// Nodes without a size get the minimum.
fn radii(style: &SvgStyle, sizes: Option<&[f64]>, n: usize) -> Vec<f64> {
    let Some(sizes) = sizes else {
        return vec![style.min_radius; n];
    };
    let max = sizes.iter().cloned().fold(0.0, f64::max);
    sizes
        .iter()
        .map(|&f| {
            if max > 0.0 && f > 0.0 {
                (style.max_radius * (f / max).sqrt()).max(style.min_radius)
            } else {
                style.min_radius
            }
        })
        .collect()
}

pub fn format_svg_map(
    g: &Graph,
    layout: &Layout,
    assignment: Option<&FactorAssignment>,
    sizes: Option<&[f64]>,
    style: &SvgStyle,
) -> Result<String> {
    let n = g.node_count();
    if layout.positions.len() != n {
        return Err(Error::InvalidArgument(format!(
            "layout covers {} of {n} nodes",
            layout.positions.len()
        )));
    }
    if sizes.is_some_and(|s| s.len() != n) {
        return Err(Error::InvalidArgument("one size per node required".into()));
    }
    let at = |i: usize| {
        let [x, y] = layout.positions[i];
        (
            style.margin + x * (style.width - 2.0 * style.margin),
            style.margin + y * (style.height - 2.0 * style.margin),
        )
    };
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, style.width, style.height).unwrap();

    let max_weight = g.edges().iter().map(|e| e.weight.abs()).fold(0.0, f64::max);
    out.push_str("<g id=\"edges\" stroke=\"#555555\" stroke-opacity=\"0.6\">\n");
    for e in g.edges() {
        let (x1, y1) = at(e.source);
        let (x2, y2) = at(e.target);
        let share = if max_weight > 0.0 { e.weight.abs() / max_weight } else { 0.0 };
        let width = style.min_stroke + (style.max_stroke - style.min_stroke) * share;
        write!(out, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke-width="{width:.2}""#).unwrap();
        if e.style == EdgeStyle::Dotted {
            out.push_str(r#" stroke-dasharray="4,3""#);
        }
        out.push_str("/>\n");
    }
    out.push_str("</g>\n");

    let fills = fills(g, assignment);
    let radii = radii(style, sizes, n);
    out.push_str("<g id=\"nodes\" stroke=\"black\" stroke-width=\"1\">\n");
    for i in 0..n {
        let (x, y) = at(i);
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{}"/>"#, radii[i], fills[i]).unwrap();
    }
    out.push_str("</g>\n");
    writeln!(out, r#"<g id="labels" font-family="sans-serif" font-size="{}">"#, style.font_size).unwrap();
    for (i, node) in g.nodes().iter().enumerate() {
        let (x, y) = at(i);
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + radii[i] + 2.0,
            y + style.font_size / 3.0,
            escape(&node.label)
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

pub fn render_svg_map(
    g: &Graph,
    layout: &Layout,
    assignment: Option<&FactorAssignment>,
    sizes: Option<&[f64]>,
    path: &Path,
) -> Result<()> {
    write_text(path, &format_svg_map(g, layout, assignment, sizes, &SvgStyle::default())?)
}
