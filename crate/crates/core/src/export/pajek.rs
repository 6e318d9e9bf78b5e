//! Pajek `.net` networks and `*Matrix` files.
//!
//! Networks are written as
//!
//! ```text
//! *Vertices N
//! 1 "label" x y 0.5000 [ic Color]
//! *Edges
//! a b w [p Dots]
//! ```
//!
//! with 1-based dense ids, four decimals, LF line ends and `"` inside labels
//! doubled. Vertex colors and dotted line patterns are only written when a
//! node has a group or an edge is dotted.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::export::{palette_index, palette_name, write_text};
use crate::graph::{EdgeStyle, Graph};
use crate::layout::Layout;
use crate::vectorspace::CoocMatrix;

/// Fixed z coordinate of every vertex.
pub const Z_COORD: f64 = 0.5;

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('"', "\"\""))
}

pub fn format_pajek_net(g: &Graph, layout: Option<&Layout>) -> Result<String> {
    if let Some(l) = layout {
        if l.positions.len() != g.node_count() {
            return Err(Error::InvalidArgument(format!(
                "layout has {} positions for {} nodes",
                l.positions.len(),
                g.node_count()
            )));
        }
    }
    let mut out = String::new();
    writeln!(out, "*Vertices {}", g.node_count()).unwrap();
    for (i, node) in g.nodes().iter().enumerate() {
        if node.label.is_empty() {
            return Err(Error::InvalidArgument(format!("vertex {} has an empty label", i + 1)));
        }
        let [x, y] = layout.map_or([0.5, 0.5], |l| l.positions[i]);
        write!(out, "{} {} {x:.4} {y:.4} {Z_COORD:.4}", i + 1, quote(&node.label)).unwrap();
        if let Some(group) = node.group {
            write!(out, " ic {}", palette_name(group)).unwrap();
        }
        out.push('\n');
    }
    out.push_str("*Edges\n");
    for e in g.edges() {
        write!(out, "{} {} {:.4}", e.source + 1, e.target + 1, e.weight).unwrap();
        if e.style == EdgeStyle::Dotted {
            out.push_str(" p Dots");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_pajek_net(g: &Graph, layout: Option<&Layout>, path: &Path) -> Result<()> {
    write_text(path, &format_pajek_net(g, layout)?)
}

/// A parsed `.net` file: the graph plus the vertex coordinates it carried.
#[derive(Debug, Clone, PartialEq)]
pub struct PajekNetwork {
    pub graph: Graph,
    pub positions: Vec<[f64; 2]>,
}

struct Lines<'a> {
    origin: &'a Path,
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, origin: &'a Path) -> Self {
        Lines {
            origin,
            inner: text.lines().enumerate().peekable(),
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next().map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::parse(self.origin, line, msg)
    }

    fn header(&mut self, keyword: &str) -> Result<(usize, Option<usize>)> {
        let (no, line) = self.next().ok_or_else(|| self.err(0, format!("missing {keyword}")))?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some(k) if k.eq_ignore_ascii_case(keyword) => {}
            _ => return Err(self.err(no, format!("expected {keyword}"))),
        }
        let count = parts
            .next()
            .map(|c| c.parse::<usize>().map_err(|_| self.err(no, format!("bad count '{c}'"))))
            .transpose()?;
        Ok((no, count))
    }
}

/// Splits a vertex line into id, unquoted label and the remaining fields.
fn split_vertex(line: &str) -> Option<(&str, String, &str)> {
    let line = line.trim_start();
    let (id, rest) = line.split_once(char::is_whitespace)?;
    let rest = rest.trim_start().strip_prefix('"')?;
    let mut label = String::new();
    let mut chars = rest.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '"' {
            if matches!(chars.peek(), Some((_, '"'))) {
                chars.next();
                label.push('"');
            } else {
                return Some((id, label, &rest[i + 1..]));
            }
        } else {
            label.push(c);
        }
    }
    None
}

pub fn parse_pajek_net(text: &str, origin: &Path) -> Result<PajekNetwork> {
    let mut lines = Lines::new(text, origin);
    let (header_line, n) = lines.header("*Vertices")?;
    let n = n.ok_or_else(|| lines.err(header_line, "missing vertex count"))?;
    let mut graph = Graph::new();
    let mut positions = Vec::with_capacity(n);
    for expected in 1..=n {
        let (no, line) = lines.next().ok_or_else(|| lines.err(0, "file ends inside *Vertices"))?;
        let (id, label, rest) = split_vertex(line).ok_or_else(|| lines.err(no, "expected `id \"label\" x y z`"))?;
        if id.parse::<usize>().ok() != Some(expected) {
            return Err(lines.err(no, format!("vertex id {id} out of sequence (expected {expected})")));
        }
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let coord = |i: usize| -> Result<Option<f64>> {
            fields
                .get(i)
                .map(|f| f.parse::<f64>().map_err(|_| lines.err(no, format!("bad coordinate '{f}'"))))
                .transpose()
        };
        let (x, y) = (coord(0)?.unwrap_or(0.5), coord(1)?.unwrap_or(0.5));
        let mut group = None;
        if let Some(pos) = fields.iter().position(|f| *f == "ic") {
            let name = fields.get(pos + 1).ok_or_else(|| lines.err(no, "`ic` without a color"))?;
            group = Some(palette_index(name).ok_or_else(|| lines.err(no, format!("unknown color '{name}'")))?);
        }
        graph
            .add_node_in_group(label, group)
            .map_err(|e| lines.err(no, e.to_string()))?;
        positions.push([x, y]);
    }
    let (_, _) = lines.header("*Edges")?;
    while let Some((no, line)) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(lines.err(no, "expected `source target [weight]`"));
        }
        let endpoint = |f: &str| -> Result<usize> {
            match f.parse::<usize>() {
                Ok(id) if (1..=n).contains(&id) => Ok(id - 1),
                _ => Err(lines.err(no, format!("edge endpoint {f} outside 1..={n}"))),
            }
        };
        let (s, t) = (endpoint(fields[0])?, endpoint(fields[1])?);
        let weight = match fields.get(2) {
            Some(w) => w.parse::<f64>().map_err(|_| lines.err(no, format!("bad weight '{w}'")))?,
            None => 1.0,
        };
        let dotted = fields.windows(2).any(|w| w[0] == "p" && w[1].eq_ignore_ascii_case("dots"));
        let style = if dotted { EdgeStyle::Dotted } else { EdgeStyle::Solid };
        graph
            .add_edge(s, t, weight, style)
            .map_err(|e| lines.err(no, e.to_string()))?;
    }
    Ok(PajekNetwork { graph, positions })
}

pub fn read_pajek_net(path: &Path) -> Result<PajekNetwork> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    parse_pajek_net(&text, path)
}

pub fn format_pajek_matrix(m: &CoocMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "*Vertices {}", m.labels.len()).unwrap();
    for (i, label) in m.labels.iter().enumerate() {
        writeln!(out, "{} {}", i + 1, quote(label)).unwrap();
    }
    out.push_str("*Matrix\n");
    for row in m.values.rows() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_pajek_matrix(m: &CoocMatrix, path: &Path) -> Result<()> {
    write_text(path, &format_pajek_matrix(m))
}

/// Labels and values of a `*Matrix` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PajekMatrix {
    pub labels: Vec<String>,
    pub values: Array2<u64>,
}

pub fn parse_pajek_matrix(text: &str, origin: &Path) -> Result<PajekMatrix> {
    let mut lines = Lines::new(text, origin);
    let (header_line, n) = lines.header("*Vertices")?;
    let n = n.ok_or_else(|| lines.err(header_line, "missing vertex count"))?;
    let mut labels = Vec::with_capacity(n);
    for expected in 1..=n {
        let (no, line) = lines.next().ok_or_else(|| lines.err(0, "file ends inside *Vertices"))?;
        let (id, label, _) = split_vertex(line).ok_or_else(|| lines.err(no, "expected `id \"label\"`"))?;
        if id.parse::<usize>().ok() != Some(expected) {
            return Err(lines.err(no, format!("vertex id {id} out of sequence (expected {expected})")));
        }
        labels.push(label);
    }
    lines.header("*Matrix")?;
    let mut values = Array2::<u64>::zeros((n, n));
    for r in 0..n {
        let (no, line) = lines.next().ok_or_else(|| lines.err(0, format!("matrix has fewer than {n} rows")))?;
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.len() != n {
            return Err(lines.err(no, format!("expected {n} values, found {}", cells.len())));
        }
        for (c, cell) in cells.iter().enumerate() {
            values[[r, c]] = cell
                .parse()
                .map_err(|_| lines.err(no, format!("bad matrix value '{cell}'")))?;
        }
    }
    Ok(PajekMatrix { labels, values })
}

pub fn read_pajek_matrix(path: &Path) -> Result<PajekMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    parse_pajek_matrix(&text, path)
}
