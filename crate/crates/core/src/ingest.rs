//! Reading and writing graphs and grid maps.
//!
//! Edge-list text:
//!
//! ```text
//! # comment
//! node 0 1.5 2.0     # optional coordinates
//! 0 1 3 0.25         # u v weight cost
//! ```
//!
//! Moving-AI `.map` files become graphs through [`grid_to_graph`]: one vertex
//! per open-ground cell, unit-weight edges between neighbouring open cells,
//! and edge costs derived from the local terrain entropy so that cells in
//! varied surroundings are cheaper to pass through.

use std::fmt::Write as _;
use std::io::{self, BufRead};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, GraphError, Point, VertexId};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("map dimensions: {0}")]
    Dimensions(String),
    #[error("unknown map character {ch:?} at row {row}, column {col}")]
    UnknownCell { row: usize, col: usize, ch: char },
    #[error("graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph document: {0}")]
    Document(#[from] GraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, IngestError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid {what} '{tok}'")))
}

pub fn parse_edge_list(source: impl BufRead) -> Result<Graph, IngestError> {
    let mut b = GraphBuilder::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let data = line.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        let mut toks = data.split_whitespace();
        if data.starts_with("node") {
            toks.next();
            let v: VertexId = field(toks.next(), line_no, "vertex id")?;
            b.add_vertex(v);
            if let Some(x) = toks.next() {
                let x: f64 = field(Some(x), line_no, "x coordinate")?;
                let y: f64 = field(toks.next(), line_no, "y coordinate")?;
                b.set_coords(v, Point { x, y })
                    .map_err(|source| IngestError::Graph {
                        line: line_no,
                        source,
                    })?;
            }
        } else {
            let u: VertexId = field(toks.next(), line_no, "vertex id")?;
            let v: VertexId = field(toks.next(), line_no, "vertex id")?;
            let w: u64 = field(toks.next(), line_no, "weight")?;
            let c: f64 = field(toks.next(), line_no, "cost")?;
            b.add_edge(u, v, w, c)
                .map_err(|source| IngestError::Graph {
                    line: line_no,
                    source,
                })?;
        }
        if toks.next().is_some() {
            return Err(syntax(line_no, "trailing fields"));
        }
    }
    Ok(b.build())
}

pub fn parse_edge_list_str(text: &str) -> Result<Graph, IngestError> {
    parse_edge_list(text.as_bytes())
}

/// Edge-list text that [`parse_edge_list`] reads back into an equal graph.
/// Vertices with coordinates or without edges get a `node` line.
pub fn edge_list_string(graph: &Graph) -> String {
    let mut out = String::new();
    for v in graph.vertices() {
        match graph.coords(v) {
            Some(p) => {
                let _ = writeln!(out, "node {v} {} {}", p.x, p.y);
            }
            None if graph.degree(v) == 0 => {
                let _ = writeln!(out, "node {v}");
            }
            None => {}
        }
    }
    for e in graph.edges() {
        let _ = writeln!(out, "{} {} {} {}", e.u, e.v, e.weight, e.cost);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    id: VertexId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    y: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    u: VertexId,
    v: VertexId,
    weight: u64,
    cost: f64,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

/// JSON document `{"vertices": [{"id", "x"?, "y"?}], "edges": [{"u", "v", "weight", "cost"}]}`.
pub fn graph_to_json(graph: &Graph) -> String {
    let doc = GraphDoc {
        vertices: graph
            .vertices()
            .map(|id| {
                let p = graph.coords(id);
                VertexDoc {
                    id,
                    x: p.map(|p| p.x),
                    y: p.map(|p| p.y),
                }
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                u: e.u,
                v: e.v,
                weight: e.weight,
                cost: e.cost,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data")
}

pub fn graph_from_json(text: &str) -> Result<Graph, IngestError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut b = GraphBuilder::new();
    for v in doc.vertices {
        b.add_vertex(v.id);
        if let (Some(x), Some(y)) = (v.x, v.y) {
            b.set_coords(v.id, Point { x, y })?;
        }
    }
    for e in doc.edges {
        b.add_edge(e.u, e.v, e.weight, e.cost)?;
    }
    Ok(b.build())
}

/// Reads a graph file: `.json` as a graph document, anything else as an
/// edge list.
pub fn read_graph(path: &Path) -> Result<Graph, IngestError> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        graph_from_json(&text)
    } else {
        parse_edge_list_str(&text)
    }
}

/// Writes a graph in the format implied by the file extension.
pub fn write_graph(graph: &Graph, path: &Path) -> io::Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        graph_to_json(graph)
    } else {
        edge_list_string(graph)
    };
    std::fs::write(path, text)
}

/// Terrain classes.
pub const GROUND: u8 = 1;
pub const SHALLOW_WATER: u8 = 2;
pub const TREES: u8 = 3;
pub const WATER: u8 = 4;
pub const OUT_OF_BOUNDS: u8 = 5;
pub const CLASS_COUNT: usize = 5;

pub fn class_of(ch: char) -> Option<u8> {
    match ch {
        '.' | 'G' => Some(GROUND),
        'S' => Some(SHALLOW_WATER),
        'T' => Some(TREES),
        'W' => Some(WATER),
        '@' | 'O' => Some(OUT_OF_BOUNDS),
        _ => None,
    }
}

fn char_of(class: u8) -> char {
    match class {
        GROUND => '.',
        SHALLOW_WATER => 'S',
        TREES => 'T',
        WATER => 'W',
        _ => '@',
    }
}

/// Row-major grid of terrain classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, cells: Vec<u8>) -> Result<Self, IngestError> {
        if width == 0 || height == 0 {
            return Err(IngestError::Dimensions(
                "width and height must be positive".into(),
            ));
        }
        if cells.len() != width * height {
            return Err(IngestError::Dimensions(format!(
                "{} cells for a {width}x{height} map",
                cells.len()
            )));
        }
        if let Some(i) = cells.iter().position(|c| !(1..=5).contains(c)) {
            return Err(IngestError::Dimensions(format!(
                "cell {i} holds class {} outside 1..=5",
                cells[i]
            )));
        }
        Ok(Self {
            width,
            height,
            cells,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn class(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.width + col]
    }

    pub fn is_passable(&self, row: usize, col: usize) -> bool {
        self.class(row, col) == GROUND
    }

    /// The map in Moving-AI format.
    pub fn to_movingai(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        for row in self.cells.chunks(self.width) {
            out.extend(row.iter().map(|&c| char_of(c)));
            out.push('\n');
        }
        out
    }
}

pub fn parse_movingai_map(source: impl BufRead) -> Result<GridMap, IngestError> {
    let mut lines = source.lines().enumerate();
    let (mut height, mut width) = (None, None);
    for (i, line) in lines.by_ref() {
        let line = line?;
        let line = line.trim();
        if line == "map" {
            break;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("height") => height = Some(field::<usize>(toks.next(), i + 1, "height")?),
            Some("width") => width = Some(field::<usize>(toks.next(), i + 1, "width")?),
            Some("type") | None => {}
            Some(other) => return Err(syntax(i + 1, format!("unexpected header '{other}'"))),
        }
    }
    let height = height.ok_or_else(|| IngestError::Dimensions("missing height".into()))?;
    let width = width.ok_or_else(|| IngestError::Dimensions("missing width".into()))?;

    let mut cells = Vec::with_capacity(width * height);
    let mut rows = 0;
    for (_, line) in lines {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        if rows == height {
            return Err(IngestError::Dimensions(format!(
                "header says height {height} but more rows follow"
            )));
        }
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != width {
            return Err(IngestError::Dimensions(format!(
                "row {rows} has {} cells, header says width {width}",
                chars.len()
            )));
        }
        for (col, ch) in chars.into_iter().enumerate() {
            cells.push(class_of(ch).ok_or(IngestError::UnknownCell { row: rows, col, ch })?);
        }
        rows += 1;
    }
    if rows != height {
        return Err(IngestError::Dimensions(format!(
            "header says height {height} but {rows} rows follow"
        )));
    }
    GridMap::new(width, height, cells)
}

/// Per-cell terrain entropy over a 7x7 window, scaled to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyField {
    width: usize,
    values: Vec<f64>,
}

pub const ENTROPY_RADIUS: usize = 3;

impl EntropyField {
    /// Windows at the border are clipped to the map; class frequencies are
    /// taken over the cells that remain.
    pub fn compute(map: &GridMap) -> Self {
        let (w, h) = (map.width, map.height);
        let norm = (CLASS_COUNT as f64).ln();
        let mut values = Vec::with_capacity(w * h);
        for row in 0..h {
            for col in 0..w {
                let mut counts = [0usize; CLASS_COUNT];
                let (r0, r1) = (
                    row.saturating_sub(ENTROPY_RADIUS),
                    (row + ENTROPY_RADIUS).min(h - 1),
                );
                let (c0, c1) = (
                    col.saturating_sub(ENTROPY_RADIUS),
                    (col + ENTROPY_RADIUS).min(w - 1),
                );
                for r in r0..=r1 {
                    for c in c0..=c1 {
                        counts[map.class(r, c) as usize - 1] += 1;
                    }
                }
                let total: usize = counts.iter().sum();
                let e: f64 = counts
                    .iter()
                    .filter(|&&n| n > 0)
                    .map(|&n| {
                        let p = n as f64 / total as f64;
                        -p * p.ln()
                    })
                    .sum();
                values.push((e / norm).clamp(0.0, 1.0));
            }
        }
        Self { width: w, values }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Connectivity {
    #[default]
    Four,
    /// Adds diagonal edges where both orthogonal cells between the two
    /// endpoints are open (no corner cutting).
    Eight,
}

impl std::str::FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            _ => Err(format!("connectivity must be 4 or 8, got '{s}'")),
        }
    }
}

/// Cell `(row, col)` becomes vertex `row * width + col` at coordinates
/// `(col, row)`. Every edge has weight 1 and cost
/// `1 - (E(u) + E(v)) / 2`.
pub fn grid_to_graph(map: &GridMap, connectivity: Connectivity) -> Graph {
    let entropy = EntropyField::compute(map);
    let (w, h) = (map.width, map.height);
    let id = |r: usize, c: usize| r * w + c;
    let mut b = GraphBuilder::new();
    for r in 0..h {
        for c in 0..w {
            if map.is_passable(r, c) {
                b.add_vertex(id(r, c));
                b.set_coords(
                    id(r, c),
                    Point {
                        x: c as f64,
                        y: r as f64,
                    },
                )
                .expect("finite");
            }
        }
    }
    let cost =
        |r1, c1, r2, c2| (1.0 - 0.5 * (entropy.get(r1, c1) + entropy.get(r2, c2))).clamp(0.0, 1.0);
    for r in 0..h {
        for c in 0..w {
            if !map.is_passable(r, c) {
                continue;
            }
            let mut link = |r2: usize, c2: usize| {
                b.add_edge(id(r, c), id(r2, c2), 1, cost(r, c, r2, c2))
                    .expect("grid edges are distinct");
            };
            if c + 1 < w && map.is_passable(r, c + 1) {
                link(r, c + 1);
            }
            if r + 1 < h && map.is_passable(r + 1, c) {
                link(r + 1, c);
            }
            if connectivity == Connectivity::Eight && r + 1 < h {
                let down = map.is_passable(r + 1, c);
                if c + 1 < w && down && map.is_passable(r, c + 1) && map.is_passable(r + 1, c + 1) {
                    link(r + 1, c + 1);
                }
                if c > 0 && down && map.is_passable(r, c - 1) && map.is_passable(r + 1, c - 1) {
                    link(r + 1, c - 1);
                }
            }
        }
    }
    b.build()
}
