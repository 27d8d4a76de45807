//! The `.rdg` graph description format.
//!
//! A document is line oriented. `#` starts a comment running to the end of
//! the line; blank lines are ignored. The first directive must be
//! `graph <name>`, followed in any order by
//!
//! ```text
//! vertex <id> <self-intersection>
//! edge <id> <id>
//! boundary <id> <multiplicity>
//! ```
//!
//! Vertex declaration order is the vertex order of the resulting graph.
//! Repeated `boundary` lines for one vertex accumulate. `serialize` writes
//! the normal form: header, vertices in order, edges sorted, one boundary
//! line per incident vertex; `parse(serialize(d)) == d` for every document,
//! and serializing a parse normalizes comments and ordering away.

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use std::fmt;
use std::str::FromStr;

/// A named graph, as stored in a `.rdg` file.
///
/// `name` must be a single token: nonempty, no whitespace or control
/// characters, no `#`. `parse` only produces such names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphDocument {
    pub name: String,
    pub graph: ResolutionGraph,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains('#') && name.chars().all(|c| !c.is_whitespace() && !c.is_control())
}

impl GraphDocument {
    pub fn new(name: impl Into<String>, graph: ResolutionGraph) -> Result<Self> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(Error::InvalidId { id: name, reason: "graph names are single tokens without '#'" });
        }
        Ok(GraphDocument { name, graph })
    }
}

impl fmt::Display for GraphDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parse a document. Errors carry the 1-based line they were found on.
pub fn parse(text: &str) -> Result<GraphDocument> {
    let mut name: Option<String> = None;
    let mut vertices: Vec<(VertexId, i64)> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut boundary: Vec<(VertexId, u64)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(directive) = tokens.next() else { continue };
        let args: Vec<&str> = tokens.collect();

        let id_arg = |s: &str| -> Result<VertexId> {
            VertexId::from_str(s).map_err(|e| err(line, e.to_string()))
        };

        if name.is_none() {
            if directive != "graph" {
                return Err(err(line, format!("expected 'graph <name>' before '{directive}'")));
            }
        } else if directive == "graph" {
            return Err(err(line, "duplicate 'graph' directive"));
        }

        match directive {
            "graph" => {
                let [n] = args[..] else {
                    return Err(err(line, "'graph' takes exactly one name"));
                };
                if !valid_name(n) {
                    return Err(err(line, format!("invalid graph name '{n}'")));
                }
                name = Some(n.to_string());
            }
            "vertex" => {
                let [id, weight] = args[..] else {
                    return Err(err(line, "'vertex' takes an id and a self-intersection"));
                };
                let id = id_arg(id)?;
                if vertices.iter().any(|(v, _)| v == &id) {
                    return Err(err(line, format!("vertex '{id}' declared twice")));
                }
                let w: i64 = weight
                    .parse()
                    .map_err(|_| err(line, format!("invalid self-intersection '{weight}'")))?;
                vertices.push((id, w));
            }
            "edge" => {
                let [a, b] = args[..] else {
                    return Err(err(line, "'edge' takes two vertex ids"));
                };
                let (a, b) = (id_arg(a)?, id_arg(b)?);
                for v in [&a, &b] {
                    if !vertices.iter().any(|(x, _)| x == v) {
                        return Err(err(line, format!("edge references undeclared vertex '{v}'")));
                    }
                }
                if a == b {
                    return Err(err(line, format!("edge from '{a}' to itself")));
                }
                if edges.iter().any(|(x, y)| (x == &a && y == &b) || (x == &b && y == &a)) {
                    return Err(err(line, format!("edge between '{a}' and '{b}' declared twice")));
                }
                edges.push((a, b));
            }
            "boundary" => {
                let [id, mult] = args[..] else {
                    return Err(err(line, "'boundary' takes an id and a multiplicity"));
                };
                let id = id_arg(id)?;
                if !vertices.iter().any(|(x, _)| x == &id) {
                    return Err(err(line, format!("boundary references undeclared vertex '{id}'")));
                }
                let m: u64 = mult
                    .parse()
                    .map_err(|_| err(line, format!("invalid boundary multiplicity '{mult}'")))?;
                boundary.push((id, m));
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }

    let Some(name) = name else {
        return Err(err(last_line.max(1), "missing 'graph <name>' directive"));
    };
    // every constructor refusal is pre-checked above with a line number
    let graph = ResolutionGraph::new(vertices, edges, boundary)
        .map_err(|e| err(last_line, e.to_string()))?;
    Ok(GraphDocument { name, graph })
}

/// Write the normal form of a document.
pub fn serialize(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let mut out = String::new();
    out.push_str("graph ");
    out.push_str(&doc.name);
    out.push('\n');
    for i in 0..g.vertex_count() {
        out.push_str(&format!("vertex {} {}\n", g.id(i), g.self_int(i)));
    }
    for &(i, j) in g.edges() {
        out.push_str(&format!("edge {} {}\n", g.id(i), g.id(j)));
    }
    for i in 0..g.vertex_count() {
        if g.boundary(i) > 0 {
            out.push_str(&format!("boundary {} {}\n", g.id(i), g.boundary(i)));
        }
    }
    out
}
