//! Resolution dual graphs: weighted graphs whose vertices stand for the
//! exceptional curves of a resolution, with self-intersection weights on
//! vertices, transversal intersections as edges, and per-vertex boundary
//! incidence counts for the strict transform of a boundary divisor.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Identifier of an exceptional curve, e.g. `C1`. Nonempty, free of
/// whitespace and of the delimiter characters `#`, `,`, `:` used by the
/// text format and the center grammar.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(s: impl Into<String>) -> Result<Self> {
        let s = s.into();
        if s.is_empty() {
            return Err(Error::InvalidId { id: s, reason: "empty" });
        }
        if let Some(c) = s.chars().find(|c| c.is_whitespace() || c.is_control() || matches!(c, '#' | ',' | ':')) {
            let reason = match c {
                '#' => "'#' starts a comment",
                ',' => "',' is a list delimiter",
                ':' => "':' is a center delimiter",
                _ => "contains whitespace or control characters",
            };
            return Err(Error::InvalidId { id: s, reason });
        }
        Ok(VertexId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for VertexId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        VertexId::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct VertexData {
    id: VertexId,
    self_int: i64,
    boundary: u64,
}

/// A resolution dual graph. Vertex order is part of the value: it fixes the
/// rows of the intersection matrix and the order of every reported profile.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResolutionGraph {
    vertices: Vec<VertexData>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

/// Structural facts `validate` reports. None of these is a hard error:
/// downstream analyses refuse the graphs they cannot handle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub is_negative_definite: bool,
    pub is_tree: bool,
    pub is_minimal: bool,
    pub messages: Vec<String>,
}

impl ResolutionGraph {
    /// Build a graph from vertex, edge, and boundary lists. Edges are
    /// unordered pairs of distinct declared vertices, at most one per pair;
    /// boundary entries accumulate per vertex.
    pub fn new(
        vertices: Vec<(VertexId, i64)>,
        edges: Vec<(VertexId, VertexId)>,
        boundary: Vec<(VertexId, u64)>,
    ) -> Result<Self> {
        let mut index: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut data = Vec::with_capacity(vertices.len());
        for (id, self_int) in vertices {
            if index.insert(id.clone(), data.len()).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
            data.push(VertexData { id, self_int, boundary: 0 });
        }
        let lookup = |id: &VertexId| index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.clone()));
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in &edges {
            let (i, j) = (lookup(a)?, lookup(b)?);
            if i == j {
                return Err(Error::SelfLoop(a.clone()));
            }
            pairs.push((i.min(j), i.max(j)));
        }
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
            let (i, j) = w[0];
            return Err(Error::DuplicateEdge(data[i].id.clone(), data[j].id.clone()));
        }
        for (id, mult) in &boundary {
            let i = lookup(id)?;
            data[i].boundary += mult;
        }
        let mut adj = vec![Vec::new(); data.len()];
        for &(i, j) in &pairs {
            adj[i].push(j);
            adj[j].push(i);
        }
        Ok(ResolutionGraph { vertices: data, edges: pairs, adj })
    }

    /// Trusted constructor for enumeration output: ids become C1..Cn, edges
    /// must already be distinct normalized pairs of valid indices. Produces
    /// the same value `new` would, without the validation cost.
    pub(crate) fn from_enumerated_parts(weights: &[i64], edges: &mut Vec<(usize, usize)>) -> Self {
        const NAMES: [&str; 16] = [
            "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C13",
            "C14", "C15", "C16",
        ];
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let id = match NAMES.get(i) {
                    Some(s) => VertexId(s.to_string()),
                    None => VertexId(format!("C{}", i + 1)),
                };
                VertexData { id, self_int: w, boundary: 0 }
            })
            .collect::<Vec<_>>();
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); vertices.len()];
        for &(i, j) in edges.iter() {
            debug_assert!(i < j && j < vertices.len());
            adj[i].push(j);
            adj[j].push(i);
        }
        ResolutionGraph { vertices, edges: std::mem::take(edges), adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter().map(|v| &v.id)
    }

    pub fn id(&self, i: usize) -> &VertexId {
        &self.vertices[i].id
    }

    pub fn index_of(&self, id: &VertexId) -> Option<usize> {
        self.vertices.iter().position(|v| &v.id == id)
    }

    pub fn self_int(&self, i: usize) -> i64 {
        self.vertices[i].self_int
    }

    pub fn boundary(&self, i: usize) -> u64 {
        self.vertices[i].boundary
    }

    pub fn has_boundary(&self) -> bool {
        self.vertices.iter().any(|v| v.boundary > 0)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.vertices.len()
    }

    /// All self-intersections at most -2: no contractible (-1)-curves.
    pub fn is_minimal(&self) -> bool {
        self.vertices.iter().all(|v| v.self_int <= -2)
    }

    /// The symmetric matrix with self-intersections on the diagonal and 1
    /// for each transversal intersection, rows in vertex order.
    pub fn intersection_matrix(&self) -> Matrix<i64> {
        let n = self.vertices.len();
        let mut m = Matrix::new(n, n, |i, j| if i == j { self.vertices[i].self_int } else { 0 });
        for &(i, j) in &self.edges {
            m[(i, j)] = 1;
            m[(j, i)] = 1;
        }
        m
    }

    /// Report structural facts about the graph without refusing anything.
    pub fn validate(&self) -> ValidationReport {
        let mut messages = Vec::new();
        let is_negative_definite = linalg::is_negative_definite(&self.intersection_matrix())
            .expect("intersection matrix is symmetric by construction");
        if !is_negative_definite {
            messages.push("intersection matrix is not negative definite".to_string());
        }
        let is_tree = self.is_tree();
        if self.vertices.is_empty() {
            messages.push("graph has no vertices".to_string());
        } else if !self.is_connected() {
            messages.push("graph is disconnected".to_string());
        } else if !is_tree {
            messages.push("graph contains a cycle".to_string());
        }
        for v in &self.vertices {
            if v.self_int >= 0 {
                messages.push(format!("vertex {} has non-negative self-intersection {}", v.id, v.self_int));
            }
        }
        let is_minimal = self.is_minimal();
        if is_minimal {
            // nothing to flag
        } else if self.vertices.iter().all(|v| v.self_int <= -1) {
            for v in self.vertices.iter().filter(|v| v.self_int == -1) {
                messages.push(format!("(-1)-curve at {}: not a minimal resolution", v.id));
            }
        }
        ValidationReport { is_negative_definite, is_tree, is_minimal, messages }
    }

    /// The same graph with every boundary incidence dropped.
    pub fn without_boundary(&self) -> Self {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.boundary = 0;
        }
        g
    }

    /// Reorder vertices: new position `k` holds old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::CycleMismatch);
        }
        let vertices = perm
            .iter()
            .map(|&p| {
                let v = &self.vertices[p];
                (v.id.clone(), v.self_int)
            })
            .collect();
        let mut inv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let edges = self
            .edges
            .iter()
            .map(|&(i, j)| (self.vertices[i].id.clone(), self.vertices[j].id.clone()))
            .collect();
        let boundary = self
            .vertices
            .iter()
            .filter(|v| v.boundary > 0)
            .map(|v| (v.id.clone(), v.boundary))
            .collect();
        ResolutionGraph::new(vertices, edges, boundary)
    }
}

/// Convenience constructor used throughout the tests and the enumerator:
/// ids are taken as given strings, edges as index pairs into `weights`.
pub fn graph_from_parts(
    ids: &[&str],
    weights: &[i64],
    edge_indices: &[(usize, usize)],
    boundary: &[(usize, u64)],
) -> Result<ResolutionGraph> {
    assert_eq!(ids.len(), weights.len());
    let vertices: Vec<(VertexId, i64)> = ids
        .iter()
        .zip(weights)
        .map(|(id, &w)| Ok((VertexId::new(*id)?, w)))
        .collect::<Result<_>>()?;
    let edges = edge_indices
        .iter()
        .map(|&(i, j)| (vertices[i].0.clone(), vertices[j].0.clone()))
        .collect();
    let bd = boundary.iter().map(|&(i, m)| (vertices[i].0.clone(), m)).collect();
    ResolutionGraph::new(vertices, edges, bd)
}
