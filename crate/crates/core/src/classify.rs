//! Shape classification of weighted dual trees and isomorphism-free
//! enumeration of candidate resolution graphs.
//!
//! A connected tree with no boundary is a chain (every degree at most 2),
//! a fork (exactly one degree-3 vertex), or something else. Fork branches
//! are summarized by their continuant determinants: for outward weights
//! w_1..w_k the value d_k with d_0 = 1, d_1 = |w_1|,
//! d_i = |w_i| d_{i-1} - d_{i-2}; this equals the determinant of the
//! branch's negated intersection matrix. Chains are the log terminal
//! A-family; forks with determinant triple (2,2,n), (2,3,3), (2,3,4), or
//! (2,3,5) are the D, E6, E7, E8 families; every other shape is outside
//! the log terminal range.

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::linalg::{self, Matrix};
use crate::Int;
use num_traits::{One, Zero};
use std::collections::HashSet;

/// Coarse shape of a connected tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Shape {
    Chain,
    /// One vertex of degree 3; `branches` lists the three arms in
    /// center-outward vertex order.
    Fork { center: VertexId, branches: [Vec<VertexId>; 3] },
    Other,
}

/// Log terminal family a shape belongs to (meaningful for negative
/// definite graphs with all weights at most -2).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LtType {
    A,
    D,
    E6,
    E7,
    E8,
    None,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShapeResult {
    pub shape: Shape,
    /// Branch continuant determinants, ascending; present for forks only.
    pub branch_determinants: Option<[Int; 3]>,
    pub lt_type: LtType,
}

/// Continuant determinant of a branch in center-outward order.
fn continuant(weights: &[i64]) -> Int {
    let mut prev = Int::zero();
    let mut cur = Int::one();
    for &w in weights {
        let next = Int::from(w.unsigned_abs()) * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Classify the shape of a connected, boundary-free tree.
///
/// Refusals: `BoundaryPresent` when any boundary incidence exists,
/// `NotATree` for disconnected or cyclic graphs.
pub fn shape(g: &ResolutionGraph) -> Result<ShapeResult> {
    if g.has_boundary() {
        return Err(Error::BoundaryPresent);
    }
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let n = g.vertex_count();
    let max_deg = (0..n).map(|i| g.degree(i)).max().unwrap_or(0);
    let deg3: Vec<usize> = (0..n).filter(|&i| g.degree(i) == 3).collect();
    if max_deg <= 2 {
        return Ok(ShapeResult { shape: Shape::Chain, branch_determinants: None, lt_type: LtType::A });
    }
    if max_deg > 3 || deg3.len() != 1 {
        return Ok(ShapeResult { shape: Shape::Other, branch_determinants: None, lt_type: LtType::None });
    }
    let center = deg3[0];
    let mut branches: Vec<Vec<usize>> = Vec::with_capacity(3);
    for &first in g.neighbors(center) {
        let mut arm = vec![first];
        let (mut prev, mut cur) = (center, first);
        while let Some(&next) = g.neighbors(cur).iter().find(|&&x| x != prev) {
            arm.push(next);
            prev = cur;
            cur = next;
        }
        branches.push(arm);
    }
    let mut dets: [Int; 3] = std::array::from_fn(|k| {
        let ws: Vec<i64> = branches[k].iter().map(|&v| g.self_int(v)).collect();
        continuant(&ws)
    });
    dets.sort();
    let small = |k: usize| -> Option<i64> {
        use num_traits::ToPrimitive;
        dets[k].to_i64()
    };
    let lt_type = match (small(0), small(1), small(2)) {
        (Some(2), Some(2), _) if dets[2] >= Int::from(2) => LtType::D,
        (Some(2), Some(3), Some(3)) => LtType::E6,
        (Some(2), Some(3), Some(4)) => LtType::E7,
        (Some(2), Some(3), Some(5)) => LtType::E8,
        _ => LtType::None,
    };
    let branches: [Vec<VertexId>; 3] = branches
        .into_iter()
        .map(|arm| arm.into_iter().map(|v| g.id(v).clone()).collect())
        .collect::<Vec<_>>()
        .try_into()
        .expect("fork has exactly three branches");
    Ok(ShapeResult {
        shape: Shape::Fork { center: g.id(center).clone(), branches },
        branch_determinants: Some(dets),
        lt_type,
    })
}

/// Dynkin diagram label of an unweighted-looking graph: all weights -2,
/// no boundary, tree-shaped, and of A/D/E form. Anything else is `None`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DynkinLabel {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
    None,
}

pub fn dynkin_detect(g: &ResolutionGraph) -> DynkinLabel {
    let n = g.vertex_count();
    if n == 0 || g.has_boundary() || (0..n).any(|i| g.self_int(i) != -2) {
        return DynkinLabel::None;
    }
    let Ok(res) = shape(g) else {
        return DynkinLabel::None;
    };
    match (res.shape, res.lt_type) {
        (Shape::Chain, _) => DynkinLabel::A(n),
        (Shape::Fork { .. }, LtType::D) => DynkinLabel::D(n),
        (Shape::Fork { .. }, LtType::E6) => DynkinLabel::E6,
        (Shape::Fork { .. }, LtType::E7) => DynkinLabel::E7,
        (Shape::Fork { .. }, LtType::E8) => DynkinLabel::E8,
        _ => DynkinLabel::None,
    }
}

const OPEN: u8 = 0x00;
const CLOSE: u8 = 0x01;

/// Internal working form of an enumerated tree.
struct Tree {
    weights: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

/// Determinant of the intersection matrix restricted to the tree minus
/// `skip` (pass `usize::MAX` to keep every vertex). Exact in i128; callers
/// guarantee the entries stay small enough (packed enumeration only).
fn det_skip(t: &Tree, skip: usize) -> i128 {
    fn fg(t: &Tree, v: usize, parent: usize, skip: usize) -> (i128, i128) {
        // f = det of the subtree at v, g = product of child subtree dets
        let mut g = 1i128;
        let mut corr = 0i128;
        let mut kids = Vec::new();
        for &c in &t.adj[v] {
            if c != parent && c != skip {
                let (fc, gc) = fg(t, c, v, skip);
                kids.push((fc, gc));
            }
        }
        for &(fc, _) in &kids {
            g *= fc;
        }
        for i in 0..kids.len() {
            let mut prod = kids[i].1;
            for (j, &(fc, _)) in kids.iter().enumerate() {
                if j != i {
                    prod *= fc;
                }
            }
            corr += prod;
        }
        (t.weights[v] as i128 * g - corr, g)
    }
    let n = t.weights.len();
    let mut seen = vec![false; n];
    let mut det = 1i128;
    for v in 0..n {
        if v == skip || seen[v] {
            continue;
        }
        // mark the component reachable from v avoiding skip
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            for &c in &t.adj[x] {
                if c != skip && !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        det *= fg(t, v, usize::MAX, skip).0;
    }
    det
}

impl Tree {
    fn decode(code: &[u8], wide: bool) -> Tree {
        let step = if wide { 2 } else { 1 };
        let mut weights = Vec::new();
        let mut adj: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut pos = 0;
        while pos < code.len() {
            match code[pos] {
                OPEN => {
                    let off = if wide {
                        u16::from_le_bytes([code[pos + 1], code[pos + 2]]) as i64
                    } else {
                        code[pos + 1] as i64
                    };
                    let v = weights.len();
                    weights.push(-2 - off);
                    adj.push(Vec::new());
                    if let Some(&p) = stack.last() {
                        adj[p].push(v);
                        adj[v].push(p);
                    }
                    stack.push(v);
                    pos += 1 + step;
                }
                CLOSE => {
                    stack.pop();
                    pos += 1;
                }
                _ => unreachable!("malformed tree code"),
            }
        }
        Tree { weights, adj }
    }

    fn subtree_code(&self, v: usize, parent: usize, wide: bool, out: &mut Vec<u8>) {
        out.push(OPEN);
        let off = (-2 - self.weights[v]) as u64;
        if wide {
            out.extend_from_slice(&(off as u16).to_le_bytes());
        } else {
            out.push(off as u8);
        }
        let mut kids: Vec<Vec<u8>> = self
            .adj[v]
            .iter()
            .filter(|&&c| c != parent)
            .map(|&c| {
                let mut buf = Vec::new();
                self.subtree_code(c, v, wide, &mut buf);
                buf
            })
            .collect();
        kids.sort_unstable();
        for k in kids {
            out.extend_from_slice(&k);
        }
        out.push(CLOSE);
    }

    fn rooted_code(&self, root: usize, wide: bool) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.weights.len() * 4);
        self.subtree_code(root, usize::MAX, wide, &mut out);
        out
    }

    /// One or two centroids of the tree.
    fn centroids(&self) -> Vec<usize> {
        let n = self.weights.len();
        if n == 1 {
            return vec![0];
        }
        let mut size = vec![1usize; n];
        let mut order = Vec::with_capacity(n);
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![0usize];
        let mut visited = vec![false; n];
        while let Some(v) = stack.pop() {
            visited[v] = true;
            order.push(v);
            for &c in &self.adj[v] {
                if !visited[c] {
                    parent[c] = v;
                    stack.push(c);
                }
            }
        }
        for &v in order.iter().rev() {
            if parent[v] != usize::MAX {
                size[parent[v]] += size[v];
            }
        }
        let mut best = usize::MAX;
        let mut out = Vec::new();
        for v in 0..n {
            let mut heaviest = n - size[v];
            for &c in &self.adj[v] {
                if parent[c] == v {
                    heaviest = heaviest.max(size[c]);
                }
            }
            if heaviest < best {
                best = heaviest;
                out.clear();
            }
            if heaviest == best {
                out.push(v);
            }
        }
        out
    }

    /// Canonical form: minimum rooted code over the centroids. Equal codes
    /// characterize isomorphic weighted trees.
    fn canonical_code(&self, wide: bool) -> Vec<u8> {
        self.centroids()
            .into_iter()
            .map(|c| self.rooted_code(c, wide))
            .min()
            .expect("tree has a centroid")
    }

    /// Packed rooted code: 6 bits per vertex (open bit, weight nibble,
    /// close bit), preorder with children sorted numerically. Valid for at
    /// most 10 vertices and weight offsets below 16. Allocation-free; this
    /// runs once per enumeration candidate.
    fn packed_rooted(&self, root: usize) -> u64 {
        const M: usize = 10;
        let n = self.weights.len();
        debug_assert!(n <= M);
        let mut parent = [usize::MAX; M];
        let mut order = [0usize; M];
        let mut size = [1u32; M];
        let mut stack = [0usize; M];
        stack[0] = root;
        let mut sp = 1;
        let mut filled = 0;
        while sp > 0 {
            sp -= 1;
            let v = stack[sp];
            order[filled] = v;
            filled += 1;
            for &c in &self.adj[v] {
                if c != parent[v] {
                    parent[c] = v;
                    stack[sp] = c;
                    sp += 1;
                }
            }
        }
        for i in (1..n).rev() {
            size[parent[order[i]]] += size[order[i]];
        }
        fn rec(t: &Tree, v: usize, parent: &[usize], size: &[u32]) -> u64 {
            let mut kids = [(0u32, 0u64); 10];
            let mut k = 0;
            for &c in &t.adj[v] {
                if parent[c] == v {
                    let entry = (6 * size[c], rec(t, c, parent, size));
                    let mut i = k;
                    while i > 0 && kids[i - 1] > entry {
                        kids[i] = kids[i - 1];
                        i -= 1;
                    }
                    kids[i] = entry;
                    k += 1;
                }
            }
            let mut code = 1u64 << 4 | (-2 - t.weights[v]) as u64;
            for &(bits, ccode) in &kids[..k] {
                code = code << bits | ccode;
            }
            code << 1
        }
        rec(self, root, &parent, &size)
    }

    fn packed_canonical(&self) -> u64 {
        let (cents, k) = self.packed_centroids();
        (0..k).map(|i| self.packed_rooted(cents[i])).min().expect("tree has a centroid")
    }

    /// Stack-array variant of `centroids` for the packed path.
    fn packed_centroids(&self) -> ([usize; 2], usize) {
        const M: usize = 10;
        let n = self.weights.len();
        debug_assert!(n <= M);
        if n == 1 {
            return ([0, 0], 1);
        }
        let mut parent = [usize::MAX; M];
        let mut order = [0usize; M];
        let mut size = [1u32; M];
        let mut stack = [0usize; M];
        let mut sp = 1;
        let mut filled = 0;
        while sp > 0 {
            sp -= 1;
            let v = stack[sp];
            order[filled] = v;
            filled += 1;
            for &c in &self.adj[v] {
                if c != parent[v] {
                    parent[c] = v;
                    stack[sp] = c;
                    sp += 1;
                }
            }
        }
        for i in (1..n).rev() {
            size[parent[order[i]]] += size[order[i]];
        }
        let mut best = u32::MAX;
        let mut out = [0usize; 2];
        let mut k = 0;
        for v in 0..n {
            let mut heaviest = n as u32 - size[v];
            for &c in &self.adj[v] {
                if parent[c] == v {
                    heaviest = heaviest.max(size[c]);
                }
            }
            if heaviest < best {
                best = heaviest;
                k = 0;
            }
            // at most two vertices can share the final minimum; interim
            // ties beyond two are discarded before a smaller value appears
            if heaviest == best && k < 2 {
                out[k] = v;
                k += 1;
            }
        }
        (out, k)
    }

    fn decode_packed(code: u64, n: usize) -> Tree {
        let mut weights = Vec::with_capacity(n);
        let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut stack: Vec<usize> = Vec::new();
        let mut pos = 6 * n as u32;
        while pos > 0 {
            if code >> (pos - 1) & 1 == 1 {
                let off = code >> (pos - 5) & 0xf;
                let v = weights.len();
                weights.push(-2 - off as i64);
                adj.push(Vec::new());
                if let Some(&p) = stack.last() {
                    adj[p].push(v);
                    adj[v].push(p);
                }
                stack.push(v);
                pos -= 5;
            } else {
                stack.pop();
                pos -= 1;
            }
        }
        Tree { weights, adj }
    }

    fn is_negative_definite(&self) -> bool {
        let n = self.weights.len();
        let mut m = Matrix::new(n, n, |i, j| if i == j { self.weights[i] } else { 0 });
        for (v, nbrs) in self.adj.iter().enumerate() {
            for &w in nbrs {
                m[(v, w)] = 1;
            }
        }
        linalg::is_negative_definite(&m).expect("enumerated matrices are symmetric")
    }

}

/// Isomorphism-free streaming enumeration of connected weighted trees.
///
/// Yields every connected tree on at most `max_vertices` vertices with
/// weights in `[min_weight, -2]` and negative definite intersection
/// matrix, exactly once up to weighted-graph isomorphism, in a fixed
/// canonical order (by vertex count, then by canonical code). Graphs carry
/// no boundary; vertex ids are `C1..Cn`.
///
/// Trees are grown level by level: every negative definite tree on n+1
/// vertices arises from a negative definite tree on n vertices by
/// attaching one leaf (leaf deletion preserves both properties), so
/// per-level canonical-form deduplication is exhaustive.
pub fn enumerate_graphs(max_vertices: usize, min_weight: i64) -> GraphEnumeration {
    // small instances pack a whole tree code into one u64
    let packed = max_vertices <= 10 && min_weight >= -17;
    let wide = min_weight < -2 - 255;
    let mut e = GraphEnumeration {
        max_vertices,
        min_weight,
        packed,
        wide,
        level: Vec::new(),
        packed_level: Vec::new(),
        pos: 0,
        size: 1,
        scratch_weights: Vec::new(),
        scratch_edges: Vec::new(),
        scratch_stack: Vec::new(),
    };
    if max_vertices >= 1 {
        for w in min_weight..=-2 {
            let t = Tree { weights: vec![w], adj: vec![Vec::new()] };
            if packed {
                e.packed_level.push(t.packed_canonical());
            } else {
                e.level.push(t.canonical_code(wide));
            }
        }
        e.level.sort_unstable();
        e.packed_level.sort_unstable();
    }
    e
}

pub struct GraphEnumeration {
    max_vertices: usize,
    min_weight: i64,
    packed: bool,
    wide: bool,
    level: Vec<Vec<u8>>,
    packed_level: Vec<u64>,
    pos: usize,
    size: usize,
    scratch_weights: Vec<i64>,
    scratch_edges: Vec<(usize, usize)>,
    scratch_stack: Vec<usize>,
}

/// One enumerated tree, borrowed from the enumeration's scratch buffers.
/// Vertex v carries `weights()[v]`; edges are index pairs with the parent
/// first. Valid until the next `next_raw` call.
pub struct RawTree<'a> {
    weights: &'a [i64],
    edges: &'a [(usize, usize)],
}

impl RawTree<'_> {
    pub fn weights(&self) -> &[i64] {
        self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.edges
    }

    /// Materialize with the standard vertex names C1..Cn.
    pub fn to_graph(&self) -> ResolutionGraph {
        let mut edges = self.edges.to_vec();
        ResolutionGraph::from_enumerated_parts(self.weights, &mut edges)
    }
}

impl GraphEnumeration {
    /// Attachment points that differ as roots; attaching a leaf to
    /// same-rooted-code vertices gives isomorphic results.
    fn attach_points(t: &Tree, packed: bool, wide: bool) -> Vec<usize> {
        let n = t.weights.len();
        let mut attach: Vec<usize> = Vec::new();
        if packed {
            let mut codes = [0u64; 10];
            let mut k = 0;
            for v in 0..n {
                let rc = t.packed_rooted(v);
                if !codes[..k].contains(&rc) {
                    codes[k] = rc;
                    k += 1;
                    attach.push(v);
                }
            }
        } else {
            let mut codes: Vec<Vec<u8>> = Vec::with_capacity(n);
            for v in 0..n {
                let rc = t.rooted_code(v, wide);
                if !codes.contains(&rc) {
                    codes.push(rc);
                    attach.push(v);
                }
            }
        }
        attach
    }

    fn build_next_level_packed(&mut self) {
        let mut seen: HashSet<u64> = HashSet::new();
        let mut accepted: Vec<u64> = Vec::new();
        for &code in &self.packed_level {
            let mut t = Tree::decode_packed(code, self.size);
            let n = t.weights.len();
            let sign = if n % 2 == 1 { 1 } else { -1 };
            let det = det_skip(&t, usize::MAX);
            for v in Self::attach_points(&t, true, false) {
                // the bordered matrix stays negative definite exactly when
                // sign * (w * det - det_without_v) > 0
                let det_v = det_skip(&t, v);
                t.adj.push(vec![v]);
                t.adj[v].push(n);
                t.weights.push(0);
                for w in self.min_weight..=-2 {
                    if sign * (w as i128 * det - det_v) <= 0 {
                        continue;
                    }
                    t.weights[n] = w;
                    let c = t.packed_canonical();
                    if seen.insert(c) {
                        accepted.push(c);
                    }
                }
                t.weights.pop();
                t.adj.pop();
                t.adj[v].pop();
            }
        }
        accepted.sort_unstable();
        self.packed_level = accepted;
        self.pos = 0;
        self.size += 1;
    }

    fn build_next_level_general(&mut self) {
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut accepted: Vec<Vec<u8>> = Vec::new();
        for code in &self.level {
            let mut t = Tree::decode(code, self.wide);
            let n = t.weights.len();
            for v in Self::attach_points(&t, false, self.wide) {
                t.adj.push(vec![v]);
                t.adj[v].push(n);
                t.weights.push(0);
                for w in self.min_weight..=-2 {
                    t.weights[n] = w;
                    let c = t.canonical_code(self.wide);
                    if !seen.contains(&c) {
                        seen.insert(c.clone());
                        if t.is_negative_definite() {
                            accepted.push(c);
                        }
                    }
                }
                t.weights.pop();
                t.adj.pop();
                t.adj[v].pop();
            }
        }
        accepted.sort_unstable();
        self.level = accepted;
        self.pos = 0;
        self.size += 1;
    }

    fn level_len(&self) -> usize {
        if self.packed {
            self.packed_level.len()
        } else {
            self.level.len()
        }
    }

    fn decode_packed_into(
        code: u64,
        n: usize,
        weights: &mut Vec<i64>,
        edges: &mut Vec<(usize, usize)>,
        stack: &mut Vec<usize>,
    ) {
        weights.clear();
        edges.clear();
        stack.clear();
        let mut pos = 6 * n as u32;
        while pos > 0 {
            if code >> (pos - 1) & 1 == 1 {
                let off = code >> (pos - 5) & 0xf;
                let v = weights.len();
                weights.push(-2 - off as i64);
                if let Some(&p) = stack.last() {
                    edges.push((p, v));
                }
                stack.push(v);
                pos -= 5;
            } else {
                stack.pop();
                pos -= 1;
            }
        }
    }

    fn decode_into(
        code: &[u8],
        wide: bool,
        weights: &mut Vec<i64>,
        edges: &mut Vec<(usize, usize)>,
        stack: &mut Vec<usize>,
    ) {
        weights.clear();
        edges.clear();
        stack.clear();
        let step = if wide { 2 } else { 1 };
        let mut pos = 0;
        while pos < code.len() {
            match code[pos] {
                OPEN => {
                    let off = if wide {
                        u16::from_le_bytes([code[pos + 1], code[pos + 2]]) as i64
                    } else {
                        code[pos + 1] as i64
                    };
                    let v = weights.len();
                    weights.push(-2 - off);
                    if let Some(&p) = stack.last() {
                        edges.push((p, v));
                    }
                    stack.push(v);
                    pos += 1 + step;
                }
                CLOSE => {
                    stack.pop();
                    pos += 1;
                }
                _ => unreachable!("malformed tree code"),
            }
        }
    }

    /// Borrowing form of `next`: the same trees in the same order, decoded
    /// into reused buffers instead of materialized one `ResolutionGraph`
    /// per step. The `Iterator` impl wraps this.
    pub fn next_raw(&mut self) -> Option<RawTree<'_>> {
        loop {
            if self.pos < self.level_len() {
                if self.packed {
                    Self::decode_packed_into(
                        self.packed_level[self.pos],
                        self.size,
                        &mut self.scratch_weights,
                        &mut self.scratch_edges,
                        &mut self.scratch_stack,
                    );
                } else {
                    Self::decode_into(
                        &self.level[self.pos],
                        self.wide,
                        &mut self.scratch_weights,
                        &mut self.scratch_edges,
                        &mut self.scratch_stack,
                    );
                }
                self.pos += 1;
                return Some(RawTree { weights: &self.scratch_weights, edges: &self.scratch_edges });
            }
            if self.size >= self.max_vertices || self.level_len() == 0 {
                return None;
            }
            if self.packed {
                self.build_next_level_packed();
            } else {
                self.build_next_level_general();
            }
        }
    }
}

impl Iterator for GraphEnumeration {
    type Item = ResolutionGraph;

    fn next(&mut self) -> Option<ResolutionGraph> {
        self.next_raw().map(|t| t.to_graph())
    }
}
