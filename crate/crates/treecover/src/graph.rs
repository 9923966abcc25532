//! Weighted multigraphs with exact rational edge lengths, serving as the
//! base length space for everything else in the crate.
//!
//! Graphs are immutable after construction. Loop edges and parallel edges
//! are permitted; edge lengths are strictly positive; the graph must be
//! connected and contain at least one edge.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::scalar::{parse_scalar, Scalar};

/// Index of a vertex inside a [`MetricGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an edge inside a [`MetricGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// Orientation of an edge traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    /// Tail to head, offsets increasing.
    Forward,
    /// Head to tail, offsets decreasing.
    Backward,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeRecord<S> {
    pub id: String,
    pub tail: VertexId,
    pub head: VertexId,
    pub length: S,
}

/// A point of the length space: either a vertex, or an interior point of
/// an edge with offset strictly between 0 and the edge length. Vertex
/// points always use the `Vertex` form, so each point of the space has
/// exactly one representation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphPoint<S> {
    Vertex(VertexId),
    Interior { edge: EdgeId, offset: S },
}

#[derive(Debug, Clone)]
pub struct MetricGraph<S> {
    vertex_ids: Vec<String>,
    edges: Vec<EdgeRecord<S>>,
    /// Per vertex: incident edge-ends as (edge, direction leaving the
    /// vertex), sorted by edge id then direction. A loop contributes two
    /// entries.
    outgoing: Vec<Vec<(EdgeId, Dir)>>,
    basepoint: GraphPoint<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: duplicate vertex id {id:?}")]
    DuplicateVertex { line: usize, id: String },
    #[error("line {line}: duplicate edge id {id:?}")]
    DuplicateEdge { line: usize, id: String },
    #[error("line {line}: dangling endpoint reference {id:?}")]
    DanglingEndpoint { line: usize, id: String },
    #[error("line {line}: non-positive length for edge {id:?}")]
    NonPositiveLength { line: usize, id: String },
    #[error("line {line}: malformed record: {text}")]
    MalformedRecord { line: usize, text: String },
    #[error("line {line}: unknown basepoint vertex {id:?}")]
    UnknownBasepoint { line: usize, id: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    NoVertices,
    #[error("graph has no edges")]
    NoEdges,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("offset {offset} outside [0, {length}] on edge {id:?}")]
    OffsetOutOfRange {
        id: String,
        offset: String,
        length: String,
    },
    #[error("malformed point {0:?}")]
    MalformedPoint(String),
}

impl<S: Scalar> MetricGraph<S> {
    /// Builds a graph from raw parts. `edges` entries are
    /// `(id, tail-id, head-id, length)`; `basepoint` is a vertex id or
    /// `None` for the lexicographically least vertex.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String, S)>,
        basepoint: Option<String>,
    ) -> Result<Self, GraphError> {
        let mut lines = Vec::new();
        for v in vertices {
            lines.push(format!("v {v}"));
        }
        for (id, tail, head, len) in edges {
            lines.push(format!("e {id} {tail} {head} {len}"));
        }
        if let Some(b) = basepoint {
            lines.push(format!("base {b}"));
        }
        Self::parse(&lines.join("\n"))
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// v <id>
    /// e <id> <tail> <head> <length>      # length as p/q or decimal
    /// base <vertex-id>                   # optional
    /// ```
    ///
    /// `#` starts a comment. Errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut vertex_ids: Vec<String> = Vec::new();
        let mut vertex_index: HashMap<String, VertexId> = HashMap::new();
        let mut edges: Vec<EdgeRecord<S>> = Vec::new();
        let mut edge_index: HashMap<String, EdgeId> = HashMap::new();
        let mut base: Option<(usize, String)> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let kind = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            match kind {
                "v" => {
                    let [id] = rest.as_slice() else {
                        return Err(GraphError::MalformedRecord {
                            line,
                            text: content.to_string(),
                        });
                    };
                    if id.contains('@') {
                        return Err(GraphError::MalformedRecord {
                            line,
                            text: content.to_string(),
                        });
                    }
                    if vertex_index.contains_key(*id) {
                        return Err(GraphError::DuplicateVertex {
                            line,
                            id: id.to_string(),
                        });
                    }
                    vertex_index.insert(id.to_string(), VertexId(vertex_ids.len()));
                    vertex_ids.push(id.to_string());
                }
                "e" => {
                    let [id, tail, head, len] = rest.as_slice() else {
                        return Err(GraphError::MalformedRecord {
                            line,
                            text: content.to_string(),
                        });
                    };
                    if id.contains('@') {
                        return Err(GraphError::MalformedRecord {
                            line,
                            text: content.to_string(),
                        });
                    }
                    if edge_index.contains_key(*id) {
                        return Err(GraphError::DuplicateEdge {
                            line,
                            id: id.to_string(),
                        });
                    }
                    let tail = *vertex_index.get(*tail).ok_or(GraphError::DanglingEndpoint {
                        line,
                        id: tail.to_string(),
                    })?;
                    let head = *vertex_index.get(*head).ok_or(GraphError::DanglingEndpoint {
                        line,
                        id: head.to_string(),
                    })?;
                    let length: S =
                        parse_scalar(len).map_err(|_| GraphError::MalformedRecord {
                            line,
                            text: content.to_string(),
                        })?;
                    if length <= S::zero() {
                        return Err(GraphError::NonPositiveLength {
                            line,
                            id: id.to_string(),
                        });
                    }
                    edge_index.insert(id.to_string(), EdgeId(edges.len()));
                    edges.push(EdgeRecord {
                        id: id.to_string(),
                        tail,
                        head,
                        length,
                    });
                }
                "base" => {
                    let [id] = rest.as_slice() else {
                        return Err(GraphError::MalformedRecord {
                            line,
                            text: content.to_string(),
                        });
                    };
                    base = Some((line, id.to_string()));
                }
                _ => {
                    return Err(GraphError::MalformedRecord {
                        line,
                        text: content.to_string(),
                    });
                }
            }
        }

        if vertex_ids.is_empty() {
            return Err(GraphError::NoVertices);
        }
        if edges.is_empty() {
            return Err(GraphError::NoEdges);
        }

        let mut outgoing: Vec<Vec<(EdgeId, Dir)>> = vec![Vec::new(); vertex_ids.len()];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.tail.0].push((EdgeId(i), Dir::Forward));
            outgoing[e.head.0].push((EdgeId(i), Dir::Backward));
        }
        for ends in &mut outgoing {
            ends.sort_by(|a, b| edges[a.0 .0].id.cmp(&edges[b.0 .0].id).then(a.1.cmp(&b.1)));
        }

        let basepoint = match base {
            Some((line, id)) => GraphPoint::Vertex(*vertex_index.get(&id).ok_or(
                GraphError::UnknownBasepoint {
                    line,
                    id: id.clone(),
                },
            )?),
            None => {
                let least = vertex_ids
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.cmp(b.1))
                    .map(|(i, _)| VertexId(i))
                    .unwrap();
                GraphPoint::Vertex(least)
            }
        };

        let g = MetricGraph {
            vertex_ids,
            edges,
            outgoing,
            basepoint,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_ids.len()];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(e, dir) in &self.outgoing[v.0] {
                let w = self.step_target(e, dir);
                if !seen[w.0] {
                    seen[w.0] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number `|E| - |V| + 1`; the rank of the loop group.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertex_ids.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_ids[v.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_ids
            .iter()
            .position(|id| id == name)
            .map(VertexId)
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeRecord<S> {
        &self.edges[e.0]
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.id == name).map(EdgeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &EdgeRecord<S>)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    pub fn basepoint(&self) -> &GraphPoint<S> {
        &self.basepoint
    }

    /// Returns a copy with a different basepoint.
    pub fn with_basepoint(&self, p: GraphPoint<S>) -> MetricGraph<S> {
        let mut g = self.clone();
        g.basepoint = p;
        g
    }

    /// Edge-ends leaving `v`, sorted by edge id; a loop appears twice.
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, Dir)] {
        &self.outgoing[v.0]
    }

    /// The vertex reached by traversing `e` in direction `dir`.
    pub fn step_target(&self, e: EdgeId, dir: Dir) -> VertexId {
        match dir {
            Dir::Forward => self.edges[e.0].head,
            Dir::Backward => self.edges[e.0].tail,
        }
    }

    /// The vertex from which a traversal of `e` in direction `dir` departs.
    pub fn step_source(&self, e: EdgeId, dir: Dir) -> VertexId {
        match dir {
            Dir::Forward => self.edges[e.0].tail,
            Dir::Backward => self.edges[e.0].head,
        }
    }

    /// Canonical point on `e` at `offset`: endpoints collapse to vertices.
    pub fn point_on_edge(&self, e: EdgeId, offset: S) -> Result<GraphPoint<S>, GraphError> {
        let rec = &self.edges[e.0];
        if offset < S::zero() || offset > rec.length {
            return Err(GraphError::OffsetOutOfRange {
                id: rec.id.clone(),
                offset: offset.to_string(),
                length: rec.length.to_string(),
            });
        }
        if offset == S::zero() {
            Ok(GraphPoint::Vertex(rec.tail))
        } else if offset == rec.length {
            Ok(GraphPoint::Vertex(rec.head))
        } else {
            Ok(GraphPoint::Interior { edge: e, offset })
        }
    }

    /// Parses point syntax: a bare vertex id, or `<edge-id>@<rational>`.
    pub fn parse_point(&self, text: &str) -> Result<GraphPoint<S>, GraphError> {
        let text = text.trim();
        if let Some((edge, off)) = text.split_once('@') {
            let e = self
                .edge_by_name(edge)
                .ok_or_else(|| GraphError::UnknownEdge(edge.to_string()))?;
            let offset: S =
                parse_scalar(off).map_err(|_| GraphError::MalformedPoint(text.to_string()))?;
            self.point_on_edge(e, offset)
        } else {
            let v = self
                .vertex_by_name(text)
                .ok_or_else(|| GraphError::UnknownVertex(text.to_string()))?;
            Ok(GraphPoint::Vertex(v))
        }
    }

    /// Renders a point in the syntax accepted by [`Self::parse_point`].
    pub fn point_name(&self, p: &GraphPoint<S>) -> String {
        match p {
            GraphPoint::Vertex(v) => self.vertex_name(*v).to_string(),
            GraphPoint::Interior { edge, offset } => {
                format!("{}@{}", self.edge(*edge).id, offset)
            }
        }
    }

    /// Number of germ directions at `p`: 2 on an edge interior; at a
    /// vertex, its degree with loops counted twice.
    pub fn germ_valency(&self, p: &GraphPoint<S>) -> usize {
        match p {
            GraphPoint::Interior { .. } => 2,
            GraphPoint::Vertex(v) => self.outgoing[v.0].len(),
        }
    }

    /// Exact shortest-path distance between vertices.
    pub fn vertex_distance(&self, from: VertexId, to: VertexId) -> S {
        self.dijkstra(from)[to.0]
            .clone()
            .expect("graph is connected")
    }

    fn dijkstra(&self, from: VertexId) -> Vec<Option<S>> {
        let mut dist: Vec<Option<S>> = vec![None; self.vertex_ids.len()];
        // BinaryHeap over Reverse(distance, vertex); scalars are Ord.
        let mut heap = BinaryHeap::new();
        dist[from.0] = Some(S::zero());
        heap.push(Reverse((S::zero(), from.0)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref() != Some(&d) {
                continue;
            }
            for &(e, dir) in &self.outgoing[v] {
                let w = self.step_target(e, dir).0;
                let nd = d.clone() + self.edges[e.0].length.clone();
                if dist[w].as_ref().is_none_or(|cur| nd < *cur) {
                    dist[w] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }

    /// Entry points of `p`: the vertices bounding it, with the exact cost
    /// of reaching each from `p`.
    fn anchors(&self, p: &GraphPoint<S>) -> Vec<(VertexId, S)> {
        match p {
            GraphPoint::Vertex(v) => vec![(*v, S::zero())],
            GraphPoint::Interior { edge, offset } => {
                let rec = &self.edges[edge.0];
                vec![
                    (rec.tail, offset.clone()),
                    (rec.head, rec.length.clone() - offset.clone()),
                ]
            }
        }
    }

    /// Exact shortest-path distance between arbitrary points.
    pub fn distance(&self, p: &GraphPoint<S>, q: &GraphPoint<S>) -> S {
        if p == q {
            return S::zero();
        }
        let mut best: Option<S> = None;
        // Inside a single edge the direct route may beat every route
        // through the endpoints.
        if let (
            GraphPoint::Interior { edge: e1, offset: s },
            GraphPoint::Interior { edge: e2, offset: t },
        ) = (p, q)
        {
            if e1 == e2 {
                let direct = if s >= t {
                    s.clone() - t.clone()
                } else {
                    t.clone() - s.clone()
                };
                best = Some(direct);
            }
        }
        for (a, ca) in self.anchors(p) {
            let table = self.dijkstra(a);
            for (b, cb) in self.anchors(q) {
                let via = ca.clone()
                    + table[b.0].clone().expect("graph is connected")
                    + cb.clone();
                if best.as_ref().is_none_or(|cur| via < *cur) {
                    best = Some(via);
                }
            }
        }
        best.expect("points have at least one anchor")
    }

    /// Sum of all edge lengths; an upper bound for any systole.
    pub fn total_length(&self) -> S {
        self.edges
            .iter()
            .fold(S::zero(), |acc, e| acc + e.length.clone())
    }

    /// Length of the shortest edge.
    pub fn min_edge_length(&self) -> S {
        self.edges
            .iter()
            .map(|e| e.length.clone())
            .min()
            .expect("graph has at least one edge")
    }

    /// Serializes back to the graph file format.
    pub fn to_graph_format(&self) -> String {
        let mut out = String::new();
        for v in &self.vertex_ids {
            out.push_str(&format!("v {v}\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "e {} {} {} {}\n",
                e.id,
                self.vertex_ids[e.tail.0],
                self.vertex_ids[e.head.0],
                e.length
            ));
        }
        if let GraphPoint::Vertex(v) = &self.basepoint {
            out.push_str(&format!("base {}\n", self.vertex_ids[v.0]));
        }
        out
    }
}

impl<S: Scalar> fmt::Display for MetricGraph<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "metric graph: {} vertices, {} edges, rank {}",
            self.vertex_count(),
            self.edge_count(),
            self.cycle_rank()
        )
    }
}
