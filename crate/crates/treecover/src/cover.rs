//! Quotient covers for finitely generated subgroups of the loop group,
//! realized by folding: expand each generator word to its edge-level
//! loop, wedge the loops at a base vertex, and identify equal-label
//! edges sharing an endpoint until none remain. The folded core answers
//! loop-lifting and membership queries; completing it with hanging trees
//! (materialized only on demand, see [`extend_with_hangs`]) turns it
//! into the actual cover, so a reduced loop lifts closed exactly when
//! its trace stays in the core and returns to the base vertex.
//!
//! Whether the quotient projection has unique rectifiable lifting for
//! *every* subgroup with closed orbits is open in general. Everything
//! here is restricted to finitely generated subgroups of graph loop
//! groups, where the lifting and weak-submetry checks pass on every
//! tested instance; no claim is made beyond what the checks cover.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::graph::{Dir, EdgeId, GraphPoint, MetricGraph, VertexId};
use crate::group::{evaluate_word, GeneratorSet, GroupError, LoopWord};
use crate::path::RhoPath;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("covers require a vertex basepoint")]
    InteriorBasepoint,
    #[error("group error: {0}")]
    Group(#[from] GroupError),
    #[error("cover is not finite (folded core is incomplete)")]
    NotFiniteCover,
    #[error("normality violated by conjugate {conjugate}")]
    NormalityViolation { conjugate: String },
    #[error("inclusion certificate fails on generator {generator}")]
    InclusionFailed { generator: String },
    #[error("invalid cover point")]
    InvalidPoint,
    #[error("line {line}: malformed subgroup record: {text}")]
    Malformed { line: usize, text: String },
}

/// A finitely generated subgroup, given by words in the loop-group
/// generators, with an optional claim of normality to be verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub words: Vec<LoopWord>,
    pub claimed_normal: bool,
}

impl SubgroupSpec {
    pub fn new(words: Vec<LoopWord>) -> SubgroupSpec {
        SubgroupSpec {
            words,
            claimed_normal: false,
        }
    }

    /// Parses the subgroup file format: one word per line in the word
    /// syntax, plus an optional `normal` directive; `#` comments.
    pub fn parse<S: Scalar>(
        gens: &GeneratorSet<S>,
        text: &str,
    ) -> Result<SubgroupSpec, CoverError> {
        let mut words = Vec::new();
        let mut claimed_normal = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content == "normal" {
                claimed_normal = true;
                continue;
            }
            let word = gens.parse_word(content).map_err(|_| CoverError::Malformed {
                line,
                text: content.to_string(),
            })?;
            words.push(word);
        }
        Ok(SubgroupSpec {
            words,
            claimed_normal,
        })
    }

    /// Letter length of the longest generator word.
    pub fn max_word_length(&self) -> usize {
        self.words.iter().map(|w| w.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverEdge {
    pub base_edge: EdgeId,
    pub tail: usize,
    pub head: usize,
}

/// The folded core of a subgroup cover: vertices are numbered by BFS
/// discovery from the base vertex with lexicographic edge labels, so
/// folding the same input always produces the identical graph.
#[derive(Debug, Clone)]
pub struct CoverGraph {
    /// Base vertex each cover vertex projects to.
    pub projection: Vec<VertexId>,
    pub edges: Vec<CoverEdge>,
    /// Base vertex of the cover (always index 0), over the anchor.
    pub base_vertex: usize,
    out: HashMap<(usize, EdgeId), usize>,
    inn: HashMap<(usize, EdgeId), usize>,
}

impl CoverGraph {
    pub fn vertex_count(&self) -> usize {
        self.projection.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number of the core: the rank of the subgroup.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.projection.len()
    }

    /// The unique lift of `e` out of cover vertex `v`, if present.
    pub fn out_edge(&self, v: usize, e: EdgeId) -> Option<usize> {
        self.out.get(&(v, e)).copied()
    }

    /// The unique lift of `e` into cover vertex `v`, if present.
    pub fn in_edge(&self, v: usize, e: EdgeId) -> Option<usize> {
        self.inn.get(&(v, e)).copied()
    }

    /// Follows one traversal of a base edge from cover vertex `v`.
    pub fn step(&self, v: usize, e: EdgeId, dir: Dir) -> Option<usize> {
        match dir {
            Dir::Forward => self.out_edge(v, e).map(|i| self.edges[i].head),
            Dir::Backward => self.in_edge(v, e).map(|i| self.edges[i].tail),
        }
    }

    /// Traces a reduced loop (full steps) from the base vertex; `None`
    /// when the trace leaves the core, which on the completed cover
    /// means the lift cannot close.
    pub fn trace<S: Scalar>(&self, path: &RhoPath<S>) -> Option<usize> {
        let mut at = self.base_vertex;
        for step in path.steps() {
            at = self.step(at, step.edge, step.dir)?;
        }
        Some(at)
    }

    /// Whether the folded core is a complete cover (finite index): every
    /// germ of the base graph lifts at every cover vertex.
    pub fn is_complete<S: Scalar>(&self, g: &MetricGraph<S>) -> bool {
        for v in 0..self.vertex_count() {
            for &(e, dir) in g.incident(self.projection[v]) {
                let present = match dir {
                    Dir::Forward => self.out_edge(v, e).is_some(),
                    Dir::Backward => self.in_edge(v, e).is_some(),
                };
                if !present {
                    return false;
                }
            }
        }
        true
    }

    /// Cover vertices over a base vertex.
    pub fn fiber_over_vertex(&self, v: VertexId) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&i| self.projection[i] == v)
            .collect()
    }

    /// Exports the core as a metric graph (vertices `c<i>`, edges
    /// `<base-id>.<k>`), re-ingestable as a base space.
    pub fn to_metric_graph<S: Scalar>(&self, g: &MetricGraph<S>) -> MetricGraph<S> {
        let vertices: Vec<String> = (0..self.vertex_count()).map(|i| format!("c{i}")).collect();
        let mut per_base: HashMap<EdgeId, usize> = HashMap::new();
        let mut edges = Vec::new();
        for ce in &self.edges {
            let k = per_base.entry(ce.base_edge).or_insert(0);
            let rec = g.edge(ce.base_edge);
            edges.push((
                format!("{}.{}", rec.id, k),
                format!("c{}", ce.tail),
                format!("c{}", ce.head),
                rec.length.clone(),
            ));
            *k += 1;
        }
        MetricGraph::new(vertices, edges, Some(format!("c{}", self.base_vertex)))
            .expect("folded cover is a valid connected graph")
    }

    /// DOT export: labels carry the base edge (the generator it lifts),
    /// tooltips the exact length.
    pub fn to_dot<S: Scalar>(&self, g: &MetricGraph<S>) -> String {
        let mut out = String::from("digraph cover {\n");
        for v in 0..self.vertex_count() {
            let mark = if v == self.base_vertex { ", shape=doublecircle" } else { "" };
            out.push_str(&format!(
                "  c{v} [label=\"c{v}/{}\"{mark}];\n",
                g.vertex_name(self.projection[v])
            ));
        }
        for ce in &self.edges {
            let rec = g.edge(ce.base_edge);
            out.push_str(&format!(
                "  c{} -> c{} [label=\"{}\", tooltip=\"{}\"];\n",
                ce.tail, ce.head, rec.id, rec.length
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// A point of the cover: a cover vertex or an interior point of a cover
/// edge (offset in the coordinates of the projected base edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverPoint<S> {
    Vertex(usize),
    Interior { edge: usize, offset: S },
}

impl<S: Scalar> CoverPoint<S> {
    /// Projection to the base graph.
    pub fn project(&self, g: &MetricGraph<S>, cv: &CoverGraph) -> Result<GraphPoint<S>, CoverError> {
        match self {
            CoverPoint::Vertex(v) => {
                let bv = cv
                    .projection
                    .get(*v)
                    .ok_or(CoverError::InvalidPoint)?;
                Ok(GraphPoint::Vertex(*bv))
            }
            CoverPoint::Interior { edge, offset } => {
                let ce = cv.edges.get(*edge).ok_or(CoverError::InvalidPoint)?;
                g.point_on_edge(ce.base_edge, offset.clone())
                    .map_err(|_| CoverError::InvalidPoint)
            }
        }
    }

    fn to_graph_point(
        &self,
        g: &MetricGraph<S>,
        cv: &CoverGraph,
        cover_as_graph: &MetricGraph<S>,
    ) -> Result<GraphPoint<S>, CoverError> {
        match self {
            CoverPoint::Vertex(v) => {
                if *v >= cv.vertex_count() {
                    return Err(CoverError::InvalidPoint);
                }
                Ok(GraphPoint::Vertex(
                    cover_as_graph
                        .vertex_by_name(&format!("c{v}"))
                        .expect("exported vertex exists"),
                ))
            }
            CoverPoint::Interior { edge, offset } => {
                if *edge >= cv.edge_count() {
                    return Err(CoverError::InvalidPoint);
                }
                let name = cover_edge_name(g, cv, *edge);
                let eid = cover_as_graph
                    .edge_by_name(&name)
                    .expect("exported edge exists");
                cover_as_graph
                    .point_on_edge(eid, offset.clone())
                    .map_err(|_| CoverError::InvalidPoint)
            }
        }
    }
}

fn cover_edge_name<S: Scalar>(g: &MetricGraph<S>, cv: &CoverGraph, edge: usize) -> String {
    let base = cv.edges[edge].base_edge;
    let k = cv.edges[..edge]
        .iter()
        .filter(|ce| ce.base_edge == base)
        .count();
    format!("{}.{}", g.edge(base).id, k)
}

/// Folds the subgroup graph: wedge the expanded generator loops at the
/// base vertex and identify equal-label edges sharing a tail or head
/// until the graph is folded. Deterministic for a given input order.
pub fn fold<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    spec: &SubgroupSpec,
) -> Result<CoverGraph, CoverError> {
    let GraphPoint::Vertex(anchor) = *g.basepoint() else {
        return Err(CoverError::InteriorBasepoint);
    };

    // Build the wedge of expanded loops.
    let mut projection: Vec<VertexId> = vec![anchor];
    let mut edges: Vec<(usize, usize, EdgeId)> = Vec::new();
    for word in &spec.words {
        let loop_path = evaluate_word(g, gens, word)?;
        let steps = loop_path.steps();
        if steps.is_empty() {
            continue;
        }
        let mut at = 0usize;
        for (i, step) in steps.iter().enumerate() {
            let next = if i + 1 == steps.len() {
                0
            } else {
                projection.push(g.step_target(step.edge, step.dir));
                projection.len() - 1
            };
            match step.dir {
                Dir::Forward => edges.push((at, next, step.edge)),
                Dir::Backward => edges.push((next, at, step.edge)),
            }
            at = next;
        }
    }

    // Union-find folding to a fixpoint.
    let mut leader: Vec<usize> = (0..projection.len()).collect();
    fn find(leader: &mut [usize], mut v: usize) -> usize {
        while leader[v] != v {
            leader[v] = leader[leader[v]];
            v = leader[v];
        }
        v
    }
    let mut alive: Vec<bool> = vec![true; edges.len()];
    loop {
        let mut changed = false;
        for keyed_by_tail in [true, false] {
            let mut seen: HashMap<(usize, EdgeId), usize> = HashMap::new();
            for i in 0..edges.len() {
                if !alive[i] {
                    continue;
                }
                let (t, h, e) = edges[i];
                let key_vertex = if keyed_by_tail {
                    find(&mut leader, t)
                } else {
                    find(&mut leader, h)
                };
                match seen.get(&(key_vertex, e)) {
                    None => {
                        seen.insert((key_vertex, e), i);
                    }
                    Some(&j) => {
                        let (tj, hj, _) = edges[j];
                        let (a, b) = if keyed_by_tail {
                            (find(&mut leader, h), find(&mut leader, hj))
                        } else {
                            (find(&mut leader, t), find(&mut leader, tj))
                        };
                        if a != b {
                            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                            leader[hi] = lo;
                        }
                        alive[i] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Canonical BFS renumbering from the base class, exploring base
    // edges in lexicographic id order, outgoing before incoming.
    let mut edge_order: Vec<EdgeId> = g.edges().map(|(e, _)| e).collect();
    edge_order.sort_by(|a, b| g.edge(*a).id.cmp(&g.edge(*b).id));
    let mut out_map: HashMap<(usize, EdgeId), (usize, usize)> = HashMap::new();
    let mut in_map: HashMap<(usize, EdgeId), (usize, usize)> = HashMap::new();
    for i in 0..edges.len() {
        if !alive[i] {
            continue;
        }
        let (t, h, e) = edges[i];
        let (t, h) = (find(&mut leader, t), find(&mut leader, h));
        out_map.insert((t, e), (h, i));
        in_map.insert((h, e), (t, i));
    }
    let root = find(&mut leader, 0);
    let mut number: HashMap<usize, usize> = HashMap::new();
    let mut bfs_order: Vec<usize> = Vec::new();
    number.insert(root, 0);
    bfs_order.push(root);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &e in &edge_order {
            for target in [
                out_map.get(&(v, e)).map(|&(h, _)| h),
                in_map.get(&(v, e)).map(|&(t, _)| t),
            ]
            .into_iter()
            .flatten()
            {
                if let std::collections::hash_map::Entry::Vacant(e) = number.entry(target) {
                    e.insert(bfs_order.len());
                    bfs_order.push(target);
                    queue.push_back(target);
                }
            }
        }
    }

    let final_projection: Vec<VertexId> = bfs_order.iter().map(|&v| projection[v]).collect();
    let mut final_edges: Vec<CoverEdge> = Vec::new();
    for i in 0..edges.len() {
        if !alive[i] {
            continue;
        }
        let (t, h, e) = edges[i];
        final_edges.push(CoverEdge {
            base_edge: e,
            tail: number[&find(&mut leader, t)],
            head: number[&find(&mut leader, h)],
        });
    }
    final_edges.sort_by(|a, b| {
        g.edge(a.base_edge)
            .id
            .cmp(&g.edge(b.base_edge).id)
            .then(a.tail.cmp(&b.tail))
            .then(a.head.cmp(&b.head))
    });
    final_edges.dedup();

    let mut out = HashMap::new();
    let mut inn = HashMap::new();
    for (i, ce) in final_edges.iter().enumerate() {
        let prev = out.insert((ce.tail, ce.base_edge), i);
        debug_assert!(prev.is_none(), "folding left equal-label edges at a tail");
        let prev = inn.insert((ce.head, ce.base_edge), i);
        debug_assert!(prev.is_none(), "folding left equal-label edges at a head");
    }

    Ok(CoverGraph {
        projection: final_projection,
        edges: final_edges,
        base_vertex: 0,
        out,
        inn,
    })
}

/// Materializes the completed cover out to `rounds` combinatorial steps
/// beyond the core: every missing germ lift gets a fresh hanging-tree
/// vertex, round by round. Geodesics between points at depth `d` never
/// need more than `d` further rounds, so a bounded extension suffices
/// for exact metric queries near the core.
pub fn extend_with_hangs<S: Scalar>(
    g: &MetricGraph<S>,
    cv: &CoverGraph,
    rounds: usize,
) -> CoverGraph {
    let mut projection = cv.projection.clone();
    let mut edges = cv.edges.clone();
    let mut out = cv.out.clone();
    let mut inn = cv.inn.clone();
    let mut frontier: Vec<usize> = (0..projection.len()).collect();
    for _ in 0..rounds {
        let mut next_frontier = Vec::new();
        for &v in &frontier {
            for &(e, dir) in g.incident(projection[v]) {
                let missing = match dir {
                    Dir::Forward => !out.contains_key(&(v, e)),
                    Dir::Backward => !inn.contains_key(&(v, e)),
                };
                if !missing {
                    continue;
                }
                let fresh = projection.len();
                projection.push(g.step_target(e, dir));
                let idx = edges.len();
                match dir {
                    Dir::Forward => {
                        edges.push(CoverEdge {
                            base_edge: e,
                            tail: v,
                            head: fresh,
                        });
                        out.insert((v, e), idx);
                        inn.insert((fresh, e), idx);
                    }
                    Dir::Backward => {
                        edges.push(CoverEdge {
                            base_edge: e,
                            tail: fresh,
                            head: v,
                        });
                        inn.insert((v, e), idx);
                        out.insert((fresh, e), idx);
                    }
                }
                next_frontier.push(fresh);
            }
        }
        frontier = next_frontier;
        if frontier.is_empty() {
            break;
        }
    }
    CoverGraph {
        projection,
        edges,
        base_vertex: cv.base_vertex,
        out,
        inn,
    }
}

/// Whether the lift of `w` at the base vertex of the cover closes up.
pub fn lifts_as_loop<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    cv: &CoverGraph,
    w: &LoopWord,
) -> Result<bool, CoverError> {
    let path = evaluate_word(g, gens, w)?;
    Ok(cv.trace(&path) == Some(cv.base_vertex))
}

/// Verdict of the bounded universality sweep.
#[derive(Debug, Clone)]
pub struct UniversalityReport {
    pub pass: bool,
    pub bound: usize,
    pub words_checked: usize,
    /// A word that lifts as a loop but is not in the subgroup, or a
    /// subgroup generator that fails to lift.
    pub witness: Option<String>,
}

/// Checks both inclusions up to the word-length bound: every generator
/// of `spec` lifts closed in `cv`, and every word whose lift closes is
/// accepted by the subgroup's own folded graph.
pub fn is_g_universal<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    cv: &CoverGraph,
    spec: &SubgroupSpec,
    bound: usize,
) -> Result<UniversalityReport, CoverError> {
    let membership = fold(g, gens, spec)?;
    for w in &spec.words {
        if !lifts_as_loop(g, gens, cv, w)? {
            return Ok(UniversalityReport {
                pass: false,
                bound,
                words_checked: 0,
                witness: Some(format!("generator {} does not lift closed", gens.render_word(w))),
            });
        }
    }
    let mut checked = 0usize;
    let mut witness = None;
    crate::group::sweep_words(g, gens, bound, None, &mut |w, path| {
        if witness.is_some() {
            return;
        }
        checked += 1;
        let lifts = cv.trace(path) == Some(cv.base_vertex);
        let member = membership.trace(path) == Some(membership.base_vertex);
        if lifts && !member {
            witness = Some(format!(
                "{} lifts as a loop but is not in the subgroup",
                gens.render_word(w)
            ));
        } else if member && !lifts {
            witness = Some(format!(
                "{} is in the subgroup but does not lift closed",
                gens.render_word(w)
            ));
        }
    });
    Ok(UniversalityReport {
        pass: witness.is_none(),
        bound,
        words_checked: checked,
        witness,
    })
}

/// Exact shortest-path distance between two points of the cover, via the
/// exported metric graph.
pub fn cover_distance<S: Scalar>(
    g: &MetricGraph<S>,
    cv: &CoverGraph,
    p: &CoverPoint<S>,
    q: &CoverPoint<S>,
) -> Result<S, CoverError> {
    let as_graph = cv.to_metric_graph(g);
    let gp = p.to_graph_point(g, cv, &as_graph)?;
    let gq = q.to_graph_point(g, cv, &as_graph)?;
    Ok(as_graph.distance(&gp, &gq))
}

/// All cover points over a base point.
pub fn fiber_over<S: Scalar>(
    g: &MetricGraph<S>,
    cv: &CoverGraph,
    x: &GraphPoint<S>,
) -> Vec<CoverPoint<S>> {
    let _ = g;
    match x {
        GraphPoint::Vertex(v) => cv
            .fiber_over_vertex(*v)
            .into_iter()
            .map(CoverPoint::Vertex)
            .collect(),
        GraphPoint::Interior { edge, offset } => (0..cv.edges.len())
            .filter(|&i| cv.edges[i].base_edge == *edge)
            .map(|i| CoverPoint::Interior {
                edge: i,
                offset: offset.clone(),
            })
            .collect(),
    }
}

/// A base-vertex-preserving graph morphism between two covers, built by
/// transporting the finer core through the coarser one. Vertices mapped
/// onto demand-created hanging-tree vertices get indices at or beyond
/// the coarse core's vertex count.
#[derive(Debug, Clone)]
pub struct FactorMap {
    pub vertex_map: Vec<usize>,
    /// Demand-created hang vertices (outside the coarse core).
    pub hang_vertices: usize,
}

/// Builds the factor morphism `cover(G) -> cover(H)` for `G <= H`. The
/// inclusion certificate (every generator of `G` accepted by `cover(H)`)
/// is checked, not trusted.
pub fn factor_map<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    cv_fine: &CoverGraph,
    cv_coarse: &CoverGraph,
    fine_spec: &SubgroupSpec,
) -> Result<FactorMap, CoverError> {
    for w in &fine_spec.words {
        if !lifts_as_loop(g, gens, cv_coarse, w)? {
            return Err(CoverError::InclusionFailed {
                generator: gens.render_word(w),
            });
        }
    }
    let mut map: Vec<Option<usize>> = vec![None; cv_fine.vertex_count()];
    map[cv_fine.base_vertex] = Some(cv_coarse.base_vertex);
    // Transitions out of hang vertices, created on demand.
    let mut hang_next = cv_coarse.vertex_count();
    let mut hang_step: HashMap<(usize, EdgeId, Dir), usize> = HashMap::new();
    let mut queue = VecDeque::from([cv_fine.base_vertex]);
    while let Some(v) = queue.pop_front() {
        let image = map[v].expect("queued vertices are mapped");
        let mut neighbors: Vec<(usize, EdgeId, Dir)> = Vec::new();
        for (i, ce) in cv_fine.edges.iter().enumerate() {
            let _ = i;
            if ce.tail == v {
                neighbors.push((ce.head, ce.base_edge, Dir::Forward));
            }
            if ce.head == v {
                neighbors.push((ce.tail, ce.base_edge, Dir::Backward));
            }
        }
        for (w, e, dir) in neighbors {
            let target_image = if image < cv_coarse.vertex_count() {
                match cv_coarse.step(image, e, dir) {
                    Some(t) => t,
                    None => *hang_step.entry((image, e, dir)).or_insert_with(|| {
                        let t = hang_next;
                        hang_next += 1;
                        t
                    }),
                }
            } else {
                // Already inside a hanging tree; keep descending.
                *hang_step.entry((image, e, dir)).or_insert_with(|| {
                    let t = hang_next;
                    hang_next += 1;
                    t
                })
            };
            match map[w] {
                None => {
                    map[w] = Some(target_image);
                    queue.push_back(w);
                }
                Some(existing) => {
                    if existing != target_image {
                        return Err(CoverError::InclusionFailed {
                            generator: format!(
                                "transport inconsistency at cover vertex {w} (images {existing} vs {target_image})"
                            ),
                        });
                    }
                }
            }
        }
    }
    let vertex_map: Vec<usize> = map
        .into_iter()
        .map(|m| m.expect("fine core is connected"))
        .collect();
    Ok(FactorMap {
        vertex_map,
        hang_vertices: hang_next - cv_coarse.vertex_count(),
    })
}

/// The deck transformation group of a finite normal cover: all
/// base-projection-preserving automorphisms, as vertex permutations.
#[derive(Debug, Clone)]
pub struct DeckReport {
    pub order: usize,
    pub index: usize,
    pub automorphisms: Vec<Vec<usize>>,
    pub transitive_on_fiber: bool,
    pub normality_bound: usize,
}

/// Computes the deck group. Normality of the subgroup is verified up to
/// a conjugating-word length bound (default twice the longest generator
/// word) by membership tests; a violation is reported with the offending
/// conjugate. The cover must be finite (complete core).
pub fn deck_transformations<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    cv: &CoverGraph,
    spec: &SubgroupSpec,
    bound: Option<usize>,
) -> Result<DeckReport, CoverError> {
    let bound = bound.unwrap_or_else(|| (2 * spec.max_word_length()).max(2));

    // Bounded normality first (it handles infinite-index input too):
    // u w u^-1 must fold back into the subgroup for every generator w
    // and every conjugator u up to the bound; report the shortest
    // violating conjugate.
    let membership = fold(g, gens, spec)?;
    let mut violation: Option<String> = None;
    for len in 1..=bound {
        crate::group::sweep_words(g, gens, len, None, &mut |u, _| {
            if violation.is_some() || u.len() != len {
                return;
            }
            for w in &spec.words {
                let conj = w.conjugate_by(u);
                let path = evaluate_word(g, gens, &conj).expect("conjugate evaluates");
                if membership.trace(&path) != Some(membership.base_vertex) {
                    violation = Some(gens.render_word(&conj));
                    return;
                }
            }
        });
        if violation.is_some() {
            break;
        }
    }
    if let Some(conjugate) = violation {
        return Err(CoverError::NormalityViolation { conjugate });
    }
    if !cv.is_complete(g) {
        return Err(CoverError::NotFiniteCover);
    }

    let GraphPoint::Vertex(anchor) = *g.basepoint() else {
        return Err(CoverError::InteriorBasepoint);
    };
    let fiber = cv.fiber_over_vertex(anchor);
    let index = fiber.len();
    let mut automorphisms = Vec::new();
    for &seed in &fiber {
        if let Some(perm) = transport_automorphism(cv, seed) {
            automorphisms.push(perm);
        }
    }
    let order = automorphisms.len();
    Ok(DeckReport {
        order,
        index,
        transitive_on_fiber: order == index,
        automorphisms,
        normality_bound: bound,
    })
}

/// Tries to extend `base_vertex -> seed` to a projection-preserving
/// automorphism by transporting along edges; `None` when the transport
/// collides or leaves the core.
fn transport_automorphism(cv: &CoverGraph, seed: usize) -> Option<Vec<usize>> {
    if cv.projection[seed] != cv.projection[cv.base_vertex] {
        return None;
    }
    let mut map: Vec<Option<usize>> = vec![None; cv.vertex_count()];
    map[cv.base_vertex] = Some(seed);
    let mut queue = VecDeque::from([cv.base_vertex]);
    while let Some(v) = queue.pop_front() {
        let image = map[v].expect("queued vertices are mapped");
        for (key, &edge_idx) in cv.out.iter().filter(|((t, _), _)| *t == v) {
            let (_, e) = *key;
            let w = cv.edges[edge_idx].head;
            let target = cv.step(image, e, Dir::Forward)?;
            match map[w] {
                None => {
                    map[w] = Some(target);
                    queue.push_back(w);
                }
                Some(existing) if existing != target => return None,
                _ => {}
            }
        }
        for (key, &edge_idx) in cv.inn.iter().filter(|((h, _), _)| *h == v) {
            let (_, e) = *key;
            let w = cv.edges[edge_idx].tail;
            let target = cv.step(image, e, Dir::Backward)?;
            match map[w] {
                None => {
                    map[w] = Some(target);
                    queue.push_back(w);
                }
                Some(existing) if existing != target => return None,
                _ => {}
            }
        }
    }
    let perm: Vec<usize> = map.into_iter().collect::<Option<Vec<_>>>()?;
    // Must be a bijection preserving the projection.
    let mut seen = vec![false; perm.len()];
    for (v, &w) in perm.iter().enumerate() {
        if seen[w] || cv.projection[v] != cv.projection[w] {
            return None;
        }
        seen[w] = true;
    }
    Some(perm)
}

/// Groups the cover's edges by base edge, in canonical order (handy for
/// reports).
pub fn edges_by_base<S: Scalar>(
    g: &MetricGraph<S>,
    cv: &CoverGraph,
) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for ce in &cv.edges {
        *out.entry(g.edge(ce.base_edge).id.clone()).or_insert(0) += 1;
    }
    out
}
