//! Discrete homotopy of finite metric spaces: epsilon-chains, the
//! epsilon-deck group as a finite presentation, bonding maps between
//! scales, stabilization detection, and sampling of metric graphs into
//! point clouds for cross-validation against the covering tree.
//!
//! A chain at scale epsilon steps strictly less than epsilon at a time;
//! two chains are homotopic when one can be turned into the other by
//! inserting or deleting single points, staying a chain throughout. The
//! group of homotopy classes of loops at the basepoint is presented by
//! the non-tree edges of the epsilon-neighborhood graph modulo the
//! boundaries of its triangles, which is exactly what the single-point
//! move set generates.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use crate::graph::{GraphPoint, MetricGraph};
use crate::presentation::{
    concat_reduced, free_reduce, invert_word, GroupKind, Letter, Presentation, Simplified, Word,
    DEFAULT_COSET_BUDGET,
};
use crate::scalar::{parse_scalar, scalar_string, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EpsError {
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("scales must be strictly descending")]
    ScalesNotDescending,
    #[error("scale pair must satisfy 0 < delta <= epsilon")]
    BadScalePair,
    #[error("line {line}: malformed cloud record: {text}")]
    Malformed { line: usize, text: String },
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("chain step {index} has distance >= scale")]
    ChainStepTooLong { index: usize },
    #[error("chain is empty")]
    EmptyChain,
    #[error("chain is not a loop at the basepoint")]
    NotBasedLoop,
    #[error("mesh must be positive")]
    NonPositiveMesh,
}

#[derive(Debug, Clone)]
enum Geometry<S> {
    /// Explicit symmetric distance matrix.
    Matrix(Vec<Vec<S>>),
    /// Rational coordinates; comparisons use squared distances.
    Coords(Vec<Vec<S>>),
}

/// A finite metric space with labelled points and a basepoint.
#[derive(Debug, Clone)]
pub struct PointCloud<S> {
    labels: Vec<String>,
    geometry: Geometry<S>,
    basepoint: usize,
}

impl<S: Scalar> PointCloud<S> {
    pub fn from_coordinates(
        points: Vec<(String, Vec<S>)>,
        basepoint: Option<String>,
    ) -> Result<PointCloud<S>, EpsError> {
        if points.is_empty() {
            return Err(EpsError::Geometry("no points".to_string()));
        }
        let dim = points[0].1.len();
        if dim == 0 {
            return Err(EpsError::Geometry("zero-dimensional points".to_string()));
        }
        let mut labels = Vec::new();
        let mut coords = Vec::new();
        for (label, xs) in points {
            if xs.len() != dim {
                return Err(EpsError::Geometry(format!(
                    "point {label:?} has {} coordinates, expected {dim}",
                    xs.len()
                )));
            }
            if labels.contains(&label) {
                return Err(EpsError::Geometry(format!("duplicate label {label:?}")));
            }
            labels.push(label);
            coords.push(xs);
        }
        for i in 0..coords.len() {
            for j in (i + 1)..coords.len() {
                if coords[i] == coords[j] {
                    return Err(EpsError::Geometry(format!(
                        "points {:?} and {:?} coincide",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let basepoint = resolve_base(&labels, basepoint)?;
        Ok(PointCloud {
            labels,
            geometry: Geometry::Coords(coords),
            basepoint,
        })
    }

    pub fn from_distances(
        labels: Vec<String>,
        triples: Vec<(String, String, S)>,
        basepoint: Option<String>,
    ) -> Result<PointCloud<S>, EpsError> {
        if labels.is_empty() {
            return Err(EpsError::Geometry("no points".to_string()));
        }
        let n = labels.len();
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        if index.len() != n {
            return Err(EpsError::Geometry("duplicate label".to_string()));
        }
        let mut m: Vec<Vec<Option<S>>> = vec![vec![None; n]; n];
        for i in 0..n {
            m[i][i] = Some(S::zero());
        }
        for (a, b, d) in triples {
            let i = *index
                .get(a.as_str())
                .ok_or_else(|| EpsError::UnknownLabel(a.clone()))?;
            let j = *index
                .get(b.as_str())
                .ok_or_else(|| EpsError::UnknownLabel(b.clone()))?;
            if i == j {
                if d != S::zero() {
                    return Err(EpsError::Geometry(format!("nonzero self-distance at {a:?}")));
                }
                continue;
            }
            if d <= S::zero() {
                return Err(EpsError::Geometry(format!(
                    "non-positive distance between {a:?} and {b:?}"
                )));
            }
            if let Some(old) = &m[i][j] {
                if *old != d {
                    return Err(EpsError::Geometry(format!(
                        "conflicting distances between {a:?} and {b:?}"
                    )));
                }
            }
            m[i][j] = Some(d.clone());
            m[j][i] = Some(d);
        }
        let mut matrix = Vec::with_capacity(n);
        for (i, row) in m.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (j, d) in row.into_iter().enumerate() {
                out.push(d.ok_or_else(|| {
                    EpsError::Geometry(format!(
                        "missing distance between {:?} and {:?}",
                        labels[i], labels[j]
                    ))
                })?);
            }
            matrix.push(out);
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][j] > matrix[i][k].clone() + matrix[k][j].clone() {
                        return Err(EpsError::Geometry(format!(
                            "triangle inequality fails on ({:?}, {:?}, {:?})",
                            labels[i], labels[j], labels[k]
                        )));
                    }
                }
            }
        }
        let basepoint = resolve_base(&labels, basepoint)?;
        Ok(PointCloud {
            labels,
            geometry: Geometry::Matrix(matrix),
            basepoint,
        })
    }

    /// Parses the cloud format: CSV rows under a header of either
    /// `label,x1,...,xn` (coordinates) or `label,label,distance`
    /// (explicit matrix), plus an optional `base <label>` directive and
    /// `#` comments.
    pub fn parse(text: &str) -> Result<PointCloud<S>, EpsError> {
        let mut base: Option<String> = None;
        let mut header: Option<Vec<String>> = None;
        let mut coord_rows: Vec<(String, Vec<S>)> = Vec::new();
        let mut triples: Vec<(String, String, S)> = Vec::new();
        let mut triple_labels: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            if let Some(rest) = content.strip_prefix("base ") {
                base = Some(rest.trim().to_string());
                continue;
            }
            let fields: Vec<String> = content.split(',').map(|f| f.trim().to_string()).collect();
            match &header {
                None => {
                    if fields.len() < 2 || fields[0] != "label" {
                        return Err(EpsError::Malformed {
                            line,
                            text: content.to_string(),
                        });
                    }
                    header = Some(fields);
                }
                Some(h) => {
                    if fields.len() != h.len() {
                        return Err(EpsError::Malformed {
                            line,
                            text: content.to_string(),
                        });
                    }
                    if h.len() == 3 && h[1] == "label" {
                        let d: S = parse_scalar(&fields[2]).map_err(|_| EpsError::Malformed {
                            line,
                            text: content.to_string(),
                        })?;
                        for l in [&fields[0], &fields[1]] {
                            if !triple_labels.contains(l) {
                                triple_labels.push(l.clone());
                            }
                        }
                        triples.push((fields[0].clone(), fields[1].clone(), d));
                    } else {
                        let mut xs = Vec::new();
                        for f in &fields[1..] {
                            xs.push(parse_scalar(f).map_err(|_| EpsError::Malformed {
                                line,
                                text: content.to_string(),
                            })?);
                        }
                        coord_rows.push((fields[0].clone(), xs));
                    }
                }
            }
        }
        if !coord_rows.is_empty() {
            PointCloud::from_coordinates(coord_rows, base)
        } else if !triples.is_empty() {
            PointCloud::from_distances(triple_labels, triples, base)
        } else {
            Err(EpsError::Geometry("no points".to_string()))
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Compares `d(i, j)` with `scale`, exactly. Coordinate clouds
    /// compare squared distances against the squared scale.
    pub fn cmp_scale(&self, i: usize, j: usize, scale: &S) -> Ordering {
        match &self.geometry {
            Geometry::Matrix(m) => m[i][j].cmp(scale),
            Geometry::Coords(c) => {
                let mut d2 = S::zero();
                for (a, b) in c[i].iter().zip(c[j].iter()) {
                    let diff = a.clone() - b.clone();
                    d2 = d2 + diff.clone() * diff;
                }
                d2.cmp(&(scale.clone() * scale.clone()))
            }
        }
    }

    /// The largest pairwise-distance witness: some scale strictly above
    /// every distance (diameter + 1 in the matrix case; a safe square
    /// bound for coordinates).
    pub fn scale_above_diameter(&self) -> S {
        match &self.geometry {
            Geometry::Matrix(m) => {
                let mut max = S::zero();
                for row in m {
                    for d in row {
                        if *d > max {
                            max = d.clone();
                        }
                    }
                }
                max + S::one()
            }
            Geometry::Coords(c) => {
                // Sum of coordinate ranges dominates every distance.
                let dim = c[0].len();
                let mut bound = S::one();
                for k in 0..dim {
                    let lo = c.iter().map(|p| p[k].clone()).min().unwrap();
                    let hi = c.iter().map(|p| p[k].clone()).max().unwrap();
                    bound = bound + (hi - lo);
                }
                bound
            }
        }
    }
}

fn resolve_base(labels: &[String], base: Option<String>) -> Result<usize, EpsError> {
    match base {
        Some(b) => labels
            .iter()
            .position(|l| *l == b)
            .ok_or(EpsError::UnknownLabel(b)),
        None => Ok(0),
    }
}

/// The strict epsilon-neighborhood graph of a cloud, with its filled
/// triangles and the pairs sitting exactly at the scale (flagged because
/// the construction is sensitive to the strict inequality there).
#[derive(Debug, Clone)]
pub struct EpsGraph<S> {
    pub scale: S,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
    pub boundary_pairs: Vec<(usize, usize)>,
    /// Points in the basepoint's component of the graph.
    pub component: Vec<usize>,
}

pub fn eps_graph<S: Scalar>(cloud: &PointCloud<S>, scale: &S) -> Result<EpsGraph<S>, EpsError> {
    if *scale <= S::zero() {
        return Err(EpsError::NonPositiveScale(scalar_string(scale)));
    }
    let n = cloud.len();
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    let mut adjacent = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            match cloud.cmp_scale(i, j, scale) {
                Ordering::Less => {
                    edges.push((i, j));
                    adjacent[i][j] = true;
                    adjacent[j][i] = true;
                }
                Ordering::Equal => boundary.push((i, j)),
                Ordering::Greater => {}
            }
        }
    }
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !adjacent[i][j] {
                continue;
            }
            for k in (j + 1)..n {
                if adjacent[i][k] && adjacent[j][k] {
                    triangles.push((i, j, k));
                }
            }
        }
    }
    // Basepoint component.
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([cloud.basepoint()]);
    seen[cloud.basepoint()] = true;
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            if adjacent[v][w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let component = (0..n).filter(|&i| seen[i]).collect();
    Ok(EpsGraph {
        scale: scale.clone(),
        edges,
        triangles,
        boundary_pairs: boundary,
        component,
    })
}

/// Presentation of the epsilon-deck group at one scale: generators are
/// the non-tree edges of the basepoint's component, relations are the
/// triangle boundary words.
#[derive(Debug, Clone)]
pub struct EpsPresentation<S> {
    pub scale: S,
    pub graph: EpsGraph<S>,
    pub tree_edges: Vec<(usize, usize)>,
    /// Non-tree edges, oriented low-to-high; one generator each.
    pub generators: Vec<(usize, usize)>,
    pub presentation: Presentation,
    pub simplified: Simplified,
    /// BFS parent (point, via-tree-edge) toward the basepoint.
    parent: HashMap<usize, usize>,
}

impl<S: Scalar> EpsPresentation<S> {
    pub fn generator_name(&self, cloud: &PointCloud<S>, g: usize) -> String {
        let (i, j) = self.generators[g];
        format!("{}~{}", cloud.label(i), cloud.label(j))
    }

    /// Free rank when the simplified presentation is free (the trivial
    /// group counts as free of rank 0).
    pub fn free_rank(&self) -> Option<usize> {
        self.simplified.free_rank()
    }

    /// The tree path from the basepoint to `target`, as a point sequence.
    pub fn tree_path_from_base(&self, target: usize) -> Vec<usize> {
        let mut back = vec![target];
        let mut at = target;
        while let Some(&p) = self.parent.get(&at) {
            back.push(p);
            at = p;
        }
        back.reverse();
        back
    }

    /// Image of a directed step in the free group on the generators.
    fn step_letter(&self, from: usize, to: usize) -> Option<Letter> {
        let key = (from.min(to), from.max(to));
        if self.tree_edges.binary_search(&key).is_ok() {
            return None;
        }
        let idx = self
            .generators
            .binary_search(&key)
            .expect("edge is tree or generator");
        Some((idx, from > to))
    }

    /// Rewrites a chain loop at the basepoint into a word over the
    /// generators. The chain must be valid at this scale.
    pub fn chain_to_word(
        &self,
        cloud: &PointCloud<S>,
        chain: &EpsChain,
    ) -> Result<Word, EpsError> {
        chain.validate(cloud, &self.scale)?;
        if chain.points.first() != Some(&cloud.basepoint())
            || chain.points.last() != Some(&cloud.basepoint())
        {
            return Err(EpsError::NotBasedLoop);
        }
        let mut word = Vec::new();
        for w in chain.points.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            if let Some(letter) = self.step_letter(w[0], w[1]) {
                word.push(letter);
            }
        }
        Ok(free_reduce(&word))
    }
}

/// Builds the scale presentation with the default enumeration budget.
pub fn delta_group<S: Scalar>(
    cloud: &PointCloud<S>,
    scale: &S,
) -> Result<EpsPresentation<S>, EpsError> {
    delta_group_with_budget(cloud, scale, DEFAULT_COSET_BUDGET)
}

pub fn delta_group_with_budget<S: Scalar>(
    cloud: &PointCloud<S>,
    scale: &S,
    coset_budget: usize,
) -> Result<EpsPresentation<S>, EpsError> {
    let graph = eps_graph(cloud, scale)?;
    let in_component: HashSet<usize> = graph.component.iter().copied().collect();
    // Kruskal over edges sorted by endpoint pair: deterministic tree.
    let mut tree_edges = Vec::new();
    let mut generators = Vec::new();
    let mut leader: HashMap<usize, usize> = graph.component.iter().map(|&v| (v, v)).collect();
    fn find(leader: &mut HashMap<usize, usize>, v: usize) -> usize {
        let mut root = v;
        while leader[&root] != root {
            root = leader[&root];
        }
        let mut at = v;
        while leader[&at] != root {
            let next = leader[&at];
            leader.insert(at, root);
            at = next;
        }
        root
    }
    for &(i, j) in &graph.edges {
        if !in_component.contains(&i) {
            continue;
        }
        let ri = find(&mut leader, i);
        let rj = find(&mut leader, j);
        if ri != rj {
            leader.insert(ri, rj);
            tree_edges.push((i, j));
        } else {
            generators.push((i, j));
        }
    }
    tree_edges.sort();
    generators.sort();

    // BFS parents toward the basepoint along tree edges.
    let mut tree_adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(i, j) in &tree_edges {
        tree_adj.entry(i).or_default().push(j);
        tree_adj.entry(j).or_default().push(i);
    }
    for nbrs in tree_adj.values_mut() {
        nbrs.sort();
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut seen: HashSet<usize> = HashSet::from([cloud.basepoint()]);
    let mut queue = VecDeque::from([cloud.basepoint()]);
    while let Some(v) = queue.pop_front() {
        if let Some(nbrs) = tree_adj.get(&v) {
            for &w in nbrs {
                if seen.insert(w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
    }

    let gen_index: HashMap<(usize, usize), usize> = generators
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();
    let tree_set: HashSet<(usize, usize)> = tree_edges.iter().copied().collect();
    let letter = |from: usize, to: usize| -> Option<Letter> {
        let key = (from.min(to), from.max(to));
        if tree_set.contains(&key) {
            None
        } else {
            Some((gen_index[&key], from > to))
        }
    };
    let mut relations = Vec::new();
    for &(i, j, k) in &graph.triangles {
        if !in_component.contains(&i) {
            continue;
        }
        let mut word = Vec::new();
        for (from, to) in [(i, j), (j, k), (k, i)] {
            if let Some(l) = letter(from, to) {
                word.push(l);
            }
        }
        let word = free_reduce(&word);
        if !word.is_empty() {
            relations.push(word);
        }
    }
    let presentation = Presentation {
        rank: generators.len(),
        relations,
    };
    let simplified = crate::presentation::simplify(&presentation, coset_budget);
    Ok(EpsPresentation {
        scale: scale.clone(),
        graph,
        tree_edges,
        generators,
        presentation,
        simplified,
        parent,
    })
}

/// A chain of cloud points; consecutive distances must be strictly below
/// the scale at which it is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsChain {
    pub points: Vec<usize>,
}

impl EpsChain {
    pub fn new(points: Vec<usize>) -> Result<EpsChain, EpsError> {
        if points.is_empty() {
            return Err(EpsError::EmptyChain);
        }
        Ok(EpsChain { points })
    }

    /// Parses whitespace-separated point labels (with `#` comments).
    pub fn parse<S: Scalar>(cloud: &PointCloud<S>, text: &str) -> Result<EpsChain, EpsError> {
        let mut points = Vec::new();
        for line in text.lines() {
            let content = line.split('#').next().unwrap_or("");
            for tok in content.split_whitespace() {
                points.push(
                    cloud
                        .index_of(tok)
                        .ok_or_else(|| EpsError::UnknownLabel(tok.to_string()))?,
                );
            }
        }
        EpsChain::new(points)
    }

    /// Strict validity: every step distance is strictly below `scale`.
    pub fn validate<S: Scalar>(&self, cloud: &PointCloud<S>, scale: &S) -> Result<(), EpsError> {
        if *scale <= S::zero() {
            return Err(EpsError::NonPositiveScale(scalar_string(scale)));
        }
        for (index, w) in self.points.windows(2).enumerate() {
            if cloud.cmp_scale(w[0], w[1], scale) != Ordering::Less {
                return Err(EpsError::ChainStepTooLong { index });
            }
        }
        Ok(())
    }

    pub fn is_loop_at<S: Scalar>(&self, cloud: &PointCloud<S>) -> bool {
        self.points.first() == Some(&cloud.basepoint())
            && self.points.last() == Some(&cloud.basepoint())
    }
}

/// Outcome of a homotopy or functoriality query. `No` is only ever
/// produced from an exact obstruction, never from budget exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Decides whether two based loops are epsilon-homotopic. Exact via the
/// presentation whenever the simplified group is free or enumerated
/// finite; otherwise a budgeted bidirectional search over single-point
/// moves, which can only answer `Yes` or `Inconclusive`.
pub fn eps_homotopic<S: Scalar>(
    cloud: &PointCloud<S>,
    scale: &S,
    first: &EpsChain,
    second: &EpsChain,
    budget: usize,
) -> Result<Verdict, EpsError> {
    for chain in [first, second] {
        chain.validate(cloud, scale)?;
        if !chain.is_loop_at(cloud) {
            return Err(EpsError::NotBasedLoop);
        }
    }
    let pres = delta_group(cloud, scale)?;
    let w1 = pres.chain_to_word(cloud, first)?;
    let w2 = pres.chain_to_word(cloud, second)?;
    let diff = concat_reduced(&w1, &invert_word(&w2));
    match pres.simplified.is_identity(&diff) {
        Some(true) => Ok(Verdict::Yes),
        Some(false) => Ok(Verdict::No),
        None => Ok(chain_move_search(cloud, scale, first, second, budget)),
    }
}

/// Bidirectional breadth-first search over single-point insertions and
/// deletions, on chains canonicalized by collapsing adjacent duplicates.
fn chain_move_search<S: Scalar>(
    cloud: &PointCloud<S>,
    scale: &S,
    first: &EpsChain,
    second: &EpsChain,
    budget: usize,
) -> Verdict {
    let start = first.points.clone();
    let goal = second.points.clone();
    if start == goal {
        return Verdict::Yes;
    }
    let mut left: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut right: HashSet<Vec<usize>> = HashSet::from([goal.clone()]);
    let mut left_frontier = vec![start];
    let mut right_frontier = vec![goal];
    let mut explored = 0usize;
    while !left_frontier.is_empty() && !right_frontier.is_empty() {
        // Expand the smaller side.
        let expand_left = left_frontier.len() <= right_frontier.len();
        let (frontier, seen, other) = if expand_left {
            (&mut left_frontier, &mut left, &right)
        } else {
            (&mut right_frontier, &mut right, &left)
        };
        let mut next = Vec::new();
        for state in frontier.drain(..) {
            for neighbor in chain_neighbors(cloud, scale, &state) {
                if other.contains(&neighbor) {
                    return Verdict::Yes;
                }
                if seen.insert(neighbor.clone()) {
                    explored += 1;
                    if explored > budget {
                        return Verdict::Inconclusive;
                    }
                    next.push(neighbor);
                }
            }
        }
        *frontier = next;
    }
    // Frontiers can only die out on finite move graphs, which single
    // insertions never produce; treat it as exhaustion all the same.
    Verdict::Inconclusive
}

fn chain_neighbors<S: Scalar>(
    cloud: &PointCloud<S>,
    scale: &S,
    points: &[usize],
) -> Vec<Vec<usize>> {
    let less = |i: usize, j: usize| i == j || cloud.cmp_scale(i, j, scale) == Ordering::Less;
    let mut out = Vec::new();
    // Deletions of interior points.
    for i in 1..points.len().saturating_sub(1) {
        if less(points[i - 1], points[i + 1]) {
            let mut next = points.to_vec();
            next.remove(i);
            out.push(next);
        }
    }
    // Dropping a duplicated end keeps the endpoints.
    let n = points.len();
    if n >= 2 && points[0] == points[1] {
        out.push(points[1..].to_vec());
    }
    if n >= 2 && points[n - 1] == points[n - 2] {
        out.push(points[..n - 1].to_vec());
    }
    // Insertions between consecutive points.
    for i in 0..points.len().saturating_sub(1) {
        for p in 0..cloud.len() {
            if less(points[i], p) && less(p, points[i + 1]) {
                let mut next = points.to_vec();
                next.insert(i + 1, p);
                out.push(next);
            }
        }
    }
    // Duplicating an end is always a valid insertion.
    out.push({
        let mut next = points.to_vec();
        next.insert(0, points[0]);
        next
    });
    out.push({
        let mut next = points.to_vec();
        next.push(points[n - 1]);
        next
    });
    out
}

/// The homomorphism between scale presentations induced by viewing a
/// fine chain as a coarse chain.
#[derive(Debug, Clone)]
pub struct BondingMap {
    /// Image of each fine generator as a word over the coarse
    /// presentation's original generators.
    pub images: Vec<Word>,
}

impl BondingMap {
    /// Pushes a word over the fine generators through the map.
    pub fn apply(&self, word: &[Letter]) -> Word {
        let mut out = Vec::new();
        for &(g, inv) in word {
            if inv {
                out.extend(invert_word(&self.images[g]));
            } else {
                out.extend_from_slice(&self.images[g]);
            }
        }
        free_reduce(&out)
    }
}

/// Builds the bonding map from scale `fine` to scale `coarse`
/// (`0 < fine <= coarse`): each fine generator, conjugated to the
/// basepoint along the fine spanning tree, is rewritten over the coarse
/// presentation.
pub fn bonding_map<S: Scalar>(
    cloud: &PointCloud<S>,
    fine: &EpsPresentation<S>,
    coarse: &EpsPresentation<S>,
) -> Result<BondingMap, EpsError> {
    if fine.scale <= S::zero() || fine.scale > coarse.scale {
        return Err(EpsError::BadScalePair);
    }
    let mut images = Vec::with_capacity(fine.generators.len());
    for &(i, j) in &fine.generators {
        let mut points = fine.tree_path_from_base(i);
        points.push(j);
        let mut back = fine.tree_path_from_base(j);
        back.reverse();
        points.extend(back);
        let chain = EpsChain { points };
        images.push(coarse.chain_to_word(cloud, &chain)?);
    }
    Ok(BondingMap { images })
}

/// Checks `coarse ∘ mid = direct` on every generator of the finest
/// presentation, deciding equality in the coarse group.
pub fn check_functoriality<S: Scalar>(
    coarse_pres: &EpsPresentation<S>,
    via: &BondingMap,
    lift: &BondingMap,
    direct: &BondingMap,
) -> Verdict {
    let mut verdict = Verdict::Yes;
    for (g, direct_image) in direct.images.iter().enumerate() {
        let composed = via.apply(&lift.images[g]);
        let diff = concat_reduced(&composed, &invert_word(direct_image));
        match coarse_pres.simplified.is_identity(&diff) {
            Some(true) => {}
            Some(false) => return Verdict::No,
            None => verdict = Verdict::Inconclusive,
        }
    }
    verdict
}

/// Per-scale summary plus pairwise stabilization verdicts for a
/// descending list of scales.
#[derive(Debug, Clone)]
pub struct StabilizationReport<S> {
    pub scales: Vec<ScaleSummary<S>>,
    pub pairs: Vec<PairSummary<S>>,
    /// Rank of the contiguous isomorphic run ending at the finest scale.
    pub stable_rank: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ScaleSummary<S> {
    pub scale: S,
    pub edges: usize,
    pub triangles: usize,
    pub generators: usize,
    pub relations: usize,
    pub kind: GroupKind,
    pub boundary_pairs: usize,
}

#[derive(Debug, Clone)]
pub struct PairSummary<S> {
    pub coarse: S,
    pub fine: S,
    pub both_free: bool,
    /// Whether the bonding map is a bijection on generators after
    /// rewriting (only judged when both simplified groups are free).
    pub bonding_iso: Option<bool>,
}

pub fn detect_stabilization<S: Scalar>(
    cloud: &PointCloud<S>,
    scales: &[S],
) -> Result<StabilizationReport<S>, EpsError> {
    for pair in scales.windows(2) {
        if pair[0] <= pair[1] {
            return Err(EpsError::ScalesNotDescending);
        }
    }
    let mut presentations = Vec::new();
    for s in scales {
        presentations.push(delta_group(cloud, s)?);
    }
    let summaries: Vec<ScaleSummary<S>> = presentations
        .iter()
        .map(|p| ScaleSummary {
            scale: p.scale.clone(),
            edges: p.graph.edges.len(),
            triangles: p.graph.triangles.len(),
            generators: p.generators.len(),
            relations: p.presentation.relations.len(),
            kind: p.simplified.kind.clone(),
            boundary_pairs: p.graph.boundary_pairs.len(),
        })
        .collect();
    let mut pairs = Vec::new();
    for w in presentations.windows(2) {
        let (coarse, fine) = (&w[0], &w[1]);
        let both_free = coarse.free_rank().is_some() && fine.free_rank().is_some();
        let bonding_iso = if both_free {
            let map = bonding_map(cloud, fine, coarse)?;
            Some(bonding_is_generator_bijection(coarse, &map, fine))
        } else {
            None
        };
        pairs.push(PairSummary {
            coarse: coarse.scale.clone(),
            fine: fine.scale.clone(),
            both_free,
            bonding_iso,
        });
    }
    let mut stable_rank = None;
    if let Some(last) = pairs.last() {
        if last.bonding_iso == Some(true) {
            stable_rank = presentations
                .last()
                .and_then(|p| p.free_rank());
        }
    }
    Ok(StabilizationReport {
        scales: summaries,
        pairs,
        stable_rank,
    })
}

/// After rewriting into the simplified groups, the map must send the
/// fine survivors bijectively onto the coarse survivors (up to
/// inversion) to certify an isomorphism of free groups.
fn bonding_is_generator_bijection<S: Scalar>(
    coarse: &EpsPresentation<S>,
    map: &BondingMap,
    fine: &EpsPresentation<S>,
) -> bool {
    let coarse_rank = coarse.free_rank().expect("caller checked freeness");
    let fine_rank = fine.free_rank().expect("caller checked freeness");
    if coarse_rank != fine_rank {
        return false;
    }
    let mut hit = vec![false; coarse_rank];
    for orig in 0..fine.generators.len() {
        let image = coarse.simplified.rewrite(&map.images[orig]);
        // Only the surviving fine generators must behave bijectively;
        // eliminated ones are words in the survivors already.
        let fine_image = fine.simplified.rewrite(&[(orig, false)]);
        if fine_image.len() != 1 {
            continue;
        }
        if image.len() != 1 {
            return false;
        }
        let (target, _) = image[0];
        if hit[target] {
            return false;
        }
        hit[target] = true;
    }
    hit.into_iter().all(|h| h)
}

/// Samples a metric graph at mesh `h`: every vertex plus the interior
/// points at offsets `h, 2h, ...` along each edge, with exact intrinsic
/// distances. The resulting cloud cross-validates the epsilon machinery
/// against the covering tree.
pub fn sample_metric_graph<S: Scalar>(
    g: &MetricGraph<S>,
    mesh: &S,
) -> Result<PointCloud<S>, EpsError> {
    if *mesh <= S::zero() {
        return Err(EpsError::NonPositiveMesh);
    }
    let mut points: Vec<GraphPoint<S>> = Vec::new();
    for v in 0..g.vertex_count() {
        points.push(GraphPoint::Vertex(crate::graph::VertexId(v)));
    }
    for (e, rec) in g.edges() {
        let mut offset = mesh.clone();
        while offset < rec.length {
            points.push(GraphPoint::Interior {
                edge: e,
                offset: offset.clone(),
            });
            offset = offset + mesh.clone();
        }
    }
    if !points.contains(g.basepoint()) {
        points.push(g.basepoint().clone());
    }
    let labels: Vec<String> = points.iter().map(|p| g.point_name(p)).collect();
    let mut triples = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            triples.push((
                labels[i].clone(),
                labels[j].clone(),
                g.distance(&points[i], &points[j]),
            ));
        }
    }
    let base = g.point_name(g.basepoint());
    PointCloud::from_distances(labels, triples, Some(base))
}
