//! The loop group of a metric graph: the group of reduced loops at the
//! basepoint under cancelled concatenation. On a graph it is free; a
//! deterministic spanning tree gives one generator loop per non-tree
//! edge, and words in those generators act freely by isometries on the
//! covering tree by left multiplication.

use std::collections::HashMap;
use std::fmt;

use crate::graph::{Dir, EdgeId, GraphPoint, MetricGraph, VertexId};
use crate::path::{EdgePath, PathError, RhoPath, Step};
use crate::scalar::Scalar;
use crate::tree::TreePoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("malformed word token {0:?}")]
    MalformedToken(String),
    #[error("path is not a loop at the required point")]
    NotLoop,
    #[error("rebasing path does not end at the basepoint")]
    EndpointMismatch,
    #[error("path error: {0}")]
    Path(#[from] PathError),
}

/// A freely reduced word in the loop-group generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LoopWord {
    letters: Vec<(usize, bool)>,
}

impl LoopWord {
    pub fn identity() -> LoopWord {
        LoopWord::default()
    }

    /// Builds a word, freely reducing adjacent inverse pairs.
    pub fn new(letters: Vec<(usize, bool)>) -> LoopWord {
        let mut out: Vec<(usize, bool)> = Vec::with_capacity(letters.len());
        for l in letters {
            match out.last() {
                Some(&last) if last.0 == l.0 && last.1 != l.1 => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        LoopWord { letters: out }
    }

    pub fn generator(index: usize) -> LoopWord {
        LoopWord {
            letters: vec![(index, false)],
        }
    }

    pub fn letters(&self) -> &[(usize, bool)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> LoopWord {
        LoopWord {
            letters: self.letters.iter().rev().map(|&(g, i)| (g, !i)).collect(),
        }
    }

    /// Freely reduced product.
    pub fn concat(&self, other: &LoopWord) -> LoopWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        LoopWord::new(letters)
    }

    /// Conjugate `u w u^-1`.
    pub fn conjugate_by(&self, u: &LoopWord) -> LoopWord {
        u.concat(self).concat(&u.inverse())
    }
}

/// Generators of the loop group for one graph: a spanning tree chosen
/// lexicographically by edge id, one loop per non-tree edge.
#[derive(Debug, Clone)]
pub struct GeneratorSet<S> {
    base: GraphPoint<S>,
    names: Vec<String>,
    loops: Vec<RhoPath<S>>,
    tree_edges: Vec<EdgeId>,
    non_tree_edges: Vec<EdgeId>,
    /// Interior witness offset per non-tree edge: a reduced loop crosses
    /// the witness of edge `e` exactly once per occurrence of `g_e`.
    witnesses: Vec<(EdgeId, S)>,
}

impl<S: Scalar> GeneratorSet<S> {
    pub fn rank(&self) -> usize {
        self.loops.len()
    }

    pub fn base(&self) -> &GraphPoint<S> {
        &self.base
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn loop_path(&self, index: usize) -> &RhoPath<S> {
        &self.loops[index]
    }

    pub fn loops(&self) -> &[RhoPath<S>] {
        &self.loops
    }

    pub fn tree_edges(&self) -> &[EdgeId] {
        &self.tree_edges
    }

    pub fn non_tree_edges(&self) -> &[EdgeId] {
        &self.non_tree_edges
    }

    /// Length of the longest generator loop (0 for trees).
    pub fn max_loop_length(&self) -> S {
        self.loops
            .iter()
            .map(|l| l.length())
            .max()
            .unwrap_or_else(S::zero)
    }

    /// Shortest non-tree edge length: a reduced loop evaluating a word of
    /// `n` letters has length at least `n` times this.
    pub fn min_non_tree_edge_length(&self, g: &MetricGraph<S>) -> Option<S> {
        self.non_tree_edges
            .iter()
            .map(|&e| g.edge(e).length.clone())
            .min()
    }

    /// Parses word syntax: whitespace-separated generator tokens with an
    /// optional `^-1` suffix, e.g. `g_b g_c^-1`. Empty text is the
    /// identity.
    pub fn parse_word(&self, text: &str) -> Result<LoopWord, GroupError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(name) => (name, true),
                None => {
                    if tok.contains('^') {
                        return Err(GroupError::MalformedToken(tok.to_string()));
                    }
                    (tok, false)
                }
            };
            let index = self
                .index_of(name)
                .ok_or_else(|| GroupError::UnknownGenerator(name.to_string()))?;
            letters.push((index, inv));
        }
        Ok(LoopWord::new(letters))
    }

    pub fn render_word(&self, w: &LoopWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|&(g, inv)| {
                if inv {
                    format!("{}^-1", self.names[g])
                } else {
                    self.names[g].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl<S: Scalar> fmt::Display for GeneratorSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "free generators of rank {}: {}", self.rank(), self.names.join(", "))
    }
}

/// Builds the generator set: Kruskal over edges in id order yields the
/// lexicographically least spanning tree; each non-tree edge `e` gives
/// the loop (tree path to its tail) * e * (tree path from its head),
/// reduced, conjugated down to an interior basepoint when needed.
pub fn generators<S: Scalar>(g: &MetricGraph<S>) -> GeneratorSet<S> {
    let mut edge_order: Vec<EdgeId> = g.edges().map(|(e, _)| e).collect();
    edge_order.sort_by(|a, b| g.edge(*a).id.cmp(&g.edge(*b).id));

    let mut leader: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(leader: &mut [usize], mut v: usize) -> usize {
        while leader[v] != v {
            leader[v] = leader[leader[v]];
            v = leader[v];
        }
        v
    }
    let mut tree_edges = Vec::new();
    let mut non_tree_edges = Vec::new();
    for e in edge_order {
        let t = find(&mut leader, g.edge(e).tail.0);
        let h = find(&mut leader, g.edge(e).head.0);
        if t == h {
            non_tree_edges.push(e);
        } else {
            leader[t] = h;
            tree_edges.push(e);
        }
    }

    // Anchor vertex: the basepoint itself, or the tail of its edge.
    let (anchor, prefix) = match g.basepoint() {
        GraphPoint::Vertex(v) => (*v, None),
        GraphPoint::Interior { edge, offset } => {
            let step = Step {
                edge: *edge,
                dir: Dir::Backward,
                lo: S::zero(),
                hi: offset.clone(),
            };
            let path = RhoPath::from_reduced(
                EdgePath::new(g, g.basepoint().clone(), vec![step]).expect("germ to tail"),
            );
            (g.edge(*edge).tail, Some(path))
        }
    };

    // BFS parents in the spanning tree, giving reduced anchor-to-vertex
    // paths.
    let mut parent: HashMap<VertexId, (VertexId, EdgeId, Dir)> = HashMap::new();
    let mut order = vec![anchor];
    let mut seen = vec![false; g.vertex_count()];
    seen[anchor.0] = true;
    let mut qi = 0;
    while qi < order.len() {
        let v = order[qi];
        qi += 1;
        for &(e, dir) in g.incident(v) {
            if !tree_edges.contains(&e) {
                continue;
            }
            let w = g.step_target(e, dir);
            if !seen[w.0] {
                seen[w.0] = true;
                parent.insert(w, (v, e, dir));
                order.push(w);
            }
        }
    }
    let path_from_anchor = |v: VertexId| -> RhoPath<S> {
        let mut chain: Vec<Step<S>> = Vec::new();
        let mut at = v;
        while at != anchor {
            let (p, e, dir) = parent[&at];
            chain.push(Step::full(g, e, dir));
            at = p;
        }
        chain.reverse();
        RhoPath::from_reduced(
            EdgePath::new(g, GraphPoint::Vertex(anchor), chain).expect("tree path chains"),
        )
    };

    let mut names = Vec::new();
    let mut loops = Vec::new();
    let mut witnesses = Vec::new();
    for &e in &non_tree_edges {
        let rec = g.edge(e);
        let to_tail = path_from_anchor(rec.tail);
        let across = RhoPath::from_reduced(
            EdgePath::new(
                g,
                GraphPoint::Vertex(rec.tail),
                vec![Step::full(g, e, Dir::Forward)],
            )
            .expect("edge step"),
        );
        let from_head = path_from_anchor(rec.head).inverse(g);
        let mut loop_path = to_tail
            .star(g, &across)
            .and_then(|p| p.star(g, &from_head))
            .expect("generator pieces chain");
        if let Some(prefix) = &prefix {
            loop_path = prefix
                .star(g, &loop_path)
                .and_then(|p| p.star(g, &prefix.inverse(g)))
                .expect("conjugation chains");
        }
        debug_assert!(loop_path.is_loop(g) && !loop_path.is_constant());
        names.push(format!("g_{}", rec.id));
        loops.push(loop_path);
        let witness = match g.basepoint() {
            GraphPoint::Interior { edge, offset } if *edge == e => offset.half(),
            _ => rec.length.half(),
        };
        witnesses.push((e, witness));
    }

    GeneratorSet {
        base: g.basepoint().clone(),
        names,
        loops,
        tree_edges,
        non_tree_edges,
        witnesses,
    }
}

/// Evaluates a word to its reduced loop at the basepoint: the star
/// product of the generator loops. Injective, since the loop group of a
/// graph is free on these generators.
pub fn evaluate_word<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    word: &LoopWord,
) -> Result<RhoPath<S>, GroupError> {
    let mut acc = RhoPath::constant(gens.base.clone());
    for &(index, inv) in word.letters() {
        let factor = gens
            .loops
            .get(index)
            .ok_or(GroupError::IndexOutOfRange(index))?;
        let factor = if inv { factor.inverse(g) } else { factor.clone() };
        acc = acc.star(g, &factor)?;
    }
    debug_assert_eq!(
        acc.as_edge_path().reduce(g),
        acc,
        "star products stay reduced"
    );
    Ok(acc)
}

/// The left action of a word on a tree point: `evaluate(w) ⋆ p`.
/// Isometric, and free for nontrivial words.
pub fn act<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    word: &LoopWord,
    p: &TreePoint<S>,
) -> Result<TreePoint<S>, GroupError> {
    let loop_path = evaluate_word(g, gens, word)?;
    let moved = loop_path.star(g, p.path())?;
    Ok(TreePoint::new(g, moved).expect("action preserves the anchor"))
}

/// The basepoint-change isometry: a path `k` from a new basepoint to the
/// old one sends `c` to `k ⋆ c`, preserving all pairwise tree distances
/// and the endpoint projection.
pub fn rebase<S: Scalar>(
    g: &MetricGraph<S>,
    k: &RhoPath<S>,
    c: &RhoPath<S>,
) -> Result<RhoPath<S>, GroupError> {
    if k.end(g) != *c.start() {
        return Err(GroupError::EndpointMismatch);
    }
    Ok(k.star(g, c)?)
}

/// The basepoint-change isomorphism on loops: `k ⋆ l ⋆ k^-1`, a loop at
/// the start of `k`.
pub fn conjugate_rebase<S: Scalar>(
    g: &MetricGraph<S>,
    k: &RhoPath<S>,
    l: &RhoPath<S>,
) -> Result<RhoPath<S>, GroupError> {
    if !l.is_loop(g) {
        return Err(GroupError::NotLoop);
    }
    if k.end(g) != *l.start() {
        return Err(GroupError::EndpointMismatch);
    }
    let out = k.star(g, l)?.star(g, &k.inverse(g))?;
    debug_assert!(out.is_loop(g));
    Ok(out)
}

/// Reads the word of a loop at the basepoint: one letter per crossing of
/// a non-tree edge's witness point in the reduced form. This is the
/// projection of the rectifiable-loop group onto the loop group; loops
/// contracting within their own image map to the identity.
pub fn project_homotopy_class<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    c: &EdgePath<S>,
) -> Result<LoopWord, GroupError> {
    if c.start() != &gens.base || !c.is_loop(g) {
        return Err(GroupError::NotLoop);
    }
    let reduced = c.reduce(g);
    let mut letters = Vec::new();
    for step in reduced.steps() {
        for (index, (e, witness)) in gens.witnesses.iter().enumerate() {
            if step.edge == *e && step.lo < *witness && *witness < step.hi {
                letters.push((index, step.dir == Dir::Backward));
            }
        }
    }
    let word = LoopWord::new(letters);
    debug_assert_eq!(
        evaluate_word(g, gens, &word).expect("projected word evaluates"),
        reduced,
        "crossing word reproduces the reduced loop"
    );
    Ok(word)
}

/// Enumerates every freely reduced word of length at most `max_len`
/// whose evaluated loop has length at most `eval_budget`, invoking the
/// visitor with both.
pub fn sweep_words<S: Scalar>(
    g: &MetricGraph<S>,
    gens: &GeneratorSet<S>,
    max_len: usize,
    eval_budget: Option<&S>,
    visit: &mut impl FnMut(&LoopWord, &RhoPath<S>),
) {
    fn go<S: Scalar>(
        g: &MetricGraph<S>,
        gens: &GeneratorSet<S>,
        letters: &mut Vec<(usize, bool)>,
        current: &RhoPath<S>,
        remaining: usize,
        eval_budget: Option<&S>,
        visit: &mut impl FnMut(&LoopWord, &RhoPath<S>),
    ) {
        visit(&LoopWord { letters: letters.clone() }, current);
        if remaining == 0 {
            return;
        }
        if let Some(budget) = eval_budget {
            // A reduced word of k letters crosses a non-tree edge k
            // times, so its evaluated loop has length at least k times
            // the shortest non-tree edge: once that clears the budget no
            // descendant can come back under it.
            if let Some(min_gain) = gens.min_non_tree_edge_length(g) {
                let floor = min_gain * S::from_int(letters.len() as i64 + 1);
                if floor > *budget {
                    return;
                }
            }
        }
        for index in 0..gens.rank() {
            for inv in [false, true] {
                if letters.last() == Some(&(index, !inv)) {
                    continue; // not freely reduced
                }
                let factor = if inv {
                    gens.loops[index].inverse(g)
                } else {
                    gens.loops[index].clone()
                };
                let next = current.star(g, &factor).expect("loops compose");
                letters.push((index, inv));
                go(g, gens, letters, &next, remaining - 1, eval_budget, visit);
                letters.pop();
            }
        }
    }
    let mut letters = Vec::new();
    let identity = RhoPath::constant(gens.base.clone());
    go(g, gens, &mut letters, &identity, max_len, eval_budget, visit);
}
