//! The covering real tree of a metric graph, materialized lazily: a tree
//! point is a reduced path anchored at the graph basepoint, the root is
//! the constant path, and the endpoint map projects the tree back onto
//! the graph. The tree is never built globally (it is infinite); every
//! operation works through the reduction calculus.

use std::collections::BTreeSet;

use crate::graph::{Dir, GraphPoint, MetricGraph};
use crate::path::{EdgePath, PathError, RhoPath, Step};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("path is not anchored at the graph basepoint")]
    NotAnchored,
    #[error("path error: {0}")]
    Path(#[from] PathError),
    #[error("negative radius {0}")]
    NegativeRadius(String),
    #[error("radius {radius} below required bound {required} for the submetry check")]
    InsufficientRadius { radius: String, required: String },
    #[error("need at least 3 points for a four-point sweep")]
    TooFewPoints,
}

/// A point of the covering tree: a reduced path from the basepoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreePoint<S>(RhoPath<S>);

impl<S: Scalar> TreePoint<S> {
    /// The root: the constant path at the basepoint.
    pub fn root(g: &MetricGraph<S>) -> TreePoint<S> {
        TreePoint(RhoPath::constant(g.basepoint().clone()))
    }

    pub fn new(g: &MetricGraph<S>, path: RhoPath<S>) -> Result<TreePoint<S>, TreeError> {
        if path.start() != g.basepoint() {
            return Err(TreeError::NotAnchored);
        }
        Ok(TreePoint(path))
    }

    pub fn path(&self) -> &RhoPath<S> {
        &self.0
    }

    pub fn into_path(self) -> RhoPath<S> {
        self.0
    }

    /// Projection to the graph: the endpoint map.
    pub fn endpoint(&self, g: &MetricGraph<S>) -> GraphPoint<S> {
        self.0.end(g)
    }

    /// Distance from the root.
    pub fn height(&self) -> S {
        self.0.length()
    }

    pub fn distance(&self, g: &MetricGraph<S>, other: &TreePoint<S>) -> S {
        self.0
            .tree_distance(g, &other.0)
            .expect("tree points share the basepoint")
    }

    pub fn meet(&self, g: &MetricGraph<S>, other: &TreePoint<S>) -> TreePoint<S> {
        TreePoint(self.0.meet(g, &other.0).expect("tree points share the basepoint"))
    }

    pub fn gromov_product(&self, g: &MetricGraph<S>, other: &TreePoint<S>) -> S {
        self.0
            .gromov_product(g, &other.0)
            .expect("tree points share the basepoint")
    }
}

/// The unique lift of a path through the endpoint map, sampled at the
/// step boundaries of the input.
#[derive(Debug, Clone)]
pub struct LiftResult<S> {
    /// Lift samples: entry `k` is the lift after the first `k` steps.
    pub samples: Vec<TreePoint<S>>,
    pub terminal: TreePoint<S>,
    pub lifted_length: S,
}

/// Lifts `c` (starting at the endpoint of `base`) to the tree: after
/// time `t` the lift sits at `base ⋆ reduce(c|[0,t])`. Lift length
/// equals `L(c)` exactly; each sample advances by its step's length.
pub fn lift_path<S: Scalar>(
    g: &MetricGraph<S>,
    base: &TreePoint<S>,
    c: &EdgePath<S>,
) -> Result<LiftResult<S>, TreeError> {
    if *c.start() != base.endpoint(g) {
        return Err(TreeError::Path(PathError::NotComposable));
    }
    let mut samples = Vec::with_capacity(c.steps().len() + 1);
    samples.push(base.clone());
    let mut current = base.path().clone();
    for step in c.steps() {
        let one = RhoPath::from_reduced(
            EdgePath::new(g, step.start_point(g), vec![step.clone()])
                .expect("single step is a valid path"),
        );
        current = current.star(g, &one)?;
        samples.push(TreePoint(current.clone()));
    }
    Ok(LiftResult {
        terminal: TreePoint(current),
        lifted_length: c.length(),
        samples,
    })
}

/// The geodesic between two tree points: descend from the first to the
/// meet, then ascend to the second.
#[derive(Debug, Clone)]
pub struct TreeGeodesic<S> {
    pub from: TreePoint<S>,
    pub to: TreePoint<S>,
    pub meet: TreePoint<S>,
    pub length: S,
}

impl<S: Scalar> TreeGeodesic<S> {
    pub fn new(g: &MetricGraph<S>, from: TreePoint<S>, to: TreePoint<S>) -> TreeGeodesic<S> {
        let meet = from.meet(g, &to);
        let length = from.distance(g, &to);
        TreeGeodesic {
            from,
            to,
            meet,
            length,
        }
    }

    /// Evaluates the geodesic at arclength `t` from its start.
    pub fn eval(&self, g: &MetricGraph<S>, t: &S) -> Result<TreePoint<S>, TreeError> {
        if *t < S::zero() || *t > self.length {
            return Err(TreeError::Path(PathError::LengthOutOfRange(t.to_string())));
        }
        let down = self.from.height() - self.meet.height();
        let path = if *t <= down {
            self.from.path().truncate(g, &(self.from.height() - t.clone()))?
        } else {
            self.to
                .path()
                .truncate(g, &(self.meet.height() + t.clone() - down))?
        };
        Ok(TreePoint(path))
    }
}

/// Exact four-point sweep: over all ordered triples the Gromov product
/// at the root satisfies `(c1,c2) >= min((c1,c3),(c3,c2))`; with
/// `rebase` the sweep re-runs with every listed point as the base, via
/// the basepoint-change isometry `c -> b^{-1} ⋆ c`.
#[derive(Debug, Clone)]
pub struct FourPointReport<S> {
    pub points: usize,
    pub triples_checked: usize,
    pub violations: usize,
    /// Smallest slack seen (nonnegative iff no violations).
    pub min_slack: Option<S>,
    pub rebased: bool,
}

pub fn check_four_point<S: Scalar>(
    g: &MetricGraph<S>,
    points: &[TreePoint<S>],
    rebase: bool,
) -> Result<FourPointReport<S>, TreeError> {
    if points.len() < 3 {
        return Err(TreeError::TooFewPoints);
    }
    let mut triples = 0usize;
    let mut violations = 0usize;
    let mut min_slack: Option<S> = None;

    let mut sweep = |paths: &[RhoPath<S>]| {
        let n = paths.len();
        let mut gp = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                gp[i][j] = paths[i]
                    .gromov_product(g, &paths[j])
                    .expect("rebased paths share a start");
            }
        }
        // Violations need comparisons only; the minimum slack over all
        // triples equals, per pair (i, j), the product minus the best
        // competitor over k, so one subtraction per pair suffices.
        for i in 0..n {
            for j in 0..n {
                let lhs = &gp[i][j];
                let mut best_rhs: Option<&S> = None;
                for k in 0..n {
                    let rhs = (&gp[i][k]).min(&gp[k][j]);
                    if *lhs < *rhs {
                        violations += 1;
                    }
                    if best_rhs.is_none_or(|b| rhs > b) {
                        best_rhs = Some(rhs);
                    }
                    triples += 1;
                }
                let slack = lhs.clone() - best_rhs.expect("k ranges over n >= 3").clone();
                if min_slack.as_ref().is_none_or(|m| slack < *m) {
                    min_slack = Some(slack);
                }
            }
        }
    };

    let base_paths: Vec<RhoPath<S>> = points.iter().map(|p| p.path().clone()).collect();
    sweep(&base_paths);
    if rebase {
        for b in points {
            let k = b.path().inverse(g);
            let rebased: Vec<RhoPath<S>> = points
                .iter()
                .map(|p| k.star(g, p.path()).expect("k ends at the basepoint"))
                .collect();
            // Cross-check against the distance formula at the new base.
            for (i, ci) in points.iter().enumerate() {
                for (j, cj) in points.iter().enumerate() {
                    let via_meet = rebased[i]
                        .gromov_product(g, &rebased[j])
                        .expect("shared start");
                    let via_distances = (b.distance(g, ci) + b.distance(g, cj)
                        - ci.distance(g, cj))
                    .half();
                    assert_eq!(via_meet, via_distances, "Gromov product mismatch");
                }
            }
            sweep(&rebased);
        }
    }
    Ok(FourPointReport {
        points: points.len(),
        triples_checked: triples,
        violations,
        min_slack,
        rebased: rebase,
    })
}

/// The fiber of the endpoint map over a graph point, truncated at a
/// radius: all tree points of height at most `radius` projecting there,
/// in canonical order, with the minimum pairwise tree distance.
#[derive(Debug, Clone)]
pub struct FiberReport<S> {
    pub base_point: GraphPoint<S>,
    pub radius: S,
    pub points: Vec<TreePoint<S>>,
    pub min_pairwise_distance: Option<S>,
}

pub fn fiber<S: Scalar>(
    g: &MetricGraph<S>,
    x: &GraphPoint<S>,
    radius: &S,
) -> Result<FiberReport<S>, TreeError> {
    if *radius < S::zero() {
        return Err(TreeError::NegativeRadius(radius.to_string()));
    }
    let found = reduced_paths_to(g, x, radius);
    let mut min_pairwise: Option<S> = None;
    for i in 0..found.len() {
        for j in (i + 1)..found.len() {
            let d = found[i]
                .tree_distance(g, &found[j])
                .expect("fiber points share the basepoint");
            if min_pairwise.as_ref().is_none_or(|m| d < *m) {
                min_pairwise = Some(d);
            }
        }
    }
    Ok(FiberReport {
        base_point: x.clone(),
        radius: radius.clone(),
        points: found.into_iter().map(TreePoint).collect(),
        min_pairwise_distance: min_pairwise,
    })
}

/// Depth-first enumeration of every reduced vertex-ended path from the
/// basepoint of length at most `budget` (full steps, after an initial
/// germ when the basepoint is interior). Interior endings happen only on
/// a final partial step; [`reduced_paths_to`] appends those.
fn enumerate_reduced<S: Scalar>(
    g: &MetricGraph<S>,
    budget: &S,
    visit: &mut impl FnMut(&RhoPath<S>),
) {
    let start = g.basepoint().clone();
    let mut steps: Vec<Step<S>> = Vec::new();

    fn emit<S: Scalar>(
        g: &MetricGraph<S>,
        start: &GraphPoint<S>,
        steps: &[Step<S>],
        visit: &mut impl FnMut(&RhoPath<S>),
    ) {
        let path = RhoPath::from_reduced(
            EdgePath::new(g, start.clone(), steps.to_vec()).expect("enumerated steps chain"),
        );
        visit(&path);
    }

    // Candidate next steps out of a vertex, excluding the backtracking
    // germ; partial variants (ending mid-edge) are emitted by the caller.
    fn extend<S: Scalar>(
        g: &MetricGraph<S>,
        start: &GraphPoint<S>,
        steps: &mut Vec<Step<S>>,
        at: crate::graph::VertexId,
        remaining: &S,
        visit: &mut impl FnMut(&RhoPath<S>),
    ) {
        for &(e, dir) in g.incident(at) {
            let full = Step::full(g, e, dir);
            if let Some(last) = steps.last() {
                if last.edge == e
                    && last.dir == dir.flip()
                    && last.end_offset() == full.start_offset()
                {
                    continue; // immediate backtrack
                }
            }
            let len = full.length();
            // Partial endings inside this edge, at every offset that some
            // caller could ask about, are infinite in number; emit only
            // the full-step extension and let fiber targets handle
            // interior endpoints separately.
            if len > *remaining {
                continue;
            }
            let next_remaining = remaining.clone() - len;
            let next_vertex = g.step_target(e, dir);
            steps.push(full);
            emit(g, start, steps, visit);
            extend(g, start, steps, next_vertex, &next_remaining, visit);
            steps.pop();
        }
    }

    // The empty path.
    emit(g, &start, &steps, visit);
    match start.clone() {
        GraphPoint::Vertex(v) => {
            extend(g, &start, &mut steps, v, budget, visit);
        }
        GraphPoint::Interior { edge, offset } => {
            // Two initial germs: down to the tail, up to the head. Each
            // may stop mid-edge (emitted) or continue from the vertex.
            let rec = g.edge(edge);
            let down = Step {
                edge,
                dir: Dir::Backward,
                lo: S::zero(),
                hi: offset.clone(),
            };
            let up = Step {
                edge,
                dir: Dir::Forward,
                lo: offset.clone(),
                hi: rec.length.clone(),
            };
            for first in [down, up] {
                let len = first.length();
                if len > *budget {
                    continue;
                }
                let v = g.step_target(first.edge, first.dir);
                let next_remaining = budget.clone() - len;
                steps.push(first);
                emit(g, &start, &steps, visit);
                extend(g, &start, &mut steps, v, &next_remaining, visit);
                steps.pop();
            }
        }
    }
}

/// All reduced paths from the basepoint to `x` with length at most
/// `radius`. Interior targets need the partial final step appended to
/// the vertex-ended enumeration.
fn reduced_paths_to<S: Scalar>(
    g: &MetricGraph<S>,
    x: &GraphPoint<S>,
    radius: &S,
) -> Vec<RhoPath<S>> {
    let mut out: Vec<RhoPath<S>> = Vec::new();
    enumerate_reduced(g, radius, &mut |path: &RhoPath<S>| {
        if path.end(g) == *x {
            out.push(path.clone());
        }
    });
    if let GraphPoint::Interior { edge, offset } = x {
        // Vertex-ended prefixes extended by a partial step into x.
        let rec = g.edge(*edge);
        let from_tail = Step {
            edge: *edge,
            dir: Dir::Forward,
            lo: S::zero(),
            hi: offset.clone(),
        };
        let from_head = Step {
            edge: *edge,
            dir: Dir::Backward,
            lo: offset.clone(),
            hi: rec.length.clone(),
        };
        for last in [from_tail, from_head] {
            let entry = g.step_source(last.edge, last.dir);
            let need = last.length();
            if need > *radius {
                continue;
            }
            let prefix_budget = radius.clone() - need.clone();
            enumerate_reduced(g, &prefix_budget, &mut |path: &RhoPath<S>| {
                if path.end(g) != GraphPoint::Vertex(entry) {
                    return;
                }
                if let Some(tail_step) = path.steps().last() {
                    if tail_step.edge == last.edge
                        && tail_step.dir == last.dir.flip()
                        && tail_step.end_offset() == last.start_offset()
                    {
                        return; // would backtrack into the final germ
                    }
                }
                let mut steps = path.steps().to_vec();
                steps.push(last.clone());
                let full = RhoPath::from_reduced(
                    EdgePath::new(g, path.start().clone(), steps)
                        .expect("extension chains"),
                );
                out.push(full);
            });
        }
        // A basepoint inside the same edge reaches x by a direct partial
        // run that never touches a vertex.
        if let GraphPoint::Interior {
            edge: e0,
            offset: s,
        } = g.basepoint()
        {
            if e0 == edge && s != offset {
                let step = if offset > s {
                    Step {
                        edge: *edge,
                        dir: Dir::Forward,
                        lo: s.clone(),
                        hi: offset.clone(),
                    }
                } else {
                    Step {
                        edge: *edge,
                        dir: Dir::Backward,
                        lo: offset.clone(),
                        hi: s.clone(),
                    }
                };
                if step.length() <= *radius {
                    out.push(RhoPath::from_reduced(
                        EdgePath::new(g, g.basepoint().clone(), vec![step])
                            .expect("direct run is valid"),
                    ));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.length(), a).cmp(&(b.length(), b)));
    out.dedup();
    out
}

/// Hausdorff distance between truncated fibers, which must equal the
/// base distance exactly; the minimum over the partner fiber is attained
/// on metric graphs (they are geodesic). `guard` is the diameter of a
/// generating loop set; the radius must be at least `d(x,y) + guard` so
/// the truncation provably contains every attaining partner.
#[derive(Debug, Clone)]
pub struct HausdorffReport<S> {
    pub base_distance: S,
    pub hausdorff_distance: S,
    pub radius: S,
    /// Radius used for the partner fibers to keep infima exact.
    pub extended_radius: S,
    pub fiber_sizes: (usize, usize),
    /// Every directed infimum was attained by an exact witness.
    pub minimum_attained: bool,
}

pub fn fiber_hausdorff_distance<S: Scalar>(
    g: &MetricGraph<S>,
    x: &GraphPoint<S>,
    y: &GraphPoint<S>,
    radius: &S,
    guard: &S,
) -> Result<HausdorffReport<S>, TreeError> {
    let base = g.distance(x, y);
    let required = base.clone() + guard.clone();
    if *radius < required {
        return Err(TreeError::InsufficientRadius {
            radius: radius.to_string(),
            required: required.to_string(),
        });
    }
    // Any fiber point within `radius` has a partner within distance
    // `base`, hence of height at most `radius + base`: enumerating the
    // partner side that far keeps every infimum exact.
    let extended = radius.clone() + base.clone();
    let fx = reduced_paths_to(g, x, radius);
    let fy_ext = reduced_paths_to(g, y, &extended);
    let fy = reduced_paths_to(g, y, radius);
    let fx_ext = reduced_paths_to(g, x, &extended);

    let mut hausdorff = S::zero();
    let mut attained = true;
    // Partners with |L(p) - L(q)| > base sit farther than base away, so
    // the scan over the (length-sorted) partner fiber can stop early:
    // any minimum at most base is found inside the window, and a miss
    // still reports a value above base.
    let mut directed = |from: &[RhoPath<S>], to: &[RhoPath<S>]| {
        let mut sup = S::zero();
        for p in from {
            let mut best: Option<S> = None;
            for q in to {
                if q.length() > p.length() + base.clone() {
                    break;
                }
                let d = p.tree_distance(g, q).expect("shared basepoint");
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
            let best = best.unwrap_or_else(|| base.clone() + S::one());
            if best != base {
                attained = false;
            }
            if best > sup {
                sup = best;
            }
        }
        sup
    };
    let s1 = directed(&fx, &fy_ext);
    let s2 = directed(&fy, &fx_ext);
    if s1 > hausdorff {
        hausdorff = s1;
    }
    if s2 > hausdorff {
        hausdorff = s2;
    }
    Ok(HausdorffReport {
        base_distance: base,
        hausdorff_distance: hausdorff,
        radius: radius.clone(),
        extended_radius: extended,
        fiber_sizes: (fx.len(), fy.len()),
        minimum_attained: attained,
    })
}

/// Length of the shortest essential loop through `x` (enumerated up to
/// the total edge length, which always suffices on a graph with a
/// cycle); `None` on trees.
pub fn shortest_essential_loop_through<S: Scalar>(
    g: &MetricGraph<S>,
    x: &GraphPoint<S>,
) -> Option<S> {
    if g.cycle_rank() == 0 {
        return None;
    }
    let rebased = g.with_basepoint(x.clone());
    // A loop through x exists of length at most twice the distance to a
    // cycle plus the cycle itself; 3 * total length is a safe cap.
    let cap = g.total_length() * S::from_int(3);
    reduced_paths_to(&rebased, x, &cap)
        .into_iter()
        .filter(|p| !p.is_constant())
        .map(|p| p.length())
        .min()
}

/// Collects the distinct endpoints of a set of tree points (handy for
/// canonical reports).
pub fn distinct_endpoints<S: Scalar>(
    g: &MetricGraph<S>,
    points: &[TreePoint<S>],
) -> BTreeSet<GraphPoint<S>> {
    points.iter().map(|p| p.endpoint(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::path::parse_path;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_fraction(n, d)
    }

    fn tp(g: &MetricGraph<Rational>, text: &str) -> TreePoint<Rational> {
        TreePoint::new(g, parse_path(g, text).unwrap().reduce(g)).unwrap()
    }

    #[test]
    fn endpoint_examples() {
        let g: MetricGraph<Rational> = fixtures::theta();
        assert_eq!(
            TreePoint::root(&g).endpoint(&g),
            g.parse_point("u").unwrap()
        );
        assert_eq!(tp(&g, "+a").endpoint(&g), g.parse_point("v").unwrap());
        assert_eq!(tp(&g, "+a -b").endpoint(&g), g.parse_point("u").unwrap());
        // Anchoring is enforced.
        let from_v = parse_path(&g, "-a").unwrap().reduce(&g);
        assert!(matches!(
            TreePoint::new(&g, from_v),
            Err(TreeError::NotAnchored)
        ));
    }

    #[test]
    fn lift_of_a_reduced_path() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let root = TreePoint::root(&g);
        let c = parse_path(&g, "+a").unwrap();
        let lift = lift_path(&g, &root, &c).unwrap();
        assert_eq!(lift.terminal, tp(&g, "+a"));
        assert_eq!(lift.lifted_length, q(1, 1));
        assert_eq!(lift.samples.len(), 2);
    }

    #[test]
    fn lift_of_a_null_homotopic_loop_closes_out_and_back() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let root = TreePoint::root(&g);
        let c = parse_path(&g, "+a -a").unwrap();
        let lift = lift_path(&g, &root, &c).unwrap();
        assert_eq!(lift.terminal, root, "closed lift");
        assert_eq!(lift.lifted_length, q(2, 1), "travels out and back");
        // Sample heights: 0, 1, 0.
        let heights: Vec<Rational> =
            lift.samples.iter().map(|p| p.height()).collect();
        assert_eq!(heights, vec![q(0, 1), q(1, 1), q(0, 1)]);
    }

    #[test]
    fn lift_of_an_essential_loop_is_open() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let root = TreePoint::root(&g);
        let c = parse_path(&g, "+a -b").unwrap();
        let lift = lift_path(&g, &root, &c).unwrap();
        assert_ne!(lift.terminal, root);
        assert_eq!(lift.terminal, tp(&g, "+a -b"));
        assert_eq!(lift.lifted_length, q(2, 1));
    }

    #[test]
    fn lift_samples_advance_by_step_lengths_and_project_back() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for g in [fixtures::theta::<Rational>(), fixtures::rose2()] {
            let root = TreePoint::root(&g);
            for _ in 0..100 {
                let c = crate::sampling::random_edge_path(&g, g.basepoint().clone(), 7, &mut rng);
                let lift = lift_path(&g, &root, &c).unwrap();
                assert_eq!(lift.lifted_length, c.length());
                // Projection: samples sit over the step boundary points.
                let mut at = c.start().clone();
                assert_eq!(lift.samples[0].endpoint(&g), at);
                for (k, step) in c.steps().iter().enumerate() {
                    at = step.end_point(&g);
                    assert_eq!(lift.samples[k + 1].endpoint(&g), at);
                    let moved =
                        lift.samples[k].distance(&g, &lift.samples[k + 1]);
                    assert_eq!(moved, step.length());
                }
                assert_eq!(lift.terminal.endpoint(&g), c.end(&g));
                // 1-Lipschitz endpoint map on the samples.
                for i in 0..lift.samples.len() {
                    for j in (i + 1)..lift.samples.len() {
                        let down = g.distance(
                            &lift.samples[i].endpoint(&g),
                            &lift.samples[j].endpoint(&g),
                        );
                        assert!(down <= lift.samples[i].distance(&g, &lift.samples[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn lift_is_unique_among_fiber_candidates() {
        // At each step boundary, exactly one point of the fiber over the
        // projected point is reached from the previous sample by a
        // geodesic that projects pointwise onto the step; that point is
        // the lift sample. Several fiber points can share the right
        // distance, so the pointwise projection is what disambiguates.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let g = fixtures::theta();
        let root = TreePoint::root(&g);
        for _ in 0..25 {
            let c = crate::sampling::random_edge_path(&g, g.basepoint().clone(), 4, &mut rng);
            let lift = lift_path(&g, &root, &c).unwrap();
            let mut height_cap = q(0, 1);
            for (k, step) in c.steps().iter().enumerate() {
                height_cap += step.length();
                let over = step.end_point(&g);
                let candidates = fiber(&g, &over, &height_cap).unwrap();
                let projects_onto_step = |p: &TreePoint<Rational>| {
                    if lift.samples[k].distance(&g, p) != step.length() {
                        return false;
                    }
                    let geo = TreeGeodesic::new(&g, lift.samples[k].clone(), p.clone());
                    for numer in 1..4 {
                        let t = step.length() * q(numer, 4);
                        let on_tree = geo.eval(&g, &t).unwrap().endpoint(&g);
                        let offset = match step.dir {
                            Dir::Forward => step.lo.clone() + t,
                            Dir::Backward => step.hi.clone() - t,
                        };
                        let on_graph = g.point_on_edge(step.edge, offset).unwrap();
                        if on_tree != on_graph {
                            return false;
                        }
                    }
                    true
                };
                let matching: Vec<_> = candidates
                    .points
                    .iter()
                    .filter(|p| projects_onto_step(p))
                    .collect();
                assert_eq!(matching.len(), 1, "unique continuation");
                assert_eq!(matching[0], &lift.samples[k + 1]);
            }
        }
    }

    #[test]
    fn geodesic_through_meet() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let a = tp(&g, "+a");
        let b = tp(&g, "+b");
        let geo = TreeGeodesic::new(&g, a.clone(), b.clone());
        assert_eq!(geo.length, q(2, 1));
        assert_eq!(geo.meet, TreePoint::root(&g));
        assert_eq!(geo.eval(&g, &q(0, 1)).unwrap(), a);
        assert_eq!(geo.eval(&g, &q(1, 1)).unwrap(), TreePoint::root(&g));
        assert_eq!(geo.eval(&g, &q(2, 1)).unwrap(), b);
        // Midpoints descend the first leg.
        assert_eq!(geo.eval(&g, &q(1, 2)).unwrap(), tp(&g, "+a@[0,1/2]"));
        assert!(geo.eval(&g, &q(5, 2)).is_err());
    }

    #[test]
    fn geodesic_avoiding_root() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let a = tp(&g, "+a");
        let ab = tp(&g, "+a -b");
        let geo = TreeGeodesic::new(&g, a.clone(), ab.clone());
        assert_eq!(geo.length, q(1, 1));
        assert_eq!(geo.meet, a);
        // No evaluation point is the root.
        for k in 0..=8 {
            let p = geo.eval(&g, &q(k, 8)).unwrap();
            assert_ne!(p, TreePoint::root(&g));
        }
        // Degenerate geodesic.
        let geo = TreeGeodesic::new(&g, a.clone(), a.clone());
        assert_eq!(geo.length, q(0, 1));
        assert_eq!(geo.eval(&g, &q(0, 1)).unwrap(), a);
    }

    #[test]
    fn geodesic_length_matches_distance_on_random_pairs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let g: MetricGraph<Rational> = fixtures::rose2();
        let pts: Vec<TreePoint<Rational>> = (0..12)
            .map(|_| {
                let w = crate::sampling::random_edge_path(&g, g.basepoint().clone(), 6, &mut rng);
                TreePoint::new(&g, w.reduce(&g)).unwrap()
            })
            .collect();
        for p in &pts {
            for r in &pts {
                let geo = TreeGeodesic::new(&g, p.clone(), r.clone());
                assert_eq!(geo.length, p.distance(&g, r));
                // The geodesic passes through the meet.
                let down = p.height() - geo.meet.height();
                assert_eq!(geo.eval(&g, &down).unwrap(), geo.meet);
            }
        }
    }

    #[test]
    fn four_point_on_named_points() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let pts = vec![
            TreePoint::root(&g),
            tp(&g, "+a"),
            tp(&g, "+b"),
            tp(&g, "+a -b"),
        ];
        let report = check_four_point(&g, &pts, true).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.min_slack.unwrap() >= q(0, 1));
        assert_eq!(report.triples_checked, 4usize.pow(3) * 5);

        // Repeated points: degenerate equality attains slack 0.
        let pts = vec![tp(&g, "+a"), tp(&g, "+a"), tp(&g, "+b")];
        let report = check_four_point(&g, &pts, false).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.min_slack.unwrap(), q(0, 1));

        assert!(check_four_point(&g, &pts[..2], false).is_err());
    }

    #[test]
    fn four_point_random_sweep_is_exactly_hyperbolic() {
        use rand::SeedableRng;
        let g: MetricGraph<Rational> = fixtures::theta();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<TreePoint<Rational>> = (0..200)
            .map(|_| {
                let w = crate::sampling::random_edge_path(&g, g.basepoint().clone(), 6, &mut rng);
                TreePoint::new(&g, w.reduce(&g)).unwrap()
            })
            .collect();
        let report = check_four_point(&g, &pts, false).unwrap();
        assert_eq!(report.triples_checked, 200 * 200 * 200);
        assert_eq!(report.violations, 0);
        assert!(report.min_slack.unwrap() >= q(0, 1));
    }

    #[test]
    fn fiber_examples_on_theta() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let u = g.parse_point("u").unwrap();
        let report = fiber(&g, &u, &q(2, 1)).unwrap();
        let expect: Vec<TreePoint<Rational>> = vec![
            TreePoint::root(&g),
            tp(&g, "+a -b"),
            tp(&g, "+a -c"),
            tp(&g, "+b -a"),
            tp(&g, "+b -c"),
            tp(&g, "+c -a"),
            tp(&g, "+c -b"),
        ];
        assert_eq!(report.points.len(), 7);
        for e in &expect {
            assert!(report.points.contains(e), "missing {:?}", e);
        }
        assert_eq!(report.min_pairwise_distance, Some(q(2, 1)));

        let report = fiber(&g, &u, &q(1, 2)).unwrap();
        assert_eq!(report.points, vec![TreePoint::root(&g)]);

        let mid = g.parse_point("a@1/2").unwrap();
        let report = fiber(&g, &mid, &q(1, 1)).unwrap();
        assert_eq!(report.points.len(), 1);
        assert_eq!(report.points[0], tp(&g, "+a@[0,1/2]"));
        // Any second preimage needs length >= 3/2; both detour routes
        // (through b and through c) arrive at exactly 3/2.
        let report = fiber(&g, &mid, &q(3, 2)).unwrap();
        assert_eq!(report.points.len(), 3);

        assert!(fiber(&g, &u, &q(-1, 1)).is_err());
    }

    #[test]
    fn fiber_discreteness_respects_systole() {
        let g: MetricGraph<Rational> = fixtures::theta();
        for name in ["u", "v", "a@1/2", "c@1/4"] {
            let x = g.parse_point(name).unwrap();
            let report = fiber(&g, &x, &q(4, 1)).unwrap();
            if report.points.len() >= 2 {
                let min = report.min_pairwise_distance.clone().unwrap();
                assert!(min > q(0, 1));
                let systole = shortest_essential_loop_through(&g, &x).unwrap();
                assert!(min >= systole);
            }
        }
    }

    #[test]
    fn hausdorff_matches_base_distance() {
        let g: MetricGraph<Rational> = fixtures::theta();
        let guard = q(2, 1); // generator loops on theta have length 2
        let u = g.parse_point("u").unwrap();
        let v = g.parse_point("v").unwrap();
        let rep = fiber_hausdorff_distance(&g, &u, &v, &q(4, 1), &guard).unwrap();
        assert_eq!(rep.base_distance, q(1, 1));
        assert_eq!(rep.hausdorff_distance, q(1, 1));
        assert!(rep.minimum_attained);

        let rep = fiber_hausdorff_distance(&g, &u, &u, &q(4, 1), &guard).unwrap();
        assert_eq!(rep.hausdorff_distance, q(0, 1));

        let mid = g.parse_point("a@1/2").unwrap();
        let rep = fiber_hausdorff_distance(&g, &u, &mid, &q(4, 1), &guard).unwrap();
        assert_eq!(rep.hausdorff_distance, q(1, 2));
        assert!(rep.minimum_attained);

        // Insufficient radius is flagged, not silently wrong.
        assert!(matches!(
            fiber_hausdorff_distance(&g, &u, &v, &q(2, 1), &guard),
            Err(TreeError::InsufficientRadius { .. })
        ));
    }

    #[test]
    fn systole_oracle() {
        let theta = fixtures::theta();
        let u = theta.parse_point("u").unwrap();
        assert_eq!(shortest_essential_loop_through(&theta, &u), Some(q(2, 1)));
        let mid = theta.parse_point("a@1/2").unwrap();
        assert_eq!(
            shortest_essential_loop_through(&theta, &mid),
            Some(q(2, 1))
        );
        let rose = fixtures::rose2();
        let w = rose.parse_point("w").unwrap();
        assert_eq!(shortest_essential_loop_through(&rose, &w), Some(q(1, 1)));
        // Trees have no essential loops.
        let segment = MetricGraph::<Rational>::parse("v a\nv b\ne s a b 1\n").unwrap();
        let pa = segment.parse_point("a").unwrap();
        assert_eq!(shortest_essential_loop_through(&segment, &pa), None);
    }
}
