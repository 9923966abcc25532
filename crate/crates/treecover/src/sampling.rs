//! Seeded random generators for paths, words and graphs. Every consumer
//! passes an explicit RNG so that sweeps are reproducible; there is no
//! hidden entropy anywhere in the crate.

use rand::Rng;

use crate::graph::{Dir, GraphPoint, MetricGraph};
use crate::path::{EdgePath, Step};
use crate::scalar::Scalar;

/// A random rectifiable walk from `start` with at most `max_steps` runs.
/// Walks may backtrack and may stop inside an edge, so they exercise the
/// partial-segment bookkeeping of the reduction calculus.
pub fn random_edge_path<S: Scalar, R: Rng>(
    g: &MetricGraph<S>,
    start: GraphPoint<S>,
    max_steps: usize,
    rng: &mut R,
) -> EdgePath<S> {
    let n = rng.gen_range(0..=max_steps);
    let mut steps: Vec<Step<S>> = Vec::new();
    let mut at = start.clone();
    for _ in 0..n {
        let step = match &at {
            GraphPoint::Vertex(v) => {
                let ends = g.incident(*v);
                let (edge, dir) = ends[rng.gen_range(0..ends.len())];
                let len = g.edge(edge).length.clone();
                // Mostly full traversals, sometimes stopping mid-edge.
                let frac = if rng.gen_ratio(3, 4) {
                    S::one()
                } else {
                    S::from_fraction(rng.gen_range(1..8), 8)
                };
                let span = len.clone() * frac;
                match dir {
                    Dir::Forward => Step {
                        edge,
                        dir,
                        lo: S::zero(),
                        hi: span,
                    },
                    Dir::Backward => Step {
                        edge,
                        dir,
                        lo: len.clone() - span,
                        hi: len,
                    },
                }
            }
            GraphPoint::Interior { edge, offset } => {
                let len = g.edge(*edge).length.clone();
                let up = rng.gen_bool(0.5);
                if up {
                    let room = len.clone() - offset.clone();
                    let frac = S::from_fraction(rng.gen_range(1..=8), 8);
                    Step {
                        edge: *edge,
                        dir: Dir::Forward,
                        lo: offset.clone(),
                        hi: offset.clone() + room * frac,
                    }
                } else {
                    let frac = S::from_fraction(rng.gen_range(1..=8), 8);
                    Step {
                        edge: *edge,
                        dir: Dir::Backward,
                        lo: offset.clone() - offset.clone() * frac,
                        hi: offset.clone(),
                    }
                }
            }
        };
        at = step.end_point(g);
        steps.push(step);
    }
    EdgePath::new(g, start, steps).expect("random walk is chained by construction")
}

/// A freely reduced random word over `rank` generators, as signed letters
/// `(index, inverse)`. Empty words are possible when `max_len` is 0.
pub fn random_reduced_letters<R: Rng>(
    rank: usize,
    max_len: usize,
    rng: &mut R,
) -> Vec<(usize, bool)> {
    assert!(rank > 0, "need at least one generator");
    let n = rng.gen_range(0..=max_len);
    let mut letters: Vec<(usize, bool)> = Vec::with_capacity(n);
    while letters.len() < n {
        let cand = (rng.gen_range(0..rank), rng.gen_bool(0.5));
        if let Some(last) = letters.last() {
            if last.0 == cand.0 && last.1 != cand.1 {
                continue; // would cancel; resample
            }
        }
        letters.push(cand);
    }
    letters
}

/// A random connected multigraph: a spanning tree over `3..=6` vertices
/// plus one to three extra edges (loops allowed), with small rational
/// lengths. Basepoint is the lexicographically least vertex.
pub fn random_graph<S: Scalar, R: Rng>(rng: &mut R) -> MetricGraph<S> {
    let n = rng.gen_range(3..=6);
    let lengths = ["1", "1/2", "3/2", "2", "1/3", "3/4"];
    let mut lines = Vec::new();
    for i in 0..n {
        lines.push(format!("v v{i}"));
    }
    let mut edge_no = 0;
    let mut push_edge = |lines: &mut Vec<String>, a: usize, b: usize, rng: &mut R| {
        let len = lengths[rng.gen_range(0..lengths.len())];
        lines.push(format!("e e{edge_no} v{a} v{b} {len}"));
        edge_no += 1;
    };
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        push_edge(&mut lines, parent, i, rng);
    }
    let extras = rng.gen_range(1..=3);
    for _ in 0..extras {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        push_edge(&mut lines, a, b, rng);
    }
    lines.push("base v0".to_string());
    MetricGraph::parse(&lines.join("\n")).expect("random graph is connected by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn walks_are_valid_and_deterministic_per_seed() {
        let g = fixtures::theta::<Rational>();
        let walk = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| random_edge_path(&g, g.basepoint().clone(), 7, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(walk(5), walk(5));
        assert_ne!(walk(5), walk(6));
    }

    #[test]
    fn reduced_letters_never_cancel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w = random_reduced_letters(3, 10, &mut rng);
            for pair in w.windows(2) {
                assert!(!(pair[0].0 == pair[1].0 && pair[0].1 != pair[1].1));
            }
        }
    }

    #[test]
    fn random_graphs_parse_and_connect() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let g: MetricGraph<Rational> = random_graph(&mut rng);
            assert!(g.edge_count() >= g.vertex_count() - 1);
            assert!(g.cycle_rank() >= 1);
        }
    }
}
