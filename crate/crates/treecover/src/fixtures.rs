//! Small standing fixtures used across the test suites and the docs.

use crate::epsilon::PointCloud;
use crate::graph::MetricGraph;
use crate::scalar::Scalar;

/// Theta graph: vertices `u`, `v`; edges `a`, `b`, `c`, each from `u` to
/// `v` of length 1; basepoint `u`.
pub fn theta<S: Scalar>() -> MetricGraph<S> {
    MetricGraph::parse("v u\nv v\ne a u v 1\ne b u v 1\ne c u v 1\nbase u\n")
        .expect("theta fixture parses")
}

/// Rose with one vertex `w` and two loop edges `x`, `y` of length 1.
pub fn rose2<S: Scalar>() -> MetricGraph<S> {
    MetricGraph::parse("v w\ne x w w 1\ne y w w 1\nbase w\n").expect("rose fixture parses")
}

/// A circle of circumference 1 (loop edge `c` at `a`) with a segment `s`
/// of length 1 glued at `a`, other end `b`; basepoint `a`.
pub fn lollipop<S: Scalar>() -> MetricGraph<S> {
    MetricGraph::parse("v a\nv b\ne c a a 1\ne s a b 1\nbase a\n")
        .expect("lollipop fixture parses")
}

/// The lollipop graph re-based at the far end `b` of the segment.
pub fn lollipop_at_b<S: Scalar>() -> MetricGraph<S> {
    MetricGraph::parse("v a\nv b\ne c a a 1\ne s a b 1\nbase b\n")
        .expect("lollipop fixture parses")
}

/// Four points at the corners of a unit square with Euclidean distances
/// (stored as rational coordinates; comparisons use squared distances).
pub fn square_cloud<S: Scalar>() -> PointCloud<S> {
    let rows = [
        ("p0", 0, 0),
        ("p1", 1, 0),
        ("p2", 1, 1),
        ("p3", 0, 1),
    ];
    let points = rows
        .iter()
        .map(|(label, x, y)| {
            (
                label.to_string(),
                vec![S::from_int(*x), S::from_int(*y)],
            )
        })
        .collect();
    PointCloud::from_coordinates(points, Some("p0".to_string())).expect("square cloud is valid")
}

/// Twelve points equally spaced on a geodesic circle of circumference 12
/// with intrinsic distances.
pub fn circle12_cloud<S: Scalar>() -> PointCloud<S> {
    let labels: Vec<String> = (0..12).map(|i| format!("c{i:02}")).collect();
    let mut triples = Vec::new();
    for i in 0..12usize {
        for j in (i + 1)..12usize {
            let around = (j - i).min(12 - (j - i)) as i64;
            triples.push((labels[i].clone(), labels[j].clone(), S::from_int(around)));
        }
    }
    PointCloud::from_distances(labels, triples, Some("c00".to_string()))
        .expect("circle cloud is valid")
}
