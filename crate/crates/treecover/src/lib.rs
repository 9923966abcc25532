//! Covering trees of metric graphs, in exact rational arithmetic.
//!
//! The crate builds, for a finite metric graph `X`:
//!
//! * the reduction calculus on rectifiable edge paths ([`path`]);
//! * the covering real tree of `X`, materialized lazily through reduced
//!   paths anchored at the basepoint, with geodesics, fibers and the
//!   four-point condition ([`tree`]);
//! * the loop group of `X` as a finitely generated free group acting
//!   freely by isometries on the tree ([`group`]);
//! * quotient covers for finitely generated subgroups via folding, with
//!   quotient metrics, lifting tests and deck transformations ([`cover`]);
//! * discrete epsilon-chain homotopy of finite metric spaces, with scale
//!   presentations, bonding maps and stabilization detection ([`epsilon`]).
//!
//! All lengths, offsets and distances are exact rationals, so metric
//! identities are checked with zero tolerance. The core is generic over
//! the [`Scalar`] type; the aliases below fix the default instantiation.

pub mod cover;
pub mod epsilon;
pub mod fixtures;
pub mod graph;
pub mod group;
pub mod path;
pub mod presentation;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod tree;

pub use scalar::Scalar;

/// Arbitrary-precision rational scalar; the default instantiation.
pub type Rational = num_rational::BigRational;
/// Fixed-width rational scalar for small inputs.
pub type Rational64 = num_rational::Rational64;

/// Metric graph over the default scalar.
pub type Graph = graph::MetricGraph<Rational>;
/// Point of a metric graph over the default scalar.
pub type Point = graph::GraphPoint<Rational>;
/// Reduced path over the default scalar.
pub type Path = path::RhoPath<Rational>;
/// Covering-tree point over the default scalar.
pub type TreePoint = tree::TreePoint<Rational>;
/// Folded subgroup cover (its metric data lives in the base graph).
pub use cover::CoverGraph;
/// Finite point cloud over the default scalar.
pub type Cloud = epsilon::PointCloud<Rational>;
