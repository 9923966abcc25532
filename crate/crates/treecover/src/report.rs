//! Stable JSON shapes for the report types: struct-ordered keys, all
//! rationals rendered exactly as `p/q` strings, never as floats.

use serde_json::{json, Value};

use crate::cover::{CoverGraph, DeckReport, FactorMap, UniversalityReport};
use crate::epsilon::{PointCloud, StabilizationReport, Verdict};
use crate::graph::MetricGraph;
use crate::presentation::GroupKind;
use crate::scalar::{scalar_string, Scalar};
use crate::tree::{FiberReport, FourPointReport, HausdorffReport};

pub fn rational<S: Scalar>(x: &S) -> Value {
    Value::String(scalar_string(x))
}

impl<S: Scalar> FourPointReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "points": self.points,
            "triples_checked": self.triples_checked,
            "violations": self.violations,
            "min_slack": self.min_slack.as_ref().map(|s| scalar_string(s)),
            "rebased": self.rebased,
        })
    }
}

impl<S: Scalar> FiberReport<S> {
    pub fn to_json(&self, g: &MetricGraph<S>) -> Value {
        json!({
            "base_point": g.point_name(&self.base_point),
            "radius": scalar_string(&self.radius),
            "count": self.points.len(),
            "points": self.points.iter().map(|p| json!({
                "path": p.path().render(g),
                "length": scalar_string(&p.height()),
                "endpoint": g.point_name(&p.endpoint(g)),
            })).collect::<Vec<_>>(),
            "min_pairwise_distance": self.min_pairwise_distance.as_ref().map(|d| scalar_string(d)),
        })
    }
}

impl<S: Scalar> HausdorffReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "base_distance": scalar_string(&self.base_distance),
            "hausdorff_distance": scalar_string(&self.hausdorff_distance),
            "radius": scalar_string(&self.radius),
            "extended_radius": scalar_string(&self.extended_radius),
            "fiber_sizes": [self.fiber_sizes.0, self.fiber_sizes.1],
            "minimum_attained": self.minimum_attained,
        })
    }
}

impl CoverGraph {
    pub fn to_json<S: Scalar>(&self, g: &MetricGraph<S>) -> Value {
        json!({
            "vertices": self.vertex_count(),
            "edges": self.edge_count(),
            "rank": self.rank(),
            "complete": self.is_complete(g),
            "projection": self.projection.iter().map(|v| g.vertex_name(*v)).collect::<Vec<_>>(),
            "edge_list": self.edges.iter().map(|ce| json!({
                "base": g.edge(ce.base_edge).id,
                "tail": ce.tail,
                "head": ce.head,
                "length": scalar_string(&g.edge(ce.base_edge).length),
            })).collect::<Vec<_>>(),
        })
    }
}

impl UniversalityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "bound": self.bound,
            "words_checked": self.words_checked,
            "witness": self.witness,
        })
    }
}

impl DeckReport {
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "index": self.index,
            "transitive_on_fiber": self.transitive_on_fiber,
            "normality_bound": self.normality_bound,
            "automorphisms": self.automorphisms,
        })
    }
}

impl FactorMap {
    pub fn to_json(&self) -> Value {
        json!({
            "vertex_map": self.vertex_map,
            "hang_vertices": self.hang_vertices,
        })
    }
}

pub fn group_kind_json(kind: &GroupKind) -> Value {
    match kind {
        GroupKind::Free { rank } => json!({"kind": "free", "rank": rank}),
        GroupKind::Finite { order } => json!({"kind": "finite", "order": order}),
        GroupKind::Unknown => json!({"kind": "unknown"}),
    }
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Inconclusive => "inconclusive",
    }
}

impl<S: Scalar> StabilizationReport<S> {
    pub fn to_json(&self, cloud: &PointCloud<S>) -> Value {
        let _ = cloud;
        json!({
            "scales": self.scales.iter().map(|s| {
                let mut v = group_kind_json(&s.kind);
                let obj = v.as_object_mut().expect("kind is an object");
                obj.insert("scale".into(), Value::String(scalar_string(&s.scale)));
                obj.insert("edges".into(), json!(s.edges));
                obj.insert("triangles".into(), json!(s.triangles));
                obj.insert("generators".into(), json!(s.generators));
                obj.insert("relations".into(), json!(s.relations));
                obj.insert("boundary_pairs".into(), json!(s.boundary_pairs));
                v
            }).collect::<Vec<_>>(),
            "pairs": self.pairs.iter().map(|p| json!({
                "coarse": scalar_string(&p.coarse),
                "fine": scalar_string(&p.fine),
                "both_free": p.both_free,
                "bonding_iso": p.bonding_iso,
            })).collect::<Vec<_>>(),
            "stable_rank": self.stable_rank,
        })
    }
}
