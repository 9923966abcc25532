//! Command-line front end: ingest graphs, subgroup files and point
//! clouds, run the verification suites, and emit JSON reports and DOT
//! exports. Exit codes: 0 all checks pass, 1 a check failed, 2 input
//! error. Reports are byte-identical for identical (input, seed).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use treecover::cover::{self, CoverError, SubgroupSpec};
use treecover::epsilon::{self, EpsChain, Verdict};
use treecover::graph::GraphPoint;
use treecover::group::{self};
use treecover::report;
use treecover::sampling;
use treecover::scalar::{parse_scalar, scalar_string, Scalar as _};
use treecover::tree::{self, TreePoint};
use treecover::{Graph, Rational};

#[derive(Parser)]
#[command(
    name = "treecover",
    version,
    about = "Covering trees of metric graphs, subgroup covers, and discrete epsilon-homotopy, in exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Write the JSON report here.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Include wall-clock timings in the report (breaks byte-identity).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Covering-tree suite: four-point sweep, quotient metric, free
    /// action, path lifting, and fiber enumeration.
    Tree {
        /// Graph file.
        graph: PathBuf,
        /// Random tree points for the four-point sweep.
        #[arg(long, default_value_t = 64)]
        pairs: usize,
        /// Seed for the randomized sweeps (required; no hidden entropy).
        #[arg(long)]
        seed: u64,
        /// Also enumerate the fiber over this point.
        #[arg(long, value_name = "POINT")]
        fiber: Option<String>,
        /// Truncation radius for the fiber listing.
        #[arg(long, value_name = "RATIONAL", default_value = "2")]
        radius: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Subgroup cover suite: fold, lifting, universality, deck group.
    Cover {
        /// Graph file.
        graph: PathBuf,
        /// Subgroup file (one word per line; optional `normal`).
        subgroup: PathBuf,
        /// Word-length bound for the universality sweep.
        #[arg(long, default_value_t = 6)]
        bound: usize,
        /// Write a DOT rendering of the folded cover here.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Re-export the folded cover in the graph file format.
        #[arg(long, value_name = "FILE")]
        export_graph: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Epsilon-chain suite: per-scale presentations, stabilization,
    /// optional homotopy query.
    Eps {
        /// Cloud file.
        cloud: PathBuf,
        /// Comma-separated descending scales, e.g. `3/2,6/5,1/2`.
        #[arg(long, value_name = "LIST")]
        scales: String,
        /// Two chain files: decide whether the loops are homotopic at
        /// the first scale.
        #[arg(long, num_args = 2, value_names = ["CHAIN1", "CHAIN2"])]
        homotopy: Option<Vec<PathBuf>>,
        /// State budget for the homotopy search fallback.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

struct Check {
    name: &'static str,
    pass: bool,
    witness: Option<String>,
    details: Value,
}

impl Check {
    fn pass(name: &'static str, details: Value) -> Check {
        Check {
            name,
            pass: true,
            witness: None,
            details,
        }
    }

    fn fail(name: &'static str, witness: String, details: Value) -> Check {
        Check {
            name,
            pass: false,
            witness: Some(witness),
            details,
        }
    }
}

fn input_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read_input(path: &Path) -> Result<(String, Value), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let digest = hex_digest(&bytes);
    let text = String::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((
        text,
        json!({"path": path.display().to_string(), "sha256": digest}),
    ))
}

fn emit_report(
    command: &str,
    inputs: Vec<Value>,
    seed: Option<u64>,
    checks: &[Check],
    common: &CommonArgs,
    started: Instant,
) -> ExitCode {
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        match &c.witness {
            Some(w) => println!("CHECK {:<24} {status}  ({w})", c.name),
            None => println!("CHECK {:<24} {status}", c.name),
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "schema": 1,
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "pass": c.pass,
            "witness": c.witness,
            "details": c.details,
        })).collect::<Vec<_>>(),
        "all_pass": all_pass,
        "timings_ms": if common.timings {
            json!({"total": started.elapsed().as_millis() as u64})
        } else {
            Value::Null
        },
    });
    if let Some(path) = &common.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = fs::write(path, text + "\n") {
            return input_error(format!("{}: {e}", path.display()));
        }
    }
    if all_pass {
        println!("all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("some checks FAILED");
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Tree {
            graph,
            pairs,
            seed,
            fiber,
            radius,
            common,
        } => cmd_tree(&graph, pairs, seed, fiber.as_deref(), &radius, &common),
        Command::Cover {
            graph,
            subgroup,
            bound,
            dot,
            export_graph,
            common,
        } => cmd_cover(
            &graph,
            &subgroup,
            bound,
            dot.as_deref(),
            export_graph.as_deref(),
            &common,
        ),
        Command::Eps {
            cloud,
            scales,
            homotopy,
            budget,
            common,
        } => cmd_eps(&cloud, &scales, homotopy.as_deref(), budget, &common),
    }
}

fn sample_tree_points(
    g: &Graph,
    count: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<TreePoint<Rational>> {
    (0..count)
        .map(|_| {
            let walk = sampling::random_edge_path(g, g.basepoint().clone(), 6, rng);
            TreePoint::new(g, walk.reduce(g)).expect("walks start at the basepoint")
        })
        .collect()
}

fn cmd_tree(
    graph_path: &Path,
    pairs: usize,
    seed: u64,
    fiber_point: Option<&str>,
    radius: &str,
    common: &CommonArgs,
) -> ExitCode {
    use rand::SeedableRng;
    let started = Instant::now();
    let (text, input_meta) = match read_input(graph_path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let g: Graph = match Graph::parse(&text) {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    let radius: Rational = match parse_scalar(radius) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gens = group::generators(&g);
    let mut checks: Vec<Check> = Vec::new();

    // Four-point condition, exact, in rebased batches.
    {
        let points = sample_tree_points(&g, pairs.max(3), &mut rng);
        let mut triples = 0usize;
        let mut violations = 0usize;
        for chunk in points.chunks(8) {
            if chunk.len() < 3 {
                continue;
            }
            let rep = tree::check_four_point(&g, chunk, true).expect("chunks have >= 3 points");
            triples += rep.triples_checked;
            violations += rep.violations;
        }
        let details = json!({"points": points.len(), "triples_checked": triples,
                             "four_point_violations": violations});
        if violations == 0 {
            checks.push(Check::pass("four_point", details));
        } else {
            checks.push(Check::fail(
                "four_point",
                format!("{violations} violated triples"),
                details,
            ));
        }
    }

    // Quotient metric: truncated-fiber Hausdorff distance equals the
    // base distance, minimum attained, over vertices and edge midpoints.
    // Fiber enumeration grows exponentially with radius over the
    // shortest edge, so high-rank or fine-grained graphs fall back to
    // vertex pairs only.
    {
        let mut sample: Vec<GraphPoint<Rational>> = (0..g.vertex_count())
            .map(|v| GraphPoint::Vertex(treecover::graph::VertexId(v)))
            .collect();
        let guard = gens.max_loop_length();
        let budget_units =
            (g.total_length() + guard.clone()) / g.min_edge_length();
        let include_midpoints =
            g.cycle_rank() <= 2 && budget_units <= Rational::from_fraction(6, 1);
        if include_midpoints {
            for (e, rec) in g.edges() {
                sample.push(
                    g.point_on_edge(e, rec.length.clone().half())
                        .expect("midpoint is on the edge"),
                );
            }
        }
        let mut failures = Vec::new();
        let mut pairs_checked = 0;
        for (i, x) in sample.iter().enumerate() {
            for y in &sample[i..] {
                let r = g.distance(x, y) + guard.clone();
                match tree::fiber_hausdorff_distance(&g, x, y, &r, &guard) {
                    Ok(rep) => {
                        pairs_checked += 1;
                        if rep.hausdorff_distance != rep.base_distance || !rep.minimum_attained {
                            failures.push(format!(
                                "({}, {}): hausdorff {} vs base {}",
                                g.point_name(x),
                                g.point_name(y),
                                scalar_string(&rep.hausdorff_distance),
                                scalar_string(&rep.base_distance)
                            ));
                        }
                    }
                    Err(e) => failures.push(format!(
                        "({}, {}): {e}",
                        g.point_name(x),
                        g.point_name(y)
                    )),
                }
            }
        }
        let details = json!({"pairs_checked": pairs_checked,
                             "midpoints_included": include_midpoints,
                             "failures": failures.len()});
        if failures.is_empty() {
            checks.push(Check::pass("quotient_metric", details));
        } else {
            checks.push(Check::fail(
                "quotient_metric",
                failures.swap_remove(0),
                details,
            ));
        }
    }

    // Free isometric action and orbit = fiber.
    {
        let points = sample_tree_points(&g, 8, &mut rng);
        let mut failures: Vec<String> = Vec::new();
        let mut words_checked = 0usize;
        if gens.rank() > 0 {
            group::sweep_words(&g, &gens, 4, None, &mut |w, _| {
                words_checked += 1;
                for p in &points {
                    let moved = group::act(&g, &gens, w, p).expect("action applies");
                    if !w.is_empty() && moved == *p {
                        failures.push(format!("{} fixes a point", gens.render_word(w)));
                    }
                    for q in &points {
                        let mq = group::act(&g, &gens, w, q).expect("action applies");
                        if moved.distance(&g, &mq) != p.distance(&g, q) {
                            failures
                                .push(format!("{} distorts a distance", gens.render_word(w)));
                        }
                    }
                }
            });
            // Orbit of the root within R equals the fiber over the base.
            // A word of k letters evaluates to length at least k times
            // the shortest non-tree edge, which bounds the word sweep;
            // cap the letter depth so high-rank graphs stay tractable.
            let min_gain = gens
                .min_non_tree_edge_length(&g)
                .expect("rank > 0 has non-tree edges");
            let orbit_radius = (gens.max_loop_length() * Rational::from_fraction(2, 1))
                .min(min_gain.clone() * Rational::from_fraction(5, 1));
            let max_letters = {
                // floor(orbit_radius / min_gain)
                let mut k = 0usize;
                while min_gain.clone() * Rational::from_fraction(k as i64 + 1, 1) <= orbit_radius
                {
                    k += 1;
                }
                k
            };
            let mut orbit: std::collections::BTreeSet<treecover::Path> =
                std::collections::BTreeSet::new();
            group::sweep_words(&g, &gens, max_letters, Some(&orbit_radius), &mut |_, path| {
                if path.length() <= orbit_radius {
                    orbit.insert(path.clone());
                }
            });
            let fiber = tree::fiber(&g, g.basepoint(), &orbit_radius).expect("radius >= 0");
            let fiber_set: std::collections::BTreeSet<treecover::Path> =
                fiber.points.iter().map(|p| p.path().clone()).collect();
            if orbit != fiber_set {
                failures.push(format!(
                    "orbit ({}) and fiber ({}) differ at radius {}",
                    orbit.len(),
                    fiber_set.len(),
                    scalar_string(&orbit_radius)
                ));
            }
        }
        let details = json!({"rank": gens.rank(), "words_checked": words_checked});
        if failures.is_empty() {
            checks.push(Check::pass("free_action", details));
        } else {
            checks.push(Check::fail("free_action", failures.swap_remove(0), details));
        }
    }

    // Unique path lifting: length preservation and projection.
    {
        let mut failures: Vec<String> = Vec::new();
        let root = TreePoint::root(&g);
        let mut closed_lifts = 0usize;
        let n = 200;
        for _ in 0..n {
            let c = sampling::random_edge_path(&g, g.basepoint().clone(), 7, &mut rng);
            let lift = tree::lift_path(&g, &root, &c).expect("anchored walk lifts");
            if lift.lifted_length != c.length() {
                failures.push("lift length differs from path length".to_string());
            }
            if lift.terminal.endpoint(&g) != c.end(&g) {
                failures.push("lift does not project back to the path".to_string());
            }
            let closed = lift.terminal == root;
            let trivial = c.is_loop(&g) && c.reduce(&g).is_constant();
            if closed != trivial {
                failures.push("closed lift without trivial reduction".to_string());
            }
            if closed {
                closed_lifts += 1;
            }
        }
        let details = json!({"paths": n, "closed_lifts": closed_lifts});
        if failures.is_empty() {
            checks.push(Check::pass("url_lifting", details));
        } else {
            checks.push(Check::fail("url_lifting", failures.swap_remove(0), details));
        }
    }

    // Optional fiber enumeration.
    if let Some(point) = fiber_point {
        match g.parse_point(point) {
            Err(e) => return input_error(e),
            Ok(x) => match tree::fiber(&g, &x, &radius) {
                Err(e) => return input_error(e),
                Ok(rep) => {
                    for p in &rep.points {
                        println!(
                            "FIBER {}  length {}",
                            p.path().render(&g),
                            scalar_string(&p.height())
                        );
                    }
                    checks.push(Check::pass("fiber", rep.to_json(&g)));
                }
            },
        }
    }

    emit_report(
        "tree",
        vec![input_meta],
        Some(seed),
        &checks,
        common,
        started,
    )
}

fn cmd_cover(
    graph_path: &Path,
    subgroup_path: &Path,
    bound: usize,
    dot: Option<&Path>,
    export_graph: Option<&Path>,
    common: &CommonArgs,
) -> ExitCode {
    let started = Instant::now();
    let (gtext, ginput) = match read_input(graph_path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let (stext, sinput) = match read_input(subgroup_path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let g: Graph = match Graph::parse(&gtext) {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    let gens = group::generators(&g);
    let spec = match SubgroupSpec::parse(&gens, &stext) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let cv = match cover::fold(&g, &gens, &spec) {
        Ok(cv) => cv,
        Err(e) => return input_error(e),
    };
    let mut checks: Vec<Check> = Vec::new();
    checks.push(Check::pass("fold", cv.to_json(&g)));

    // Every generator of the subgroup lifts closed.
    {
        let mut witness = None;
        for w in &spec.words {
            match cover::lifts_as_loop(&g, &gens, &cv, w) {
                Ok(true) => {}
                Ok(false) => {
                    witness = Some(format!("{} does not lift closed", gens.render_word(w)));
                    break;
                }
                Err(e) => return input_error(e),
            }
        }
        let details = json!({"generators": spec.words.len()});
        match witness {
            None => checks.push(Check::pass("generators_lift", details)),
            Some(w) => checks.push(Check::fail("generators_lift", w, details)),
        }
    }

    // Bounded universality sweep.
    match cover::is_g_universal(&g, &gens, &cv, &spec, bound) {
        Err(e) => return input_error(e),
        Ok(rep) => {
            let details = rep.to_json();
            if rep.pass {
                checks.push(Check::pass("g_universal", details));
            } else {
                checks.push(Check::fail(
                    "g_universal",
                    rep.witness.clone().unwrap_or_default(),
                    details,
                ));
            }
        }
    }

    // Euler characteristic consistency on finite covers.
    if cv.is_complete(&g) {
        let index = cv
            .fiber_over_vertex(match g.basepoint() {
                GraphPoint::Vertex(v) => *v,
                GraphPoint::Interior { .. } => unreachable!("fold rejects interior basepoints"),
            })
            .len();
        let expected = 1 + index * (g.cycle_rank() - 1);
        let details = json!({"rank": cv.rank(), "index": index, "expected": expected});
        if cv.rank() == expected {
            checks.push(Check::pass("rank_euler", details));
        } else {
            checks.push(Check::fail(
                "rank_euler",
                format!("rank {} != 1 + n(r-1) = {expected}", cv.rank()),
                details,
            ));
        }
    }

    // Deck transformations; a violated normality claim is a failure.
    match cover::deck_transformations(&g, &gens, &cv, &spec, Some(bound)) {
        Ok(rep) => {
            let details = rep.to_json();
            let consistent = rep.transitive_on_fiber && rep.order == rep.index;
            if consistent {
                checks.push(Check::pass("deck_group", details));
            } else {
                checks.push(Check::fail(
                    "deck_group",
                    format!("order {} vs index {}", rep.order, rep.index),
                    details,
                ));
            }
        }
        Err(CoverError::NormalityViolation { conjugate }) => {
            let details = json!({"violating_conjugate": conjugate});
            if spec.claimed_normal {
                checks.push(Check::fail(
                    "deck_group",
                    format!("normality fails: {conjugate} is not in the subgroup"),
                    details,
                ));
            } else {
                checks.push(Check::pass(
                    "deck_group",
                    json!({
                        "note": "subgroup is not normal; deck group not enumerated",
                        "violating_conjugate": conjugate,
                    }),
                ));
            }
        }
        Err(CoverError::NotFiniteCover) => {
            checks.push(Check::pass(
                "deck_group",
                json!({
                    "note": "cover is infinite; deck group not enumerated"
                }),
            ));
        }
        Err(e) => return input_error(e),
    }

    // Weak submetry of the quotient metric on sampled base points. The
    // core is extended with hanging trees far enough that every
    // attaining partner of a core fiber point is materialized.
    {
        let mut sample: Vec<GraphPoint<Rational>> = (0..g.vertex_count())
            .map(|v| GraphPoint::Vertex(treecover::graph::VertexId(v)))
            .collect();
        for (e, rec) in g.edges() {
            sample.push(
                g.point_on_edge(e, rec.length.clone().half())
                    .expect("midpoint on edge"),
            );
        }
        let gref = &g;
        let max_base = sample
            .iter()
            .flat_map(|x| sample.iter().map(move |y| gref.distance(x, y)))
            .max()
            .expect("sample is nonempty");
        let min_edge = g.min_edge_length();
        let mut rounds = 1usize;
        while min_edge.clone() * Rational::from_fraction(rounds as i64, 1) < max_base {
            rounds += 1;
        }
        let extended = cover::extend_with_hangs(&g, &cv, rounds + 1);
        let mut failures = Vec::new();
        let mut pairs_checked = 0usize;
        for x in &sample {
            for y in &sample {
                let base = g.distance(x, y);
                // Points of the core fiber; partners range over the
                // extended fiber.
                for p in cover::fiber_over(&g, &cv, x) {
                    pairs_checked += 1;
                    let best = cover::fiber_over(&g, &extended, y)
                        .into_iter()
                        .map(|q| {
                            cover::cover_distance(&g, &extended, &p, &q)
                                .expect("valid points")
                        })
                        .min();
                    if best != Some(base.clone()) {
                        failures.push(format!(
                            "fiber minimum over ({}, {}) misses the base distance",
                            g.point_name(x),
                            g.point_name(y)
                        ));
                    }
                }
            }
        }
        let details =
            json!({"sample_points": sample.len(), "pairs_checked": pairs_checked,
                   "hang_rounds": rounds + 1, "failures": failures.len()});
        if failures.is_empty() {
            checks.push(Check::pass("weak_submetry", details));
        } else {
            checks.push(Check::fail(
                "weak_submetry",
                failures.swap_remove(0),
                details,
            ));
        }
    }

    if let Some(path) = dot {
        if let Err(e) = fs::write(path, cv.to_dot(&g)) {
            return input_error(format!("{}: {e}", path.display()));
        }
    }
    if let Some(path) = export_graph {
        if let Err(e) = fs::write(path, cv.to_metric_graph(&g).to_graph_format()) {
            return input_error(format!("{}: {e}", path.display()));
        }
    }

    emit_report(
        "cover",
        vec![ginput, sinput],
        None,
        &checks,
        common,
        started,
    )
}

fn cmd_eps(
    cloud_path: &Path,
    scales: &str,
    homotopy: Option<&[PathBuf]>,
    budget: usize,
    common: &CommonArgs,
) -> ExitCode {
    let started = Instant::now();
    let (text, cinput) = match read_input(cloud_path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let cloud: treecover::Cloud = match treecover::Cloud::parse(&text) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let mut inputs = vec![cinput];
    let mut scale_list: Vec<Rational> = Vec::new();
    for tok in scales.split(',') {
        match parse_scalar::<Rational>(tok) {
            Ok(s) if s > Rational::from_fraction(0, 1) => scale_list.push(s),
            Ok(s) => return input_error(format!("nonpositive scale {}", scalar_string(&s))),
            Err(e) => return input_error(e),
        }
    }
    if scale_list.is_empty() {
        return input_error("no scales given");
    }
    let mut checks: Vec<Check> = Vec::new();

    let stab = match epsilon::detect_stabilization(&cloud, &scale_list) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    for s in &stab.scales {
        println!(
            "SCALE {}  edges {}  triangles {}  group {}",
            scalar_string(&s.scale),
            s.edges,
            s.triangles,
            serde_json::to_string(&report::group_kind_json(&s.kind)).expect("kind serializes"),
        );
    }
    checks.push(Check::pass("stabilization", stab.to_json(&cloud)));

    // Bonding functoriality across every consecutive scale triple.
    if scale_list.len() >= 3 {
        let mut verdicts = Vec::new();
        let mut witness = None;
        for w in scale_list.windows(3) {
            let coarse = epsilon::delta_group(&cloud, &w[0]).expect("scale is positive");
            let mid = epsilon::delta_group(&cloud, &w[1]).expect("scale is positive");
            let fine = epsilon::delta_group(&cloud, &w[2]).expect("scale is positive");
            let via = epsilon::bonding_map(&cloud, &mid, &coarse).expect("scales are ordered");
            let lift = epsilon::bonding_map(&cloud, &fine, &mid).expect("scales are ordered");
            let direct =
                epsilon::bonding_map(&cloud, &fine, &coarse).expect("scales are ordered");
            let v = epsilon::check_functoriality(&coarse, &via, &lift, &direct);
            if v == Verdict::No && witness.is_none() {
                witness = Some(format!(
                    "functoriality fails across ({}, {}, {})",
                    scalar_string(&w[0]),
                    scalar_string(&w[1]),
                    scalar_string(&w[2])
                ));
            }
            verdicts.push(report::verdict_str(v));
        }
        let details = json!({"triples": verdicts});
        match witness {
            None => checks.push(Check::pass("bonding_functoriality", details)),
            Some(w) => checks.push(Check::fail("bonding_functoriality", w, details)),
        }
    }

    if let Some(chains) = homotopy {
        let scale = &scale_list[0];
        let mut parsed = Vec::new();
        for path in chains {
            let (ctext, meta) = match read_input(path) {
                Ok(v) => v,
                Err(e) => return input_error(e),
            };
            inputs.push(meta);
            match EpsChain::parse(&cloud, &ctext) {
                Ok(c) => parsed.push(c),
                Err(e) => return input_error(e),
            }
        }
        match epsilon::eps_homotopic(&cloud, scale, &parsed[0], &parsed[1], budget) {
            Err(e) => return input_error(e),
            Ok(verdict) => {
                println!(
                    "HOMOTOPY at scale {}: {}",
                    scalar_string(scale),
                    report::verdict_str(verdict)
                );
                checks.push(Check::pass(
                    "homotopy",
                    json!({
                        "scale": scalar_string(scale),
                        "verdict": report::verdict_str(verdict),
                        "budget": budget,
                    }),
                ));
            }
        }
    }

    emit_report("eps", inputs, None, &checks, common, started)
}
