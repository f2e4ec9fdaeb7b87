//! Scenario execution: instance loading or generation, the pipeline, the
//! verifier suite, and artifact emission.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gridroute::decomp::{verify_decomposition, DecompReport, VerifyDepth};
use gridroute::dist::bfs;
use gridroute::gen;
use gridroute::grid::GridGraph;
use gridroute::hybrid::{ceil_log2, HybridParams};
use gridroute::io;
use gridroute::pipeline::{run_pipeline, Pipeline};
use gridroute::routing::{
    measure_sizes, route, verify_region_sequences, SequenceReport, SizeReport,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub instance: InstanceSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_verify")]
    pub verify: String,
    #[serde(default)]
    pub hybrid: HybridConstants,
    #[serde(default = "default_outputs")]
    pub outputs: String,
    /// Routed (s, t) samples written to routes.csv.
    #[serde(default = "default_route_pairs")]
    pub route_pairs: usize,
    #[serde(default)]
    pub render: bool,
    /// Test hook: skip the path-convex stage so the verifier sees a
    /// corrupted decomposition.
    #[serde(default)]
    pub inject_skip_convex: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    File { file: String },
    Generator { generator: GeneratorSpec },
}

#[derive(Debug, Deserialize)]
pub struct GeneratorSpec {
    pub kind: String,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub holes: usize,
    #[serde(default = "default_width")]
    pub width: i32,
    #[serde(default = "default_length")]
    pub length: i32,
    #[serde(default = "default_folds")]
    pub folds: i32,
}

#[derive(Debug, Default, Deserialize)]
pub struct HybridConstants {
    #[serde(default = "default_c")]
    pub cl: u64,
    #[serde(default = "default_c")]
    pub cg: u64,
}

fn default_verify() -> String {
    "full".into()
}
fn default_outputs() -> String {
    "out".into()
}
fn default_route_pairs() -> usize {
    200
}
fn default_nodes() -> usize {
    1000
}
fn default_width() -> i32 {
    2
}
fn default_length() -> i32 {
    20
}
fn default_folds() -> i32 {
    4
}
fn default_c() -> u64 {
    1
}

#[derive(Serialize)]
struct Report {
    n: usize,
    inner_holes: usize,
    regions: usize,
    landmarks: usize,
    landmark_edges: usize,
    verify_mode: String,
    decomposition_passed: bool,
    sequences_passed: bool,
    routing_passed: bool,
    routed_pairs: usize,
    decomposition: DecompReport,
    sequences: SequenceReport,
    routing_violations: Vec<(usize, usize, u64, u32)>,
    sizes: SizeReport,
    // Measured constants against the asymptotic claims.
    regions_per_hole: f64,
    landmarks_per_hole_sq: f64,
    max_label_bits_per_log_n: f64,
    table_bits_per_claim: f64,
    ledger_total: u64,
    ledger_total_per_claim: f64,
}

pub fn run(
    scenario_path: &Path,
    seed_override: Option<u64>,
    verify_override: Option<&str>,
    render_override: Option<&Path>,
    cl: Option<u64>,
    cg: Option<u64>,
) -> Result<bool, String> {
    let text = fs::read_to_string(scenario_path)
        .map_err(|e| format!("{}: {e}", scenario_path.display()))?;
    let mut sc: Scenario = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if let Some(s) = seed_override {
        sc.seed = s;
    }
    if let Some(v) = verify_override {
        sc.verify = v.to_string();
    }
    if let Some(c) = cl {
        sc.hybrid.cl = c.max(1);
    }
    if let Some(c) = cg {
        sc.hybrid.cg = c.max(1);
    }

    let g = load_instance(&sc, scenario_path)?;
    let params = HybridParams::with_constants(g.len(), sc.hybrid.cl.max(1), sc.hybrid.cg.max(1));

    let p = build_pipeline(&g, &params, sc.inject_skip_convex)?;

    let depth = parse_verify(&sc.verify, sc.seed)?;
    let decomposition_report = verify_decomposition(&p.decomposition, depth);

    let ids: Vec<usize> = g.alive_ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed ^ 0x9e3779b9);
    let pairs: Vec<(usize, usize)> = (0..sc.route_pairs)
        .filter_map(|_| {
            let &s = ids.choose(&mut rng)?;
            let &t = ids.choose(&mut rng)?;
            (s != t).then_some((s, t))
        })
        .collect();

    let verify_on = !matches!(depth, VerifyDepth::Off);
    let sequence_report = if verify_on {
        verify_region_sequences(&p.decomposition, &p.landmark_graph, &p.scheme, &pairs)
    } else {
        SequenceReport::default()
    };

    // Route the sampled pairs and compare against BFS.
    let mut routes_csv = String::from("s,t,routed,bfs,exact\n");
    let mut routing_violations = Vec::new();
    for &(s, t) in &pairs {
        let expect = bfs(&g, s)[t];
        let routed = match route(&p.decomposition, &p.landmark_graph, &p.scheme, s, t) {
            Ok(trace) => (trace.len() - 1) as u64,
            Err(_) => u64::MAX,
        };
        let exact = routed == expect as u64;
        if !exact {
            routing_violations.push((s, t, routed, expect));
        }
        routes_csv.push_str(&format!("{s},{t},{routed},{expect},{exact}\n"));
    }

    let sizes = measure_sizes(&p.decomposition, &p.landmark_graph, &p.scheme);
    let holes = p.decomposition.inner_holes;
    let logn = ceil_log2(g.len()).max(1);
    let report = Report {
        n: g.len(),
        inner_holes: holes,
        regions: p.decomposition.regions.len(),
        landmarks: p.landmark_graph.landmarks.len(),
        landmark_edges: p.landmark_graph.edges.len(),
        verify_mode: sc.verify.clone(),
        decomposition_passed: decomposition_report.passed() || !verify_on,
        sequences_passed: sequence_report.passed(),
        routing_passed: routing_violations.is_empty(),
        routed_pairs: pairs.len(),
        regions_per_hole: p.decomposition.regions.len() as f64 / holes.max(1) as f64,
        landmarks_per_hole_sq: p.landmark_graph.landmarks.len() as f64
            / (holes * holes).max(1) as f64,
        max_label_bits_per_log_n: sizes.max_label_bits as f64 / logn as f64,
        table_bits_per_claim: sizes.table_bits as f64
            / ((holes * holes).max(1) as f64 * logn as f64),
        ledger_total: p.ledger.total(),
        ledger_total_per_claim: p.ledger.total() as f64
            / ((holes * holes) as f64 + logn as f64),
        decomposition: decomposition_report,
        sequences: sequence_report,
        routing_violations,
        sizes,
    };

    let out_dir = scenario_path.parent().unwrap_or(Path::new(".")).join(&sc.outputs);
    fs::create_dir_all(&out_dir).map_err(|e| e.to_string())?;
    let write = |name: &str, content: String| -> Result<(), String> {
        fs::write(out_dir.join(name), content).map_err(|e| e.to_string())
    };
    write("decomposition.json", io::decomposition_json(&p.decomposition))?;
    write("landmarks.json", io::landmarks_json(&p.decomposition, &p.landmark_graph))?;
    write("labels.json", io::labels_json(&p.decomposition, &p.landmark_graph, &p.scheme))?;
    write("ledger.csv", p.ledger.to_csv())?;
    write("routes.csv", routes_csv)?;
    write("report.json", serde_json::to_string_pretty(&report).unwrap())?;
    if sc.render || render_override.is_some() {
        let svg = crate::svg::render(&p.decomposition, &p.landmark_graph, None);
        match render_override {
            Some(path) => fs::write(path, svg).map_err(|e| e.to_string())?,
            None => write("render.svg", svg)?,
        }
    }

    let passed = report.decomposition_passed && report.sequences_passed && report.routing_passed;
    if !passed {
        // Machine-readable violation list on stdout.
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!(
            "ok: n={} |H|={} regions={} landmarks={} ledger={} (artifacts in {})",
            report.n,
            report.inner_holes,
            report.regions,
            report.landmarks,
            report.ledger_total,
            out_dir.display()
        );
    }
    Ok(passed)
}

fn build_pipeline(
    g: &GridGraph,
    params: &HybridParams,
    skip_convex: bool,
) -> Result<Pipeline, String> {
    if !skip_convex {
        return run_pipeline(g, params).map_err(|e| e.to_string());
    }
    // Test hook: stop after the tunnel stage. The resulting regions are
    // generally not path-convex, which the verifier must report.
    use gridroute::decomp::{simple_decomposition, split_junctions, Decomposition, Splitter};
    let holes = gridroute::holes::detect_holes(g);
    let mut sp = Splitter::new(g.clone());
    simple_decomposition(&mut sp, &holes).map_err(|e| e.to_string())?;
    split_junctions(&mut sp).map_err(|e| e.to_string())?;
    let d = Decomposition::from_splitter(g.clone(), sp, holes.inner_count());
    let landmarks = gridroute::landmarks::mark_landmarks(&d);
    let lg = gridroute::landmarks::build_landmark_graph(&d, landmarks).map_err(|e| e.to_string())?;
    let scheme = gridroute::routing::build_scheme(&d, &lg).map_err(|e| e.to_string())?;
    let ids = gridroute::routing::assign_identifiers(&d);
    Ok(Pipeline {
        decomposition: d,
        stats: Default::default(),
        landmark_graph: lg,
        scheme,
        ids,
        ledger: Default::default(),
    })
}

fn load_instance(sc: &Scenario, scenario_path: &Path) -> Result<GridGraph, String> {
    match &sc.instance {
        InstanceSource::File { file } => {
            let path = scenario_path.parent().unwrap_or(Path::new(".")).join(file);
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            io::parse_instance(&text)
        }
        InstanceSource::Generator { generator } => match generator.kind.as_str() {
            "random-holes" => gen::random_holes(generator.nodes, generator.holes, sc.seed)
                .map_err(|e| e.to_string()),
            "corridor" => gen::corridor(generator.width, generator.length, generator.folds)
                .map_err(|e| e.to_string()),
            other => Err(format!("unknown generator kind: {other}")),
        },
    }
}

fn parse_verify(mode: &str, seed: u64) -> Result<VerifyDepth, String> {
    if mode == "off" {
        return Ok(VerifyDepth::Off);
    }
    if mode == "full" {
        return Ok(VerifyDepth::Standard { sampled_pairs: 2000, seed });
    }
    if let Some(k) = mode.strip_prefix("sampled:") {
        let k: usize = k.parse().map_err(|_| format!("bad verify mode: {mode}"))?;
        return Ok(VerifyDepth::Standard { sampled_pairs: k, seed });
    }
    Err(format!("bad verify mode: {mode}"))
}

#[allow(clippy::too_many_arguments)]
pub fn generate(
    kind: &str,
    out: &Path,
    nodes: usize,
    holes: usize,
    width: i32,
    length: i32,
    folds: i32,
    area: f64,
    seed: u64,
) -> Result<bool, String> {
    let json = match kind {
        "random-holes" => {
            let g = gen::random_holes(nodes, holes, seed).map_err(|e| e.to_string())?;
            io::instance_json(&g)
        }
        "corridor" => {
            let g = gen::corridor(width, length, folds).map_err(|e| e.to_string())?;
            io::instance_json(&g)
        }
        "udg" => {
            let udg = gridroute::udg::random_udg(nodes, area, seed).map_err(|e| e.to_string())?;
            io::udg_json(&udg)
        }
        other => return Err(format!("unknown generator kind: {other}")),
    };
    fs::write(out, json).map_err(|e| e.to_string())?;
    println!("wrote {}", out.display());
    Ok(true)
}

pub fn route_one(instance: &Path, from: usize, to: usize) -> Result<bool, String> {
    let text = fs::read_to_string(instance).map_err(|e| e.to_string())?;
    let g = io::parse_instance(&text)?;
    if from >= g.base_len() || to >= g.base_len() {
        return Err(format!("node ids must be below {}", g.base_len()));
    }
    let p = run_pipeline(&g, &HybridParams::new(g.len())).map_err(|e| e.to_string())?;
    let expect = bfs(&g, from)[to];
    let trace = route(&p.decomposition, &p.landmark_graph, &p.scheme, from, to)
        .map_err(|e| e.to_string())?;
    let result = serde_json::json!({
        "hops": trace,
        "length": trace.len() - 1,
        "bfs": expect,
        "exact": (trace.len() - 1) as u32 == expect,
    });
    println!("{}", serde_json::to_string_pretty(&result).unwrap());
    Ok((trace.len() - 1) as u32 == expect)
}

pub fn render_only(instance: &Path, out: &Path) -> Result<bool, String> {
    let text = fs::read_to_string(instance).map_err(|e| e.to_string())?;
    let g = io::parse_instance(&text)?;
    let p = run_pipeline(&g, &HybridParams::new(g.len())).map_err(|e| e.to_string())?;
    let svg = crate::svg::render(&p.decomposition, &p.landmark_graph, None);
    fs::write(out, svg).map_err(|e| e.to_string())?;
    println!("wrote {}", out.display());
    Ok(true)
}
