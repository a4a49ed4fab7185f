//! Command-line front end. Every subcommand returns a JSON report carrying
//! `"schema": 1`; `main` prints it or writes it to `--out`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dspars_core::nof::SunflowerShape;
use dspars_core::{
    adjusted_rand_index, protocol_broadcast_graph, protocol_sparsifier_exchange, protocol_verify_sunflower,
    spectral_clustering, union_sparsifiers, verify_epsilon, ErSampler, SparsifierResult, Transcript, WeightedGraph,
};
use serde_json::{json, Map, Value};

use crate::edge_list::{load_graph, save_graph};
use crate::error::Error;
use crate::family::load_family;
use crate::labels::{labels_json, load_labels};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "dspars", version, about = "Distributed spectral sparsification toolkit")]
pub struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laplacian matrix of an edge-list graph.
    Laplacian {
        #[arg(long)]
        graph: PathBuf,
        /// Use D^{-1/2} L D^{-1/2} instead of L.
        #[arg(long)]
        normalized: bool,
    },
    /// Occurrence numbers and overlapping cardinality partition of a family.
    Partition {
        #[arg(long)]
        family: PathBuf,
    },
    /// Effective-resistance sparsifier of a graph.
    Sparsify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling constant C in q = ceil(C n ln n / ε²).
        #[arg(long, default_value_t = dspars_core::sparsifier::DEFAULT_SAMPLING_CONSTANT)]
        constant: f64,
        /// Edge list to write; the report is also written next to it as
        /// `<output>.json`.
        #[arg(long)]
        output: PathBuf,
    },
    /// Smallest ε for which one graph sparsifies another.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        sparsifier: PathBuf,
    },
    /// Reweighted union of per-part sparsifiers.
    Union {
        #[arg(long)]
        family: PathBuf,
        /// Sparsifier of part i, in family order; repeat once per set.
        #[arg(long = "part", required = true)]
        parts: Vec<PathBuf>,
        /// Edge list to write the union to.
        #[arg(long)]
        output: PathBuf,
    },
    /// Number-On-Forehead blackboard protocols.
    Nof {
        #[command(subcommand)]
        protocol: NofCommand,
    },
    /// Spectral clustering of a graph, or `compare` two label files.
    Cluster(ClusterArgs),
}

#[derive(Debug, Subcommand)]
pub enum NofCommand {
    /// Decide whether the family is a Δ-system.
    VerifySunflower {
        #[arg(long)]
        family: PathBuf,
    },
    /// Let every site learn the whole graph.
    Broadcast {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        site: usize,
    },
    /// Two-round sparsifier exchange.
    Exchange {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        site: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = dspars_core::sparsifier::DEFAULT_SAMPLING_CONSTANT)]
        constant: f64,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct ClusterArgs {
    #[command(subcommand)]
    pub compare: Option<ClusterCommand>,
    #[arg(long, required = true)]
    pub graph: Option<PathBuf>,
    #[arg(long, required = true)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Subcommand)]
pub enum ClusterCommand {
    /// Adjusted Rand index between two label files.
    Compare { left: PathBuf, right: PathBuf },
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Json(Value),
    /// Written verbatim, already newline-terminated.
    Text(String),
}

impl Report {
    pub fn render(&self) -> String {
        match self {
            Report::Json(v) => render_json(v),
            Report::Text(t) => t.clone(),
        }
    }
}

pub fn render_json(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("reports always serialize");
    text.push('\n');
    text
}

/// Object with `"schema"` first.
fn report(fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA_VERSION));
    if let Value::Object(rest) = fields {
        map.extend(rest);
    }
    Value::Object(map)
}

pub fn error_report(err: &Error) -> Value {
    json!({ "error": err.kind(), "detail": err.to_string() })
}

/// JSON number, or `null` for ±∞.
fn epsilon_value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), Error> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::Usage(format!("--epsilon must lie in (0, 1), got {epsilon}")))
    }
}

fn shape_json(shape: &SunflowerShape) -> Value {
    json!({
        "ell": shape.ell,
        "lambda": shape.lambda,
        "kernel": shape.kernel,
    })
}

fn transcript_fields(t: &Transcript) -> Value {
    json!({
        "rounds": t.rounds(),
        "round_count": t.round_count(),
        "bit_cost": t.bit_cost(),
        "edge_cost": t.edge_cost(),
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

pub fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Laplacian { graph, normalized } => laplacian(graph, *normalized),
        Command::Partition { family } => partition(family),
        Command::Sparsify {
            graph,
            epsilon,
            seed,
            constant,
            output,
        } => sparsify(graph, *epsilon, *seed, *constant, output),
        Command::Verify { graph, sparsifier } => verify(graph, sparsifier),
        Command::Union { family, parts, output } => union(family, parts, output),
        Command::Nof { protocol } => nof(protocol),
        Command::Cluster(args) => cluster(args),
    }
}

fn laplacian(path: &Path, normalized: bool) -> Result<Report, Error> {
    let g = load_graph(path)?;
    let l = if normalized {
        g.normalized_laplacian()
    } else {
        g.laplacian()
    };
    let m = l.matrix();
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    Ok(Report::Json(report(json!({
        "n": g.n(),
        "m": g.m(),
        "normalized": normalized,
        "matrix": rows,
    }))))
}

fn partition(path: &Path) -> Result<Report, Error> {
    let family = load_family(path)?;
    let p = family.overlap_partition();
    let occurrences: Vec<Value> = family
        .sets()
        .occurrence_numbers()
        .into_iter()
        .map(|(e, c)| json!({ "edge": e, "occurrences": c }))
        .collect();
    let classes: Vec<Value> = p
        .classes()
        .iter()
        .map(|c| json!({ "cardinality": c.cardinality, "edges": c.members }))
        .collect();
    Ok(Report::Json(report(json!({
        "sets": family.len(),
        "occurrence_numbers": occurrences,
        "classes": classes,
        "cardinalities": p.cardinalities(),
        "c1": p.c1(),
        "ck": p.ck(),
        "laplacian_residual": family.combined_laplacian_residual(),
    }))))
}

fn sparsifier_json(r: &SparsifierResult) -> Value {
    json!({
        "epsilon_target": r.epsilon_target,
        "epsilon_certified": epsilon_value(r.epsilon_certified),
        "edges": r.h.m(),
        "seed": r.seed,
    })
}

fn sparsify(path: &Path, epsilon: f64, seed: u64, constant: f64, output: &Path) -> Result<Report, Error> {
    check_epsilon(epsilon)?;
    let g = load_graph(path)?;
    let sampler = ErSampler::new(constant)?;
    let result = sampler.sparsify(&g, epsilon, seed)?;
    save_graph(output, &result.h)?;
    let body = report(sparsifier_json(&result));
    let sidecar = sidecar_path(output);
    fs::write(&sidecar, render_json(&body)).map_err(|e| Error::io(&sidecar, e))?;
    Ok(Report::Json(body))
}

/// `<output>.json`, appended to the full file name.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".json");
    PathBuf::from(name)
}

fn verify(graph: &Path, sparsifier: &Path) -> Result<Report, Error> {
    let g = load_graph(graph)?;
    let h = load_graph(sparsifier)?;
    let eps = verify_epsilon(&g, &h)?;
    Ok(Report::Json(report(json!({
        "epsilon_certified": epsilon_value(eps),
        "bounded": eps.is_finite(),
    }))))
}

fn union(family_path: &Path, part_paths: &[PathBuf], output: &Path) -> Result<Report, Error> {
    let family = load_family(family_path)?;
    let mut parts = Vec::with_capacity(part_paths.len());
    for (i, path) in part_paths.iter().enumerate() {
        let h = load_graph(path)?;
        let source = family.part(i).ok_or(dspars_core::SparsifyError::PartCountMismatch {
            sets: family.len(),
            parts: part_paths.len(),
        })?;
        parts.push(SparsifierResult::certify(&source, h, 0.0, None)?);
    }
    let u = union_sparsifiers(&parts, &family)?;
    save_graph(output, &u.h)?;
    let part_eps: Vec<Value> = parts.iter().map(|p| epsilon_value(p.epsilon_certified)).collect();
    Ok(Report::Json(report(json!({
        "c1": u.c1,
        "ck": u.ck,
        "epsilon_parts": part_eps,
        "epsilon_prime": epsilon_value(u.epsilon_prime),
        "edges": u.h.m(),
    }))))
}

fn nof(cmd: &NofCommand) -> Result<Report, Error> {
    match cmd {
        NofCommand::VerifySunflower { family } => {
            let family = load_family(family)?;
            let run = protocol_verify_sunflower(family.sets())?;
            Ok(Report::Json(report(merge(
                transcript_fields(&run.transcript),
                json!({ "verdict": run.verdict }),
            ))))
        }
        NofCommand::Broadcast { family, site } => {
            let family = load_family(family)?;
            let out = protocol_broadcast_graph(&family, *site)?;
            let all_match = out.reconstructions.iter().all(|g| g == family.base());
            Ok(Report::Json(report(merge(
                transcript_fields(&out.transcript),
                json!({
                    "site": site,
                    "shape": shape_json(&out.shape),
                    "delta": out.delta,
                    "view_union": out.view_union,
                    "round_edge_costs": [out.transcript.round_edge_cost(0), out.transcript.round_edge_cost(1)],
                    "reconstructed": all_match,
                }),
            ))))
        }
        NofCommand::Exchange {
            family,
            site,
            epsilon,
            seed,
            constant,
        } => {
            check_epsilon(*epsilon)?;
            let family = load_family(family)?;
            let sampler = ErSampler::new(*constant)?;
            let out = protocol_sparsifier_exchange(&family, *site, *epsilon, *seed, &sampler)?;
            let mut sites = Vec::with_capacity(out.sites.len());
            let mut worst_bound = 0.0_f64;
            for (i, u) in out.sites.iter().enumerate() {
                let measured = verify_epsilon(family.base(), &u.h)?;
                worst_bound = worst_bound.max(u.epsilon_prime);
                sites.push(json!({
                    "site": i + 1,
                    "edges": u.h.m(),
                    "epsilon_parts": epsilon_value(u.epsilon_parts),
                    "epsilon_prime": epsilon_value(u.epsilon_prime),
                    "epsilon_measured": epsilon_value(measured),
                }));
            }
            Ok(Report::Json(report(merge(
                transcript_fields(&out.transcript),
                json!({
                    "site": site,
                    "seed": seed,
                    "epsilon": epsilon,
                    "shape": shape_json(&out.shape),
                    "delta": out.delta,
                    "second_writer": out.second_writer,
                    "epsilon_prime": epsilon_value(worst_bound),
                    "sites": sites,
                }),
            ))))
        }
    }
}

fn cluster(args: &ClusterArgs) -> Result<Report, Error> {
    if let Some(ClusterCommand::Compare { left, right }) = &args.compare {
        let a = load_labels(left)?;
        let b = load_labels(right)?;
        let ari = adjusted_rand_index(&a, &b)?;
        return Ok(Report::Json(report(json!({ "n": a.len(), "ari": ari }))));
    }
    let (Some(graph), Some(k)) = (&args.graph, args.k) else {
        return Err(Error::Usage("cluster needs --graph and --k".into()));
    };
    let g: WeightedGraph = load_graph(graph)?;
    let a = spectral_clustering(&g, k, args.seed, args.normalized)?;
    Ok(Report::Text(labels_json(&a)))
}
