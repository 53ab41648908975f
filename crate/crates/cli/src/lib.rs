//! Command-line front end: generators, builders, lower-bound instances,
//! audits, sweeps and exports.
//!
//! Exit codes: 0 success, 1 operation error, 2 usage error, 3 audit failure.

pub mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use spanlab::audit::{
    check_base_graph_properties, check_composed_properties, check_graph_distance_property,
    deletion_stretch_experiment, parity_candidate, pigeonhole_adversary, DeletionPolicy,
};
use spanlab::convex::{build_convex_set_with, build_striped_set_with, check_cis_properties, check_strong_convexity, verify_stripes, ConvexOptions};
use spanlab::distortion::{additive_distortion, AuditOptions};
use spanlab::lower_bound::{
    build_inner_graph, build_outer_graph, build_preset, compose_default, inner_shape, load_bundle, outer_shape,
    save_bundle, to_dot, Bundle, Preset,
};
use spanlab::preserver::{build_preserver, check_consistency, PathSystem};
use spanlab::schedule::{exponent_schedule, parse_rational, radius_for, ratio_to_f64, Kind};
use spanlab::sparsify::SparsifierConfig;
use spanlab::{gen, io as gio, Graph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_AUDIT_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "spanlab", version, about = "Additive spanners, emulators and lower-bound instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a seeded graph as an edge list.
    Gen(GenArgs),
    /// Build an additive emulator.
    BuildEmulator(BuildArgs),
    /// Build an additive spanner.
    BuildSpanner(BuildArgs),
    /// Build a pairwise distance preserver.
    BuildPreserver(PreserverArgs),
    /// Build the greedy multiplicative spanner.
    BuildMult(MultArgs),
    /// Generate a base, inner or outer graph, or a preset instance.
    LbGen(LbGenArgs),
    /// Compose an outer and an inner bundle.
    LbCompose(LbComposeArgs),
    /// Run an exact audit; exits 3 when a check fails.
    Audit(AuditArgs),
    /// Deletion or pigeonhole experiment on a composed instance.
    Stretch(StretchArgs),
    /// Print the exponent schedule and optionally the radius for `n`.
    Schedule(ScheduleArgs),
    /// Run a JSON-configured sweep and write CSV.
    Sweep(SweepArgs),
    /// Export an edge list or bundle as DOT.
    ExportDot(ExportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenFamily {
    Gnm,
    Cycle,
    Path,
    Grid,
    Tree,
    Complete,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenFamily,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub r_hat: Option<u32>,
    /// Base exponent as a fraction, e.g. `1/4`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Greedy stop multiplier (threshold is this times r_hat).
    #[arg(long)]
    pub stop: Option<u32>,
    /// Drop the log factor from the spanner small-cluster test.
    #[arg(long)]
    pub no_log_factor: bool,
    /// Output edge list.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Spanner only: write the inserted path system as JSON.
    #[arg(long)]
    pub paths: Option<PathBuf>,
    /// Also run the exact all-pairs distortion audit.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PreserverArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Pair file with one `s t` per line.
    #[arg(long, conflicts_with = "random_pairs")]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub random_pairs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub paths: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MultArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Stretch parameter; defaults to ceil(log2 n).
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LbKind {
    Inner,
    Outer,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetArg {
    Tiny,
    C2,
    C3,
}

#[derive(Args, Debug, Serialize)]
pub struct LbGenArgs {
    #[arg(long, value_enum, conflicts_with = "kind")]
    pub preset: Option<PresetArg>,
    #[arg(long, value_enum)]
    pub kind: Option<LbKind>,
    /// Number of inner vectors, or of outer stripes.
    #[arg(long)]
    pub c: Option<u32>,
    #[arg(long)]
    pub r_i: Option<u32>,
    #[arg(long)]
    pub x_i: Option<u32>,
    #[arg(long)]
    pub y_i: Option<u32>,
    #[arg(long)]
    pub r_o: Option<u32>,
    /// Outer grid shape from a target size `n_O`.
    #[arg(long)]
    pub n_o: Option<usize>,
    #[arg(long)]
    pub x_o: Option<u32>,
    #[arg(long)]
    pub y_o: Option<u32>,
    #[arg(long, default_value_t = 0.5)]
    pub psi1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub psi2: f64,
    /// Output prefix for `<out>.edges` and `<out>.json`.
    #[arg(long, default_value = "instance")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct LbComposeArgs {
    #[arg(long)]
    pub outer: PathBuf,
    #[arg(long)]
    pub inner: PathBuf,
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long, default_value = "composed")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditMode {
    Distortion,
    Base,
    Composed,
    DistanceProperty,
    Cis,
    Consistency,
}

#[derive(Args, Debug, Serialize)]
pub struct AuditArgs {
    #[arg(long, value_enum, default_value = "distortion")]
    pub mode: AuditMode,
    /// Host graph (distortion mode).
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// Sparsifier output (distortion mode).
    #[arg(long)]
    pub h: Option<PathBuf>,
    #[arg(long)]
    pub require_subgraph: bool,
    /// Bundle prefix (base, composed and distance-property modes).
    #[arg(long, default_value = "instance")]
    pub bundle: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub star: usize,
    /// Radius for cis mode.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub widened: bool,
    /// Stripe count for cis mode; stripes are carved when given.
    #[arg(long)]
    pub stripes: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub psi1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub psi2: f64,
    /// Path-system JSON (consistency mode).
    #[arg(long)]
    pub paths: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StretchMode {
    Deletion,
    Pigeonhole,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    OneEdgePerInnerCopy,
    HalfOfPath,
    Explicit,
}

#[derive(Args, Debug, Serialize)]
pub struct StretchArgs {
    #[arg(long, default_value = "instance")]
    pub bundle: PathBuf,
    #[arg(long, value_enum, default_value = "deletion")]
    pub mode: StretchMode,
    #[arg(long, default_value_t = 0)]
    pub pair: usize,
    #[arg(long, value_enum, default_value = "one-edge-per-inner-copy")]
    pub policy: PolicyArg,
    /// Explicit edges as `u-v,u-v`.
    #[arg(long)]
    pub edges: Option<String>,
    /// Candidate subgraph for pigeonhole mode; the parity filter when absent.
    #[arg(long)]
    pub candidate: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ScheduleArgs {
    #[arg(long, default_value = "emulator")]
    pub kind: String,
    #[arg(long, default_value_t = 3)]
    pub iters: usize,
    /// Also print `ceil(n^e)` for the last value.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ExportArgs {
    /// Edge list to export.
    #[arg(long, conflicts_with = "bundle")]
    pub input: Option<PathBuf>,
    /// Bundle to export with grid labels or copy clusters.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Provenance block embedded in every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub elapsed_ms: u128,
}

enum Failure {
    Op(String),
    Audit,
}

impl From<spanlab::Error> for Failure {
    fn from(e: spanlab::Error) -> Self {
        Failure::Op(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Op(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Op(e.to_string())
    }
}

type Outcome = std::result::Result<Value, Failure>;

struct Ctx {
    command: &'static str,
    parameters: Value,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    start: Instant,
}

impl Ctx {
    fn new(command: &'static str, args: &impl Serialize, seed: Option<u64>) -> Ctx {
        Ctx {
            command,
            parameters: serde_json::to_value(args).unwrap_or(Value::Null),
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            start: Instant::now(),
        }
    }

    fn manifest(&self) -> RunManifest {
        RunManifest {
            command: self.command.to_string(),
            parameters: self.parameters.clone(),
            seed: self.seed,
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: self.start.elapsed().as_millis(),
        }
    }

    fn load(&mut self, p: &Path) -> std::result::Result<Graph, Failure> {
        self.inputs.push(p.to_path_buf());
        Ok(gio::load_edge_list(p)?)
    }

    fn save(&mut self, g: &Graph, p: &Option<PathBuf>) -> std::result::Result<(), Failure> {
        if let Some(p) = p {
            gio::save_edge_list(g, p)?;
            self.outputs.push(p.clone());
        }
        Ok(())
    }

    fn write_json(&mut self, value: &impl Serialize, p: &Option<PathBuf>) -> std::result::Result<(), Failure> {
        if let Some(p) = p {
            std::fs::write(p, serde_json::to_string_pretty(value)?)?;
            self.outputs.push(p.clone());
        }
        Ok(())
    }

    /// Prints or writes `{manifest, result}`.
    fn emit(&mut self, result: Value, report: &Option<PathBuf>) -> Outcome {
        if let Some(p) = report {
            self.outputs.push(p.clone());
        }
        let doc = json!({"manifest": self.manifest(), "result": result});
        let text = serde_json::to_string_pretty(&doc)?;
        match report {
            Some(p) => std::fs::write(p, text + "\n")?,
            None => println!("{text}"),
        }
        Ok(doc)
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(_) => EXIT_OK,
        Err(Failure::Op(msg)) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
        Err(Failure::Audit) => {
            eprintln!("audit failed");
            EXIT_AUDIT_FAILED
        }
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::BuildEmulator(a) => cmd_build(a, Kind::Emulator),
        Command::BuildSpanner(a) => cmd_build(a, Kind::Spanner),
        Command::BuildPreserver(a) => cmd_preserver(a),
        Command::BuildMult(a) => cmd_mult(a),
        Command::LbGen(a) => cmd_lb_gen(a),
        Command::LbCompose(a) => cmd_lb_compose(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Stretch(a) => cmd_stretch(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ExportDot(a) => cmd_export(a),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Op(format!("--{flag} is required here")))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let g = match a.kind {
        GenFamily::Gnm => gen::gnm(need(a.n, "n")?, need(a.m, "m")?, a.seed)?,
        GenFamily::Cycle => gen::cycle(need(a.n, "n")?)?,
        GenFamily::Path => gen::path(need(a.n, "n")?)?,
        GenFamily::Grid => gen::grid(need(a.rows, "rows")?, need(a.cols, "cols")?)?,
        GenFamily::Tree => gen::random_tree(need(a.n, "n")?, a.seed)?,
        GenFamily::Complete => gen::complete(need(a.n, "n")?)?,
    };
    match &a.out {
        Some(p) => gio::save_edge_list(&g, p)?,
        None => print!("{}", gio::to_edge_list(&g)),
    }
    Ok(json!({"vertices": g.vertex_count(), "edges": g.edge_count()}))
}

fn sparsifier_config(a: &BuildArgs, kind: Kind) -> std::result::Result<SparsifierConfig, Failure> {
    let mut cfg = SparsifierConfig::new(kind);
    cfg.seed = a.seed;
    cfg.depth = a.depth;
    if let Some(e) = a.eps {
        cfg.eps = e;
    }
    cfg.r_override = a.r;
    cfg.r_hat_override = a.r_hat;
    if let Some(s) = &a.alpha {
        cfg.alpha = Some(parse_rational(s)?);
    }
    if let Some(s) = a.stop {
        cfg.greedy_stop_multiplier = s;
    }
    cfg.small_cluster_log_factor = !a.no_log_factor;
    Ok(cfg)
}

fn without(mut v: Value, key: &str) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove(key);
    }
    v
}

fn cmd_build(a: BuildArgs, kind: Kind) -> Outcome {
    let mut ctx = Ctx::new(if kind == Kind::Emulator { "build-emulator" } else { "build-spanner" }, &a, Some(a.seed));
    let g = ctx.load(&a.input)?;
    let cfg = sparsifier_config(&a, kind)?;
    let (h, mut result) = match kind {
        Kind::Emulator => {
            let e = spanlab::emulator::build_emulator(&g, &cfg)?;
            let v = without(serde_json::to_value(&e)?, "graph");
            (e.graph, v)
        }
        Kind::Spanner => {
            let s = spanlab::spanner::build_spanner(&g, &cfg)?;
            ctx.write_json(&s.path_system, &a.paths)?;
            let v = without(without(serde_json::to_value(&s)?, "subgraph"), "path_system");
            (s.subgraph, v)
        }
    };
    ctx.save(&h, &a.out)?;
    result["edges"] = json!(h.edge_count());
    if a.audit {
        let opts = AuditOptions { require_subgraph: kind == Kind::Spanner, ..Default::default() };
        result["audit"] = serde_json::to_value(additive_distortion(&g, &h, &opts)?)?;
    }
    ctx.emit(result, &a.report)
}

fn read_pairs(p: &Path) -> std::result::Result<Vec<(usize, usize)>, Failure> {
    let text = std::fs::read_to_string(p)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Failure::Op(format!("bad pair on line {}", i + 1)))?;
        match nums[..] {
            [s, t] => out.push((s, t)),
            _ => return Err(Failure::Op(format!("bad pair on line {}", i + 1))),
        }
    }
    Ok(out)
}

fn cmd_preserver(a: PreserverArgs) -> Outcome {
    let mut ctx = Ctx::new("build-preserver", &a, Some(a.seed));
    let g = ctx.load(&a.input)?;
    let pairs = match (&a.pairs, a.random_pairs) {
        (Some(p), _) => {
            ctx.inputs.push(p.clone());
            read_pairs(p)?
        }
        (None, Some(k)) => gen::random_pairs(g.vertex_count(), k, a.seed)?,
        (None, None) => return Err(Failure::Op("give --pairs or --random-pairs".into())),
    };
    let p = build_preserver(&g, &pairs)?;
    ctx.save(&p.subgraph, &a.out)?;
    ctx.write_json(&p.paths, &a.paths)?;
    let consistency = check_consistency(&p.paths);
    let opts = AuditOptions { pairs: Some(&pairs), require_subgraph: true, ..Default::default() };
    let audit = additive_distortion(&g, &p.subgraph, &opts)?;
    let result = json!({
        "pairs": pairs.len(),
        "edges": p.subgraph.edge_count(),
        "edge_bound": p.edge_bound,
        "max_additive": audit.max_additive,
        "consistent": consistency.passed(),
    });
    ctx.emit(result, &a.report)
}

fn cmd_mult(a: MultArgs) -> Outcome {
    let mut ctx = Ctx::new("build-mult", &a, None);
    let g = ctx.load(&a.input)?;
    let k = a.k.unwrap_or_else(|| spanlab::baseline::default_stretch_parameter(g.vertex_count()));
    if k == 0 {
        return Err(Failure::Op("k must be positive".into()));
    }
    let h = spanlab::baseline::multiplicative_spanner(&g, k);
    ctx.save(&h, &a.out)?;
    ctx.emit(json!({"k": k, "edges": h.edge_count(), "input_edges": g.edge_count()}), &a.report)
}

fn bundle_summary(b: &Bundle) -> std::result::Result<Value, Failure> {
    let g = b.graph();
    let mut v = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "fingerprint": b.fingerprint()?,
    });
    match b {
        Bundle::Base(bg) => {
            v["kind"] = json!("base");
            v["pairs"] = json!(bg.pairs.len());
            v["spec"] = serde_json::to_value(&bg.spec)?;
        }
        Bundle::Composed(c) => {
            v["kind"] = json!("composed");
            v["pairs"] = json!(c.pairs.len());
            v["z"] = json!(c.z);
            v["pruned"] = json!(c.pruned);
        }
    }
    Ok(v)
}

fn cmd_lb_gen(a: LbGenArgs) -> Outcome {
    let mut ctx = Ctx::new("lb-gen", &a, None);
    let bundle = match (a.preset, a.kind) {
        (Some(p), _) => build_preset(match p {
            PresetArg::Tiny => Preset::Tiny,
            PresetArg::C2 => Preset::C2,
            PresetArg::C3 => Preset::C3,
        })?,
        (None, Some(LbKind::Inner)) => {
            let (c, r) = (need(a.c, "c")?, need(a.r_i, "r-i")?);
            let (x, y) = match (a.x_i, a.y_i) {
                (Some(x), Some(y)) => (x, y),
                _ => inner_shape(c, r)?,
            };
            Bundle::Base(build_inner_graph(c, r, x, y)?)
        }
        (None, Some(LbKind::Outer)) => {
            let r = need(a.r_o, "r-o")?;
            let c = need(a.c, "c")? as usize;
            let w = build_striped_set_with(r, c, a.psi1, a.psi2, ConvexOptions::default())?;
            let (x, y) = match (a.x_o, a.y_o, a.n_o) {
                (Some(x), Some(y), _) => (x, y),
                (_, _, Some(n)) => outer_shape(n),
                _ => (4 * r, 8 * r),
            };
            Bundle::Base(build_outer_graph(x, y, &w)?)
        }
        (None, None) => return Err(Failure::Op("give --preset or --kind".into())),
    };
    let (e, j) = save_bundle(&bundle, &a.out)?;
    ctx.outputs.extend([e, j]);
    let summary = bundle_summary(&bundle)?;
    ctx.emit(summary, &None)
}

fn cmd_lb_compose(a: LbComposeArgs) -> Outcome {
    let mut ctx = Ctx::new("lb-compose", &a, None);
    ctx.inputs.extend([a.outer.clone(), a.inner.clone()]);
    let (Bundle::Base(outer), Bundle::Base(inner)) = (load_bundle(&a.outer)?, load_bundle(&a.inner)?) else {
        return Err(Failure::Op("lb-compose expects two base-graph bundles".into()));
    };
    let inst = compose_default(&outer, &inner, !a.no_prune)?;
    let bundle = Bundle::Composed(inst);
    let (e, j) = save_bundle(&bundle, &a.out)?;
    ctx.outputs.extend([e, j]);
    let summary = bundle_summary(&bundle)?;
    ctx.emit(summary, &None)
}

fn cmd_audit(a: AuditArgs) -> Outcome {
    let mut ctx = Ctx::new("audit", &a, None);
    let (passed, result) = match a.mode {
        AuditMode::Distortion => {
            let g = ctx.load(a.g.as_deref().ok_or_else(|| Failure::Op("--g is required".into()))?)?;
            let h = match &a.h {
                Some(p) => ctx.load(p)?,
                None => g.clone(),
            };
            let opts = AuditOptions { require_subgraph: a.require_subgraph, ..Default::default() };
            match additive_distortion(&g, &h, &opts) {
                Ok(r) => (true, serde_json::to_value(r)?),
                Err(e @ (spanlab::Error::NotSubgraph(..)
                | spanlab::Error::Undershoot(..)
                | spanlab::Error::Disconnected(..))) => (false, json!({"violation": e.to_string()})),
                Err(e) => return Err(e.into()),
            }
        }
        AuditMode::Base | AuditMode::Composed | AuditMode::DistanceProperty => {
            ctx.inputs.push(a.bundle.clone());
            let bundle = load_bundle(&a.bundle)?;
            match (a.mode, &bundle) {
                (AuditMode::Base, Bundle::Base(bg)) => {
                    let r = check_base_graph_properties(bg)?;
                    (r.passed(), serde_json::to_value(r)?)
                }
                (AuditMode::Composed, Bundle::Composed(c)) => {
                    let r = check_composed_properties(c)?;
                    (r.passed(), serde_json::to_value(r)?)
                }
                (AuditMode::DistanceProperty, Bundle::Base(bg)) => {
                    let chk = check_graph_distance_property(bg, a.star)?;
                    let first_failure = chk.records.iter().find(|r| !r.pass);
                    let v = json!({
                        "star_pair": chk.star_pair, "i_star": chk.i_star, "v_star": chk.v_star,
                        "records": chk.records.len(), "failures": chk.failures,
                        "witness": first_failure,
                    });
                    (chk.passed(), v)
                }
                _ => return Err(Failure::Op("bundle kind does not match the audit mode".into())),
            }
        }
        AuditMode::Cis => {
            let r = need(a.r, "r")?;
            let opts = ConvexOptions { widened: a.widened, ..Default::default() };
            let w = match a.stripes {
                Some(c) => build_striped_set_with(r, c, a.psi1, a.psi2, opts)?,
                None => build_convex_set_with(r, opts)?,
            };
            let cis = check_cis_properties(&w, 64);
            let strong = check_strong_convexity(&w.vectors).err();
            let stripes = a.stripes.map(|c| verify_stripes(&w, c, a.psi2));
            let ok = cis.exact_properties_hold() && strong.is_none() && stripes.as_ref().is_none_or(|s| s.passed());
            (ok, json!({"set": w, "cis": cis, "strong_convexity_witness": strong, "stripes": stripes}))
        }
        AuditMode::Consistency => {
            let p = a.paths.clone().ok_or_else(|| Failure::Op("--paths is required".into()))?;
            ctx.inputs.push(p.clone());
            let ps: PathSystem = serde_json::from_str(&std::fs::read_to_string(&p)?)?;
            let r = check_consistency(&ps);
            (r.passed(), serde_json::to_value(r)?)
        }
    };
    let doc = ctx.emit(json!({"passed": passed, "report": result}), &a.report)?;
    passed.then_some(doc).ok_or(Failure::Audit)
}

fn parse_edges(s: &str) -> std::result::Result<Vec<(usize, usize)>, Failure> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (u, v) = p.trim().split_once('-').ok_or_else(|| Failure::Op(format!("bad edge {p:?}")))?;
            let u = u.parse().map_err(|_| Failure::Op(format!("bad edge {p:?}")))?;
            let v = v.parse().map_err(|_| Failure::Op(format!("bad edge {p:?}")))?;
            Ok((u, v))
        })
        .collect()
}

fn cmd_stretch(a: StretchArgs) -> Outcome {
    let mut ctx = Ctx::new("stretch", &a, None);
    ctx.inputs.push(a.bundle.clone());
    let Bundle::Composed(inst) = load_bundle(&a.bundle)? else {
        return Err(Failure::Op("stretch needs a composed bundle".into()));
    };
    let result = match a.mode {
        StretchMode::Deletion => {
            let policy = match a.policy {
                PolicyArg::OneEdgePerInnerCopy => DeletionPolicy::OneEdgePerInnerCopy,
                PolicyArg::HalfOfPath => DeletionPolicy::HalfOfPath,
                PolicyArg::Explicit => DeletionPolicy::Explicit(parse_edges(a.edges.as_deref().unwrap_or(""))?),
            };
            serde_json::to_value(deletion_stretch_experiment(&inst, a.pair, &policy)?)?
        }
        StretchMode::Pigeonhole => {
            let cand = match &a.candidate {
                Some(p) => ctx.load(p)?,
                None => parity_candidate(&inst.graph),
            };
            serde_json::to_value(pigeonhole_adversary(&inst, &cand)?)?
        }
    };
    ctx.emit(result, &a.report)
}

fn cmd_schedule(a: ScheduleArgs) -> Outcome {
    let kind: Kind = a.kind.parse()?;
    let s = exponent_schedule(kind, a.iters);
    let mut out = std::io::stdout().lock();
    for (i, v) in s.values.iter().enumerate() {
        writeln!(out, "a_{i} = {}/{} = {:.6}", v.numer(), v.denom(), ratio_to_f64(v))?;
    }
    writeln!(out, "fixed point = {:.6}", s.fixed_point)?;
    let mut result = json!({"values": s.values.iter().map(|v| format!("{}/{}", v.numer(), v.denom())).collect::<Vec<_>>()});
    if let Some(n) = a.n {
        let r = radius_for(kind, n, s.last())?;
        writeln!(out, "r = {r} for n = {n}")?;
        result["r"] = json!(r);
    }
    Ok(result)
}

fn cmd_sweep(a: SweepArgs) -> Outcome {
    let cfg: sweep::SweepConfig = serde_json::from_str(&std::fs::read_to_string(&a.config)?)?;
    let rows = match &a.out {
        Some(p) => sweep::run_sweep(&cfg, a.jobs, std::fs::File::create(p)?)?,
        None => sweep::run_sweep(&cfg, a.jobs, std::io::stdout().lock())?,
    };
    Ok(json!({"rows": rows}))
}

fn cmd_export(a: ExportArgs) -> Outcome {
    let dot = match (&a.input, &a.bundle) {
        (Some(p), _) => gio::to_dot(&gio::load_edge_list(p)?, None, None),
        (None, Some(b)) => to_dot(&load_bundle(b)?),
        (None, None) => return Err(Failure::Op("give --input or --bundle".into())),
    };
    match &a.out {
        Some(p) => std::fs::write(p, &dot)?,
        None => print!("{dot}"),
    }
    Ok(json!({"bytes": dot.len()}))
}
