//! Command-line front end.
//!
//! Every subcommand prints one JSON document on stdout (scan tables can be
//! CSV instead). With `--out`, the same payload is written to a file and a
//! `<file>.manifest.json` sidecar records the parameters, seed, version and
//! file digests. Exit status: 0 on success, 1 when a computation fails (a JSON
//! error object goes to stderr), 2 on usage errors.

use std::ffi::OsString;
use std::io::{Read as _, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf2::{gf2_surjective, Gf2Matrix};
use crate::hamiltonian::{ground_space_basis, kernel_dimension, DEFAULT_DENSE_LIMIT};
use crate::hypergraph::{sample_graph, EnsembleMode, EnsembleParams, InteractionGraph};
use crate::instances::ReferenceInstance;
use crate::lanczos::{decide_sat, decide_sat_dense, SatOptions};
use crate::manifest::{FileDigest, RunManifest};
use crate::matching::{count_dimer_coverings, enumerate_dimer_coverings, max_clause_matching, DEFAULT_COUNT_LIMIT};
use crate::prodsat::{
    enumerate_product_states, product_span_rank, search_product_state, solve_product_state, ContinuationOptions,
    ProductState,
};
use crate::projectors::{ProjectorForm, ProjectorSet};
use crate::rdm::{rank_histogram, DEFAULT_RANK_TOL};
use crate::scan::{
    estimate_crossing, scan_graph_property, scan_sat_probability, GraphProperty, SatScanOptions, ScanConfig,
    DEFAULT_SCAN_DENSE_LIMIT,
};
use crate::seed::derive_seed;
use crate::sunflower::{sunflower_alpha_upper_with, sunflower_entropy_detailed, sunflower_entropy_poisson};

/// Largest adjacency matrix (entries) for which `gf2` also reports the rank.
const GF2_WITNESS_ENTRIES: usize = 1 << 26;

#[derive(Parser, Debug)]
#[command(name = "qsat", version, about = "Quantum k-SAT on random hypergraphs: graphs, kernels, product states, thresholds")]
struct Cli {
    /// Worker threads for parallel stages; results do not depend on it.
    #[arg(long, global = true, env = "QSAT_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Sample a random k-uniform interaction graph.
    Gen(GenArgs),
    /// Peel a graph to its hypercore.
    Core(GraphArgs),
    /// Maximum clause matching.
    Match(GraphArgs),
    /// Is there a dimer covering (every clause matched to its own qubit)?
    Cover(GraphArgs),
    /// Count dimer coverings exactly.
    CountCoverings(CountArgs),
    /// Is the clause-qubit incidence matrix surjective over GF(2)?
    Gf2(GraphArgs),
    /// Dimension of the kernel of H for random projectors.
    Kernel(KernelArgs),
    /// Decide whether H has a zero-energy state.
    Sat(SatArgs),
    /// Construct zero-energy product states.
    Prodsat(ProdsatArgs),
    /// Reduced-density-matrix rank histogram of a generic ground state.
    Rdm(RdmArgs),
    /// Monte Carlo scan of SAT probability or a graph property.
    Scan(ScanArgs),
    /// Sunflower upper bound on the SAT/unSAT transition.
    Bound(BoundArgs),
    /// Write the three bundled N = M = 10 reference instances.
    PaperInstances(PaperArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Binomial,
    FixedCount,
}

impl From<ModeArg> for EnsembleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Binomial => EnsembleMode::Binomial,
            ModeArg::FixedCount => EnsembleMode::FixedCount,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FormArg {
    Generic,
    Product,
}

impl From<FormArg> for ProjectorForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Generic => ProjectorForm::Generic,
            FormArg::Product => ProjectorForm::Product,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    /// Dense up to --dense-limit qubits, iterative above.
    Auto,
    Dense,
    Iterative,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScanProperty {
    Sat,
    Coverable,
    CoreNonempty,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct OutArg {
    /// Also write the result to this file, with a manifest sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    #[arg(long = "n")]
    n_qubits: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Clause density M/N.
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Binomial)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct GraphArgs {
    /// Graph JSON file, or - for stdin.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Largest number of active qubits the exact count accepts.
    #[arg(long, default_value_t = DEFAULT_COUNT_LIMIT)]
    limit: usize,
    /// Number of coverings to list as witnesses.
    #[arg(long, default_value_t = 16)]
    max_witness: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct KernelArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormArg::Generic)]
    form: FormArg,
    /// Absolute zero threshold; default 1e-13 times the largest eigenvalue.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct SatArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormArg::Generic)]
    form: FormArg,
    /// Energies below this certify SAT.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Converged lower bounds above this certify UNSAT.
    #[arg(long, default_value_t = 1e-9)]
    tol_gap: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct ProdsatArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Energy the continued state must reach.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Continue from every dimer covering and report the span of the results.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 1024)]
    max_states: usize,
    /// Extra attempts with fresh start projectors when a path fails.
    #[arg(long, default_value_t = 3)]
    retries: usize,
    /// Instead of continuation, minimize the product-state energy from this
    /// many random starts (works without a dimer covering).
    #[arg(long)]
    search: Option<usize>,
    #[arg(long, default_value_t = 500)]
    search_iters: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct RdmArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    subset_size: usize,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Qubit counts, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Explicit clause densities, comma separated (overrides the range flags).
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    alpha_min: f64,
    #[arg(long, default_value_t = 1.5)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha_step: f64,
    #[arg(long, default_value_t = 101)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ScanProperty::Sat)]
    property: ScanProperty,
    /// Default: fixed-count for SAT scans, binomial for graph properties.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_gap: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = DEFAULT_SCAN_DENSE_LIMIT)]
    dense_limit: usize,
    /// Ratio at which crossings are estimated.
    #[arg(long, default_value_t = 0.5)]
    level: f64,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
    /// Also write the table as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct BoundArgs {
    #[arg(long)]
    k: usize,
    /// Evaluate S(k, alpha) instead of solving for its root.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct PaperArgs {
    /// Directory for instance_a.json, instance_b.json, instance_c.json.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
}

/// Inputs read and the payload produced by one subcommand.
struct Outcome {
    payload: Value,
    seed: Option<u64>,
    inputs: Vec<FileDigest>,
    /// Text printed instead of the JSON payload (CSV tables).
    text: Option<String>,
    /// Extra files written, already on disk.
    written: Vec<PathBuf>,
}

impl Outcome {
    fn json(payload: Value) -> Self {
        Self { payload, seed: None, inputs: Vec::new(), text: None, written: Vec::new() }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn reading(mut self, input: FileDigest) -> Self {
        self.inputs.push(input);
        self
    }
}

fn read_graph(path: &Path) -> Result<(InteractionGraph, FileDigest)> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read graph file {}: {e}", path.display())))?;
    }
    let g = InteractionGraph::from_json(&text)?;
    Ok((g, FileDigest::of_bytes(path.display().to_string(), text.as_bytes())))
}

fn graph_value(g: &InteractionGraph) -> Result<Value> {
    Ok(serde_json::from_str(&g.to_json()?)?)
}

fn state_value(s: &ProductState) -> Value {
    Value::Array(s.qubits().iter().map(|q| json!([[q[0].re, q[0].im], [q[1].re, q[1].im]])).collect())
}

/// Merges extra keys into a serialized struct.
fn with_fields<T: Serialize>(base: &T, extra: Value) -> Result<Value> {
    let mut v = serde_json::to_value(base)?;
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    Ok(v)
}

fn alpha_grid(a: &ScanArgs) -> Result<Vec<f64>> {
    if !a.alpha.is_empty() {
        return Ok(a.alpha.clone());
    }
    if !(a.alpha_step > 0.0) || a.alpha_max < a.alpha_min {
        return Err(Error::InvalidInput(format!(
            "need alpha_step > 0 and alpha_max >= alpha_min, got step {} on [{}, {}]",
            a.alpha_step, a.alpha_min, a.alpha_max
        )));
    }
    let count = ((a.alpha_max - a.alpha_min) / a.alpha_step + 1e-9).floor() as usize + 1;
    // Rounded so that grid values print as typed (0.3, not 0.30000000000000004).
    Ok((0..count).map(|i| ((a.alpha_min + i as f64 * a.alpha_step) * 1e12).round() / 1e12).collect())
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Gen(a) => {
            let params = EnsembleParams {
                n_qubits: a.n_qubits,
                k: a.k,
                clause_density: a.alpha,
                mode: a.mode.into(),
                seed: a.seed,
            };
            let g = sample_graph(&params)?;
            Ok(Outcome::json(graph_value(&g)?).seeded(a.seed))
        }
        Command::Core(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let indices = g.core_clause_indices();
            let core = g.subgraph(&indices);
            Ok(Outcome::json(json!({
                "result": !indices.is_empty(),
                "core_clauses": indices,
                "core_qubits": core.active_qubits(),
                "witness": graph_value(&core)?,
            }))
            .reading(d))
        }
        Command::Match(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let m = max_clause_matching(&g);
            Ok(Outcome::json(json!({
                "result": m.size(),
                "clauses": g.num_clauses(),
                "witness": m.assignment(),
            }))
            .reading(d))
        }
        Command::Cover(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let m = max_clause_matching(&g);
            let cover = m.covering_qubits();
            Ok(Outcome::json(json!({
                "coverable": cover.is_some(),
                "result": cover.is_some(),
                "matching_size": m.size(),
                "witness": cover,
            }))
            .reading(d))
        }
        Command::CountCoverings(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let count = count_dimer_coverings(&g, a.limit)?;
            let (witness, truncated) = enumerate_dimer_coverings(&g, a.max_witness);
            Ok(Outcome::json(json!({ "result": count, "witness": witness, "witness_truncated": truncated })).reading(d))
        }
        Command::Gf2(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let surjective = gf2_surjective(&g);
            let rank = (g.num_clauses() * g.n_qubits() <= GF2_WITNESS_ENTRIES).then(|| Gf2Matrix::adjacency(&g).rank());
            Ok(Outcome::json(json!({
                "result": surjective,
                "witness": { "rank": rank, "clauses": g.num_clauses(), "qubits": g.n_qubits() },
            }))
            .reading(d))
        }
        Command::Kernel(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let p = ProjectorSet::sample(&g, a.seed, a.form.into());
            let r = kernel_dimension(&g, &p, a.tol, a.dense_limit)?;
            Ok(Outcome::json(with_fields(&r, json!({ "seed": a.seed, "form": a.form }))?).seeded(a.seed).reading(d))
        }
        Command::Sat(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let p = ProjectorSet::sample(&g, a.seed, a.form.into());
            let opts = SatOptions {
                tol_zero: a.tol,
                tol_gap: a.tol_gap,
                max_iters: a.max_iters,
                seed: derive_seed(a.seed, &[1]),
                ..SatOptions::default()
            };
            let dense = match a.method {
                MethodArg::Auto => g.n_qubits() <= a.dense_limit,
                MethodArg::Dense => true,
                MethodArg::Iterative => false,
            };
            let v = if dense { decide_sat_dense(&g, &p, &opts, a.dense_limit.max(g.n_qubits()))? } else { decide_sat(&g, &p, &opts)? };
            Ok(Outcome::json(with_fields(&v, json!({ "seed": a.seed, "form": a.form }))?).seeded(a.seed).reading(d))
        }
        Command::Prodsat(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let target = ProjectorSet::sample(&g, a.seed, ProjectorForm::Generic);
            let opts = ContinuationOptions { steps: a.steps, tol: a.tol, ..ContinuationOptions::default() };
            let solve_seed = derive_seed(a.seed, &[2]);
            let payload = if let Some(starts) = a.search {
                let s = search_product_state(&g, &target, starts, a.search_iters, solve_seed)?;
                json!({
                    "witness": state_value(&s.best_state),
                    "energy": s.best_energy,
                    "starts": s.starts,
                    "energies": s.energies,
                })
            } else if a.enumerate {
                let e = enumerate_product_states(&g, &target, a.max_states, solve_seed, &opts)?;
                let states: Vec<ProductState> = e.states.iter().map(|s| s.state.clone()).collect();
                let span = if states.is_empty() { 0 } else { product_span_rank(&states)? };
                json!({
                    "states": e.states.iter().map(|s| json!({
                        "covering": s.covering,
                        "witness": state_value(&s.state),
                        "energy": s.trace.final_residual,
                    })).collect::<Vec<_>>(),
                    "count": states.len(),
                    "span_rank": span,
                    "failures": e.failures,
                    "duplicates": e.duplicates,
                })
            } else {
                let s = solve_product_state(&g, &target, solve_seed, &opts, a.retries)?;
                json!({
                    "witness": state_value(&s.state),
                    "energy": s.energy,
                    "covering": s.covering,
                    "attempts": s.attempts,
                    "trace": {
                        "steps": s.trace.steps,
                        "halvings": s.trace.halvings,
                        "newton_iterations": s.trace.newton_iterations,
                        "max_condition": s.trace.condition_estimates.iter().copied().fold(0.0, f64::max),
                        "chart_flips": s.trace.chart_flips,
                    },
                })
            };
            Ok(Outcome::json(payload).seeded(a.seed).reading(d))
        }
        Command::Rdm(a) => {
            let (g, d) = read_graph(&a.graph)?;
            let p = ProjectorSet::sample(&g, a.seed, ProjectorForm::Generic);
            let ground = ground_space_basis(&g, &p, None, a.dense_limit)?;
            let state_seed = derive_seed(a.seed, &[3]);
            let h = rank_histogram(&ground.basis, a.subset_size, a.tol, state_seed)?;
            Ok(Outcome::json(json!({
                "histogram": h.counts,
                "max_rank": h.max_rank(),
                "subsets": h.subsets,
                "marginal_subsets": h.marginal_subsets,
                "tolerance": h.tolerance,
                "seed": a.seed,
                "diagnostic_state_seed": state_seed,
                "ground_dimension": ground.kernel.dimension,
            }))
            .seeded(a.seed)
            .reading(d))
        }
        Command::Scan(a) => {
            let property = match a.property {
                ScanProperty::Sat => None,
                ScanProperty::Coverable => Some(GraphProperty::Coverable),
                ScanProperty::CoreNonempty => Some(GraphProperty::CoreNonempty),
            };
            let mode = a.mode.map_or(if property.is_some() { EnsembleMode::Binomial } else { EnsembleMode::FixedCount }, Into::into);
            let cfg = ScanConfig { k: a.k, n_list: a.n_list.clone(), alpha_grid: alpha_grid(a)?, trials: a.trials, seed: a.seed, mode };
            let r = match property {
                Some(prop) => scan_graph_property(&cfg, prop, None)?,
                None => {
                    let opts = SatScanOptions { tol_zero: a.tol, tol_gap: a.tol_gap, max_iters: a.max_iters, dense_limit: a.dense_limit };
                    scan_sat_probability(&cfg, &opts, None)?
                }
            };
            let mut written = Vec::new();
            if let Some(path) = &a.csv {
                std::fs::write(path, r.to_csv())?;
                written.push(path.clone());
            }
            let (crossings, crossing_error) = match estimate_crossing(&r, a.level) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let mut out = Outcome::json(json!({ "scan": r, "crossings": crossings, "crossing_error": crossing_error })).seeded(a.seed);
            if matches!(a.format, TableFormat::Csv) {
                out.text = Some(r.to_csv());
            }
            out.written = written;
            Ok(out)
        }
        Command::Bound(a) => {
            let payload = match a.alpha {
                Some(alpha) => {
                    let e = sunflower_entropy_detailed(a.k, alpha)?;
                    let check = sunflower_entropy_poisson(a.k, alpha)?;
                    json!({
                        "k": a.k,
                        "alpha": alpha,
                        "entropy": e.value,
                        "error_estimate": e.error_estimate,
                        "poisson_form": check,
                    })
                }
                None => serde_json::to_value(sunflower_alpha_upper_with(a.k, a.rel_tol)?)?,
            };
            Ok(Outcome::json(payload))
        }
        Command::PaperInstances(a) => {
            std::fs::create_dir_all(&a.dir)?;
            let mut written = Vec::new();
            for inst in ReferenceInstance::ALL {
                let path = a.dir.join(inst.file_name());
                std::fs::write(&path, inst.graph().to_json()?)?;
                written.push(path);
            }
            let mut out = Outcome::json(json!({
                "written": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "labels": ReferenceInstance::ALL.iter().map(|i| i.label()).collect::<Vec<_>>(),
            }));
            out.written = written;
            Ok(out)
        }
    }
}

fn name_and_out(cmd: &Command) -> (&'static str, Option<&Path>) {
    match cmd {
        Command::Gen(a) => ("gen", a.out.out.as_deref()),
        Command::Core(a) => ("core", a.out.out.as_deref()),
        Command::Match(a) => ("match", a.out.out.as_deref()),
        Command::Cover(a) => ("cover", a.out.out.as_deref()),
        Command::CountCoverings(a) => ("count-coverings", a.out.out.as_deref()),
        Command::Gf2(a) => ("gf2", a.out.out.as_deref()),
        Command::Kernel(a) => ("kernel", a.out.out.as_deref()),
        Command::Sat(a) => ("sat", a.out.out.as_deref()),
        Command::Prodsat(a) => ("prodsat", a.out.out.as_deref()),
        Command::Rdm(a) => ("rdm", a.out.out.as_deref()),
        Command::Scan(a) => ("scan", a.out.out.as_deref()),
        Command::Bound(a) => ("bound", a.out.out.as_deref()),
        Command::PaperInstances(_) => ("paper-instances", None),
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    if let Some(j) = cli.jobs {
        // Fails harmlessly if the global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let outcome = execute(&cli.command)?;
    let (name, out_path) = name_and_out(&cli.command);
    // Scan files hold the bare ScanResult; crossings are a stdout summary.
    let file_payload = match &cli.command {
        Command::Scan(_) => outcome.payload["scan"].clone(),
        _ => outcome.payload.clone(),
    };
    let mut manifest = RunManifest::new(name, serde_json::to_value(&cli.command)?, outcome.seed);
    manifest.inputs = outcome.inputs.clone();
    for p in &outcome.written {
        manifest.outputs.push(FileDigest::of_file(p)?);
    }
    if let Some(path) = out_path {
        // Graph files use the compact one-line format.
        let text = if matches!(cli.command, Command::Gen(_)) {
            serde_json::to_string(&file_payload)?
        } else {
            serde_json::to_string_pretty(&file_payload)?
        };
        std::fs::write(path, &text)?;
        manifest.outputs.push(FileDigest::of_bytes(path.display().to_string(), text.as_bytes()));
    }
    let mut documented: Vec<PathBuf> = outcome.written.clone();
    documented.extend(out_path.map(Path::to_path_buf));
    for p in &documented {
        manifest.write_for(p)?;
    }
    let printed = match &outcome.text {
        Some(t) => stdout.write_all(t.as_bytes()),
        None => writeln!(stdout, "{}", serde_json::to_string_pretty(&outcome.payload)?),
    };
    match printed {
        // A closed pipe downstream (`| head`) is not a failure of the run.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let report = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            let _ = writeln!(stderr, "{report}");
            1
        }
    }
}
