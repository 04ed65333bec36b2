//! Monte Carlo scans over the random graph ensemble.
//!
//! Every trial draws its graph, projectors and start vector from seeds
//! derived from (master seed, N, grid point, trial), so a scan is a pure
//! function of its configuration whatever the worker count.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{sample_graph, EnsembleMode, EnsembleParams, InteractionGraph};
use crate::lanczos::{decide_sat, decide_sat_dense, SatOptions, Verdict, DEFAULT_ITERATIVE_LIMIT};
use crate::matching::is_clause_coverable;
use crate::projectors::{ProjectorForm, ProjectorSet};
use crate::seed::derive_seed;

/// Dense diagonalization is used up to this many qubits in SAT scans; the
/// iterative solver takes over above it.
pub const DEFAULT_SCAN_DENSE_LIMIT: usize = 8;

const ROLE_GRAPH: u64 = 0;
const ROLE_PROJECTORS: u64 = 1;
const ROLE_START: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphProperty {
    /// The graph has a dimer covering.
    Coverable,
    /// The hypercore has at least one clause.
    CoreNonempty,
}

impl GraphProperty {
    pub fn holds(self, g: &InteractionGraph) -> bool {
        match self {
            GraphProperty::Coverable => is_clause_coverable(g),
            GraphProperty::CoreNonempty => !g.core_clause_indices().is_empty(),
        }
    }
}

impl std::fmt::Display for GraphProperty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphProperty::Coverable => "coverable",
            GraphProperty::CoreNonempty => "core-nonempty",
        })
    }
}

impl FromStr for GraphProperty {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverable" => Ok(GraphProperty::Coverable),
            "core-nonempty" | "core_nonempty" => Ok(GraphProperty::CoreNonempty),
            _ => Err(Error::InvalidInput(format!("unknown graph property {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatScanOptions {
    pub tol_zero: f64,
    pub tol_gap: f64,
    pub max_iters: usize,
    pub dense_limit: usize,
}

impl Default for SatScanOptions {
    fn default() -> Self {
        let d = SatOptions::default();
        Self { tol_zero: d.tol_zero, tol_gap: d.tol_gap, max_iters: d.max_iters, dense_limit: DEFAULT_SCAN_DENSE_LIMIT }
    }
}

/// What each trial evaluated, with the settings that went into it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScanKind {
    GraphProperty { property: GraphProperty },
    SatProbability { form: ProjectorForm, options: SatScanOptions },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub k: usize,
    pub n_list: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mode: EnsembleMode,
}

/// Tallies at one (N, α). For property scans `sat` counts graphs with the
/// property and `unsat` those without; `undecided` is then always zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub n: usize,
    pub alpha: f64,
    pub trials: usize,
    pub sat: usize,
    pub unsat: usize,
    pub undecided: usize,
}

impl ScanPoint {
    /// sat / (sat + unsat); undecided trials are left out of the ratio.
    pub fn fraction(&self) -> Option<f64> {
        let d = self.sat + self.unsat;
        (d > 0).then(|| self.sat as f64 / d as f64)
    }

    /// Binomial standard error of `fraction`.
    pub fn stderr(&self) -> Option<f64> {
        let d = (self.sat + self.unsat) as f64;
        self.fraction().map(|f| (f * (1.0 - f) / d).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub k: usize,
    pub n_list: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mode: EnsembleMode,
    pub kind: ScanKind,
    /// N-major, then α in grid order.
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    pub const CSV_HEADER: &'static str = "k,N,alpha,trials,sat,unsat,undecided,fraction,stderr";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.k,
                p.n,
                p.alpha,
                p.trials,
                p.sat,
                p.unsat,
                p.undecided,
                opt(p.fraction()),
                opt(p.stderr())
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Points for one N, in grid order.
    pub fn curve(&self, n: usize) -> Vec<ScanPoint> {
        self.points.iter().filter(|p| p.n == n).copied().collect()
    }
}

fn validate(cfg: &ScanConfig) -> Result<()> {
    if cfg.n_list.is_empty() || cfg.alpha_grid.is_empty() {
        return Err(Error::InvalidInput("scan needs at least one N and one alpha".into()));
    }
    if let Some(a) = cfg.alpha_grid.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::InvalidInput(format!("clause density {a} is not a finite non-negative number")));
    }
    Ok(())
}

/// Runs `trial` over every (N, α, trial index) and tallies the outcomes.
/// `jobs` bounds the worker threads; `None` uses the global pool.
fn run<F>(cfg: &ScanConfig, kind: ScanKind, jobs: Option<usize>, trial: F) -> Result<ScanResult>
where
    F: Fn(usize, f64, [u64; 3]) -> Result<Verdict> + Sync,
{
    validate(cfg)?;
    let mut items = Vec::with_capacity(cfg.n_list.len() * cfg.alpha_grid.len() * cfg.trials);
    for &n in &cfg.n_list {
        for (ai, &alpha) in cfg.alpha_grid.iter().enumerate() {
            for t in 0..cfg.trials {
                items.push((n, alpha, [n as u64, ai as u64, t as u64]));
            }
        }
    }
    let eval = || items.par_iter().map(|&(n, alpha, path)| trial(n, alpha, path)).collect::<Result<Vec<_>>>();
    let outcomes = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?
            .install(eval)?,
        None => eval()?,
    };
    let mut points = Vec::with_capacity(cfg.n_list.len() * cfg.alpha_grid.len());
    let mut chunks = outcomes.chunks(cfg.trials.max(1));
    for &n in &cfg.n_list {
        for &alpha in &cfg.alpha_grid {
            let chunk = if cfg.trials == 0 { &[][..] } else { chunks.next().expect("one chunk per point") };
            let count = |v: Verdict| chunk.iter().filter(|&&x| x == v).count();
            points.push(ScanPoint {
                n,
                alpha,
                trials: cfg.trials,
                sat: count(Verdict::Sat),
                unsat: count(Verdict::Unsat),
                undecided: count(Verdict::Undecided),
            });
        }
    }
    Ok(ScanResult {
        k: cfg.k,
        n_list: cfg.n_list.clone(),
        alpha_grid: cfg.alpha_grid.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        mode: cfg.mode,
        kind,
        points,
    })
}

fn trial_graph(cfg: &ScanConfig, n: usize, alpha: f64, path: [u64; 3]) -> Result<InteractionGraph> {
    let seed = derive_seed(cfg.seed, &[path[0], path[1], path[2], ROLE_GRAPH]);
    sample_graph(&EnsembleParams { n_qubits: n, k: cfg.k, clause_density: alpha, mode: cfg.mode, seed })
}

/// Fraction of sampled graphs with `property` at each (N, α).
pub fn scan_graph_property(cfg: &ScanConfig, property: GraphProperty, jobs: Option<usize>) -> Result<ScanResult> {
    run(cfg, ScanKind::GraphProperty { property }, jobs, |n, alpha, path| {
        let g = trial_graph(cfg, n, alpha, path)?;
        Ok(if property.holds(&g) { Verdict::Sat } else { Verdict::Unsat })
    })
}

/// SAT / UNSAT / UNDECIDED tallies for generic projectors on sampled graphs.
pub fn scan_sat_probability(cfg: &ScanConfig, opts: &SatScanOptions, jobs: Option<usize>) -> Result<ScanResult> {
    if let Some(&n) = cfg.n_list.iter().max() {
        if n > DEFAULT_ITERATIVE_LIMIT {
            return Err(Error::LimitExceeded { what: "qubits in SAT scan", value: n, limit: DEFAULT_ITERATIVE_LIMIT });
        }
    }
    let form = ProjectorForm::Generic;
    run(cfg, ScanKind::SatProbability { form, options: *opts }, jobs, |n, alpha, path| {
        let g = trial_graph(cfg, n, alpha, path)?;
        let p = ProjectorSet::sample(&g, derive_seed(cfg.seed, &[path[0], path[1], path[2], ROLE_PROJECTORS]), form);
        let sat_opts = SatOptions {
            tol_zero: opts.tol_zero,
            tol_gap: opts.tol_gap,
            max_iters: opts.max_iters,
            seed: derive_seed(cfg.seed, &[path[0], path[1], path[2], ROLE_START]),
            iterative_limit: DEFAULT_ITERATIVE_LIMIT,
        };
        let v = if n <= opts.dense_limit {
            decide_sat_dense(&g, &p, &sat_opts, opts.dense_limit)?
        } else {
            decide_sat(&g, &p, &sat_opts)?
        };
        Ok(v.verdict)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub n: usize,
    pub level: f64,
    /// Linear interpolation of the curve at `level`.
    pub alpha: f64,
    /// Binomial standard error of the ratio at `level`, from the trial counts
    /// of the two bracketing points.
    pub fraction_stderr: f64,
    /// The same error mapped through the local slope.
    pub alpha_stderr: f64,
    /// Largest α whose ratio exceeds 0.9.
    pub last_above_0_9: Option<f64>,
    /// Smallest α whose ratio is below 0.1.
    pub first_below_0_1: Option<f64>,
    /// The ratio moves against the curve's overall direction somewhere.
    pub non_monotone: bool,
}

/// Where each N's ratio curve first passes through `level`. The direction
/// (falling for coverability and SAT, rising for core emergence) is taken
/// from the curve's endpoints.
pub fn estimate_crossing(scan: &ScanResult, level: f64) -> Result<Vec<Crossing>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("crossing level must lie in (0, 1), got {level}")));
    }
    scan.n_list
        .iter()
        .map(|&n| {
            let mut curve: Vec<(f64, f64, usize)> = scan
                .curve(n)
                .iter()
                .filter_map(|p| p.fraction().map(|f| (p.alpha, f, p.sat + p.unsat)))
                .collect();
            curve.sort_by(|a, b| a.0.total_cmp(&b.0));
            let falling = curve.first().zip(curve.last()).map_or(true, |(a, b)| a.1 >= b.1);
            // Orient so the curve falls.
            let s = |f: f64| if falling { f - level } else { level - f };
            let non_monotone = curve.windows(2).any(|w| s(w[1].1) > s(w[0].1));
            let i = curve
                .windows(2)
                .position(|w| s(w[0].1) >= 0.0 && s(w[1].1) < 0.0)
                .ok_or_else(|| Error::NoBracket(format!("the ratio curve for N = {n} does not pass through {level}")))?;
            let ((a0, f0, d0), (a1, f1, d1)) = (curve[i], curve[i + 1]);
            let slope = ((f1 - f0) / (a1 - a0)).abs();
            let alpha = a0 + (f0 - level).abs() / slope;
            let fraction_stderr = (level * (1.0 - level) / (0.5 * (d0 + d1) as f64)).sqrt();
            Ok(Crossing {
                n,
                level,
                alpha,
                fraction_stderr,
                alpha_stderr: fraction_stderr / slope,
                last_above_0_9: curve.iter().filter(|c| c.1 > 0.9).map(|c| c.0).reduce(f64::max),
                first_below_0_1: curve.iter().find(|c| c.1 < 0.1).map(|c| c.0),
                non_monotone,
            })
        })
        .collect()
}
