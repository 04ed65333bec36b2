//! k-uniform clause–qubit interaction graphs.
//!
//! A graph has `n_qubits` nodes and an ordered list of clauses, each a sorted
//! tuple of `k` distinct qubit indices. The same object is the bipartite
//! factor graph (clauses on one side, qubits on the other). Random graphs
//! come from the Erdős–Rényi ensemble at clause density α, either with the
//! clause count fixed to round(αN) or with every potential clause included
//! independently at probability p = αN / C(N, k).

use std::collections::{HashSet, VecDeque};

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, QsatRng};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct InteractionGraph {
    n_qubits: usize,
    k: usize,
    /// Clause members, flattened with stride `k`.
    members: Vec<usize>,
}

/// On-disk form: `{"n_qubits": N, "k": k, "clauses": [[i, j, l], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphRecord {
    n_qubits: usize,
    k: usize,
    clauses: Vec<Vec<usize>>,
}

impl TryFrom<GraphRecord> for InteractionGraph {
    type Error = Error;

    fn try_from(r: GraphRecord) -> Result<Self> {
        InteractionGraph::new(r.n_qubits, r.k, r.clauses)
    }
}

impl From<InteractionGraph> for GraphRecord {
    fn from(g: InteractionGraph) -> Self {
        GraphRecord {
            n_qubits: g.n_qubits,
            k: g.k,
            clauses: g.clause_lists(),
        }
    }
}

impl InteractionGraph {
    /// Builds a graph, sorting each clause. Rejects clauses of the wrong
    /// arity, repeated or out-of-range members, and duplicate clauses.
    pub fn new(n_qubits: usize, k: usize, clauses: Vec<Vec<usize>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGraph(format!("clause arity k = {k} must be at least 2")));
        }
        if n_qubits == 0 {
            return Err(Error::InvalidGraph("graph must have at least one qubit".into()));
        }
        let mut members = Vec::with_capacity(clauses.len() * k);
        let mut seen = HashSet::with_capacity(clauses.len());
        for (m, mut clause) in clauses.into_iter().enumerate() {
            if clause.len() != k {
                return Err(Error::InvalidGraph(format!(
                    "clause {m} has {} members, expected {k}",
                    clause.len()
                )));
            }
            clause.sort_unstable();
            if clause.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("clause {m} repeats a qubit: {clause:?}")));
            }
            if let Some(&q) = clause.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::InvalidGraph(format!(
                    "clause {m} references qubit {q} but the graph has {n_qubits} qubits"
                )));
            }
            if !seen.insert(clause.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate clause {clause:?}")));
            }
            members.extend_from_slice(&clause);
        }
        Ok(Self { n_qubits, k, members })
    }

    /// A graph with no clauses.
    pub fn empty(n_qubits: usize, k: usize) -> Result<Self> {
        Self::new(n_qubits, k, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_clauses(&self) -> usize {
        self.members.len() / self.k
    }

    pub fn clause(&self, m: usize) -> &[usize] {
        &self.members[m * self.k..(m + 1) * self.k]
    }

    pub fn clauses(&self) -> std::slice::ChunksExact<'_, usize> {
        self.members.chunks_exact(self.k)
    }

    pub fn clause_lists(&self) -> Vec<Vec<usize>> {
        self.clauses().map(<[usize]>::to_vec).collect()
    }

    /// Qubit-side adjacency of the factor graph: for each qubit, the clauses
    /// containing it in increasing order.
    pub fn qubit_clauses(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_qubits];
        for (m, clause) in self.clauses().enumerate() {
            for &q in clause {
                adj[q].push(m);
            }
        }
        adj
    }

    /// Number of clauses containing each qubit.
    pub fn degree_profile(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_qubits];
        for &q in &self.members {
            deg[q] += 1;
        }
        deg
    }

    /// Qubits that belong to at least one clause.
    pub fn active_qubits(&self) -> Vec<usize> {
        self.degree_profile()
            .iter()
            .enumerate()
            .filter_map(|(q, &d)| (d > 0).then_some(q))
            .collect()
    }

    /// The graph restricted to the given clauses (same qubit count).
    pub fn subgraph(&self, clause_indices: &[usize]) -> Self {
        let mut members = Vec::with_capacity(clause_indices.len() * self.k);
        for &m in clause_indices {
            members.extend_from_slice(self.clause(m));
        }
        Self { n_qubits: self.n_qubits, k: self.k, members }
    }

    /// Indices of the clauses that survive leaf peeling, in original order.
    ///
    /// A qubit of degree one makes its clause removable; removal lowers the
    /// degree of the clause's other members, which may cascade. The surviving
    /// set is the unique maximal subgraph in which every member qubit has
    /// degree at least two.
    pub fn core_clause_indices(&self) -> Vec<usize> {
        let adj = self.qubit_clauses();
        let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut alive = vec![true; self.num_clauses()];
        let mut queue: VecDeque<usize> = (0..self.n_qubits).filter(|&q| deg[q] == 1).collect();
        while let Some(q) = queue.pop_front() {
            if deg[q] != 1 {
                continue;
            }
            let Some(&m) = adj[q].iter().find(|&&m| alive[m]) else {
                continue;
            };
            alive[m] = false;
            for &r in self.clause(m) {
                deg[r] -= 1;
                if deg[r] == 1 {
                    queue.push_back(r);
                }
            }
        }
        (0..self.num_clauses()).filter(|&m| alive[m]).collect()
    }

    /// The hypercore (2-core). Qubits outside it are kept in the index space
    /// with degree zero.
    pub fn hypercore(&self) -> Self {
        self.subgraph(&self.core_clause_indices())
    }

    /// Relabels the active qubits to `0..n_active`, dropping isolated ones.
    /// Returns the compacted graph and the old index of each new qubit.
    pub fn compact(&self) -> (Self, Vec<usize>) {
        let active = self.active_qubits();
        let mut new_index = vec![usize::MAX; self.n_qubits];
        for (i, &q) in active.iter().enumerate() {
            new_index[q] = i;
        }
        let members = self.members.iter().map(|&q| new_index[q]).collect();
        let n = active.len().max(1);
        (Self { n_qubits: n, k: self.k, members }, active)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleMode {
    /// Each potential clause present independently with p = αN / C(N, k).
    Binomial,
    /// Exactly round(αN) distinct clauses, uniformly at random.
    FixedCount,
}

impl std::fmt::Display for EnsembleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnsembleMode::Binomial => "binomial",
            EnsembleMode::FixedCount => "fixed-count",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n_qubits: usize,
    pub k: usize,
    pub clause_density: f64,
    pub mode: EnsembleMode,
    pub seed: u64,
}

/// C(n, k), or `None` if it does not fit in 128 bits.
pub fn binomial_coefficient(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn binomial_coefficient_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Samples a graph from the random ensemble. Deterministic in `params.seed`.
pub fn sample_graph(params: &EnsembleParams) -> Result<InteractionGraph> {
    let EnsembleParams { n_qubits: n, k, clause_density: alpha, mode, seed } = *params;
    if k < 2 || n == 0 || k > n {
        return Err(Error::ImpossibleParameters(format!("need 2 <= k <= N, got k = {k}, N = {n}")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::ImpossibleParameters(format!("clause density must be finite and >= 0, got {alpha}")));
    }
    let total = binomial_coefficient(n, k);
    let total_f = total.map_or_else(|| binomial_coefficient_f64(n, k), |t| t as f64);
    let expected = alpha * n as f64;
    let mut rng = rng_from_seed(seed);

    let m = match mode {
        EnsembleMode::FixedCount => {
            let m = expected.round();
            if m > total_f {
                return Err(Error::ImpossibleParameters(format!(
                    "round(alpha N) = {m} exceeds the {total_f} possible clauses"
                )));
            }
            m as usize
        }
        EnsembleMode::Binomial => {
            let p = expected / total_f;
            if p > 1.0 {
                return Err(Error::ImpossibleParameters(format!(
                    "inclusion probability alpha N / C(N, k) = {p} exceeds 1"
                )));
            }
            match total.and_then(|t| u64::try_from(t).ok()) {
                Some(t) => Binomial::new(t, p)
                    .map_err(|e| Error::ImpossibleParameters(e.to_string()))?
                    .sample(&mut rng) as usize,
                // C(N, k) beyond 2^64 with finite αN: the binomial count is
                // Poisson to far better than double precision.
                None if expected > 0.0 => Poisson::new(expected)
                    .map_err(|e| Error::ImpossibleParameters(e.to_string()))?
                    .sample(&mut rng) as usize,
                None => 0,
            }
        }
    };
    let members = draw_distinct_clauses(&mut rng, n, k, m, total);
    // Clauses are sorted, in range and distinct by construction.
    Ok(InteractionGraph { n_qubits: n, k, members })
}

/// Draws `m` distinct sorted k-subsets of `0..n` uniformly, flattened.
fn draw_distinct_clauses(rng: &mut QsatRng, n: usize, k: usize, m: usize, total: Option<u128>) -> Vec<usize> {
    const ENUMERATE_LIMIT: u128 = 1 << 20;
    if let Some(t) = total.filter(|&t| t <= ENUMERATE_LIMIT && (m as u128) * 2 > t) {
        // Dense regime: rejection would stall, so pick indices into the full list.
        let all = all_k_subsets(n, k);
        return index::sample(rng, t as usize, m).into_iter().flat_map(|i| all[i].iter().copied()).collect();
    }
    // Pack a sorted clause into one integer when N^k fits, else hash the slice.
    let packable = (n as f64).powi(k as i32) < 2f64.powi(127);
    let mut packed = HashSet::new();
    let mut sliced = HashSet::new();
    let mut out = Vec::with_capacity(m * k);
    let mut clause = Vec::with_capacity(k);
    while out.len() < m * k {
        clause.clear();
        while clause.len() < k {
            let q = rng.random_range(0..n);
            if !clause.contains(&q) {
                clause.push(q);
            }
        }
        clause.sort_unstable();
        let fresh = if packable {
            packed.insert(clause.iter().fold(0u128, |acc, &q| acc * n as u128 + q as u128))
        } else {
            sliced.insert(clause.clone())
        };
        if fresh {
            out.extend_from_slice(&clause);
        }
    }
    out
}

fn all_k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// A uniformly random labelled tree on `n` qubits as a k = 2 graph.
pub fn random_tree(n: usize, rng: &mut QsatRng) -> Result<InteractionGraph> {
    let edges = (1..n).map(|v| vec![rng.random_range(0..v), v]).collect();
    InteractionGraph::new(n, 2, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn g(n: usize, k: usize, c: &[&[usize]]) -> InteractionGraph {
        InteractionGraph::new(n, k, c.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn construction_sorts_and_validates() {
        let gr = g(4, 3, &[&[2, 0, 1]]);
        assert_eq!(gr.clause(0), &[0, 1, 2]);
        assert!(InteractionGraph::new(4, 3, vec![vec![0, 1]]).is_err());
        assert!(InteractionGraph::new(4, 3, vec![vec![0, 1, 1]]).is_err());
        assert!(InteractionGraph::new(4, 3, vec![vec![0, 1, 4]]).is_err());
        assert!(InteractionGraph::new(4, 3, vec![vec![0, 1, 2], vec![2, 1, 0]]).is_err());
        assert!(InteractionGraph::new(4, 1, vec![]).is_err());
    }

    #[test]
    fn json_round_trip_matches_format() {
        let gr = g(5, 3, &[&[0, 1, 2], &[2, 3, 4]]);
        let s = gr.to_json().unwrap();
        assert_eq!(s, r#"{"n_qubits":5,"k":3,"clauses":[[0,1,2],[2,3,4]]}"#);
        assert_eq!(InteractionGraph::from_json(&s).unwrap(), gr);
        assert!(InteractionGraph::from_json(r#"{"n_qubits":3,"k":3,"clauses":[[0,1,5]]}"#).is_err());
    }

    #[test]
    fn degree_profile_examples() {
        assert_eq!(g(3, 3, &[&[0, 1, 2]]).degree_profile(), vec![1, 1, 1]);
        assert_eq!(InteractionGraph::empty(5, 3).unwrap().degree_profile(), vec![0; 5]);
    }

    #[test]
    fn hypercore_examples() {
        assert_eq!(g(3, 3, &[&[0, 1, 2]]).hypercore().num_clauses(), 0);
        assert_eq!(g(4, 3, &[&[0, 1, 2], &[0, 1, 3]]).hypercore().num_clauses(), 0);
        // A k=2 cycle survives intact.
        let cycle = g(4, 2, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        assert_eq!(cycle.hypercore(), cycle);
        // A cycle with a pendant edge loses only the pendant.
        let tailed = g(5, 2, &[&[0, 1], &[1, 2], &[0, 2], &[2, 3], &[3, 4]]);
        assert_eq!(tailed.core_clause_indices(), vec![0, 1, 2]);
    }

    /// Naive peeling in a caller-chosen order, used as an order-independence oracle.
    fn peel_in_order(gr: &InteractionGraph, order: &[usize]) -> Vec<usize> {
        let mut alive = vec![true; gr.num_clauses()];
        loop {
            let mut deg = vec![0usize; gr.n_qubits()];
            for m in (0..gr.num_clauses()).filter(|&m| alive[m]) {
                for &q in gr.clause(m) {
                    deg[q] += 1;
                }
            }
            let victim = order.iter().copied().find(|&m| alive[m] && gr.clause(m).iter().any(|&q| deg[q] <= 1));
            match victim {
                Some(m) => alive[m] = false,
                None => return (0..gr.num_clauses()).filter(|&m| alive[m]).collect(),
            }
        }
    }

    #[test]
    fn hypercore_is_order_independent_and_idempotent() {
        let mut rng = rng_from_seed(3);
        for trial in 0..60 {
            let params = EnsembleParams {
                n_qubits: 12,
                k: 3,
                clause_density: 0.6 + 0.02 * trial as f64,
                mode: EnsembleMode::FixedCount,
                seed: trial,
            };
            let gr = sample_graph(&params).unwrap();
            let core = gr.core_clause_indices();
            let mut order: Vec<usize> = (0..gr.num_clauses()).collect();
            for _ in 0..4 {
                order.shuffle(&mut rng);
                assert_eq!(peel_in_order(&gr, &order), core);
            }
            let hc = gr.hypercore();
            assert_eq!(hc.hypercore(), hc);
            for (q, d) in hc.degree_profile().into_iter().enumerate() {
                assert!(d == 0 || d >= 2, "qubit {q} has degree {d} in the core");
            }
        }
    }

    #[test]
    fn sample_trivial_cases() {
        let one = sample_graph(&EnsembleParams {
            n_qubits: 3,
            k: 3,
            clause_density: 1.0 / 3.0,
            mode: EnsembleMode::FixedCount,
            seed: 9,
        })
        .unwrap();
        assert_eq!(one.clause_lists(), vec![vec![0, 1, 2]]);
        for mode in [EnsembleMode::Binomial, EnsembleMode::FixedCount] {
            let zero = sample_graph(&EnsembleParams { n_qubits: 10, k: 3, clause_density: 0.0, mode, seed: 1 }).unwrap();
            assert_eq!(zero.num_clauses(), 0);
        }
    }

    #[test]
    fn sample_rejects_impossible() {
        let base = EnsembleParams { n_qubits: 4, k: 3, clause_density: 2.0, mode: EnsembleMode::FixedCount, seed: 0 };
        assert!(matches!(sample_graph(&base), Err(Error::ImpossibleParameters(_))));
        assert!(sample_graph(&EnsembleParams { k: 5, ..base }).is_err());
        assert!(sample_graph(&EnsembleParams { mode: EnsembleMode::Binomial, ..base }).is_err());
        assert!(sample_graph(&EnsembleParams { clause_density: -1.0, ..base }).is_err());
    }

    #[test]
    fn sample_is_deterministic_and_valid() {
        for mode in [EnsembleMode::Binomial, EnsembleMode::FixedCount] {
            let p = EnsembleParams { n_qubits: 200, k: 4, clause_density: 0.9, mode, seed: 77 };
            let a = sample_graph(&p).unwrap();
            assert_eq!(a, sample_graph(&p).unwrap());
            assert_ne!(a, sample_graph(&EnsembleParams { seed: 78, ..p }).unwrap());
        }
        let dense = sample_graph(&EnsembleParams {
            n_qubits: 6,
            k: 3,
            clause_density: 3.0,
            mode: EnsembleMode::FixedCount,
            seed: 1,
        })
        .unwrap();
        assert_eq!(dense.num_clauses(), 18);
    }

    #[test]
    fn fixed_count_hits_round_alpha_n() {
        let p = EnsembleParams { n_qubits: 1000, k: 3, clause_density: 0.8125, mode: EnsembleMode::FixedCount, seed: 5 };
        assert_eq!(sample_graph(&p).unwrap().num_clauses(), 813);
    }

    #[test]
    fn binomial_count_concentrates() {
        // Var(M) = C p (1 - p) with C p = 5000.
        let n = 10_000usize;
        let c = binomial_coefficient(n, 3).unwrap() as f64;
        let p = 5000.0 / c;
        let band = 5.0 * (5000.0 * (1.0 - p)).sqrt();
        let mut total = 0.0;
        for seed in 0..100 {
            let gr = sample_graph(&EnsembleParams {
                n_qubits: n,
                k: 3,
                clause_density: 0.5,
                mode: EnsembleMode::Binomial,
                seed,
            })
            .unwrap();
            let m = gr.num_clauses() as f64;
            assert!((m - 5000.0).abs() <= band, "seed {seed}: M = {m}");
            total += m;
        }
        // Mean of 100 draws is within 5 standard errors as well.
        assert!((total / 100.0 - 5000.0).abs() <= band / 10.0);
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial_coefficient(10, 5), Some(252));
        assert_eq!(binomial_coefficient(3, 3), Some(1));
        assert_eq!(binomial_coefficient(2, 3), Some(0));
        assert_eq!(binomial_coefficient(100_000, 4), Some(4_166_416_671_249_975_000));
    }

    #[test]
    fn subsets_enumerated_in_order() {
        let s = all_k_subsets(4, 2);
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = rng_from_seed(11);
        for n in 2..12 {
            let t = random_tree(n, &mut rng).unwrap();
            assert_eq!(t.num_clauses(), n - 1);
            assert!(t.degree_profile().iter().all(|&d| d > 0));
            // Acyclic and connected: the 2-core of a tree is empty.
            assert_eq!(t.hypercore().num_clauses(), 0);
        }
    }

    #[test]
    fn compact_drops_isolated_qubits() {
        let gr = g(6, 2, &[&[1, 4], &[4, 5]]);
        let (c, map) = gr.compact();
        assert_eq!(map, vec![1, 4, 5]);
        assert_eq!(c.clause_lists(), vec![vec![0, 1], vec![1, 2]]);
    }
}
