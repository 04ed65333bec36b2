//! Clause-saturating matchings of the clause–qubit factor graph.
//!
//! A dimer covering assigns every clause a distinct qubit among its members.
//! Maximum matchings use Hopcroft–Karp; covering counts use a depth-first
//! enumeration over clauses memoized on the set of used qubits.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::InteractionGraph;

/// Default qubit-count limit for exact covering enumeration.
pub const DEFAULT_COUNT_LIMIT: usize = 24;

/// Partial injective map from clauses to member qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    assignment: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(num_clauses: usize) -> Self {
        Self { assignment: vec![None; num_clauses] }
    }

    /// Builds a matching from an explicit assignment, checking membership
    /// and injectivity against `g`.
    pub fn from_assignment(g: &InteractionGraph, assignment: Vec<Option<usize>>) -> Result<Self> {
        if assignment.len() != g.num_clauses() {
            return Err(Error::DimensionMismatch { expected: g.num_clauses(), got: assignment.len() });
        }
        let mut used = vec![false; g.n_qubits()];
        for (m, q) in assignment.iter().enumerate() {
            let Some(q) = *q else { continue };
            if !g.clause(m).contains(&q) {
                return Err(Error::InvalidInput(format!("qubit {q} is not a member of clause {m}")));
            }
            if std::mem::replace(&mut used[q], true) {
                return Err(Error::InvalidInput(format!("qubit {q} is matched twice")));
            }
        }
        Ok(Self { assignment })
    }

    /// A covering given as one qubit per clause.
    pub fn from_covering(g: &InteractionGraph, qubits: &[usize]) -> Result<Self> {
        Self::from_assignment(g, qubits.iter().map(|&q| Some(q)).collect())
    }

    pub fn get(&self, clause: usize) -> Option<usize> {
        self.assignment[clause]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn size(&self) -> usize {
        self.assignment.iter().flatten().count()
    }

    pub fn is_covering(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// The matched qubit of every clause, if this is a covering.
    pub fn covering_qubits(&self) -> Option<Vec<usize>> {
        self.assignment.iter().copied().collect()
    }
}

/// Maximum-cardinality clause–qubit matching by Hopcroft–Karp.
///
/// Alternating paths are explored with clause members in ascending order,
/// so the result is deterministic and prefers low qubit indices.
pub fn max_clause_matching(g: &InteractionGraph) -> Matching {
    const FREE: usize = usize::MAX;
    let m_count = g.num_clauses();
    let mut clause_to_qubit = vec![FREE; m_count];
    let mut qubit_to_clause = vec![FREE; g.n_qubits()];

    // Greedy start.
    for (m, slot) in clause_to_qubit.iter_mut().enumerate() {
        if let Some(&q) = g.clause(m).iter().find(|&&q| qubit_to_clause[q] == FREE) {
            *slot = q;
            qubit_to_clause[q] = m;
        }
    }

    let mut dist = vec![usize::MAX; m_count];
    let mut queue = VecDeque::new();
    let mut next_edge = vec![0usize; m_count];
    let mut stack: Vec<usize> = Vec::new();
    loop {
        // Layer clauses by alternating distance from the free clauses.
        queue.clear();
        for m in 0..m_count {
            if clause_to_qubit[m] == FREE {
                dist[m] = 0;
                queue.push_back(m);
            } else {
                dist[m] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(m) = queue.pop_front() {
            for &q in g.clause(m) {
                let owner = qubit_to_clause[q];
                if owner == FREE {
                    found = true;
                } else if dist[owner] == usize::MAX {
                    dist[owner] = dist[m] + 1;
                    queue.push_back(owner);
                }
            }
        }
        if !found {
            break;
        }

        // Vertex-disjoint shortest augmenting paths, iterative DFS.
        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..m_count {
            if clause_to_qubit[root] != FREE {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&m) = stack.last() {
                let clause = g.clause(m);
                if next_edge[m] == clause.len() {
                    dist[m] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let q = clause[next_edge[m]];
                let owner = qubit_to_clause[q];
                if owner == FREE {
                    // Augment along the stack: each clause takes the qubit
                    // its successor currently holds, the last takes q.
                    let mut take = q;
                    for &c in stack.iter().rev() {
                        let prev = clause_to_qubit[c];
                        clause_to_qubit[c] = take;
                        qubit_to_clause[take] = c;
                        take = prev;
                    }
                    for &c in &stack {
                        dist[c] = usize::MAX;
                    }
                    break;
                }
                next_edge[m] += 1;
                if dist[owner] != usize::MAX && dist[owner] == dist[m] + 1 {
                    stack.push(owner);
                }
            }
        }
    }

    Matching {
        assignment: clause_to_qubit.into_iter().map(|q| (q != FREE).then_some(q)).collect(),
    }
}

/// True iff some matching covers every clause.
pub fn is_clause_coverable(g: &InteractionGraph) -> bool {
    if g.num_clauses() > g.n_qubits() {
        return false;
    }
    max_clause_matching(g).is_covering()
}

/// Exact number of dimer coverings of `g`, for graphs with at most `limit`
/// qubits touched by clauses.
pub fn count_dimer_coverings(g: &InteractionGraph, limit: usize) -> Result<u128> {
    let (compact, _) = g.compact();
    let n = if g.num_clauses() == 0 { 0 } else { compact.n_qubits() };
    if n > limit || n > 64 {
        return Err(Error::LimitExceeded { what: "active qubits", value: n, limit: limit.min(64) });
    }
    let rows: Vec<u64> = compact.clauses().map(|c| c.iter().fold(0u64, |acc, &q| acc | 1 << q)).collect();
    Ok(count_row_masks(&rows))
}

/// Number of ways to pick a distinct column for every row of a 0/1
/// adjacency matrix (rows = clauses, columns = qubits). With a square
/// all-ones matrix this is n!.
pub fn count_coverings_adjacency(adjacency: &[Vec<bool>]) -> Result<u128> {
    let cols = adjacency.first().map_or(0, Vec::len);
    if cols > 64 {
        return Err(Error::LimitExceeded { what: "columns", value: cols, limit: 64 });
    }
    let mut rows = Vec::with_capacity(adjacency.len());
    for row in adjacency {
        if row.len() != cols {
            return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
        }
        rows.push(row.iter().enumerate().fold(0u64, |acc, (j, &b)| if b { acc | 1 << j } else { acc }));
    }
    Ok(count_row_masks(&rows))
}

/// Counts systems of distinct representatives. Clauses are processed in a
/// fixed order, so the set of used columns determines the clause index and
/// alone keys the memo.
fn count_row_masks(rows: &[u64]) -> u128 {
    if rows.is_empty() {
        return 1;
    }
    // Fewest options first keeps the reachable mask set small.
    let mut order: Vec<u64> = rows.to_vec();
    order.sort_by_key(|r| r.count_ones());
    let mut memo = HashMap::new();
    count_from(&order, 0, &mut memo)
}

fn count_from(rows: &[u64], used: u64, memo: &mut HashMap<u64, u128>) -> u128 {
    let i = used.count_ones() as usize;
    if i == rows.len() {
        return 1;
    }
    if let Some(&c) = memo.get(&used) {
        return c;
    }
    let mut free = rows[i] & !used;
    let mut total = 0u128;
    while free != 0 {
        let bit = free & free.wrapping_neg();
        free ^= bit;
        total += count_from(rows, used | bit, memo);
    }
    memo.insert(used, total);
    total
}

/// Lists up to `max` dimer coverings (qubit per clause), in lexicographic
/// order of the clause-0, clause-1, ... choices. The boolean is true when
/// the list was truncated.
pub fn enumerate_dimer_coverings(g: &InteractionGraph, max: usize) -> (Vec<Vec<usize>>, bool) {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(g.num_clauses());
    let mut used = vec![false; g.n_qubits()];
    let truncated = enumerate_from(g, &mut current, &mut used, &mut out, max);
    (out, truncated)
}

fn enumerate_from(
    g: &InteractionGraph,
    current: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    max: usize,
) -> bool {
    let m = current.len();
    if m == g.num_clauses() {
        if out.len() == max {
            return true;
        }
        out.push(current.clone());
        return false;
    }
    for &q in g.clause(m) {
        if used[q] {
            continue;
        }
        used[q] = true;
        current.push(q);
        let stop = enumerate_from(g, current, used, out, max);
        current.pop();
        used[q] = false;
        if stop {
            return true;
        }
    }
    false
}
