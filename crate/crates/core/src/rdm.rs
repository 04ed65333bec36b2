//! Reduced-density-matrix rank diagnostics.
//!
//! If ψ lies in the span of N_0 product states, the reduced density matrix
//! on any qubit subset γ has rank at most the dimension of their span
//! restricted to γ, hence at most N_0. A rank above the size of a
//! product basis therefore certifies entanglement in the ground space.

use std::collections::BTreeMap;

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::binomial_coefficient;
use crate::prodsat::{gram_rank, ProductState};
use crate::projectors::haar_vector;
use crate::seed::rng_from_seed;

pub const MAX_SUBSET: usize = 12;
pub const MAX_SUBSETS: u128 = 10_000;
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Basis offset of every assignment to the listed qubits (bit j of the
/// local index is qubit `qubits[j]`).
fn offsets(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|l| qubits.iter().enumerate().filter(|(j, _)| l >> j & 1 == 1).map(|(_, &q)| 1 << q).sum())
        .collect()
}

fn validate_subset(n: usize, gamma: &[usize]) -> Result<Vec<usize>> {
    if gamma.len() > MAX_SUBSET {
        return Err(Error::LimitExceeded { what: "subset size", value: gamma.len(), limit: MAX_SUBSET });
    }
    let mut g = gamma.to_vec();
    g.sort_unstable();
    g.dedup();
    if g.len() != gamma.len() || g.last().is_some_and(|&q| q >= n) {
        return Err(Error::InvalidInput(format!("subset {gamma:?} is not a set of distinct qubits below {n}")));
    }
    Ok(g)
}

/// ρ_γ = Tr_{rest} |ψ⟩⟨ψ|, with bit j of the row index on qubit γ_j
/// (γ taken in ascending order).
pub fn reduced_density_matrix(psi: &[Complex64], gamma: &[usize]) -> Result<Mat<Complex64>> {
    let n = psi.len().trailing_zeros() as usize;
    if psi.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, got: psi.len() });
    }
    let gamma = validate_subset(n, gamma)?;
    let rest: Vec<usize> = (0..n).filter(|q| !gamma.contains(q)).collect();
    let (inner_off, outer_off) = (offsets(&gamma), offsets(&rest));
    let a = Mat::<Complex64>::from_fn(inner_off.len(), outer_off.len(), |i, r| psi[inner_off[i] + outer_off[r]]);
    Ok(&a * a.adjoint())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdmReport {
    pub subset: Vec<usize>,
    pub rank: usize,
    /// Up to three eigenvalues on each side of the threshold, descending.
    pub eigenvalues_near_threshold: Vec<f64>,
    pub tolerance: f64,
    pub marginal: bool,
}

/// Rank of ρ_γ: eigenvalues above `tol` (ρ has unit trace), rechecked a
/// decade either side.
pub fn rdm_rank(psi: &[Complex64], gamma: &[usize], tol: f64) -> Result<RdmReport> {
    let rho = reduced_density_matrix(psi, gamma)?;
    let mut eigs = rho
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    eigs.sort_by(|a, b| b.total_cmp(a));
    let count = |t: f64| eigs.iter().filter(|&&e| e > t).count();
    let rank = count(tol);
    let marginal = count(tol / 10.0) != rank || count(tol * 10.0) != rank;
    let lo = rank.saturating_sub(3);
    let hi = (rank + 3).min(eigs.len());
    let mut subset = gamma.to_vec();
    subset.sort_unstable();
    Ok(RdmReport { subset, rank, eigenvalues_near_threshold: eigs[lo..hi].to_vec(), tolerance: tol, marginal })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankHistogram {
    pub subset_size: usize,
    /// rank -> number of subsets.
    pub counts: BTreeMap<usize, usize>,
    pub subsets: usize,
    pub marginal_subsets: usize,
    pub tolerance: f64,
    /// Seed of the random combination of basis vectors.
    pub seed: u64,
}

impl RankHistogram {
    pub fn max_rank(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn has_rank(&self, r: usize) -> bool {
        self.counts.contains_key(&r)
    }
}

/// A Haar-random unit vector in the span of an orthonormal basis.
pub fn generic_combination(basis: &[Vec<Complex64>], seed: u64) -> Result<Vec<Complex64>> {
    let first = basis.first().ok_or_else(|| Error::InvalidInput("empty ground basis".into()))?;
    let dim = first.len();
    if let Some(v) = basis.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    let mut rng = rng_from_seed(seed);
    let c = haar_vector(&mut rng, basis.len());
    let mut psi = vec![Complex64::default(); dim];
    for (ci, v) in c.iter().zip(basis) {
        for (p, x) in psi.iter_mut().zip(v) {
            *p += ci * x;
        }
    }
    let n = psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|x| *x /= n);
    Ok(psi)
}

/// All size-b subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if b > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..b).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..b).rev().find(|&i| cur[i] < n - b + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..b {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Tallies RDM ranks of one generic ground state over every size-b subset.
pub fn rank_histogram(basis: &[Vec<Complex64>], b: usize, tol: f64, seed: u64) -> Result<RankHistogram> {
    let psi = generic_combination(basis, seed)?;
    let n = psi.len().trailing_zeros() as usize;
    if b > MAX_SUBSET || b > n {
        return Err(Error::LimitExceeded { what: "subset size", value: b, limit: MAX_SUBSET.min(n) });
    }
    let total = binomial_coefficient(n, b).unwrap_or(u128::MAX);
    if total > MAX_SUBSETS {
        return Err(Error::LimitExceeded { what: "subsets", value: total.min(usize::MAX as u128) as usize, limit: MAX_SUBSETS as usize });
    }
    let mut counts = BTreeMap::new();
    let mut marginal_subsets = 0;
    let all = subsets(n, b);
    for gamma in &all {
        let r = rdm_rank(&psi, gamma, tol)?;
        *counts.entry(r.rank).or_insert(0) += 1;
        marginal_subsets += usize::from(r.marginal);
    }
    Ok(RankHistogram { subset_size: b, counts, subsets: all.len(), marginal_subsets, tolerance: tol, seed })
}

/// Dimension of the span of the product states restricted to γ.
pub fn product_span_restricted_rank(states: &[ProductState], gamma: &[usize]) -> Result<usize> {
    let n = states.first().map_or(0, ProductState::n_qubits);
    let gamma = validate_subset(n, gamma)?;
    if gamma.is_empty() {
        return if states.is_empty() { Err(Error::InvalidInput("no product states".into())) } else { Ok(1) };
    }
    Ok(gram_rank(states, Some(&gamma))?.0)
}
