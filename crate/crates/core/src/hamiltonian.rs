//! The projector Hamiltonian H = Σ_m |φ^m⟩⟨φ^m| and its kernel.
//!
//! Qubit n is bit n of a computational-basis index. A clause term acts on
//! the 2^k amplitudes that share all bits outside the clause (a fiber), so
//! applying H costs O(M 2^N) and never forms a matrix.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::InteractionGraph;
use crate::projectors::ProjectorSet;

/// Largest qubit count accepted by the matrix-free product.
pub const MAX_QUBITS: usize = 30;
/// Largest qubit count for dense diagonalization. A 2^13 complex matrix
/// already takes 1 GiB, so larger systems go through the iterative path.
pub const DEFAULT_DENSE_LIMIT: usize = 12;
/// Zero threshold relative to the largest eigenvalue.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-13;
/// Minimum ratio between the first retained eigenvalue and the tolerance.
pub const GAP_RATIO_MIN: f64 = 1e3;

/// Index arithmetic for one clause: the basis offsets of its 2^k local
/// states and a map from fiber number to fiber base index.
pub(crate) struct ClauseEmbedding {
    pub offsets: Vec<usize>,
    positions: Vec<usize>,
}

impl ClauseEmbedding {
    pub fn new(clause: &[usize]) -> Self {
        let offsets = (0..1usize << clause.len())
            .map(|l| clause.iter().enumerate().filter(|(j, _)| l >> j & 1 == 1).map(|(_, &q)| 1 << q).sum())
            .collect();
        Self { offsets, positions: clause.to_vec() }
    }

    /// Base index of fiber `f`: the bits of `f` spread over the qubits
    /// outside the clause.
    #[inline]
    pub fn base(&self, mut f: usize) -> usize {
        for &p in &self.positions {
            let low = f & ((1 << p) - 1);
            f = ((f >> p) << (p + 1)) | low;
        }
        f
    }
}

fn check_inputs(g: &InteractionGraph, p: &ProjectorSet) -> Result<()> {
    if g.n_qubits() > MAX_QUBITS {
        return Err(Error::LimitExceeded { what: "qubits", value: g.n_qubits(), limit: MAX_QUBITS });
    }
    if p.len() != g.num_clauses() {
        return Err(Error::DimensionMismatch { expected: g.num_clauses(), got: p.len() });
    }
    if p.k() != g.k() {
        return Err(Error::DimensionMismatch { expected: g.k(), got: p.k() });
    }
    Ok(())
}

/// out = H psi.
pub fn apply_hamiltonian_into(
    g: &InteractionGraph,
    p: &ProjectorSet,
    psi: &[Complex64],
    out: &mut [Complex64],
) -> Result<()> {
    check_inputs(g, p)?;
    let dim = 1usize << g.n_qubits();
    if psi.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: psi.len() });
    }
    if out.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: out.len() });
    }
    out.iter_mut().for_each(|x| *x = Complex64::default());
    let fibers = dim >> g.k();
    for (m, clause) in g.clauses().enumerate() {
        let emb = ClauseEmbedding::new(clause);
        let phi = p.vector(m);
        for f in 0..fibers {
            let base = emb.base(f);
            let c: Complex64 = emb.offsets.iter().zip(phi).map(|(&o, a)| a.conj() * psi[base + o]).sum();
            for (&o, a) in emb.offsets.iter().zip(phi) {
                out[base + o] += a * c;
            }
        }
    }
    Ok(())
}

pub fn apply_hamiltonian(g: &InteractionGraph, p: &ProjectorSet, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::default(); psi.len()];
    apply_hamiltonian_into(g, p, psi, &mut out)?;
    Ok(out)
}

/// ⟨psi|H|psi⟩.
pub fn energy(g: &InteractionGraph, p: &ProjectorSet, psi: &[Complex64]) -> Result<f64> {
    let h = apply_hamiltonian(g, p, psi)?;
    Ok(psi.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum())
}

/// H as a dense 2^N x 2^N matrix, assembled block by block.
pub fn dense_hamiltonian(g: &InteractionGraph, p: &ProjectorSet, dense_limit: usize) -> Result<Mat<Complex64>> {
    check_inputs(g, p)?;
    if g.n_qubits() > dense_limit {
        return Err(Error::LimitExceeded { what: "qubits for dense diagonalization", value: g.n_qubits(), limit: dense_limit });
    }
    let dim = 1usize << g.n_qubits();
    let mut h = Mat::<Complex64>::zeros(dim, dim);
    let fibers = dim >> g.k();
    for (m, clause) in g.clauses().enumerate() {
        let emb = ClauseEmbedding::new(clause);
        let phi = p.vector(m);
        for f in 0..fibers {
            let base = emb.base(f);
            for (&oc, b) in emb.offsets.iter().zip(phi) {
                for (&or, a) in emb.offsets.iter().zip(phi) {
                    h[(base + or, base + oc)] += a * b.conj();
                }
            }
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMethod {
    Dense,
    Iterative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelResult {
    pub dimension: usize,
    /// Absolute zero threshold used for the count.
    pub tolerance: f64,
    pub largest_eigenvalue: f64,
    /// Up to three eigenvalues on each side of the threshold, ascending.
    pub spectrum_evidence: Vec<f64>,
    /// Smallest eigenvalue at or above the threshold divided by the
    /// threshold; absent when every eigenvalue counts as zero.
    pub gap_ratio: Option<f64>,
    pub count_at_tol_over_10: usize,
    pub count_at_tol_times_10: usize,
    pub marginal: bool,
    pub method: KernelMethod,
}

impl KernelResult {
    fn from_spectrum(eigs: &[f64], tol: Option<f64>) -> Self {
        let largest = eigs.last().copied().unwrap_or(0.0);
        let tol = tol.unwrap_or(DEFAULT_RELATIVE_TOL * largest.max(1.0));
        let count = |t: f64| eigs.partition_point(|&e| e < t);
        let dimension = count(tol);
        let lo = dimension.saturating_sub(3);
        let hi = (dimension + 3).min(eigs.len());
        let gap_ratio = eigs.get(dimension).map(|&e| e / tol);
        let count_at_tol_over_10 = count(tol / 10.0);
        let count_at_tol_times_10 = count(tol * 10.0);
        let marginal = count_at_tol_over_10 != dimension
            || count_at_tol_times_10 != dimension
            || gap_ratio.is_some_and(|r| r < GAP_RATIO_MIN);
        Self {
            dimension,
            tolerance: tol,
            largest_eigenvalue: largest,
            spectrum_evidence: eigs[lo..hi].to_vec(),
            gap_ratio,
            count_at_tol_over_10,
            count_at_tol_times_10,
            marginal,
            method: KernelMethod::Dense,
        }
    }
}

fn sorted_eigenvalues(h: &Mat<Complex64>) -> Result<Vec<f64>> {
    let mut eigs = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Ascending spectrum of H by dense diagonalization.
pub fn spectrum(g: &InteractionGraph, p: &ProjectorSet, dense_limit: usize) -> Result<Vec<f64>> {
    sorted_eigenvalues(&dense_hamiltonian(g, p, dense_limit)?)
}

/// Dimension of ker H by counting eigenvalues below `tol` (default
/// 1e-13 times the largest eigenvalue), with recounts a decade either side
/// and a gap-ratio check.
pub fn kernel_dimension(g: &InteractionGraph, p: &ProjectorSet, tol: Option<f64>, dense_limit: usize) -> Result<KernelResult> {
    Ok(KernelResult::from_spectrum(&spectrum(g, p, dense_limit)?, tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundSpace {
    /// Orthonormal vectors spanning the eigenspace below the threshold, or
    /// the single lowest eigenvector when the kernel is empty.
    pub basis: Vec<Vec<Complex64>>,
    pub energies: Vec<f64>,
    pub kernel: KernelResult,
}

pub fn ground_space_basis(g: &InteractionGraph, p: &ProjectorSet, tol: Option<f64>, dense_limit: usize) -> Result<GroundSpace> {
    let h = dense_hamiltonian(g, p, dense_limit)?;
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let n = s.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let eigs: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
    let kernel = KernelResult::from_spectrum(&eigs, tol);
    let keep = kernel.dimension.max(1);
    let basis = order[..keep].iter().map(|&c| (0..n).map(|r| u[(r, c)]).collect()).collect();
    Ok(GroundSpace { basis, energies: eigs[..keep].to_vec(), kernel })
}
