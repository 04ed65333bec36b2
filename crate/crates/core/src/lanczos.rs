//! Iterative SAT decision from the bottom of the spectrum of H.
//!
//! Plain Lanczos with local reorthogonalization, using only the matrix-free
//! product. Only the smallest Ritz value and its residual are needed, so no
//! Krylov basis is stored; loss of global orthogonality merely duplicates
//! converged Ritz values and never pushes one below the true minimum by more
//! than rounding. The smallest eigenpair of the tridiagonal matrix comes
//! from Sturm-sequence bisection and inverse iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{apply_hamiltonian_into, spectrum, KernelMethod};
use crate::hypergraph::InteractionGraph;
use crate::projectors::{haar_vector, inner, norm, ProjectorSet};
use crate::seed::rng_from_seed;

pub const DEFAULT_ITERATIVE_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatOptions {
    /// A Ritz value below this certifies SAT.
    pub tol_zero: f64,
    /// A converged lower bound above this certifies UNSAT.
    pub tol_gap: f64,
    pub max_iters: usize,
    /// Seed of the random start vector.
    pub seed: u64,
    pub iterative_limit: usize,
}

impl Default for SatOptions {
    fn default() -> Self {
        Self { tol_zero: 1e-10, tol_gap: 1e-9, max_iters: 5000, seed: 0, iterative_limit: DEFAULT_ITERATIVE_LIMIT }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Sat,
    Unsat,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatVerdict {
    pub verdict: Verdict,
    /// Smallest Ritz value (iterative) or smallest eigenvalue (dense).
    pub min_eigenvalue: f64,
    /// Residual norm of the corresponding Ritz pair.
    pub residual: f64,
    pub iterations: usize,
    pub method: KernelMethod,
}

/// Number of eigenvalues of the symmetric tridiagonal (a, b) below x.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..a.len() {
        let off = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] };
        d = a[i] - x - if i == 0 { 0.0 } else { off / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix with diagonal `a`
/// and off-diagonal `b`, and the last component of its unit eigenvector.
pub(crate) fn smallest_tridiagonal_eigenpair(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len();
    let radius = |i: usize| {
        (if i > 0 { b[i - 1].abs() } else { 0.0 }) + if i + 1 < n { b[i].abs() } else { 0.0 }
    };
    let mut lo = (0..n).map(|i| a[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| a[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(a, b, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    (theta, last_component(a, b, theta))
}

/// Inverse iteration on T - theta I, factored by tridiagonal LU with
/// partial pivoting; returns |x_last| / |x|.
fn last_component(a: &[f64], b: &[f64], theta: f64) -> f64 {
    let n = a.len();
    if n == 1 {
        return 1.0;
    }
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let mut dl = b.to_vec();
    let mut d: Vec<f64> = a.iter().map(|&ai| ai - theta).collect();
    let mut du = b.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - f * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            swapped[i] = true;
        }
    }
    for di in d.iter_mut() {
        if di.abs() < tiny {
            *di = tiny.copysign(*di);
        }
    }
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        for i in 0..n - 1 {
            if swapped[i] {
                let t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - dl[i] * x[i];
            } else {
                x[i + 1] -= dl[i] * x[i];
            }
        }
        x[n - 1] /= d[n - 1];
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !nrm.is_finite() || nrm == 0.0 {
            return 1.0;
        }
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x[n - 1].abs()
}

fn classify(theta: f64, residual: f64, converged: bool, opts: &SatOptions) -> Option<Verdict> {
    if theta < opts.tol_zero {
        Some(Verdict::Sat)
    } else if converged && theta - residual > opts.tol_gap {
        Some(Verdict::Unsat)
    } else {
        None
    }
}

/// Decides SAT / UNSAT / UNDECIDED for H by Lanczos iteration.
///
/// SAT as soon as the smallest Ritz value drops below `tol_zero`. UNSAT
/// once the Ritz pair has converged (residual at most a tenth of the Ritz
/// value, or an invariant subspace) and the implied lower bound exceeds
/// `tol_gap`. UNDECIDED when neither happens within `max_iters` products.
pub fn decide_sat(g: &InteractionGraph, p: &ProjectorSet, opts: &SatOptions) -> Result<SatVerdict> {
    if g.n_qubits() > opts.iterative_limit {
        return Err(Error::LimitExceeded { what: "qubits for iterative decision", value: g.n_qubits(), limit: opts.iterative_limit });
    }
    if !(opts.tol_zero > 0.0 && opts.tol_gap >= opts.tol_zero) {
        return Err(Error::InvalidInput(format!(
            "need 0 < tol_zero <= tol_gap, got {} and {}",
            opts.tol_zero, opts.tol_gap
        )));
    }
    let dim = 1usize << g.n_qubits();
    let mut rng = rng_from_seed(opts.seed);
    let mut v = haar_vector(&mut rng, dim);
    let mut v_prev = vec![Complex64::default(); dim];
    let mut w = vec![Complex64::default(); dim];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut beta_prev = 0.0;
    let mut last = (f64::INFINITY, f64::INFINITY);
    let mut spectral_scale = 0.0f64;

    for j in 0..opts.max_iters {
        apply_hamiltonian_into(g, p, &v, &mut w)?;
        let mut alpha = inner(&v, &w).re;
        for ((wi, vi), pi) in w.iter_mut().zip(&v).zip(&v_prev) {
            *wi -= vi * alpha + pi * beta_prev;
        }
        // One extra pass against the two latest vectors.
        let c = inner(&v, &w);
        let c_prev = inner(&v_prev, &w);
        for ((wi, vi), pi) in w.iter_mut().zip(&v).zip(&v_prev) {
            *wi -= vi * c + pi * c_prev;
        }
        alpha += c.re;
        let beta = norm(&w);
        alphas.push(alpha);
        spectral_scale = spectral_scale.max(alpha.abs() + beta + beta_prev);
        let iterations = j + 1;
        let breakdown = beta <= 1e-13 * spectral_scale.max(f64::MIN_POSITIVE);
        let check_every = if iterations < 500 { 10 } else { 50 };
        if breakdown || iterations % check_every == 0 || iterations == opts.max_iters {
            let (theta, s_last) = smallest_tridiagonal_eigenpair(&alphas, &betas);
            let residual = if breakdown { 0.0 } else { beta * s_last };
            last = (theta, residual);
            let converged = breakdown || residual <= 0.1 * theta.abs();
            if let Some(verdict) = classify(theta, residual, converged, opts) {
                return Ok(SatVerdict { verdict, min_eigenvalue: theta, residual, iterations, method: KernelMethod::Iterative });
            }
            if breakdown {
                return Ok(SatVerdict {
                    verdict: Verdict::Undecided,
                    min_eigenvalue: theta,
                    residual,
                    iterations,
                    method: KernelMethod::Iterative,
                });
            }
        }
        betas.push(beta);
        std::mem::swap(&mut v_prev, &mut v);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / beta;
        }
        beta_prev = beta;
    }
    Ok(SatVerdict {
        verdict: Verdict::Undecided,
        min_eigenvalue: last.0,
        residual: last.1,
        iterations: opts.max_iters,
        method: KernelMethod::Iterative,
    })
}

/// The same classification from the exact dense spectrum.
pub fn decide_sat_dense(g: &InteractionGraph, p: &ProjectorSet, opts: &SatOptions, dense_limit: usize) -> Result<SatVerdict> {
    let eigs = spectrum(g, p, dense_limit)?;
    let min = eigs.first().copied().unwrap_or(0.0);
    let verdict = classify(min, 0.0, true, opts).unwrap_or(Verdict::Undecided);
    Ok(SatVerdict { verdict, min_eigenvalue: min, residual: 0.0, iterations: 0, method: KernelMethod::Dense })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::kernel_dimension;
    use crate::instances::ReferenceInstance;
    use crate::projectors::ProjectorForm;

    #[test]
    fn tridiagonal_smallest_eigenvalue() {
        // Path-graph Laplacian-like matrix: eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 40;
        let a = vec![2.0; n];
        let b = vec![-1.0; n - 1];
        let (theta, last) = smallest_tridiagonal_eigenpair(&a, &b);
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((theta - exact).abs() < 1e-14);
        // Eigenvector components sin(j k pi / (n + 1)), normalized.
        let comp = |j: usize| (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).sin();
        let nrm = (1..=n).map(|j| comp(j).powi(2)).sum::<f64>().sqrt();
        assert!((last - comp(n) / nrm).abs() < 1e-10);
        assert_eq!(smallest_tridiagonal_eigenpair(&[3.5], &[]), (3.5, 1.0));
    }

    #[test]
    fn sturm_counts() {
        let a = [1.0, 2.0, 3.0];
        let b = [0.0, 0.0];
        assert_eq!(sturm_count(&a, &b, 0.5), 0);
        assert_eq!(sturm_count(&a, &b, 2.5), 2);
        assert_eq!(sturm_count(&a, &b, 9.0), 3);
    }

    #[test]
    fn empty_graph_is_sat_with_zero() {
        let g = InteractionGraph::empty(5, 3).unwrap();
        let p = ProjectorSet::sample(&g, 0, ProjectorForm::Generic);
        let v = decide_sat(&g, &p, &SatOptions::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Sat);
        assert_eq!(v.min_eigenvalue, 0.0);
    }

    #[test]
    fn reference_instances() {
        let opts = SatOptions { seed: 3, ..SatOptions::default() };
        let a = ReferenceInstance::A.graph();
        let pa = ProjectorSet::sample(&a, 7, ProjectorForm::Generic);
        assert_eq!(decide_sat(&a, &pa, &opts).unwrap().verdict, Verdict::Sat);
        let c = ReferenceInstance::C.graph();
        let pc = ProjectorSet::sample(&c, 3, ProjectorForm::Generic);
        let v = decide_sat(&c, &pc, &opts).unwrap();
        assert_eq!(v.verdict, Verdict::Unsat, "{v:?}");
        let dense = kernel_dimension(&c, &pc, None, 12).unwrap();
        assert!((v.min_eigenvalue - dense.spectrum_evidence[0]).abs() <= v.residual.max(1e-12));
    }

    #[test]
    fn rejects_bad_tolerances() {
        let g = InteractionGraph::empty(3, 3).unwrap();
        let p = ProjectorSet::sample(&g, 0, ProjectorForm::Generic);
        let opts = SatOptions { tol_zero: 1e-6, tol_gap: 1e-9, ..SatOptions::default() };
        assert!(decide_sat(&g, &p, &opts).is_err());
    }
}
