//! Randomized checks shared by the property suite and the acceptance run.
//! Each check draws everything from one seed and returns a description of
//! the first violation it finds.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use qsat::hamiltonian::kernel_dimension;
use qsat::hypergraph::random_tree;
use qsat::lanczos::{decide_sat, decide_sat_dense, SatOptions, Verdict};
use qsat::prodsat::{enumerate_product_states, product_span_rank, ContinuationOptions, ProductState};
use qsat::projectors::{haar_qubit, haar_vector, ProjectorForm, ProjectorSet};
use qsat::rdm::{product_span_restricted_rank, rdm_rank, DEFAULT_RANK_TOL};
use qsat::seed::{derive_seed, rng_from_seed};
use qsat::{is_clause_coverable, sample_graph, EnsembleMode, EnsembleParams, InteractionGraph};

pub type Check<T> = Result<T, String>;

fn fail<T>(msg: String) -> Check<T> {
    Err(msg)
}

/// A random superposition ψ = Σ λ_α φ_α of N_0 product states and a random
/// qubit subset γ. Factors are often copied from the first state so that
/// the restricted span N_0^(γ) drops below N_0.
///
/// Checks rank ρ_γ ≤ N_0^(γ) ≤ N_0 and returns (rank, N_0^(γ), N_0).
pub fn mixture_rank_bound(seed: u64) -> Check<(usize, usize, usize)> {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(3..=8);
    let n0 = rng.random_range(1..=10);
    let share = rng.random::<f64>();
    let first: Vec<_> = (0..n).map(|_| haar_qubit(&mut rng)).collect();
    let states: Vec<ProductState> = (0..n0)
        .map(|_| {
            let qubits = (0..n).map(|q| if rng.random::<f64>() < share { first[q] } else { haar_qubit(&mut rng) }).collect();
            ProductState::new(qubits).expect("nonzero factors")
        })
        .collect();
    let lambda = haar_vector(&mut rng, n0);
    let mut psi = vec![Complex64::default(); 1 << n];
    for (l, s) in lambda.iter().zip(&states) {
        for (p, x) in psi.iter_mut().zip(s.to_dense().expect("small")) {
            *p += l * x;
        }
    }
    let norm = psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if norm < 1e-6 {
        return Ok((0, 0, n0));
    }
    psi.iter_mut().for_each(|x| *x /= norm);
    let size = rng.random_range(1..n);
    let mut gamma: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        gamma.swap(i, j);
    }
    gamma.truncate(size);
    let rank = rdm_rank(&psi, &gamma, DEFAULT_RANK_TOL).map_err(|e| e.to_string())?.rank;
    let restricted = product_span_restricted_rank(&states, &gamma).map_err(|e| e.to_string())?;
    if rank > restricted || restricted > n0 {
        return fail(format!("seed {seed}: rank {rank}, restricted span {restricted}, N0 {n0}, gamma {gamma:?}"));
    }
    Ok((rank, restricted, n0))
}

/// Generic k = 2 projectors on a random tree with n qubits have an
/// (n+1)-dimensional kernel.
pub fn tree_kernel(seed: u64, n: usize) -> Check<()> {
    let mut rng = rng_from_seed(seed);
    let g = random_tree(n, &mut rng).map_err(|e| e.to_string())?;
    let p = ProjectorSet::sample(&g, derive_seed(seed, &[1]), ProjectorForm::Generic);
    let r = kernel_dimension(&g, &p, None, 12).map_err(|e| e.to_string())?;
    if r.dimension != n + 1 || r.marginal {
        return fail(format!("seed {seed}, n {n}: kernel {} (marginal {})", r.dimension, r.marginal));
    }
    Ok(())
}

/// Largest clause density the ensemble can realize: C(N, k) / N.
pub fn max_density(n: usize, k: usize) -> f64 {
    qsat::hypergraph::binomial_coefficient(n, k).unwrap() as f64 / n as f64
}

/// A random graph with 2 ≤ k ≤ 4 on up to 40 qubits.
pub fn random_small_graph(seed: u64, max_n: usize, max_alpha: f64) -> InteractionGraph {
    let mut rng = rng_from_seed(seed);
    let k = rng.random_range(2..=4);
    let n = rng.random_range(k.max(3)..=max_n);
    let alpha = rng.random_range(0.0..max_alpha.min(max_density(n, k)));
    let mode = if rng.random::<bool>() { EnsembleMode::Binomial } else { EnsembleMode::FixedCount };
    sample_graph(&EnsembleParams { n_qubits: n, k, clause_density: alpha, mode, seed: derive_seed(seed, &[1]) })
        .expect("valid ensemble parameters")
}

/// GF(2) surjectivity implies a dimer covering. Returns whether the
/// premise held, so callers can see the check is not vacuous.
pub fn gf2_implies_coverable(seed: u64) -> Check<bool> {
    let g = random_small_graph(seed, 40, 1.3);
    let surjective = qsat::gf2::gf2_surjective(&g);
    if surjective && !is_clause_coverable(&g) {
        return fail(format!("seed {seed}: GF(2)-surjective but not coverable: {}", g.to_json().unwrap()));
    }
    Ok(surjective)
}

/// Product states continued from every dimer covering span at most the
/// kernel. Returns (R_PS, R_G).
pub fn product_span_within_kernel(g: &InteractionGraph, seed: u64) -> Check<(usize, usize)> {
    let p = ProjectorSet::sample(g, seed, ProjectorForm::Generic);
    let r_g = kernel_dimension(g, &p, None, 12).map_err(|e| e.to_string())?.dimension;
    if !is_clause_coverable(g) {
        return Ok((0, r_g));
    }
    let e = enumerate_product_states(g, &p, 4096, derive_seed(seed, &[1]), &ContinuationOptions::default())
        .map_err(|e| e.to_string())?;
    if !e.failures.is_empty() {
        return fail(format!("seed {seed}: {} continuation failures: {:?}", e.failures.len(), e.failures[0]));
    }
    let states: Vec<ProductState> = e.states.into_iter().map(|s| s.state).collect();
    let r_ps = product_span_rank(&states).map_err(|e| e.to_string())?;
    if r_ps > r_g {
        return fail(format!("seed {seed}: R_PS {r_ps} > R_G {r_g} on {}", g.to_json().unwrap()));
    }
    Ok((r_ps, r_g))
}

/// A graph with M = N clauses of size 3 on n qubits.
pub fn square_graph(seed: u64, n: usize) -> InteractionGraph {
    sample_graph(&EnsembleParams { n_qubits: n, k: 3, clause_density: 1.0, mode: EnsembleMode::FixedCount, seed })
        .expect("valid ensemble parameters")
}

/// Dense and Lanczos SAT decisions coincide; returns the common verdict.
pub fn dense_iterative_agree(seed: u64) -> Check<Verdict> {
    let mut rng = rng_from_seed(seed);
    let k = rng.random_range(2..=3);
    let n = rng.random_range(k..=6);
    let alpha = rng.random_range(0.2..2.5f64).min(max_density(n, k));
    let g = sample_graph(&EnsembleParams {
        n_qubits: n,
        k,
        clause_density: alpha,
        mode: EnsembleMode::FixedCount,
        seed: derive_seed(seed, &[1]),
    })
    .map_err(|e| e.to_string())?;
    let p = ProjectorSet::sample(&g, derive_seed(seed, &[2]), ProjectorForm::Generic);
    let opts = SatOptions { seed: derive_seed(seed, &[3]), ..SatOptions::default() };
    let dense = decide_sat_dense(&g, &p, &opts, 12).map_err(|e| e.to_string())?;
    let iterative = decide_sat(&g, &p, &opts).map_err(|e| e.to_string())?;
    if dense.verdict != iterative.verdict || dense.verdict == Verdict::Undecided {
        return fail(format!(
            "seed {seed}: dense {} (λ_min {:e}) vs iterative {} (θ {:e}, r {:e})",
            dense.verdict, dense.min_eigenvalue, iterative.verdict, iterative.min_eigenvalue, iterative.residual
        ));
    }
    Ok(dense.verdict)
}
