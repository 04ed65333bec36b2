//! Satisfying product states.
//!
//! With product projectors and a dimer covering, each clause is killed by
//! setting its matched qubit orthogonal to the clause's local factor on that
//! qubit. Homotopy continuation then carries such a state along the
//! straight-line path to arbitrary target projectors. At every step each
//! qubit gets a local chart ψ_n = e_n + z_n e⊥_n centred on the current
//! solution; the linearized equations J δz = −f are solved in the
//! least-norm sense for the predictor, and damped Newton on the full
//! multilinear residual polishes the result.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::MAX_QUBITS;
use crate::hypergraph::InteractionGraph;
use crate::matching::{count_dimer_coverings, enumerate_dimer_coverings, max_clause_matching, Matching, DEFAULT_COUNT_LIMIT};
use crate::projectors::{haar_qubit, inner, tensor_product, ProjectorForm, ProjectorSet, Qubit};
use crate::seed::{derive_seed, rng_from_seed, QsatRng};

/// Per-qubit fidelity above which two product states are the same.
pub const SAME_STATE_FIDELITY: f64 = 1.0 - 1e-8;
/// Gram eigenvalues below this fraction of the largest count as zero.
pub const SPAN_RANK_RELATIVE_TOL: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn normalized(q: Qubit) -> Option<Qubit> {
    let n = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    (n > 1e-300 && n.is_finite()).then(|| [q[0] / n, q[1] / n])
}

/// The unit vector orthogonal to `q` with the standard phase.
fn perpendicular(q: &Qubit) -> Qubit {
    [-q[1].conj(), q[0].conj()]
}

/// Stereographic record of a single-qubit state in the computational basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    /// False: ψ ∝ (z, 1). True: ψ ∝ (1, w).
    pub flipped: bool,
    pub coordinate: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    qubits: Vec<Qubit>,
}

impl ProductState {
    /// Normalizes each factor; rejects zero vectors.
    pub fn new(qubits: Vec<Qubit>) -> Result<Self> {
        let qubits = qubits
            .into_iter()
            .enumerate()
            .map(|(n, q)| normalized(q).ok_or_else(|| Error::InvalidInput(format!("qubit {n} has a zero state"))))
            .collect::<Result<_>>()?;
        Ok(Self { qubits })
    }

    pub fn random(n_qubits: usize, rng: &mut QsatRng) -> Self {
        Self { qubits: (0..n_qubits).map(|_| haar_qubit(rng)).collect() }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn qubit(&self, n: usize) -> Qubit {
        self.qubits[n]
    }

    /// The chart with |coordinate| ≤ 1: (z, 1) unless |z| would exceed one.
    pub fn chart(&self, n: usize) -> Chart {
        let [a, b] = self.qubits[n];
        if a.norm() <= b.norm() {
            Chart { flipped: false, coordinate: a / b }
        } else {
            Chart { flipped: true, coordinate: b / a }
        }
    }

    pub fn charts(&self) -> Vec<Chart> {
        (0..self.n_qubits()).map(|n| self.chart(n)).collect()
    }

    /// ⊗_n ψ_n as a 2^N vector (qubit n on bit n).
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        if self.n_qubits() > MAX_QUBITS {
            return Err(Error::LimitExceeded { what: "qubits", value: self.n_qubits(), limit: MAX_QUBITS });
        }
        Ok(tensor_product(&self.qubits))
    }

    /// Π_n ⟨self_n|other_n⟩ over the given qubits (all when `None`).
    pub fn overlap_on(&self, other: &Self, qubits: Option<&[usize]>) -> Complex64 {
        match qubits {
            Some(qs) => qs.iter().map(|&n| inner(&self.qubits[n], &other.qubits[n])).product(),
            None => self.qubits.iter().zip(&other.qubits).map(|(a, b)| inner(a, b)).product(),
        }
    }

    /// Equal up to a phase on every qubit.
    pub fn same_state(&self, other: &Self) -> bool {
        self.n_qubits() == other.n_qubits()
            && self.qubits.iter().zip(&other.qubits).all(|(a, b)| inner(a, b).norm() > SAME_STATE_FIDELITY)
    }
}

/// ⟨φ^m| ⊗_j ψ_{m_j}⟩ for the given per-qubit vectors.
fn clause_amplitude(phi: &[Complex64], clause: &[usize], qubits: &[Qubit]) -> Complex64 {
    let local: Vec<Qubit> = clause.iter().map(|&q| qubits[q]).collect();
    inner(phi, &tensor_product(&local))
}

/// Σ_m |⟨φ^m| ψ_{m_1} ⊗ … ⊗ ψ_{m_k}⟩|², zero exactly when every clause
/// is satisfied.
pub fn energy_of_product_state(g: &InteractionGraph, p: &ProjectorSet, s: &ProductState) -> Result<f64> {
    if s.n_qubits() != g.n_qubits() {
        return Err(Error::DimensionMismatch { expected: g.n_qubits(), got: s.n_qubits() });
    }
    if p.len() != g.num_clauses() {
        return Err(Error::DimensionMismatch { expected: g.num_clauses(), got: p.len() });
    }
    Ok(g.clauses()
        .enumerate()
        .map(|(m, c)| clause_amplitude(p.vector(m), c, s.qubits()).norm_sqr())
        .sum())
}

/// The zero-energy state of product projectors selected by a covering:
/// each clause's matched qubit is orthogonal to that clause's factor on it.
/// Qubits left unmatched are drawn from `seed`.
pub fn product_seed_state(g: &InteractionGraph, p: &ProjectorSet, cover: &Matching, seed: u64) -> Result<ProductState> {
    if !p.is_product() {
        return Err(Error::NotProductForm);
    }
    let qubits_of = cover
        .covering_qubits()
        .filter(|q| q.len() == g.num_clauses())
        .ok_or_else(|| Error::NotACovering(format!("{} of {} clauses matched", cover.size(), g.num_clauses())))?;
    Matching::from_covering(g, &qubits_of).map_err(|e| Error::NotACovering(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let mut s = ProductState::random(g.n_qubits(), &mut rng);
    for (m, &n) in qubits_of.iter().enumerate() {
        let j = g.clause(m).iter().position(|&q| q == n).expect("validated membership");
        let f = p.factors(m).expect("product form")[j];
        s.qubits[n] = perpendicular(&f);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// Number of equal increments of the interpolation parameter.
    pub steps: usize,
    /// Energy the final state must reach.
    pub tol: f64,
    /// Newton iterations per step.
    pub max_newton: usize,
    /// Smallest allowed step, as a fraction of the base step.
    pub min_step_fraction: f64,
    /// Largest predictor move |δz_n| accepted before the step is halved.
    pub max_predictor: f64,
    /// Reverse the orientation of every local tangent coordinate.
    pub flipped_charts: bool,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { steps: 200, tol: 1e-12, max_newton: 40, min_step_fraction: 1.0 / 4096.0, max_predictor: 0.25, flipped_charts: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HomotopyTrace {
    /// Accepted steps, including subdivided ones.
    pub steps: usize,
    /// Rejected steps that were retried at half size.
    pub halvings: usize,
    pub newton_iterations: usize,
    pub final_residual: f64,
    /// Largest over smallest singular value of the clause Jacobian at the
    /// start of every accepted step.
    pub condition_estimates: Vec<f64>,
    /// (step, qubit) pairs where the computational-basis chart flipped.
    pub chart_flips: Vec<(usize, usize)>,
}

/// Local coordinates centred on a product state.
struct Frames {
    e: Vec<Qubit>,
    perp: Vec<Qubit>,
}

impl Frames {
    fn centred_on(s: &ProductState, flipped: bool) -> Self {
        let perp = s
            .qubits
            .iter()
            .map(|q| {
                let p = perpendicular(q);
                if flipped {
                    [-p[0], -p[1]]
                } else {
                    p
                }
            })
            .collect();
        Self { e: s.qubits.clone(), perp }
    }

    fn psi(&self, z: &[Complex64]) -> Vec<Qubit> {
        self.e
            .iter()
            .zip(&self.perp)
            .zip(z)
            .map(|((e, p), &zn)| [e[0] + zn * p[0], e[1] + zn * p[1]])
            .collect()
    }

    fn state(&self, z: &[Complex64]) -> ProductState {
        ProductState { qubits: self.psi(z).into_iter().map(|q| normalized(q).unwrap_or([ONE, ZERO])).collect() }
    }

    fn residual(&self, g: &InteractionGraph, phis: &[Vec<Complex64>], z: &[Complex64]) -> Vec<Complex64> {
        let psi = self.psi(z);
        g.clauses().zip(phis).map(|(c, phi)| clause_amplitude(phi, c, &psi)).collect()
    }

    /// ∂f_m/∂z_n, holomorphic because f only involves conj(φ).
    fn jacobian(&self, g: &InteractionGraph, phis: &[Vec<Complex64>], z: &[Complex64]) -> Mat<Complex64> {
        let mut psi = self.psi(z);
        let mut j = Mat::<Complex64>::zeros(g.num_clauses(), g.n_qubits());
        for (m, (c, phi)) in g.clauses().zip(phis).enumerate() {
            for &n in c {
                let keep = psi[n];
                psi[n] = self.perp[n];
                j[(m, n)] = clause_amplitude(phi, c, &psi);
                psi[n] = keep;
            }
        }
        j
    }
}

/// Energy of the normalized state with coordinates z.
fn normalized_energy(f: &[Complex64], g: &InteractionGraph, z: &[Complex64]) -> f64 {
    let scale: Vec<f64> = z.iter().map(|zn| 1.0 + zn.norm_sqr()).collect();
    g.clauses().zip(f).map(|(c, fm)| fm.norm_sqr() / c.iter().map(|&n| scale[n]).product::<f64>()).sum()
}

/// Solves J x = −f by a damped pseudo-inverse: x = −V diag(σ / (σ² + μ)) Uᴴ f,
/// dropping singular values below 1e-13 σ_max. Returns x and σ_max / σ_min.
fn damped_solve(j: &Mat<Complex64>, f: &[Complex64], mu: f64) -> Result<(Vec<Complex64>, f64)> {
    let (rows, cols) = (j.nrows(), j.ncols());
    if rows == 0 || cols == 0 {
        return Ok((vec![ZERO; cols], 1.0));
    }
    let svd = j.thin_svd().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let r = s.nrows();
    let sv: Vec<f64> = (0..r).map(|i| s[i].re).collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x = vec![ZERO; cols];
    for i in 0..r {
        if sv[i] <= 1e-13 * smax {
            continue;
        }
        let c: Complex64 = (0..rows).map(|a| u[(a, i)].conj() * f[a]).sum();
        let w = -c * (sv[i] / (sv[i] * sv[i] + mu));
        for b in 0..cols {
            x[b] += v[(b, i)] * w;
        }
    }
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok((x, cond))
}

/// Damped Newton on f(z) = 0 from z. Returns the final coordinates, the
/// normalized energy and the iteration count.
fn newton(
    g: &InteractionGraph,
    phis: &[Vec<Complex64>],
    frames: &Frames,
    mut z: Vec<Complex64>,
    target: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, f64, usize)> {
    let mut f = frames.residual(g, phis, &z);
    let mut e = normalized_energy(&f, g, &z);
    for it in 0..max_iter {
        if e <= target {
            return Ok((z, e, it));
        }
        let jac = frames.jacobian(g, phis, &z);
        let (dz, _) = damped_solve(&jac, &f, 0.0)?;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..=30 {
            let trial: Vec<Complex64> = z.iter().zip(&dz).map(|(a, b)| a + b * lambda).collect();
            let ft = frames.residual(g, phis, &trial);
            let et = normalized_energy(&ft, g, &trial);
            if et < e {
                z = trial;
                f = ft;
                e = et;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            return Ok((z, e, it + 1));
        }
    }
    Ok((z, e, max_iter))
}

/// Tracks a zero-energy product state from `start` projectors to `target`.
pub fn continue_product_state(
    g: &InteractionGraph,
    target: &ProjectorSet,
    start: &ProjectorSet,
    s_start: &ProductState,
    opts: &ContinuationOptions,
) -> Result<(ProductState, HomotopyTrace)> {
    let e0 = energy_of_product_state(g, start, s_start)?;
    if target.len() != g.num_clauses() {
        return Err(Error::DimensionMismatch { expected: g.num_clauses(), got: target.len() });
    }
    if target.vectors() == start.vectors() {
        let trace = HomotopyTrace { final_residual: e0, ..HomotopyTrace::default() };
        return Ok((s_start.clone(), trace));
    }
    if e0 > opts.tol {
        return Err(Error::InvalidInput(format!("start state has energy {e0:e} above tolerance {:e}", opts.tol)));
    }
    if !max_clause_matching(g).is_covering() {
        return Err(Error::InvalidInput("graph has no dimer covering".into()));
    }
    if opts.steps == 0 {
        return Err(Error::InvalidInput("steps must be positive".into()));
    }
    // Intermediate points are polished well below the final target.
    let step_tol = (opts.tol * 1e-6).max(1e-28);
    let base = 1.0 / opts.steps as f64;
    let min_dt = base * opts.min_step_fraction;
    let mut trace = HomotopyTrace::default();
    let mut s = s_start.clone();
    let mut t = 0.0;
    let mut dt = base;
    let mut phis_t: Vec<Vec<Complex64>> = start.vectors().to_vec();
    while t < 1.0 {
        let t_next = (t + dt).min(1.0);
        let p_next = ProjectorSet::interpolate(start, target, t_next)?;
        let phis_next = p_next.vectors();
        let frames = Frames::centred_on(&s, opts.flipped_charts);
        let zero = vec![ZERO; g.n_qubits()];
        let jac = frames.jacobian(g, &phis_t, &zero);
        let f_next = frames.residual(g, phis_next, &zero);
        let (pred, cond) = damped_solve(&jac, &f_next, 0.0)?;
        let too_far = pred.iter().any(|x| x.norm() > opts.max_predictor);
        let singular = !(cond < 1e12);
        let outcome = if too_far || singular {
            None
        } else {
            let (z, e, its) = newton(g, phis_next, &frames, pred, step_tol, opts.max_newton)?;
            trace.newton_iterations += its;
            (e <= step_tol.max(opts.tol * 1e-3)).then_some(z)
        };
        match outcome {
            Some(z) => {
                let next = frames.state(&z);
                trace.condition_estimates.push(cond);
                for n in 0..g.n_qubits() {
                    if next.chart(n).flipped != s.chart(n).flipped {
                        trace.chart_flips.push((trace.steps, n));
                    }
                }
                trace.steps += 1;
                s = next;
                t = t_next;
                phis_t = phis_next.to_vec();
                dt = (dt * 2.0).min(base);
            }
            None => {
                trace.halvings += 1;
                dt *= 0.5;
                if dt < min_dt {
                    let reason = if singular {
                        format!("clause Jacobian is singular (condition {cond:e})")
                    } else if too_far {
                        "predictor step stays too large under refinement".to_string()
                    } else {
                        "Newton corrector does not converge under refinement".to_string()
                    };
                    return Err(Error::ContinuationFailure { t, reason });
                }
            }
        }
    }
    let final_residual = energy_of_product_state(g, target, &s)?;
    if final_residual > opts.tol {
        // One last polish at the target.
        let frames = Frames::centred_on(&s, opts.flipped_charts);
        let (z, _, its) = newton(g, target.vectors(), &frames, vec![ZERO; g.n_qubits()], opts.tol * 1e-3, opts.max_newton)?;
        trace.newton_iterations += its;
        s = frames.state(&z);
    }
    trace.final_residual = energy_of_product_state(g, target, &s)?;
    if trace.final_residual > opts.tol {
        return Err(Error::ContinuationFailure { t: 1.0, reason: format!("final energy {:e} above tolerance", trace.final_residual) });
    }
    Ok((s, trace))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub state: ProductState,
    pub trace: HomotopyTrace,
    pub energy: f64,
    /// Start-projector draws used, including the successful one.
    pub attempts: usize,
    pub covering: Vec<usize>,
}

/// Finds a zero-energy product state for coverable graphs: picks a
/// covering, seeds at random product projectors and continues to `target`.
/// Failed paths are retried with fresh start projectors and twice as many
/// steps, up to `retries` extra attempts.
pub fn solve_product_state(
    g: &InteractionGraph,
    target: &ProjectorSet,
    seed: u64,
    opts: &ContinuationOptions,
    retries: usize,
) -> Result<SolveOutcome> {
    let cover = max_clause_matching(g);
    if !cover.is_covering() {
        return Err(Error::InvalidInput(format!(
            "graph has no dimer covering (maximum matching {} of {})",
            cover.size(),
            g.num_clauses()
        )));
    }
    let mut last_err = None;
    let mut o = *opts;
    for attempt in 0..=retries {
        let start = ProjectorSet::sample(g, derive_seed(seed, &[attempt as u64, 0]), ProjectorForm::Product);
        let s0 = product_seed_state(g, &start, &cover, derive_seed(seed, &[attempt as u64, 1]))?;
        match continue_product_state(g, target, &start, &s0, &o) {
            Ok((state, trace)) => {
                return Ok(SolveOutcome {
                    energy: trace.final_residual,
                    state,
                    trace,
                    attempts: attempt + 1,
                    covering: cover.covering_qubits().expect("covering"),
                })
            }
            Err(e) => last_err = Some(e),
        }
        o.steps *= 2;
    }
    Err(last_err.expect("at least one attempt"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedState {
    pub covering: Vec<usize>,
    pub state: ProductState,
    pub trace: HomotopyTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub states: Vec<EnumeratedState>,
    /// Coverings whose path failed, with the reason.
    pub failures: Vec<(Vec<usize>, String)>,
    /// Pairs of coverings that produced the same state.
    pub duplicates: Vec<(usize, usize)>,
}

/// One continued product state per dimer covering, all started from one
/// common set of random product projectors.
pub fn enumerate_product_states(
    g: &InteractionGraph,
    target: &ProjectorSet,
    max_states: usize,
    seed: u64,
    opts: &ContinuationOptions,
) -> Result<Enumeration> {
    let count = count_dimer_coverings(g, DEFAULT_COUNT_LIMIT)?;
    if count > max_states as u128 {
        return Err(Error::LimitExceeded { what: "dimer coverings", value: count.min(usize::MAX as u128) as usize, limit: max_states });
    }
    let (coverings, _) = enumerate_dimer_coverings(g, max_states);
    let start = ProjectorSet::sample(g, derive_seed(seed, &[0]), ProjectorForm::Product);
    let results: Vec<std::result::Result<EnumeratedState, (Vec<usize>, String)>> = coverings
        .into_par_iter()
        .enumerate()
        .map(|(i, cov)| {
            let run = || -> Result<EnumeratedState> {
                let matching = Matching::from_covering(g, &cov)?;
                let s0 = product_seed_state(g, &start, &matching, derive_seed(seed, &[1, i as u64]))?;
                let mut o = *opts;
                let mut last = None;
                for _ in 0..3 {
                    match continue_product_state(g, target, &start, &s0, &o) {
                        Ok((state, trace)) => return Ok(EnumeratedState { covering: cov.clone(), state, trace }),
                        Err(e) => last = Some(e),
                    }
                    o.steps *= 4;
                }
                Err(last.expect("attempted"))
            };
            run().map_err(|e| (cov.clone(), e.to_string()))
        })
        .collect();
    let mut states = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(s) => states.push(s),
            Err(f) => failures.push(f),
        }
    }
    let mut duplicates = Vec::new();
    for i in 0..states.len() {
        for j in 0..i {
            if states[i].state.same_state(&states[j].state) {
                duplicates.push((j, i));
            }
        }
    }
    Ok(Enumeration { states, failures, duplicates })
}

/// Gram matrix ⟨ψ^α|ψ^β⟩ of product states, optionally restricted to a
/// subset of qubits, and its numerical rank.
pub fn gram_rank(states: &[ProductState], qubits: Option<&[usize]>) -> Result<(usize, Vec<f64>)> {
    if states.is_empty() {
        return Err(Error::InvalidInput("no product states".into()));
    }
    let n = states.len();
    let gram = Mat::<Complex64>::from_fn(n, n, |a, b| states[a].overlap_on(&states[b], qubits));
    let mut eigs = gram
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    eigs.sort_by(|a, b| b.total_cmp(a));
    let threshold = SPAN_RANK_RELATIVE_TOL * eigs[0];
    Ok((eigs.iter().filter(|&&e| e > threshold).count(), eigs))
}

/// Dimension of the span of the given product states (R_PS for the
/// dimer-covering states of an M = N graph).
pub fn product_span_rank(states: &[ProductState]) -> Result<usize> {
    Ok(gram_rank(states, None)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_energy: f64,
    pub best_state: ProductState,
    pub starts: usize,
    /// Energy reached by each start.
    pub energies: Vec<f64>,
}

/// Multi-start Levenberg–Marquardt minimization of the product-state
/// energy from Haar-random starts. Makes no use of graph structure.
pub fn search_product_state(
    g: &InteractionGraph,
    p: &ProjectorSet,
    starts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if starts == 0 {
        return Err(Error::InvalidInput("need at least one start".into()));
    }
    let mut best: Option<(f64, ProductState)> = None;
    let mut energies = Vec::with_capacity(starts);
    for i in 0..starts {
        let mut rng = rng_from_seed(derive_seed(seed, &[i as u64]));
        let mut s = ProductState::random(g.n_qubits(), &mut rng);
        let mut e = energy_of_product_state(g, p, &s)?;
        let mut mu = 1e-3 * (1.0 + rng.random::<f64>());
        let zero = vec![ZERO; g.n_qubits()];
        for _ in 0..max_iters {
            if e < 1e-30 {
                break;
            }
            let frames = Frames::centred_on(&s, false);
            let f = frames.residual(g, p.vectors(), &zero);
            let jac = frames.jacobian(g, p.vectors(), &zero);
            let mut accepted = false;
            for _ in 0..40 {
                let (dz, _) = damped_solve(&jac, &f, mu)?;
                let trial = frames.state(&dz);
                let et = energy_of_product_state(g, p, &trial)?;
                if et < e {
                    s = trial;
                    e = et;
                    mu = (mu / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted {
                break;
            }
        }
        energies.push(e);
        if best.as_ref().map_or(true, |(b, _)| e < *b) {
            best = Some((e, s));
        }
    }
    let (best_energy, best_state) = best.expect("at least one start");
    Ok(SearchOutcome { best_energy, best_state, starts, energies })
}
