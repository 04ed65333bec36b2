//! Rank-1 clause projectors.
//!
//! Clause m carries a unit vector φ^m in the 2^k-dimensional space of its
//! member qubits. Local basis index bit j refers to the j-th member of the
//! (sorted) clause. In product form φ^m = f_0 ⊗ ... ⊗ f_{k-1} and the
//! single-qubit factors are kept alongside the expanded vector.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::InteractionGraph;
use crate::seed::{rng_from_seed, QsatRng};

pub type Qubit = [Complex64; 2];

/// Factors on one qubit closer than this to parallel are redrawn.
const PARALLEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorForm {
    Generic,
    Product,
}

impl std::str::FromStr for ProjectorForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "generic" => Ok(Self::Generic),
            "product" => Ok(Self::Product),
            _ => Err(format!("unknown projector form {s:?}, expected generic or product")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSet {
    k: usize,
    vectors: Vec<Vec<Complex64>>,
    factors: Option<Vec<Vec<Qubit>>>,
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// ⟨a|b⟩.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
    n
}

/// A Haar-random unit vector of the given dimension.
pub fn haar_vector(rng: &mut QsatRng, dim: usize) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if normalize(&mut v) > 1e-150 {
            return v;
        }
    }
}

pub fn haar_qubit(rng: &mut QsatRng) -> Qubit {
    let v = haar_vector(rng, 2);
    [v[0], v[1]]
}

/// The expanded tensor product, factor j on local bit j.
pub fn tensor_product(factors: &[Qubit]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for (j, f) in factors.iter().enumerate() {
        let half = 1usize << j;
        let mut next = vec![Complex64::default(); half * 2];
        for (i, &x) in out.iter().enumerate() {
            next[i] = x * f[0];
            next[i + half] = x * f[1];
        }
        out = next;
    }
    out
}

impl ProjectorSet {
    /// Draws one projector per clause, deterministically from `seed`.
    pub fn sample(g: &InteractionGraph, seed: u64, form: ProjectorForm) -> Self {
        let mut rng = rng_from_seed(seed);
        let k = g.k();
        match form {
            ProjectorForm::Generic => Self {
                k,
                vectors: (0..g.num_clauses()).map(|_| haar_vector(&mut rng, 1 << k)).collect(),
                factors: None,
            },
            ProjectorForm::Product => {
                let mut on_qubit: Vec<Vec<Qubit>> = vec![Vec::new(); g.n_qubits()];
                let mut factors = Vec::with_capacity(g.num_clauses());
                for clause in g.clauses() {
                    let mut fs = Vec::with_capacity(k);
                    for &q in clause {
                        let f = loop {
                            let f = haar_qubit(&mut rng);
                            if on_qubit[q].iter().all(|h| inner(h, &f).norm() <= 1.0 - PARALLEL_TOL) {
                                break f;
                            }
                        };
                        on_qubit[q].push(f);
                        fs.push(f);
                    }
                    factors.push(fs);
                }
                Self::from_factors(k, factors)
            }
        }
    }

    /// Projectors from explicit vectors (normalized here).
    pub fn from_vectors(g: &InteractionGraph, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if vectors.len() != g.num_clauses() {
            return Err(Error::DimensionMismatch { expected: g.num_clauses(), got: vectors.len() });
        }
        let mut vectors = vectors;
        for v in &mut vectors {
            if v.len() != 1 << g.k() {
                return Err(Error::DimensionMismatch { expected: 1 << g.k(), got: v.len() });
            }
            if normalize(v) < 1e-300 {
                return Err(Error::InvalidInput("zero projector vector".into()));
            }
        }
        Ok(Self { k: g.k(), vectors, factors: None })
    }

    /// Product projectors from per-clause single-qubit factors (normalized here).
    pub fn from_factors(k: usize, mut factors: Vec<Vec<Qubit>>) -> Self {
        for fs in &mut factors {
            assert_eq!(fs.len(), k, "every clause needs k factors");
            for f in fs.iter_mut() {
                normalize(f);
            }
        }
        let vectors = factors.iter().map(|fs| tensor_product(fs)).collect();
        Self { k, vectors, factors: Some(factors) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, m: usize) -> &[Complex64] {
        &self.vectors[m]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn is_product(&self) -> bool {
        self.factors.is_some()
    }

    /// Single-qubit factors of clause m's vector, if in product form.
    pub fn factors(&self, m: usize) -> Option<&[Qubit]> {
        self.factors.as_ref().map(|f| f[m].as_slice())
    }

    /// Normalized straight-line interpolation (1 - t) φ_start + t φ_target.
    pub fn interpolate(start: &Self, target: &Self, t: f64) -> Result<Self> {
        if start.len() != target.len() || start.k != target.k {
            return Err(Error::DimensionMismatch { expected: start.len(), got: target.len() });
        }
        if t == 0.0 {
            return Ok(start.clone());
        }
        if t == 1.0 {
            return Ok(target.clone());
        }
        let mut vectors = Vec::with_capacity(start.len());
        for (a, b) in start.vectors.iter().zip(&target.vectors) {
            let mut v: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x * (1.0 - t) + y * t).collect();
            if normalize(&mut v) < 1e-12 {
                return Err(Error::ContinuationFailure {
                    t,
                    reason: "interpolated projector vanishes".into(),
                });
            }
            vectors.push(v);
        }
        Ok(Self { k: start.k, vectors, factors: None })
    }
}
