//! The sunflower upper bound on the satisfiability threshold.
//!
//! S(k, α) = ln 2 + α ln(1 − 2^{1−k}) + ∫_0^∞ (e^{−s}/s) B(q(s)) ds with
//! q(s) = kα (1 − e^{−s/(2^k−2)}) and
//! B(q) = 1 − q^{−1/(k−1)} γ(1/(k−1), q) / (k−1) = ∫_0^1 (1 − e^{−q t^{k−1}}) dt.
//! The zero of S in α bounds α_c from above. The same quantity is the
//! average of ln(1 + d/(2^k−2)) over Poisson(kα t^{k−1}) degrees d,
//! integrated over t ∈ [0, 1]; that form is evaluated independently as a
//! cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::special::{lower_incomplete_gamma, ln_gamma};

const ABS_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-13;
const MAX_INTERVALS: usize = 4000;
/// Upper limit of the s integral: e^{−s} < 1e-16 beyond it.
const S_MAX: f64 = 36.85;

fn check(k: usize, alpha: f64) -> Result<()> {
    if !(3..=60).contains(&k) {
        return Err(Error::Domain(format!("sunflower entropy needs 3 <= k <= 60, got {k}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("clause density must be positive, got {alpha}")));
    }
    Ok(())
}

fn constant_part(k: usize, alpha: f64) -> f64 {
    std::f64::consts::LN_2 + alpha * (-(2f64.powi(1 - k as i32))).ln_1p()
}

/// B(q) = Σ_{j≥1} (−1)^{j+1} q^j / (j! (j(k−1)+1)) for small q, else from
/// the lower incomplete gamma function.
fn bracket(k: usize, q: f64) -> Result<f64> {
    let km1 = (k - 1) as f64;
    if q < 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 1..60 {
            term *= -q / j as f64;
            let t = -term / (j as f64 * km1 + 1.0);
            sum += t;
            if t.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return Ok(sum);
    }
    let a = 1.0 / km1;
    Ok(1.0 - a * (-a * q.ln()).exp() * lower_incomplete_gamma(a, q)?)
}

/// The s-integrand; tends to α/(2^k − 2) as s → 0.
fn integrand(k: usize, alpha: f64, s: f64) -> Result<f64> {
    let c = 2f64.powi(k as i32) - 2.0;
    if s == 0.0 {
        return Ok(alpha / c);
    }
    let q = k as f64 * alpha * -(-s / c).exp_m1();
    Ok((-s).exp() / s * bracket(k, q)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entropy {
    pub value: f64,
    pub error_estimate: f64,
}

/// S(k, α) via the incomplete-gamma integral.
pub fn sunflower_entropy_detailed(k: usize, alpha: f64) -> Result<Entropy> {
    check(k, alpha)?;
    let failure = std::cell::Cell::new(None);
    let f = |s: f64| match integrand(k, alpha, s) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e.to_string()));
            0.0
        }
    };
    // The integrand varies on the scale s ~ 2^k / (kα) near the origin, so
    // split there before handing the pieces to the adaptive rule.
    let c = 2f64.powi(k as i32) - 2.0;
    let knee = (c / (k as f64 * alpha)).min(1.0);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut lo = 0.0;
    for hi in [knee, 1.0, S_MAX] {
        if hi > lo {
            let r = integrate(f, lo, hi, ABS_TOL, REL_TOL, MAX_INTERVALS)?;
            value += r.value;
            error += r.error_estimate;
            lo = hi;
        }
    }
    if let Some(e) = failure.take() {
        return Err(Error::Quadrature(e));
    }
    Ok(Entropy { value: constant_part(k, alpha) + value, error_estimate: error })
}

pub fn sunflower_entropy(k: usize, alpha: f64) -> Result<f64> {
    Ok(sunflower_entropy_detailed(k, alpha)?.value)
}

/// ⟨ln(1 + d/(2^k−2))⟩ over d ~ Poisson(λ), truncated where the
/// neglected mass is below 1e-12.
fn poisson_average(lambda: f64, c: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let width = (12.0 * lambda.sqrt() + 30.0).ceil();
    let lo = (lambda - width).max(0.0).floor() as u64;
    let hi = (lambda + width).ceil() as u64;
    (lo..=hi)
        .map(|d| {
            let d = d as f64;
            let log_p = d * lambda.ln() - lambda - ln_gamma(d + 1.0);
            log_p.exp() * (d / c).ln_1p()
        })
        .sum()
}

/// S(k, α) via the Poisson-weighted double representation.
pub fn sunflower_entropy_poisson(k: usize, alpha: f64) -> Result<f64> {
    check(k, alpha)?;
    let c = 2f64.powi(k as i32) - 2.0;
    let f = |t: f64| poisson_average(k as f64 * alpha * t.powi(k as i32 - 1), c);
    let r = integrate(f, 0.0, 1.0, ABS_TOL, REL_TOL, MAX_INTERVALS)?;
    Ok(constant_part(k, alpha) + r.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub k: usize,
    pub alpha_upper: f64,
    /// S changes sign on [lo, hi].
    pub bracket: (f64, f64),
    pub entropy_at_bracket: (f64, f64),
    /// Largest quadrature error estimate over all evaluations of S.
    pub max_quadrature_error: f64,
    pub evaluations: usize,
    pub note: Option<String>,
}

/// Root of S(k, ·) by bisection, to relative width `rel_tol`.
pub fn sunflower_alpha_upper_with(k: usize, rel_tol: f64) -> Result<BoundResult> {
    check(k, 1.0)?;
    let mut max_err = 0.0f64;
    let mut evaluations = 0;
    let mut eval = |a: f64| -> Result<f64> {
        let e = sunflower_entropy_detailed(k, a)?;
        max_err = max_err.max(e.error_estimate);
        evaluations += 1;
        Ok(e.value)
    };
    let (mut lo, mut hi) = (0.5, 1.0);
    let mut s_lo = eval(lo)?;
    let mut s_hi = eval(hi)?;
    if s_lo <= 0.0 {
        return Err(Error::NoBracket(format!("S({lo}) = {s_lo} is not positive")));
    }
    while s_hi > 0.0 {
        if hi > 1e12 {
            return Err(Error::NoBracket(format!("S stays positive up to alpha = {hi}")));
        }
        (lo, s_lo) = (hi, s_hi);
        hi *= 2.0;
        s_hi = eval(hi)?;
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        let s_mid = eval(mid)?;
        if s_mid > 0.0 {
            (lo, s_lo) = (mid, s_mid);
        } else {
            (hi, s_hi) = (mid, s_mid);
        }
    }
    let note = (k == 3).then(|| "sunflower, superseded by nosegay in Table I".to_string());
    Ok(BoundResult {
        k,
        alpha_upper: 0.5 * (lo + hi),
        bracket: (lo, hi),
        entropy_at_bracket: (s_lo, s_hi),
        max_quadrature_error: max_err,
        evaluations,
        note,
    })
}

pub fn sunflower_alpha_upper(k: usize) -> Result<BoundResult> {
    sunflower_alpha_upper_with(k, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_q_series_matches_gamma_form() {
        for k in [3usize, 4, 7] {
            for q in [0.3f64, 0.9] {
                let km1 = (k - 1) as f64;
                let a = 1.0 / km1;
                let direct = 1.0 - a * q.powf(-a) * lower_incomplete_gamma(a, q).unwrap();
                assert!((bracket(k, q).unwrap() - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn integrand_limit_at_origin() {
        for k in [3usize, 5] {
            let limit = integrand(k, 2.0, 0.0).unwrap();
            assert_eq!(limit, 2.0 / (2f64.powi(k as i32) - 2.0));
            assert!((integrand(k, 2.0, 1e-9).unwrap() - limit).abs() < 1e-8 * limit);
        }
    }

    #[test]
    fn vanishing_density_gives_ln2() {
        let s = sunflower_entropy(4, 1e-9).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-8);
    }

    #[test]
    fn strictly_decreasing() {
        for k in [3usize, 4, 5] {
            let mut prev = f64::INFINITY;
            for i in 1..40 {
                let s = sunflower_entropy(k, 0.5 * i as f64).unwrap();
                assert!(s < prev);
                prev = s;
            }
        }
    }

    #[test]
    fn representations_agree() {
        for k in [3usize, 4, 5] {
            for alpha in [1.0, 5.0, 20.0] {
                let a = sunflower_entropy(k, alpha).unwrap();
                let b = sunflower_entropy_poisson(k, alpha).unwrap();
                assert!((a - b).abs() < 1e-8, "k {k} alpha {alpha}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bracket_has_sign_change() {
        let r = sunflower_alpha_upper(4).unwrap();
        assert!(r.entropy_at_bracket.0 > 0.0 && r.entropy_at_bracket.1 <= 0.0);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-9 * r.bracket.1);
        assert!(r.note.is_none());
        assert!(sunflower_alpha_upper(3).unwrap().note.is_some());
        assert!(sunflower_alpha_upper(2).is_err());
    }
}
