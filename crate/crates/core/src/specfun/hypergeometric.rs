//! Kummer's confluent hypergeometric function and the three-parameter
//! (Prabhakar) Mittag-Leffler function, both by direct power series.

use super::gamma::{is_nonpositive_integer, ln_gamma, rgamma};
use super::Accuracy;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Consecutive small terms required before a series is declared converged;
/// alternating series can dip below tolerance transiently.
const QUIET_TERMS: usize = 3;

struct SeriesState {
    sum: CompensatedSum,
    quiet: usize,
}

impl SeriesState {
    fn new() -> Self {
        Self {
            sum: CompensatedSum::new(),
            quiet: 0,
        }
    }

    /// Adds a term; returns true once the series has converged.
    fn push(&mut self, term: f64, rel_tol: f64) -> bool {
        self.sum.add(term);
        if term.abs() <= rel_tol * self.sum.value().abs() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= QUIET_TERMS
    }
}

/// ₁F₁(a; c; z) with default accuracy.
pub fn kummer_1f1(a: f64, c: f64, z: f64) -> Result<f64> {
    kummer_1f1_with(a, c, z, &Accuracy::SERIES)
}

/// ₁F₁(a; c; z) = Σ (a)_k/(c)_k z^k/k!.
///
/// Negative `z` goes through Kummer's transformation
/// `₁F₁(a; c; z) = e^z ₁F₁(c - a; c; -z)` so the summed series has terms of
/// one sign.
pub fn kummer_1f1_with(a: f64, c: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    acc.validate()?;
    if !(a.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(crate::error::domain("kummer_1f1", z, "finite arguments"));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::Pole {
            what: "kummer_1f1",
            value: c,
        });
    }
    if z < -ASYMPTOTIC_THRESHOLD && !is_nonpositive_integer(a) && !is_nonpositive_integer(c - a) {
        if let Some(v) = kummer_negative_asymptotic(a, c, -z, acc) {
            return Ok(v);
        }
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        return Ok(z.exp() * kummer_series(c - a, c, -z, acc)?);
    }
    kummer_series(a, c, z, acc)
}

/// Beyond this `|z|` (for `z < 0`) the algebraic asymptotic expansion is
/// tried first; the exponentially small companion is below `e^(-40)`.
const ASYMPTOTIC_THRESHOLD: f64 = 40.0;

/// `₁F₁(a; c; -x) ~ Γ(c)/Γ(c-a) x^(-a) Σ (a)_s (a-c+1)_s / s! x^(-s)`,
/// summed up to the smallest term. `None` when that term is not small enough.
fn kummer_negative_asymptotic(a: f64, c: f64, x: f64, acc: &Accuracy) -> Option<f64> {
    let mut sum = CompensatedSum::new();
    let mut term = 1.0f64;
    for s in 0..acc.max_terms {
        sum.add(term);
        let sf = s as f64;
        let next = term * (a + sf) * (a - c + 1.0 + sf) / ((sf + 1.0) * x);
        if next == 0.0 || next.abs() <= 0.1 * acc.rel_tol * sum.value().abs() {
            break;
        }
        if next.abs() >= term.abs() {
            return None;
        }
        term = next;
    }
    let ln_scale = ln_gamma(c) - ln_gamma(c - a) - a * x.ln();
    let sign = gamma_sign(c) * gamma_sign(c - a);
    Some(sign * ln_scale.exp() * sum.value())
}

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn kummer_series(a: f64, c: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    let mut state = SeriesState::new();
    let mut term = 1.0;
    for k in 0..acc.max_terms {
        if state.push(term, acc.rel_tol) {
            return Ok(state.sum.value());
        }
        let k = k as f64;
        term *= (a + k) / (c + k) * z / (k + 1.0);
    }
    Err(Error::NonConvergence {
        what: "kummer_1f1 series",
        estimate: term.abs(),
    })
}

/// E^γ_{α,β}(z) with default accuracy.
pub fn mittag_leffler3(alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<f64> {
    mittag_leffler3_with(alpha, beta, gamma, z, &Accuracy::SERIES)
}

/// E^γ_{α,β}(z) = Σ (γ)_k z^k / (k! Γ(αk + β)), with `(γ)_k` the rising
/// factorial.
///
/// When `alpha` is a positive integer the gamma ratio between consecutive
/// terms is a finite product and every term follows by exact recurrence;
/// otherwise each term is assembled in log space.
pub fn mittag_leffler3_with(alpha: f64, beta: f64, gamma: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    acc.validate()?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(crate::error::domain("mittag_leffler3", alpha, "alpha > 0"));
    }
    if !(beta.is_finite() && gamma.is_finite() && z.is_finite()) {
        return Err(crate::error::domain("mittag_leffler3", z, "finite arguments"));
    }
    let mut state = SeriesState::new();
    let integer_alpha = alpha == alpha.round() && alpha <= 16.0;
    if integer_alpha {
        let steps = alpha as usize;
        let mut term = rgamma(beta);
        let mut k = 0usize;
        // a zero first term (β at a pole) is fine: later terms are rebuilt
        // from the nonzero rising-factorial part
        let mut numer = 1.0;
        loop {
            if k >= acc.max_terms {
                return Err(Error::NonConvergence {
                    what: "mittag_leffler3 series",
                    estimate: term.abs(),
                });
            }
            if state.push(term, acc.rel_tol) && k > 0 {
                return Ok(state.sum.value());
            }
            let kf = k as f64;
            numer *= (gamma + kf) * z / (kf + 1.0);
            let base = alpha * kf + beta;
            if (0..steps).any(|j| is_nonpositive_integer(base + j as f64)) {
                // recurrence passes through a pole of Γ; restart from scratch
                term = numer * rgamma(alpha * (kf + 1.0) + beta);
            } else {
                let mut ratio = 1.0;
                for j in 0..steps {
                    ratio /= base + j as f64;
                }
                term *= (gamma + kf) * z / (kf + 1.0) * ratio;
            }
            k += 1;
        }
    }
    // general alpha: term_k = sign · exp(ln|(γ)_k z^k / k!| - ln Γ(αk+β))
    let mut ln_numer = 0.0;
    let mut sign = 1.0;
    let mut numer_zero = false;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        let arg = alpha * kf + beta;
        let term = if numer_zero || is_nonpositive_integer(arg) {
            0.0
        } else {
            let g_sign = if arg > 0.0 || (arg.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
            sign * g_sign * (ln_numer - ln_gamma(arg)).exp()
        };
        if state.push(term, acc.rel_tol) && k > 0 {
            return Ok(state.sum.value());
        }
        let factor = (gamma + kf) * z / (kf + 1.0);
        if factor == 0.0 {
            numer_zero = true;
        } else {
            ln_numer += factor.abs().ln();
            if factor < 0.0 {
                sign = -sign;
            }
        }
    }
    Err(Error::NonConvergence {
        what: "mittag_leffler3 series",
        estimate: f64::NAN,
    })
}
