//! Two-dimensional ε-floored subordinator with a discrete direction measure.
//!
//! The Lévy measure is `C (ρ−ε)^(−α) ρ^(−1) dρ M(dβ)` in polar form, with
//! `M = Σ wᵢ δ_(βᵢ)` on the quarter circle. Its total mass is
//! `C Γ(α) Γ(1−α) ε^(−α)` and its Laplace exponent is
//! `Φ(η) = (C Γ(1−α)/α) Σ wᵢ sᵢ^α O_ε(sᵢ)`, `sᵢ = η₁ cos βᵢ + η₂ sin βᵢ`.
//! The default `C = α/Γ(1−α)` makes each direction a copy of the
//! univariate ε-family.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::SubordinatorSpec;
use crate::error::{domain, Error, Result};
use crate::operators::o_epsilon_transfer;
use crate::specfun::{gamma_complete, rgamma};

/// Discrete direction measure on `[0, π/2]` with scale constant `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionMeasure2D {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    pub scale_c: f64,
}

impl DirectionMeasure2D {
    /// Direction measure with the univariate normalisation `C = α/Γ(1−α)`.
    pub fn normalized(alpha: f64, angles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain("DirectionMeasure2D alpha", alpha, "0 < alpha < 1"));
        }
        let m = Self {
            angles,
            weights,
            scale_c: alpha * rgamma(1.0 - alpha),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.angles.is_empty() || self.angles.len() != self.weights.len() {
            return Err(Error::InvalidParameter(
                "direction measure needs matching, nonempty angles and weights".into(),
            ));
        }
        if let Some(&b) = self.angles.iter().find(|b| !(0.0..=FRAC_PI_2).contains(*b)) {
            return Err(domain("direction angle", b, "0 <= angle <= pi/2"));
        }
        if let Some(&w) = self.weights.iter().find(|w| !(**w > 0.0)) {
            return Err(domain("direction weight", w, "weight > 0"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain("direction weights sum", total, "weights summing to 1"));
        }
        if !(self.scale_c > 0.0 && self.scale_c.is_finite()) {
            return Err(domain("direction scale C", self.scale_c, "C > 0"));
        }
        Ok(())
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }
}

fn check(alpha: f64, epsilon: f64, m: &DirectionMeasure2D) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("multivariate alpha", alpha, "0 < alpha < 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain("multivariate epsilon", epsilon, "epsilon > 0"));
    }
    m.validate()
}

/// Total jump rate `C Γ(α) Γ(1−α) ε^(−α)`.
pub fn mv_poisson_rate(alpha: f64, epsilon: f64, m: &DirectionMeasure2D) -> Result<f64> {
    check(alpha, epsilon, m)?;
    Ok(m.scale_c * gamma_complete(alpha)? * gamma_complete(1.0 - alpha)? * epsilon.powf(-alpha))
}

/// `Φ(η)` with `E e^(−η·S(t)) = e^(−tΦ(η))` for `η ∈ [0,∞)²`.
pub fn mv_laplace_exponent(alpha: f64, epsilon: f64, m: &DirectionMeasure2D, eta: [f64; 2]) -> Result<f64> {
    check(alpha, epsilon, m)?;
    if !(eta[0] >= 0.0 && eta[1] >= 0.0) {
        return Err(domain("mv_laplace_exponent", eta[0].min(eta[1]), "eta >= 0 componentwise"));
    }
    let k = m.scale_c * gamma_complete(1.0 - alpha)? / alpha;
    let mut total = 0.0;
    for (b, w) in m.angles.iter().zip(&m.weights) {
        let s = eta[0] * b.cos() + eta[1] * b.sin();
        if s > 0.0 {
            total += w * s.powf(alpha) * o_epsilon_transfer(s, epsilon, alpha)?;
        }
    }
    Ok(k * total)
}

/// Trajectory of the two-dimensional process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvPathSample {
    pub horizon: f64,
    pub jump_times: Vec<f64>,
    pub jump_vectors: Vec<[f64; 2]>,
}

impl MvPathSample {
    /// Both coordinates at time `t`.
    pub fn evaluate_at(&self, t: f64) -> Result<[f64; 2]> {
        if !(t >= 0.0 && t <= self.horizon) {
            return Err(domain("evaluate_at", t, "0 <= t <= horizon"));
        }
        let k = self.jump_times.partition_point(|&s| s <= t);
        Ok(self.jump_vectors[..k]
            .iter()
            .fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]))
    }

    /// True when both running sums never decrease.
    pub fn marginals_nondecreasing(&self) -> bool {
        let mut acc = [0.0f64, 0.0];
        for v in &self.jump_vectors {
            let next = [acc[0] + v[0], acc[1] + v[1]];
            if next[0] < acc[0] || next[1] < acc[1] {
                return false;
            }
            acc = next;
        }
        true
    }
}

/// Radii are univariate ε-floored jumps, directions are drawn from `M`.
pub fn sample_mv_path<R: Rng + ?Sized>(
    alpha: f64,
    epsilon: f64,
    m: &DirectionMeasure2D,
    horizon: f64,
    rng: &mut R,
) -> Result<MvPathSample> {
    let rate = mv_poisson_rate(alpha, epsilon, m)?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(domain("sample_mv_path", horizon, "finite horizon >= 0"));
    }
    let n = if rate * horizon > 0.0 {
        let p = Poisson::new(rate * horizon).map_err(|e| Error::InvalidParameter(format!("jump count: {e}")))?;
        let n: f64 = p.sample(rng);
        n as usize
    } else {
        0
    };
    let radial = SubordinatorSpec::floored(alpha, epsilon)?;
    let mut jump_times: Vec<f64> = (0..n).map(|_| horizon * rng.random::<f64>()).collect();
    jump_times.sort_by(f64::total_cmp);
    let mut jump_vectors = Vec::with_capacity(n);
    for _ in 0..n {
        let r = super::sample_jump(&radial, rng)?;
        let b = m.angles[m.pick(rng)];
        jump_vectors.push([r * b.cos(), r * b.sin()]);
    }
    Ok(MvPathSample {
        horizon,
        jump_times,
        jump_vectors,
    })
}
