//! Compound-Poisson subordinators generated by the lower incomplete gamma
//! function.
//!
//! Three jump families share the Lévy density shape
//! `α (z − f)^(−α) z^(−1) / Γ(1−α)` on `z ≥ f`:
//!
//! * plain, floor `f = 1`, Laplace exponent `φ(η) = α γ(α, η)`;
//! * tempered, floor 1 with an extra `e^(−θz)`, exponent
//!   `α γ(α, η+θ) − α γ(α, θ)`;
//! * floored at `f = ε`, exponent `(α/ε^α) γ(α, ηε) = η^α O_ε(η)`.
//!
//! Every family may carry a deterministic drift `β₀`, which adds `β₀η` to
//! the exponent and `β₀t` to every path. A jump-free pure drift is available
//! for degenerate time changes.

mod multivariate;
mod sampling;

pub use multivariate::{
    mv_laplace_exponent, mv_poisson_rate, sample_mv_path, DirectionMeasure2D, MvPathSample,
};
pub use sampling::{
    sample_beta, sample_gamma, sample_jump, sample_path, sample_value, PathRecord, PathSample,
    MAX_CONSECUTIVE_REJECTIONS,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::o_epsilon_transfer;
use crate::specfun::{
    gamma_complete, integrate, lower_inc_gamma, reg_inc_beta, rgamma, upper_inc_gamma, Accuracy,
    PowerHint,
};

/// Jump family of a subordinator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Jumps `≥ 1`, Lévy density `α(z−1)^(−α) z^(−1)/Γ(1−α)`.
    Plain,
    /// Plain density damped by `e^(−θz)`.
    Tempered { theta: f64 },
    /// Jumps `≥ ε`, Lévy density `α(z−ε)^(−α) z^(−1)/Γ(1−α)`.
    Floored { epsilon: f64 },
    /// No jumps at all; the process is `β₀t`.
    PureDrift,
}

/// Parameters of one subordinator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorSpec {
    pub family: Family,
    pub alpha: f64,
    #[serde(default)]
    pub beta0: f64,
}

impl SubordinatorSpec {
    pub fn plain(alpha: f64) -> Result<Self> {
        Self {
            family: Family::Plain,
            alpha,
            beta0: 0.0,
        }
        .validated()
    }

    pub fn tempered(alpha: f64, theta: f64) -> Result<Self> {
        Self {
            family: Family::Tempered { theta },
            alpha,
            beta0: 0.0,
        }
        .validated()
    }

    pub fn floored(alpha: f64, epsilon: f64) -> Result<Self> {
        Self {
            family: Family::Floored { epsilon },
            alpha,
            beta0: 0.0,
        }
        .validated()
    }

    /// `S(t) = β₀ t` with no jumps.
    pub fn pure_drift(beta0: f64) -> Result<Self> {
        Self {
            family: Family::PureDrift,
            alpha: 1.0,
            beta0,
        }
        .validated()
    }

    pub fn with_drift(mut self, beta0: f64) -> Result<Self> {
        self.beta0 = beta0;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(domain("subordinator alpha", self.alpha, "0 < alpha <= 1"));
        }
        if !(self.beta0 >= 0.0 && self.beta0.is_finite()) {
            return Err(domain("subordinator beta0", self.beta0, "finite beta0 >= 0"));
        }
        match self.family {
            Family::Tempered { theta } if !(theta >= 0.0 && theta.is_finite()) => {
                Err(domain("subordinator theta", theta, "finite theta >= 0"))
            }
            Family::Floored { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                Err(domain("subordinator epsilon", epsilon, "finite epsilon > 0"))
            }
            _ => Ok(()),
        }
    }

    /// Smallest possible jump; `None` for a pure drift.
    pub fn floor(&self) -> Option<f64> {
        match self.family {
            Family::Plain | Family::Tempered { .. } => Some(1.0),
            Family::Floored { epsilon } => Some(epsilon),
            Family::PureDrift => None,
        }
    }

    pub fn theta(&self) -> f64 {
        match self.family {
            Family::Tempered { theta } => theta,
            _ => 0.0,
        }
    }

    /// True for the families with jump floor 1.
    pub fn has_unit_floor(&self) -> bool {
        matches!(self.family, Family::Plain | Family::Tempered { .. })
    }
}

/// Laplace exponent of the jump part, without drift.
fn jump_exponent(spec: &SubordinatorSpec, eta: f64) -> Result<f64> {
    let a = spec.alpha;
    Ok(match spec.family {
        Family::Plain => a * lower_inc_gamma(a, eta)?,
        Family::Tempered { theta } => {
            if eta == 0.0 {
                0.0
            } else if theta == 0.0 {
                a * lower_inc_gamma(a, eta)?
            } else {
                // α∫_θ^(θ+η) e^-w w^(α-1) dw; the difference of two γ values
                // is fine except for η ≪ θ where it cancels
                let diff = lower_inc_gamma(a, eta + theta)? - lower_inc_gamma(a, theta)?;
                if eta < 1e-3 * theta {
                    let f = |w: f64| (-w).exp() * w.powf(a - 1.0);
                    let r = integrate(f, theta, theta + eta, PowerHint::NONE, &Accuracy::SERIES)?;
                    a * r.value
                } else {
                    a * diff
                }
            }
        }
        Family::Floored { epsilon } => {
            if eta == 0.0 {
                0.0
            } else {
                eta.powf(a) * o_epsilon_transfer(eta, epsilon, a)?
            }
        }
        Family::PureDrift => 0.0,
    })
}

/// `φ(η)` with `E e^(−ηS(t)) = e^(−tφ(η))`, including the drift term `β₀η`.
pub fn laplace_exponent(spec: &SubordinatorSpec, eta: f64) -> Result<f64> {
    spec.validate()?;
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(domain("laplace_exponent", eta, "finite eta >= 0"));
    }
    Ok(jump_exponent(spec, eta)? + spec.beta0 * eta)
}

/// `φ′(η)`, used by the fractional-moment integral.
fn laplace_exponent_derivative(spec: &SubordinatorSpec, eta: f64) -> f64 {
    let a = spec.alpha;
    let jump = match spec.family {
        Family::Plain => a * (-eta).exp() * eta.powf(a - 1.0),
        Family::Tempered { theta } => a * (-(eta + theta)).exp() * (eta + theta).powf(a - 1.0),
        Family::Floored { epsilon } => a * (-eta * epsilon).exp() * eta.powf(a - 1.0),
        Family::PureDrift => 0.0,
    };
    jump + spec.beta0
}

/// Total mass of the Lévy measure (the Poisson jump rate).
pub fn poisson_rate(spec: &SubordinatorSpec) -> Result<f64> {
    spec.validate()?;
    let a = spec.alpha;
    Ok(match spec.family {
        Family::Plain => a * gamma_complete(a)?,
        Family::Tempered { theta } => a * upper_inc_gamma(a, theta)?,
        Family::Floored { epsilon } => a * gamma_complete(a)? * epsilon.powf(-a),
        Family::PureDrift => 0.0,
    })
}

/// Lévy density at `z > 0`. Zero below the jump floor and `+inf` exactly at
/// it; at `α = 1` the measure is a point mass at the floor.
pub fn levy_density(spec: &SubordinatorSpec, z: f64) -> f64 {
    let Some(f) = spec.floor() else {
        return 0.0;
    };
    if z < f {
        return 0.0;
    }
    if z == f {
        return f64::INFINITY;
    }
    let a = spec.alpha;
    if a == 1.0 {
        return 0.0;
    }
    let base = a * (z - f).powf(-a) / z * rgamma(1.0 - a);
    base * (-spec.theta() * z).exp()
}

/// Lévy density at `floor + d`, accurate for tiny offsets `d > 0`.
fn density_above_floor(spec: &SubordinatorSpec, d: f64) -> f64 {
    let (Some(f), a) = (spec.floor(), spec.alpha) else {
        return 0.0;
    };
    if d <= 0.0 || a == 1.0 {
        return 0.0;
    }
    let z = f + d;
    a * d.powf(-a) / z * rgamma(1.0 - a) * (-spec.theta() * z).exp()
}

/// CDF of a single jump. Closed form `I_(1−f/z)(1−α, α)` without tempering;
/// the tempered law is integrated numerically.
pub fn jump_cdf(spec: &SubordinatorSpec, z: f64) -> Result<f64> {
    let f = spec
        .floor()
        .ok_or_else(|| Error::InvalidParameter("pure drift has no jumps".into()))?;
    if z <= f {
        return Ok(0.0);
    }
    let a = spec.alpha;
    if a == 1.0 || z == f64::INFINITY {
        return Ok(1.0);
    }
    let theta = spec.theta();
    if theta == 0.0 {
        return reg_inc_beta(1.0 - f / z, 1.0 - a, a);
    }
    let mass = integrate(
        |d| density_above_floor(spec, d),
        0.0,
        z - f,
        PowerHint::lo(-a),
        &Accuracy::QUADRATURE.with_rel_tol(1e-11),
    )?;
    Ok((mass.value / poisson_rate(spec)?).clamp(0.0, 1.0))
}

/// Probability that a plain proposal is kept by the tempered sampler,
/// `e^θ Γ(α; θ) / Γ(α)`.
pub fn tempered_acceptance(alpha: f64, theta: f64) -> Result<f64> {
    SubordinatorSpec::tempered(alpha, theta)?;
    Ok(theta.exp() * upper_inc_gamma(alpha, theta)? / gamma_complete(alpha)?)
}

/// Mean and variance of `S(t)`. Finite for tempered `θ > 0`, for `α = 1`
/// (Poisson counts scaled by the floor) and for a pure drift.
pub fn tempered_mean_var(spec: &SubordinatorSpec, t: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    if !(t >= 0.0) {
        return Err(domain("tempered_mean_var", t, "t >= 0"));
    }
    let a = spec.alpha;
    let drift = spec.beta0 * t;
    match spec.family {
        Family::PureDrift => Ok((drift, 0.0)),
        Family::Tempered { theta } if theta > 0.0 => {
            let m = t * a * theta.powf(a - 1.0) * (-theta).exp();
            let extra = a * (1.0 - a) * t * theta.powf(a - 2.0) * (-theta).exp();
            Ok((drift + m, m + extra))
        }
        _ if a == 1.0 => {
            let f = spec.floor().unwrap_or(1.0);
            let rate = poisson_rate(spec)?;
            Ok((drift + rate * t * f, rate * t * f * f))
        }
        _ => Err(Error::InfiniteMoment {
            what: "mean and variance of an untempered subordinator with alpha < 1",
        }),
    }
}

/// `P(S_α(t) > x) ≈ t x^(−α) / Γ(1−α)` for large `x`.
pub fn tail_asymptote(alpha: f64, t: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("tail_asymptote", alpha, "0 < alpha < 1"));
    }
    if !(x > 0.0) {
        return Err(domain("tail_asymptote", x, "x > 0"));
    }
    Ok(t * x.powf(-alpha) * rgamma(1.0 - alpha))
}

/// Large-`t` behaviour `E S_α(t)^p ≈ Γ(1−p/α)/Γ(1−p) · t^(p/α)`, `0 < p < α`.
pub fn frac_moment_asymptote(alpha: f64, p: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain("frac_moment_asymptote", alpha, "0 < alpha <= 1"));
    }
    if !(p > 0.0 && p < alpha) {
        return Err(domain("frac_moment_asymptote", p, "0 < p < alpha"));
    }
    Ok(gamma_complete(1.0 - p / alpha)? * rgamma(1.0 - p) * t.powf(p / alpha))
}

/// Exact `E S(t)^p` for `0 < p < 1`, from
/// `E S^p = (t/Γ(1−p)) ∫₀^∞ η^(−p) φ′(η) e^(−tφ(η)) dη`.
///
/// Untempered families need `p < α`; beyond that the moment is infinite.
pub fn frac_moment(spec: &SubordinatorSpec, p: f64, t: f64) -> Result<f64> {
    spec.validate()?;
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("frac_moment", p, "0 < p < 1"));
    }
    if !(t >= 0.0) {
        return Err(domain("frac_moment", t, "t >= 0"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if matches!(spec.family, Family::PureDrift) {
        return Ok((spec.beta0 * t).powf(p));
    }
    let a = spec.alpha;
    let untempered = spec.theta() == 0.0;
    if untempered && a < 1.0 && p >= a {
        return Err(Error::InfiniteMoment {
            what: "fractional moment of order p >= alpha",
        });
    }
    let lo_exp = if untempered { a - 1.0 - p } else { -p };
    let integrand = |eta: f64| {
        if eta == 0.0 {
            return 0.0;
        }
        let phi = match laplace_exponent(spec, eta) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        eta.powf(-p) * laplace_exponent_derivative(spec, eta) * (-t * phi).exp()
    };
    let hint = if lo_exp < 0.0 {
        PowerHint::lo(lo_exp)
    } else {
        PowerHint::NONE
    };
    // the mass sits near η ~ t^(−1/α); split there so the folded tail
    // integral does not have to find it
    let knee = t.powf(-1.0 / a).clamp(1e-12, 1.0);
    let acc = Accuracy::QUADRATURE.with_rel_tol(1e-11);
    let head = integrate(integrand, 0.0, knee, hint, &acc)?;
    let tail = integrate(integrand, knee, f64::INFINITY, PowerHint::NONE, &acc)?;
    Ok(t * rgamma(1.0 - p) * (head.value + tail.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn families(alpha: f64) -> Vec<SubordinatorSpec> {
        vec![
            SubordinatorSpec::plain(alpha).unwrap(),
            SubordinatorSpec::tempered(alpha, 0.5).unwrap(),
            SubordinatorSpec::tempered(alpha, 2.0).unwrap(),
            SubordinatorSpec::floored(alpha, 0.1).unwrap(),
            SubordinatorSpec::floored(alpha, 3.0).unwrap(),
        ]
    }

    #[test]
    fn validation() {
        assert!(SubordinatorSpec::plain(0.0).is_err());
        assert!(SubordinatorSpec::plain(1.2).is_err());
        assert!(SubordinatorSpec::plain(1.0).is_ok());
        assert!(SubordinatorSpec::tempered(0.5, -1.0).is_err());
        assert!(SubordinatorSpec::floored(0.5, 0.0).is_err());
        assert!(SubordinatorSpec::plain(0.5).unwrap().with_drift(-1.0).is_err());
    }

    #[test]
    fn unit_alpha_exponents() {
        let plain = SubordinatorSpec::plain(1.0).unwrap();
        let tempered = SubordinatorSpec::tempered(1.0, 0.7).unwrap();
        for eta in [0.1, 0.5, 2.0, 7.0] {
            assert_relative_eq!(laplace_exponent(&plain, eta).unwrap(), -(-eta).exp_m1(), max_relative = 1e-13);
            assert_relative_eq!(
                laplace_exponent(&tempered, eta).unwrap(),
                (-0.7f64).exp() * -(-eta).exp_m1(),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(laplace_exponent(&plain, 2.0).unwrap(), 0.864_664_716_8, max_relative = 1e-10);
    }

    #[test]
    fn exponent_vanishes_at_zero() {
        for s in families(0.4) {
            assert_eq!(laplace_exponent(&s, 0.0).unwrap(), 0.0);
        }
        assert_eq!(laplace_exponent(&SubordinatorSpec::pure_drift(2.0).unwrap(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn drift_adds_linear_term() {
        let s = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let d = s.with_drift(0.3).unwrap();
        let eta = 1.7;
        assert_relative_eq!(
            laplace_exponent(&d, eta).unwrap(),
            laplace_exponent(&s, eta).unwrap() + 0.3 * eta,
            max_relative = 1e-15
        );
    }

    #[test]
    fn floored_exponent_factorises() {
        let (a, e) = (0.6, 0.25);
        let s = SubordinatorSpec::floored(a, e).unwrap();
        for eta in [0.05, 1.0, 4.0, 40.0] {
            let direct = a / e.powf(a) * lower_inc_gamma(a, eta * e).unwrap();
            assert_relative_eq!(laplace_exponent(&s, eta).unwrap(), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn tempered_small_eta_matches_difference() {
        let s = SubordinatorSpec::tempered(0.5, 2.0).unwrap();
        let eta = 1e-4;
        let diff = 0.5 * (lower_inc_gamma(0.5, 2.0 + eta).unwrap() - lower_inc_gamma(0.5, 2.0).unwrap());
        assert_relative_eq!(laplace_exponent(&s, eta).unwrap(), diff, max_relative = 1e-8);
    }

    #[test]
    fn bernstein_shape() {
        for a in [0.3, 0.5, 0.9, 1.0] {
            for s in families(a) {
                let h = 0.01;
                let mut prev = laplace_exponent(&s, 0.01).unwrap();
                let mut prev_diff = f64::INFINITY;
                let mut eta = 0.01 + h;
                while eta <= 20.0 {
                    let v = laplace_exponent(&s, eta).unwrap();
                    let d = v - prev;
                    assert!(d >= -1e-10, "{s:?} decreasing at {eta}");
                    assert!(d - prev_diff <= 1e-10, "{s:?} convex at {eta}");
                    prev = v;
                    prev_diff = d;
                    eta += h;
                }
            }
        }
    }

    #[test]
    fn plain_is_not_self_similar() {
        let s = SubordinatorSpec::plain(0.5).unwrap();
        let lhs = laplace_exponent(&s, 2.0).unwrap();
        let rhs = 2f64.powf(0.5) * laplace_exponent(&s, 1.0).unwrap();
        assert!((lhs - rhs).abs() > 1e-3);
    }

    #[test]
    fn stable_limit_as_floor_shrinks() {
        let a = 0.5;
        let mut last = f64::INFINITY;
        for e in [1.0, 0.1, 0.01, 0.001] {
            let s = SubordinatorSpec::floored(a, e).unwrap();
            let sup = (0..=490)
                .map(|i| 0.1 + i as f64 * 0.01)
                .map(|eta: f64| (laplace_exponent(&s, eta).unwrap() - eta.powf(a)).abs())
                .fold(0.0, f64::max);
            assert!(sup < last, "eps {e}: {sup} !< {last}");
            last = sup;
        }
    }

    #[test]
    fn rates() {
        assert_relative_eq!(poisson_rate(&SubordinatorSpec::plain(1.0).unwrap()).unwrap(), 1.0);
        assert_relative_eq!(
            poisson_rate(&SubordinatorSpec::plain(0.5).unwrap()).unwrap(),
            0.886_226_925_5,
            max_relative = 1e-10
        );
        for theta in [0.2, 1.0, 3.0] {
            assert_relative_eq!(
                poisson_rate(&SubordinatorSpec::tempered(1.0, theta).unwrap()).unwrap(),
                (-theta).exp(),
                max_relative = 1e-13
            );
        }
        assert_eq!(poisson_rate(&SubordinatorSpec::pure_drift(1.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn rate_is_exponent_at_infinity() {
        for s in families(0.7) {
            let r = poisson_rate(&s).unwrap();
            assert_relative_eq!(laplace_exponent(&s, 1e4).unwrap(), r, max_relative = 1e-9);
        }
    }

    #[test]
    fn density_values() {
        let s = SubordinatorSpec::plain(0.5).unwrap();
        assert_eq!(levy_density(&s, 0.5), 0.0);
        assert_eq!(levy_density(&s, 1.0), f64::INFINITY);
        assert_relative_eq!(levy_density(&s, 2.0), 0.141_047_395_9, max_relative = 1e-9);
        let t = SubordinatorSpec::tempered(0.5, 1.5).unwrap();
        assert_relative_eq!(levy_density(&t, 2.0), 0.141_047_395_9 * (-3f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn density_integrates_to_rate() {
        for a in [0.3, 0.5, 0.7, 0.9] {
            for s in families(a) {
                let mass = integrate(
                    |d| density_above_floor(&s, d),
                    0.0,
                    f64::INFINITY,
                    PowerHint::both(-a, -1.0 - a),
                    &Accuracy::QUADRATURE.with_rel_tol(1e-11),
                )
                .unwrap()
                .value;
                assert_relative_eq!(mass, poisson_rate(&s).unwrap(), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn jump_cdf_matches_density() {
        let s = SubordinatorSpec::floored(0.4, 0.5).unwrap();
        let rate = poisson_rate(&s).unwrap();
        for z in [0.6, 1.0, 5.0, 50.0] {
            let mass = integrate(|x| levy_density(&s, x), 0.5, z, PowerHint::lo(-0.4), &Accuracy::QUADRATURE)
                .unwrap()
                .value;
            assert_relative_eq!(jump_cdf(&s, z).unwrap(), mass / rate, max_relative = 1e-8);
        }
    }

    #[test]
    fn mean_var_closed_forms() {
        let s = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let (m, v) = tempered_mean_var(&s, 1.0).unwrap();
        assert_relative_eq!(m, 0.183_939_720_6, max_relative = 1e-9);
        assert_relative_eq!(v, 0.275_909_580_9, max_relative = 1e-9);
        let (m, v) = tempered_mean_var(&s, 10.0).unwrap();
        assert_relative_eq!(m, 1.839_397_205_9, max_relative = 1e-9);
        assert_relative_eq!(v, 2.759_095_808_8, max_relative = 1e-9);
        let s1 = SubordinatorSpec::tempered(1.0, 0.8).unwrap();
        let (m, v) = tempered_mean_var(&s1, 3.0).unwrap();
        assert_relative_eq!(m, 3.0 * (-0.8f64).exp(), max_relative = 1e-13);
        assert_relative_eq!(v, 3.0 * (-0.8f64).exp(), max_relative = 1e-13);
        assert!(matches!(
            tempered_mean_var(&SubordinatorSpec::plain(0.5).unwrap(), 1.0),
            Err(Error::InfiniteMoment { .. })
        ));
    }

    #[test]
    fn mean_is_exponent_slope_at_zero() {
        let s = SubordinatorSpec::tempered(0.3, 0.9).unwrap();
        let h = 1e-6;
        let slope = laplace_exponent(&s, h).unwrap() / h;
        assert_relative_eq!(slope, tempered_mean_var(&s, 1.0).unwrap().0, max_relative = 1e-5);
    }

    #[test]
    fn tail_formula() {
        assert_relative_eq!(tail_asymptote(0.5, 1.0, 100.0).unwrap(), 0.056_418_958_4, max_relative = 1e-9);
        let v = tail_asymptote(0.3, 1.0, 7.0).unwrap();
        assert_relative_eq!(tail_asymptote(0.3, 4.0, 7.0).unwrap(), 4.0 * v, max_relative = 1e-15);
        assert_relative_eq!(tail_asymptote(0.3, 1.0, 14.0).unwrap(), v * 2f64.powf(-0.3), max_relative = 1e-14);
        assert!(tail_asymptote(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn frac_moment_asymptote_values() {
        let expected = std::f64::consts::PI.sqrt() / gamma_complete(0.75).unwrap() * 10.0;
        assert_relative_eq!(frac_moment_asymptote(0.5, 0.25, 100.0).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 14.464_090_846_3, max_relative = 1e-10);
        assert_relative_eq!(frac_moment_asymptote(0.5, 1e-9, 1.0).unwrap(), 1.0, max_relative = 1e-8);
        assert!(frac_moment_asymptote(0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn exact_fractional_moment() {
        // E S^0.25 at t = 100 for α = 0.5; 40-digit evaluation of
        // (p/Γ(1−p)) ∫ η^(−p−1) (1 − e^(−tφ(η))) dη
        let s = SubordinatorSpec::plain(0.5).unwrap();
        assert_relative_eq!(frac_moment(&s, 0.25, 100.0).unwrap(), 14.463_909_973_867_267, max_relative = 1e-10);
        assert!(matches!(frac_moment(&s, 0.5, 1.0), Err(Error::InfiniteMoment { .. })));
        // α = 1: Poisson count, E N^p by direct summation
        let s1 = SubordinatorSpec::plain(1.0).unwrap();
        let t: f64 = 3.0;
        let mut direct = 0.0;
        let mut w = (-t).exp();
        for k in 1..80 {
            w *= t / k as f64;
            direct += w * (k as f64).powf(0.4);
        }
        assert_relative_eq!(frac_moment(&s1, 0.4, t).unwrap(), direct, max_relative = 1e-8);
        let d = SubordinatorSpec::pure_drift(2.0).unwrap();
        assert_relative_eq!(frac_moment(&d, 0.3, 5.0).unwrap(), 10f64.powf(0.3), max_relative = 1e-14);
    }

    #[test]
    fn tempered_fractional_moment_below_mean_power() {
        // Jensen: E S^p ≤ (E S)^p
        let s = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let m = tempered_mean_var(&s, 10.0).unwrap().0;
        let fm = frac_moment(&s, 0.5, 10.0).unwrap();
        assert!(fm < m.powf(0.5));
        assert!(fm > 0.0);
    }

    #[test]
    fn acceptance_probability() {
        assert_relative_eq!(tempered_acceptance(1.0, 2.0).unwrap(), 1.0, max_relative = 1e-13);
        for theta in [0.5, 1.0, 3.0] {
            assert!(tempered_acceptance(0.3, theta).unwrap() > 0.04);
        }
    }

    proptest! {
        #[test]
        fn exponent_bounded_by_rate(a in 0.05f64..1.0, eta in 0.0f64..50.0, theta in 0.0f64..3.0) {
            let s = SubordinatorSpec::tempered(a, theta).unwrap();
            let phi = laplace_exponent(&s, eta).unwrap();
            prop_assert!(phi >= 0.0);
            prop_assert!(phi <= poisson_rate(&s).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn floored_below_stable(a in 0.05f64..1.0, eta in 0.0f64..50.0, e in 1e-3f64..5.0) {
            let s = SubordinatorSpec::floored(a, e).unwrap();
            prop_assert!(laplace_exponent(&s, eta).unwrap() <= eta.powf(a) * (1.0 + 1e-12));
        }
    }
}
