//! Time change of a Lévy process `X` by `β₀t + S(t)`.
//!
//! The subordinated process `Z(t) = X(β₀t + S(t))` has characteristic
//! exponent `ψ_Z(u) = −φ(−ψ_X(u))`, which for the tempered family reads
//! `α γ(α; θ) − α γ(α; θ − ψ_X(u)) + β₀ ψ_X(u)`. For Brownian `X` the Lévy
//! density of `Z` has a Kummer-function closed form when `θ = 0`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::{generator_integral, ScalarFn};
use crate::specfun::{
    gamma_complete, integrate, kummer_1f1, lower_inc_gamma_complex, mittag_leffler3, rgamma,
    Accuracy, PowerHint,
};
use crate::subordinator::{laplace_exponent, sample_path, tempered_mean_var, Family, SubordinatorSpec};

/// Characteristic exponent `u ↦ ψ(u)` with `E e^(iuX(t)) = e^(tψ(u))`.
pub type SymbolFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Law of `X(z)` as a density in `x`: `(x, z) ↦ μ_z(x)`.
pub type TransitionDensity = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Lévy triplet `(drift, diffusion, ν)` with `ν` given by a density.
///
/// `drift` is the coefficient of the linear term under the truncation
/// `|x| ≤ 1`; `diffusion` is the Gaussian variance per unit time.
#[derive(Clone)]
pub struct Triplet {
    pub drift: f64,
    pub diffusion: f64,
    pub nu: Option<ScalarFn>,
}

impl std::fmt::Debug for Triplet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Triplet")
            .field("drift", &self.drift)
            .field("diffusion", &self.diffusion)
            .field("nu", &self.nu.as_ref().map(|_| "density"))
            .finish()
    }
}

impl Triplet {
    /// Lévy density at `x` (zero when the measure is absent).
    pub fn nu_density(&self, x: f64) -> f64 {
        self.nu.as_ref().map_or(0.0, |n| n(x))
    }
}

/// An outer Lévy process: its symbol, triplet and transition densities.
#[derive(Clone)]
pub struct LevySymbolDescriptor {
    pub psi: SymbolFn,
    pub triplet: Triplet,
    pub transition: Option<TransitionDensity>,
}

impl std::fmt::Debug for LevySymbolDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevySymbolDescriptor")
            .field("triplet", &self.triplet)
            .field("transition", &self.transition.is_some())
            .finish()
    }
}

fn gaussian_density(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * PI * variance).sqrt()
}

impl LevySymbolDescriptor {
    /// Standard Brownian motion, `ψ(u) = −u²/2`.
    pub fn brownian() -> Self {
        Self {
            psi: Arc::new(|u| Complex64::new(-0.5 * u * u, 0.0)),
            triplet: Triplet {
                drift: 0.0,
                diffusion: 1.0,
                nu: None,
            },
            transition: Some(Arc::new(|x, z| if z > 0.0 { gaussian_density(x, z) } else { 0.0 })),
        }
    }

    /// Deterministic motion `X(t) = ct`, `ψ(u) = icu`.
    pub fn drift(c: f64) -> Self {
        Self {
            psi: Arc::new(move |u| Complex64::new(0.0, c * u)),
            triplet: Triplet {
                drift: c,
                diffusion: 0.0,
                nu: None,
            },
            transition: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let at_zero = (self.psi)(0.0);
        if at_zero.norm() > 1e-14 {
            return Err(Error::InvalidParameter(format!("symbol at 0 is {at_zero}, not 0")));
        }
        if !(self.triplet.diffusion >= 0.0) {
            return Err(domain("triplet diffusion", self.triplet.diffusion, "diffusion >= 0"));
        }
        Ok(())
    }
}

fn require_unit_floor(spec: &SubordinatorSpec, what: &str) -> Result<()> {
    spec.validate()?;
    match spec.family {
        Family::Plain | Family::Tempered { .. } | Family::PureDrift => Ok(()),
        Family::Floored { .. } => Err(Error::InvalidParameter(format!(
            "{what} is defined for the floor-1 families and pure drift"
        ))),
    }
}

/// `α(γ(α; θ) − γ(α; w))` for complex `w` with `Re w ≥ θ`.
fn gamma_difference(alpha: f64, theta: f64, w: Complex64) -> Result<Complex64> {
    const SERIES_RADIUS: f64 = 50.0;
    if w.norm() <= SERIES_RADIUS {
        let lo = lower_inc_gamma_complex(alpha, Complex64::new(theta, 0.0))?;
        let hi = lower_inc_gamma_complex(alpha, w)?;
        return Ok(alpha * (lo - hi));
    }
    // −α ∫ e^(−ζ) ζ^(α−1) dζ along ζ = θ + τ(w − θ), τ ∈ [0, 1]
    let dir = w - theta;
    let integrand = |tau: f64, part: usize| {
        let zeta = theta + tau * dir;
        let v = (-zeta).exp() * zeta.powf(alpha - 1.0) * dir;
        if part == 0 {
            v.re
        } else {
            v.im
        }
    };
    let hint = if theta == 0.0 && alpha < 1.0 {
        PowerHint::lo(alpha - 1.0)
    } else {
        PowerHint::NONE
    };
    let acc = Accuracy::QUADRATURE.with_rel_tol(1e-11).with_abs_tol(1e-300);
    let re = integrate(|t| integrand(t, 0), 0.0, 1.0, hint, &acc)?.value;
    let im = integrate(|t| integrand(t, 1), 0.0, 1.0, hint, &acc)?.value;
    Ok(-alpha * Complex64::new(re, im))
}

/// Characteristic exponent of `X(β₀t + S(t))`.
#[derive(Debug, Clone)]
pub struct SubordinatedSymbol {
    outer: LevySymbolDescriptor,
    spec: SubordinatorSpec,
}

impl SubordinatedSymbol {
    /// `ψ_Z(u)`.
    pub fn eval(&self, u: f64) -> Result<Complex64> {
        let psi = (self.outer.psi)(u);
        let drift = self.spec.beta0 * psi;
        if matches!(self.spec.family, Family::PureDrift) {
            return Ok(drift);
        }
        if psi.im == 0.0 && psi.re <= 0.0 {
            // real symbol: ψ_Z = −φ(−ψ_X), no cancellation
            return Ok(Complex64::new(-laplace_exponent(&self.spec, -psi.re)?, 0.0));
        }
        let theta = self.spec.theta();
        Ok(gamma_difference(self.spec.alpha, theta, theta - psi)? + drift)
    }

    /// `E e^(iuZ(t)) = e^(tψ_Z(u))`.
    pub fn characteristic_function(&self, u: f64, t: f64) -> Result<Complex64> {
        Ok((t * self.eval(u)?).exp())
    }
}

/// Symbol composition for a floor-1 subordinator (or pure drift).
pub fn subordinate_symbol(x_symbol: &LevySymbolDescriptor, spec: &SubordinatorSpec) -> Result<SubordinatedSymbol> {
    x_symbol.validate()?;
    require_unit_floor(spec, "subordinate_symbol")?;
    Ok(SubordinatedSymbol {
        outer: x_symbol.clone(),
        spec: *spec,
    })
}

fn jump_density_offset(spec: &SubordinatorSpec, d: f64) -> f64 {
    // Lévy density at 1 + d for the floor-1 families
    let a = spec.alpha;
    if d <= 0.0 || a == 1.0 {
        return 0.0;
    }
    let z = 1.0 + d;
    a * d.powf(-a) / z * rgamma(1.0 - a) * (-spec.theta() * z).exp()
}

/// `∫ π(dz) g(z)` over the subordinator's Lévy measure.
fn integrate_levy<G: Fn(f64) -> f64>(spec: &SubordinatorSpec, g: G, acc: &Accuracy) -> Result<f64> {
    let a = spec.alpha;
    match spec.family {
        Family::PureDrift => Ok(0.0),
        _ if a == 1.0 => {
            // point mass at 1 with the Poisson rate
            Ok(crate::subordinator::poisson_rate(spec)? * g(1.0))
        }
        _ => {
            let f = |d: f64| jump_density_offset(spec, d) * g(1.0 + d);
            Ok(integrate(f, 0.0, f64::INFINITY, PowerHint::both(-a, -1.0 - a), acc)?.value)
        }
    }
}

/// Triplet of the time-changed process:
/// `drift′ = β₀ drift + ∫π(dz)∫_(|x|≤1) x μ_z(dx)`, `diffusion′ = β₀ diffusion`,
/// `ν′ = β₀ν + ∫ μ_z π(dz)`.
pub fn subordinate_triplet(x: &LevySymbolDescriptor, spec: &SubordinatorSpec) -> Result<Triplet> {
    x.validate()?;
    require_unit_floor(spec, "subordinate_triplet")?;
    let beta0 = spec.beta0;
    let jumps = !matches!(spec.family, Family::PureDrift);
    let transition = match (&x.transition, jumps) {
        (Some(t), _) => Some(t.clone()),
        (None, false) => None,
        (None, true) => {
            return Err(Error::InvalidParameter(
                "subordinate_triplet needs the outer transition density".into(),
            ))
        }
    };
    let acc = Accuracy::QUADRATURE.with_rel_tol(1e-10).with_abs_tol(1e-14);
    let mut drift = beta0 * x.triplet.drift;
    if let (Some(mu), true) = (&transition, jumps) {
        let inner = |z: f64| {
            integrate(|y| y * mu(y, z), -1.0, 1.0, PowerHint::NONE, &acc)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        };
        drift += integrate_levy(spec, inner, &acc)?;
    }
    let outer_nu = x.triplet.nu.clone();
    let nu: Option<ScalarFn> = if !jumps && outer_nu.is_none() {
        None
    } else {
        let spec = *spec;
        Some(Arc::new(move |y: f64| {
            let mut v = beta0 * outer_nu.as_ref().map_or(0.0, |n| n(y));
            if let Some(mu) = &transition {
                let acc = Accuracy::QUADRATURE.with_rel_tol(1e-11).with_abs_tol(1e-300);
                v += integrate_levy(&spec, |z| mu(y, z), &acc).unwrap_or(f64::NAN);
            }
            v
        }))
    };
    Ok(Triplet {
        drift,
        diffusion: beta0 * x.triplet.diffusion,
        nu,
    })
}

/// Evaluation route for the subordinated-BM Lévy density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BmDensityForm {
    /// `√2 αΓ(α+½)/π · ₁F₁(α+½; 3/2; −x²/2)`, `θ = 0` only.
    Kummer,
    /// `αΓ(α+½)/√(2π) · E^(α+½)_(1,3/2)(−x²/2)`, `θ = 0` only.
    MittagLeffler,
    /// Direct quadrature of `∫₁^∞ N(x; 0, z) π_θ(z) dz`.
    Quadrature,
}

/// Lévy density of `B(S_(α,θ)(t))`: closed form for `θ = 0`, quadrature
/// otherwise.
pub fn bm_levy_density(x: f64, alpha: f64, theta: f64) -> Result<f64> {
    let form = if theta == 0.0 {
        BmDensityForm::Kummer
    } else {
        BmDensityForm::Quadrature
    };
    bm_levy_density_with(form, x, alpha, theta)
}

/// [`bm_levy_density`] through a chosen route.
pub fn bm_levy_density_with(form: BmDensityForm, x: f64, alpha: f64, theta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("bm_levy_density", alpha, "0 < alpha < 1"));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(domain("bm_levy_density", theta, "theta >= 0"));
    }
    if !x.is_finite() {
        return Err(domain("bm_levy_density", x, "finite x"));
    }
    let x2 = x * x;
    let closed_form_only = |what: &'static str| {
        if theta != 0.0 {
            Err(Error::InvalidParameter(format!("{what} form of the density needs theta = 0")))
        } else {
            Ok(())
        }
    };
    let g = gamma_complete(alpha + 0.5)?;
    match form {
        BmDensityForm::Kummer => {
            closed_form_only("Kummer")?;
            Ok(SQRT_2 * alpha * g / PI * kummer_1f1(alpha + 0.5, 1.5, -0.5 * x2)?)
        }
        BmDensityForm::MittagLeffler => {
            closed_form_only("Mittag-Leffler")?;
            Ok(alpha * g / (2.0 * PI).sqrt() * mittag_leffler3(1.0, 1.5, alpha + 0.5, -0.5 * x2)?)
        }
        BmDensityForm::Quadrature => {
            let spec = SubordinatorSpec::tempered(alpha, theta)?;
            let acc = Accuracy::QUADRATURE.with_rel_tol(1e-12).with_abs_tol(1e-300);
            integrate_levy(&spec, |z| gaussian_density(x, z), &acc)
        }
    }
}

/// `Cov(Z(t), Z(τ)) = (t∧τ)(β₀ + E S(1))` for subordinated standard BM.
pub fn bm_autocovariance(spec: &SubordinatorSpec, t: f64, tau: f64) -> Result<f64> {
    if !(t >= 0.0 && tau >= 0.0) {
        return Err(domain("bm_autocovariance", t.min(tau), "t, tau >= 0"));
    }
    let (mean_rate, _) = tempered_mean_var(spec, 1.0).map_err(|e| match e {
        Error::InfiniteMoment { .. } => Error::InfiniteMoment {
            what: "autocovariance of BM subordinated without tempering",
        },
        other => other,
    })?;
    Ok(t.min(tau) * mean_rate)
}

/// Brownian motion read on the random clock `β₀t + S(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeChangedPath {
    pub time_grid: Vec<f64>,
    pub inner_clock: Vec<f64>,
    pub outer_values: Vec<f64>,
}

impl TimeChangedPath {
    /// Header `t,inner_clock,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,inner_clock,value\n");
        for ((t, c), v) in self.time_grid.iter().zip(&self.inner_clock).zip(&self.outer_values) {
            out.push_str(&format!("{t},{c},{v}\n"));
        }
        out
    }
}

/// Draws the clock path exactly, then Gaussian increments with variance
/// equal to the clock increments.
pub fn sample_subordinated_bm<R: Rng + ?Sized>(
    spec: &SubordinatorSpec,
    time_grid: &[f64],
    rng: &mut R,
) -> Result<TimeChangedPath> {
    if time_grid.is_empty() {
        return Err(Error::Degenerate { got: 0, need: 1 });
    }
    if !(time_grid[0] >= 0.0) || time_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(domain("sample_subordinated_bm", time_grid[0], "increasing grid from t >= 0"));
    }
    let horizon = time_grid[time_grid.len() - 1];
    let clock_path = sample_path(spec, horizon, rng)?;
    let inner_clock = clock_path.evaluate_many(time_grid)?;
    let mut outer_values = Vec::with_capacity(time_grid.len());
    let (mut prev_clock, mut value) = (0.0, 0.0);
    for &c in &inner_clock {
        let dv = c - prev_clock;
        if dv > 0.0 {
            let n: f64 = StandardNormal.sample(rng);
            value += dv.sqrt() * n;
        }
        outer_values.push(value);
        prev_clock = c;
    }
    Ok(TimeChangedPath {
        time_grid: time_grid.to_vec(),
        inner_clock,
        outer_values,
    })
}

/// A strongly continuous semigroup acting on scalar functions.
pub trait Semigroup {
    /// `(T_s g)(x)`.
    fn apply(&self, g: &dyn Fn(f64) -> f64, s: f64, x: f64) -> f64;
}

/// `(T_s g)(x) = g(x − s)`, generated by `−d/dx`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftSemigroup;

impl Semigroup for ShiftSemigroup {
    fn apply(&self, g: &dyn Fn(f64) -> f64, s: f64, x: f64) -> f64 {
        g(x - s)
    }
}

/// `∫_ε^∞ (T_s g − g)(x) α(s−ε)^(−α) s^(−1)/Γ(1−α) ds`, the ε-approximation
/// of `−(−A)^α g` for the generator `A` of `semigroup`.
pub fn phillips_apply<G, S>(g: G, alpha: f64, epsilon: f64, semigroup: &S, x: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
    S: Semigroup + ?Sized,
{
    let gx = g(x);
    generator_integral(|s| semigroup.apply(&g, s, x) - gx, alpha, epsilon)
}

/// Rows `x,nu_prime` of the subordinated-BM Lévy density.
pub fn density_table_csv(xs: &[f64], alpha: f64, theta: f64) -> Result<String> {
    let mut out = String::from("x,nu_prime\n");
    for &x in xs {
        out.push_str(&format!("{x},{}\n", bm_levy_density(x, alpha, theta)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{floored_exponent, marchaud_approx};
    use crate::rng::StreamFactory;
    use crate::specfun::upper_inc_gamma;
    use crate::stats::{mc_covariance, mc_mean, SIGMA_BAND};
    use approx::assert_relative_eq;

    #[test]
    fn symbol_vanishes_at_zero() {
        for spec in [
            SubordinatorSpec::plain(0.5).unwrap(),
            SubordinatorSpec::tempered(0.7, 1.0).unwrap().with_drift(0.5).unwrap(),
        ] {
            let s = subordinate_symbol(&LevySymbolDescriptor::brownian(), &spec).unwrap();
            assert_eq!(s.eval(0.0).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn bm_symbol_matches_integral_form() {
        // exp{−u²β₀t/2 − tα ∫_θ^(θ+u²/2) e^(−w) w^(α−1) dw}
        let (a, theta, b0, t) = (0.6, 0.8, 0.3, 1.5);
        let spec = SubordinatorSpec::tempered(a, theta).unwrap().with_drift(b0).unwrap();
        let s = subordinate_symbol(&LevySymbolDescriptor::brownian(), &spec).unwrap();
        for u in [0.5f64, 1.0, 3.0] {
            let w = integrate(
                |w: f64| (-w).exp() * w.powf(a - 1.0),
                theta,
                theta + 0.5 * u * u,
                PowerHint::NONE,
                &Accuracy::QUADRATURE.with_rel_tol(1e-13),
            )
            .unwrap()
            .value;
            let want = (-0.5 * u * u * b0 * t - t * a * w).exp();
            let got = s.characteristic_function(u, t).unwrap();
            assert_relative_eq!(got.re, want, max_relative = 1e-11);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn complex_route_agrees_with_real_route() {
        let spec = SubordinatorSpec::tempered(0.4, 1.2).unwrap();
        let real = subordinate_symbol(&LevySymbolDescriptor::brownian(), &spec).unwrap();
        for u in [0.3, 1.0, 4.0, 12.0] {
            let w = Complex64::new(1.2 + 0.5 * u * u, 0.0);
            let via_gamma = gamma_difference(0.4, 1.2, w).unwrap();
            assert_relative_eq!(via_gamma.re, real.eval(u).unwrap().re, max_relative = 1e-9);
        }
    }

    #[test]
    fn drift_outer_process() {
        // X(t) = ct: ψ_Z(u) = −φ(−icu), evaluated through complex γ
        let spec = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let s = subordinate_symbol(&LevySymbolDescriptor::drift(1.0), &spec).unwrap();
        let u = 0.7;
        // direct: ∫ (e^(iuz) − 1) π(dz)
        let re = integrate_levy(&spec, |z| (u * z).cos() - 1.0, &Accuracy::QUADRATURE.with_rel_tol(1e-12)).unwrap();
        let im = integrate_levy(&spec, |z| (u * z).sin(), &Accuracy::QUADRATURE.with_rel_tol(1e-12)).unwrap();
        let got = s.eval(u).unwrap();
        assert_relative_eq!(got.re, re, max_relative = 1e-8);
        assert_relative_eq!(got.im, im, max_relative = 1e-8);
        // beyond the series radius the path integral takes over
        let far = gamma_difference(0.5, 1.0, Complex64::new(1.0, -60.0)).unwrap();
        let re = integrate_levy(&spec, |z| (60.0 * z).cos() - 1.0, &Accuracy::QUADRATURE.with_rel_tol(1e-12).with_max_subdivisions(20_000)).unwrap();
        assert_relative_eq!(far.re, re, max_relative = 1e-6);
    }

    #[test]
    fn floored_family_rejected() {
        let spec = SubordinatorSpec::floored(0.5, 0.1).unwrap();
        assert!(subordinate_symbol(&LevySymbolDescriptor::brownian(), &spec).is_err());
    }

    #[test]
    fn triplet_of_subordinated_bm() {
        let spec = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let tr = subordinate_triplet(&LevySymbolDescriptor::brownian(), &spec).unwrap();
        assert!(tr.drift.abs() < 1e-14);
        assert_eq!(tr.diffusion, 0.0);
        for x in [0.0, 0.5, 2.0] {
            assert_relative_eq!(tr.nu_density(x), bm_levy_density(x, 0.5, 1.0).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn pure_drift_clock_keeps_triplet() {
        let spec = SubordinatorSpec::pure_drift(1.0).unwrap();
        let tr = subordinate_triplet(&LevySymbolDescriptor::brownian(), &spec).unwrap();
        assert_eq!(tr.drift, 0.0);
        assert_eq!(tr.diffusion, 1.0);
        assert_eq!(tr.nu_density(0.3), 0.0);
        let d = subordinate_triplet(&LevySymbolDescriptor::drift(2.0), &spec).unwrap();
        assert_eq!(d.drift, 2.0);
        assert!(d.nu.is_none());
    }

    #[test]
    fn kummer_quadrature_and_mittag_leffler_agree() {
        for a in [0.3, 0.5, 0.7] {
            let x0 = bm_levy_density(0.0, a, 0.0).unwrap();
            assert_relative_eq!(x0, SQRT_2 * a * gamma_complete(a + 0.5).unwrap() / PI, max_relative = 1e-14);
            for x in [0.0, 0.5, 1.0, 2.0] {
                let k = bm_levy_density_with(BmDensityForm::Kummer, x, a, 0.0).unwrap();
                let q = bm_levy_density_with(BmDensityForm::Quadrature, x, a, 0.0).unwrap();
                let m = bm_levy_density_with(BmDensityForm::MittagLeffler, x, a, 0.0).unwrap();
                assert_relative_eq!(k, q, max_relative = 1e-8);
                assert_relative_eq!(k, m, max_relative = 1e-9);
            }
        }
        assert!(bm_levy_density_with(BmDensityForm::Kummer, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn density_is_symmetric() {
        for (a, th) in [(0.5, 0.0), (0.3, 1.0)] {
            for x in [0.2, 1.7, 5.0] {
                let (p, m) = (bm_levy_density(x, a, th).unwrap(), bm_levy_density(-x, a, th).unwrap());
                assert!((p - m).abs() <= 1e-12 * p);
            }
        }
    }

    fn nu_mass(a: f64, theta: f64, power: i32, from: f64) -> f64 {
        let f = |x: f64| 2.0 * x.powi(power) * bm_levy_density(x, a, theta).unwrap();
        let acc = Accuracy::QUADRATURE.with_rel_tol(1e-10);
        integrate(f, from, f64::INFINITY, PowerHint::NONE, &acc).unwrap().value
    }

    #[test]
    fn density_mass_equals_rate() {
        for (a, theta) in [(0.5, 1.0), (0.3, 0.5), (0.7, 2.0), (0.5, 0.0)] {
            let want = a * upper_inc_gamma(a, theta).unwrap();
            assert_relative_eq!(nu_mass(a, theta, 0, 0.0), want, max_relative = 1e-6);
        }
    }

    #[test]
    fn tempered_tail_moments_finite() {
        for k in 1..=3 {
            let m = nu_mass(0.5, 1.0, k, 1.0);
            assert!(m.is_finite() && m > 0.0);
        }
    }

    #[test]
    fn autocovariance_formula() {
        let s = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        assert_relative_eq!(bm_autocovariance(&s, 1.0, 1.0).unwrap(), 0.183_939_720_6, max_relative = 1e-9);
        assert_relative_eq!(bm_autocovariance(&s, 1.0, 3.0).unwrap(), 0.183_939_720_6, max_relative = 1e-9);
        assert_eq!(bm_autocovariance(&s, 1.0, 2.0).unwrap(), bm_autocovariance(&s, 1.0, 5.0).unwrap());
        let s1 = SubordinatorSpec::tempered(1.0, 0.5).unwrap().with_drift(0.2).unwrap();
        assert_relative_eq!(
            bm_autocovariance(&s1, 2.0, 3.0).unwrap(),
            0.2 * 2.0 + 2.0 * (-0.5f64).exp(),
            max_relative = 1e-13
        );
        assert!(matches!(
            bm_autocovariance(&SubordinatorSpec::plain(0.5).unwrap(), 1.0, 1.0),
            Err(Error::InfiniteMoment { .. })
        ));
    }

    #[test]
    fn drift_clock_gives_brownian_increments() {
        let spec = SubordinatorSpec::pure_drift(1.0).unwrap();
        let grid = [0.0, 0.5, 1.5, 3.0];
        let f = StreamFactory::new(31);
        let paths = f.par_map(20_000, |rng, _| sample_subordinated_bm(&spec, &grid, rng).unwrap());
        assert_eq!(paths[0].inner_clock, grid.to_vec());
        for k in 1..grid.len() {
            let inc: Vec<f64> = paths.iter().map(|p| p.outer_values[k] - p.outer_values[k - 1]).collect();
            let sq: Vec<f64> = inc.iter().map(|d| d * d).collect();
            assert!(mc_mean(&sq).unwrap().within(grid[k] - grid[k - 1], SIGMA_BAND));
        }
    }

    #[test]
    fn subordinated_bm_moments() {
        let spec = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let grid = [0.0, 1.0, 2.0];
        let f = StreamFactory::new(32);
        let paths = f.par_map(40_000, |rng, _| sample_subordinated_bm(&spec, &grid, rng).unwrap());
        let z1: Vec<f64> = paths.iter().map(|p| p.outer_values[1]).collect();
        let z2: Vec<f64> = paths.iter().map(|p| p.outer_values[2]).collect();
        assert!(mc_mean(&z1).unwrap().within(0.0, SIGMA_BAND));
        let cov = mc_covariance(&z1, &z2).unwrap();
        assert!(cov.within(bm_autocovariance(&spec, 1.0, 2.0).unwrap(), SIGMA_BAND), "{cov:?}");
        assert!(paths.iter().all(|p| p.inner_clock.windows(2).all(|w| w[0] <= w[1])));
    }

    #[test]
    fn time_changed_csv() {
        let p = TimeChangedPath {
            time_grid: vec![0.0, 1.0],
            inner_clock: vec![0.0, 2.5],
            outer_values: vec![0.0, -0.25],
        };
        assert_eq!(p.to_csv(), "t,inner_clock,value\n0,0,0\n1,2.5,-0.25\n");
        let table = density_table_csv(&[0.0], 0.5, 0.0).unwrap();
        assert!(table.starts_with("x,nu_prime\n0,"));
    }

    #[test]
    fn phillips_with_shift_is_marchaud() {
        for (a, e, x) in [(0.5, 0.1, 0.3), (0.8, 0.5, -1.0)] {
            let g = |y: f64| (-(y * y)).exp();
            let p = phillips_apply(g, a, e, &ShiftSemigroup, x).unwrap();
            let m = marchaud_approx(g, a, e, x).unwrap();
            assert_relative_eq!(p, m, max_relative = 1e-10);
        }
        assert_eq!(phillips_apply(|_| 2.0, 0.5, 0.1, &ShiftSemigroup, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn phillips_on_exponential_eigenfunction() {
        let a = 0.5;
        for e in [0.1, 1e-3] {
            let v = phillips_apply(f64::exp, a, e, &ShiftSemigroup, 0.4).unwrap();
            assert_relative_eq!(v, -(0.4f64).exp() * floored_exponent(a, e, 1.0).unwrap(), max_relative = 1e-8);
        }
        // ε → 0: −(−A)^α e^x = −e^x for A = −d/dx
        let v = phillips_apply(f64::exp, a, 1e-6, &ShiftSemigroup, 0.0).unwrap();
        assert!((v + 1.0).abs() < 2e-3);
    }

    struct DampedCosine {
        omega: f64,
    }

    impl Semigroup for DampedCosine {
        // heat-type semigroup on cos(ωx): T_s cos(ω·) = e^(−sω²) cos(ω·)
        fn apply(&self, g: &dyn Fn(f64) -> f64, s: f64, x: f64) -> f64 {
            (-s * self.omega * self.omega).exp() * g(x)
        }
    }

    #[test]
    fn phillips_on_generic_semigroup() {
        // eigenvalue −ω² of A maps to −φ_ε(ω²)
        let (a, e, w) = (0.6, 0.2, 1.3);
        let sg = DampedCosine { omega: w };
        let g = move |x: f64| (w * x).cos();
        let x = 0.4;
        let v = phillips_apply(g, a, e, &sg, x).unwrap();
        assert_relative_eq!(v, -floored_exponent(a, e, w * w).unwrap() * g(x), max_relative = 1e-8);
    }
}
