//! Fractional operators evaluated by quadrature.
//!
//! Covers the Riemann–Liouville derivative, the tempered operator
//! `D^(λ,ρ) u(t) = (ρλ^ρ/Γ(1−ρ)) ∫₀ᵗ u′(t−s) Γ(−ρ; λs) ds`, the averaging
//! corrector `O_ε`, the ε-truncated Marchaud operator, and residual checks
//! for the relaxation and ε-governing equations.
//!
//! Functions on a grid are extended by zero to the left of the first grid
//! point.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::StreamFactory;
use crate::specfun::{
    gamma_complete, integrate, lower_inc_gamma, lower_inc_gamma_scaled, rgamma, upper_inc_gamma,
    Accuracy, PowerHint,
};
use crate::stats::{mc_mean, MonteCarloEstimate, SIGMA_BAND};
use crate::subordinator::{laplace_exponent, sample_value, SubordinatorSpec};

/// Shareable scalar callback.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampled function with optional exact value and derivative callbacks.
///
/// Operators use the callbacks when present and fall back to the grid data
/// (piecewise-linear values, local cubic derivatives) otherwise.
#[derive(Clone)]
pub struct GridFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    function: Option<ScalarFn>,
    derivative: Option<ScalarFn>,
    derivative_origin_exponent: Option<f64>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("points", &self.grid.len())
            .field("range", &(self.grid.first(), self.grid.last()))
            .field("function", &self.function.is_some())
            .field("derivative", &self.derivative.is_some())
            .finish()
    }
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::Degenerate {
                got: grid.len(),
                need: 2,
            });
        }
        if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(domain("GridFunction grid", w[1], "strictly increasing grid"));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid function contains non-finite entries".into()));
        }
        Ok(Self {
            grid,
            values,
            function: None,
            derivative: None,
            derivative_origin_exponent: None,
        })
    }

    /// Samples `f` on `grid` and keeps `f` for exact evaluation.
    pub fn from_fn<F>(grid: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let values = grid.iter().map(|&x| f(x)).collect();
        let mut g = Self::new(grid, values)?;
        g.function = Some(Arc::new(f));
        Ok(g)
    }

    /// Evenly spaced grid on `[lo, hi]` with `n` points.
    pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let h = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * h }).collect()
    }

    /// Attaches an exact derivative. `origin_exponent = Some(q)` declares
    /// `u′(x) ~ (x − x₀)^q` near the first grid point, `-1 < q < 0`.
    pub fn with_derivative<F>(mut self, df: F, origin_exponent: Option<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(df));
        self.derivative_origin_exponent = origin_exponent;
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn start(&self) -> f64 {
        self.grid[0]
    }

    fn end(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    fn check_in_range(&self, what: &'static str, x: f64) -> Result<()> {
        if x.is_nan() || x > self.end() {
            return Err(domain(what, x, "x within the grid range"));
        }
        Ok(())
    }

    /// Interval index `i` with `grid[i] ≤ x ≤ grid[i+1]`.
    fn interval(&self, x: f64) -> usize {
        let k = self.grid.partition_point(|&g| g <= x);
        k.clamp(1, self.grid.len() - 1) - 1
    }

    fn interpolate(&self, x: f64) -> f64 {
        if x < self.start() {
            return 0.0;
        }
        let i = self.interval(x);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let w = (x - x0) / (x1 - x0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Value at `x`, zero left of the grid.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        self.check_in_range("GridFunction::value_at", x)?;
        if x < self.start() {
            return Ok(0.0);
        }
        Ok(match &self.function {
            Some(f) => f(x),
            None => self.interpolate(x),
        })
    }

    /// Derivative of the cubic through the four grid points around `x`.
    fn grid_derivative(&self, x: f64) -> f64 {
        if x < self.start() {
            return 0.0;
        }
        let n = self.grid.len();
        if n < 4 {
            let i = self.interval(x);
            return (self.values[i + 1] - self.values[i]) / (self.grid[i + 1] - self.grid[i]);
        }
        let i = self.interval(x);
        let first = i.saturating_sub(1).min(n - 4);
        let xs = &self.grid[first..first + 4];
        let ys = &self.values[first..first + 4];
        if ys.iter().all(|&y| y == ys[0]) {
            return 0.0;
        }
        let mut d = 0.0;
        for j in 0..4 {
            // derivative of the j-th Lagrange basis polynomial
            let mut denom = 1.0;
            for m in 0..4 {
                if m != j {
                    denom *= xs[j] - xs[m];
                }
            }
            let mut numer = 0.0;
            for skip in 0..4 {
                if skip == j {
                    continue;
                }
                let mut p = 1.0;
                for m in 0..4 {
                    if m != j && m != skip {
                        p *= x - xs[m];
                    }
                }
                numer += p;
            }
            d += ys[j] * numer / denom;
        }
        d
    }

    /// `u′(x)`: the attached derivative, else grid differencing.
    pub fn derivative_at(&self, x: f64) -> Result<f64> {
        self.check_in_range("GridFunction::derivative_at", x)?;
        if x < self.start() {
            return Ok(0.0);
        }
        Ok(match &self.derivative {
            Some(df) => df(x),
            None => self.grid_derivative(x),
        })
    }

    /// Largest second difference, a proxy for the interpolation error.
    fn max_second_difference(&self) -> f64 {
        self.values
            .windows(3)
            .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs())
            .fold(0.0, f64::max)
    }
}

fn check_order(what: &'static str, a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(domain(what, a, "0 < order < 1"))
    }
}

const INTERPOLATION_WARN_LEVEL: f64 = 1e-6;

/// Riemann–Liouville derivative `(1/Γ(1−α)) d/dx ∫₀ˣ f(t)(x−t)^(−α) dt`.
///
/// The grid values are interpolated linearly and the interpolant is
/// integrated and differentiated exactly, so constants and linear
/// functions come out exact. `α = 1` returns the ordinary derivative.
pub fn rl_derivative(f: &GridFunction, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain("rl_derivative", alpha, "0 < alpha <= 1"));
    }
    f.check_in_range("rl_derivative", x)?;
    if !(x > 0.0) {
        return Err(domain("rl_derivative", x, "x > 0"));
    }
    if alpha == 1.0 {
        return f.derivative_at(x);
    }
    let err = f.max_second_difference() / 8.0;
    let scale = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if err > INTERPOLATION_WARN_LEVEL * scale {
        log::warn!(
            "rl_derivative: grid interpolation error about {err:.1e} exceeds {INTERPOLATION_WARN_LEVEL:.0e} relative; refine the grid"
        );
    }
    let one = 1.0 - alpha;
    let t0 = f.start();
    if x <= t0 {
        return Ok(0.0);
    }
    // the jump from the zero extension to f(t₀) at t₀
    let mut total = f.values[0] * (x - t0).powf(-alpha);
    for j in 0..f.grid.len() - 1 {
        let (a, b) = (f.grid[j], f.grid[j + 1]);
        if a >= x {
            break;
        }
        let slope = (f.values[j + 1] - f.values[j]) / (b - a);
        let upper = b.min(x);
        total += slope * ((x - a).powf(one) - (x - upper).powf(one)) / one;
    }
    Ok(total * rgamma(one))
}

/// `O_ε(η) = (α/ε^α) ∫₀^ε e^(−ηy) y^(α−1) dy = (α/(ηε)^α) γ(α, ηε)`.
pub fn o_epsilon_transfer(eta: f64, epsilon: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain("o_epsilon_transfer", alpha, "0 < alpha <= 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain("o_epsilon_transfer", epsilon, "epsilon > 0"));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(domain("o_epsilon_transfer", eta, "finite eta >= 0"));
    }
    Ok(alpha * lower_inc_gamma_scaled(alpha, eta * epsilon)?)
}

/// `(α/ε^α) ∫₀^ε h(x−y) y^(α−1) dy`.
///
/// With an exact callback the integral is done by quadrature; otherwise
/// the linear interpolant of the grid data is integrated exactly against
/// `y^(α−1)`.
pub fn o_epsilon_apply(h: &GridFunction, epsilon: f64, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain("o_epsilon_apply", alpha, "0 < alpha <= 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain("o_epsilon_apply", epsilon, "epsilon > 0"));
    }
    h.check_in_range("o_epsilon_apply", x)?;
    let norm = alpha * epsilon.powf(-alpha);
    if let Some(f) = &h.function {
        let t0 = h.start();
        let g = |y: f64| {
            let s = x - y;
            if s < t0 {
                0.0
            } else {
                f(s) * y.powf(alpha - 1.0)
            }
        };
        let hint = if alpha < 1.0 {
            PowerHint::lo(alpha - 1.0)
        } else {
            PowerHint::NONE
        };
        let acc = Accuracy::QUADRATURE.with_rel_tol(1e-12).with_abs_tol(1e-300);
        // split at the grid start so the zero extension is not a kink
        // inside a quadrature panel
        let cut = x - t0;
        let value = if cut > 0.0 && cut < epsilon {
            integrate(g, 0.0, cut, hint, &acc)?.value
        } else if cut <= 0.0 {
            0.0
        } else {
            integrate(g, 0.0, epsilon, hint, &acc)?.value
        };
        return Ok(norm * value);
    }
    // y-breakpoints where x − y crosses a grid point
    let mut cuts = vec![0.0];
    for &g in h.grid.iter().rev() {
        let y = x - g;
        if y > 0.0 && y < epsilon {
            cuts.push(y);
        }
    }
    cuts.push(epsilon);
    let mut total = 0.0;
    let a1 = alpha + 1.0;
    for w in cuts.windows(2) {
        let (ya, yb) = (w[0], w[1]);
        let (sa, sb) = (x - ya, x - yb);
        let mid = 0.5 * (sa + sb);
        if mid < h.start() {
            continue;
        }
        // h(x − y) = c0 + c1 y on this piece
        let (ha, hb) = (h.interpolate(sa), h.interpolate(sb));
        let c1 = (hb - ha) / (yb - ya);
        let c0 = ha - c1 * ya;
        total += c0 * (yb.powf(alpha) - ya.powf(alpha)) / alpha
            + c1 * (yb.powf(a1) - ya.powf(a1)) / a1;
    }
    Ok(norm * total)
}

/// Order and rate of the tempered operator `D^(λ,ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub rho: f64,
    pub lambda_rate: f64,
}

impl OperatorParams {
    pub fn new(rho: f64, lambda_rate: f64) -> Result<Self> {
        check_order("OperatorParams rho", rho)?;
        if !(lambda_rate > 0.0 && lambda_rate.is_finite()) {
            return Err(domain("OperatorParams lambda", lambda_rate, "lambda > 0"));
        }
        Ok(Self { rho, lambda_rate })
    }

    fn prefactor(&self) -> f64 {
        self.rho * self.lambda_rate.powf(self.rho) * rgamma(1.0 - self.rho)
    }

    /// Laplace transform of the kernel, `((θ+λ)^ρ − λ^ρ)/θ`.
    pub fn kernel_transform(&self, theta: f64) -> f64 {
        ((theta + self.lambda_rate).powf(self.rho) - self.lambda_rate.powf(self.rho)) / theta
    }
}

fn caputo_accuracy() -> Accuracy {
    Accuracy::QUADRATURE.with_rel_tol(1e-11).with_abs_tol(1e-300)
}

/// `∫₀^L g(L−r) k(r) dr` where `k` is singular at `r = 0` with exponent
/// `k_exp` and `g` possibly at `0` with exponent `g_exp`.
///
/// The range is halved and each half is written in the distance from its
/// own singular end, so neither singularity is evaluated at a point whose
/// offset from the end has been rounded away.
fn singular_convolution<G, K>(g: G, k: K, len: f64, k_exp: f64, g_exp: Option<f64>, acc: &Accuracy) -> Result<f64>
where
    G: Fn(f64) -> f64,
    K: Fn(f64) -> f64,
{
    let half = 0.5 * len;
    let near_k = integrate(
        |r: f64| if r <= 0.0 { 0.0 } else { g(len - r) * k(r) },
        0.0,
        half,
        PowerHint::lo(k_exp),
        acc,
    )?;
    let g_hint = match g_exp {
        Some(q) => PowerHint::lo(q),
        None => PowerHint::NONE,
    };
    let near_g = integrate(
        |y: f64| if y <= 0.0 { 0.0 } else { g(y) * k(len - y) },
        0.0,
        len - half,
        g_hint,
        acc,
    )?;
    Ok(near_k.value + near_g.value)
}

/// `D^(λ,ρ) u(t) = (ρλ^ρ/Γ(1−ρ)) ∫₀ᵗ u′(t−s) Γ(−ρ; λs) ds`.
///
/// With an attached derivative the integral is done directly; otherwise
/// the local cubic derivative of the grid data is integrated one grid
/// interval at a time.
pub fn tempered_caputo(u: &GridFunction, params: &OperatorParams, t: f64) -> Result<f64> {
    OperatorParams::new(params.rho, params.lambda_rate)?;
    u.check_in_range("tempered_caputo", t)?;
    if !(t > 0.0) {
        return Err(domain("tempered_caputo", t, "t > 0"));
    }
    let (rho, lam) = (params.rho, params.lambda_rate);
    let start = u.start();
    let reach = t - start;
    if reach <= 0.0 {
        return Ok(0.0);
    }
    let kernel = |s: f64| upper_inc_gamma(-rho, lam * s).unwrap_or(f64::NAN);
    let acc = caputo_accuracy();
    let value = if let Some(df) = &u.derivative {
        let q = u.derivative_origin_exponent.filter(|q| *q > -1.0 && *q < 0.0);
        singular_convolution(|y| df(start + y), kernel, reach, -rho, q, &acc)?
    } else {
        let spacing = u.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if spacing > 1e-2 * t {
            log::warn!("tempered_caputo: grid spacing {spacing:.1e} is coarse relative to t = {t}");
        }
        // s-breakpoints where t − s crosses a grid point
        let mut cuts = vec![0.0];
        cuts.extend(u.grid.iter().rev().map(|g| t - g).filter(|&s| s > 0.0 && s < reach));
        cuts.push(reach);
        let mut total = crate::sum::CompensatedSum::new();
        for (i, w) in cuts.windows(2).enumerate() {
            let hint = if i == 0 { PowerHint::lo(-rho) } else { PowerHint::NONE };
            let f = |s: f64| if s <= 0.0 { 0.0 } else { u.grid_derivative(t - s) * kernel(s) };
            total.add(integrate(f, w[0], w[1], hint, &acc.with_rel_tol(1e-10))?.value);
        }
        total.value()
    };
    Ok(params.prefactor() * value)
}

/// `Γ(ρ; λt)` sampled on `grid` with its exact derivative attached.
pub fn tempered_eigenfunction(params: &OperatorParams, grid: Vec<f64>) -> Result<GridFunction> {
    let (rho, lam) = (params.rho, params.lambda_rate);
    let u = GridFunction::from_fn(grid, move |t| upper_inc_gamma(rho, lam * t).unwrap_or(f64::NAN))?;
    Ok(u.with_derivative(
        move |t| -lam * (lam * t).powf(rho - 1.0) * (-lam * t).exp(),
        Some(rho - 1.0),
    ))
}

/// `|D^(λ,ρ)Γ(ρ;λt) + λ^ρ Γ(ρ;λt)| / (λ^ρ Γ(ρ;λt))`.
pub fn eigenfunction_residual(params: &OperatorParams, t: f64) -> Result<f64> {
    let u = tempered_eigenfunction(params, vec![0.0, t])?;
    let d = tempered_caputo(&u, params, t)?;
    let expected = params.lambda_rate.powf(params.rho) * upper_inc_gamma(params.rho, params.lambda_rate * t)?;
    Ok((d + expected).abs() / expected)
}

/// Numerical and closed-form Laplace transforms of `D^(λ,ρ)u` for
/// `u(t) = e^(−t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub theta: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub abs_error: f64,
}

/// Transforms `D^(λ,ρ) e^(−t)` numerically at `θ` and compares with
/// `((θ+λ)^ρ − λ^ρ)(ũ(θ) − u(0)/θ)`.
pub fn laplace_domain_check(params: &OperatorParams, theta: f64) -> Result<LaplaceCheck> {
    if !(theta > 0.0) {
        return Err(domain("laplace_domain_check", theta, "theta > 0"));
    }
    let (rho, lam) = (params.rho, params.lambda_rate);
    let pre = params.prefactor();
    // D e^(−t) = −pre ∫₀ᵗ e^(−(t−s)) Γ(−ρ; λs) ds
    let d = |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let g = |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            -(-(t - s)).exp() * upper_inc_gamma(-rho, lam * s).unwrap_or(f64::NAN)
        };
        match integrate(g, 0.0, t, PowerHint::lo(-rho), &caputo_accuracy()) {
            Ok(r) => pre * r.value,
            Err(_) => f64::NAN,
        }
    };
    let outer = |t: f64| (-theta * t).exp() * d(t);
    let acc = Accuracy::QUADRATURE.with_rel_tol(1e-10);
    let numeric = integrate(outer, 0.0, f64::INFINITY, PowerHint::NONE, &acc)?.value;
    if !numeric.is_finite() {
        return Err(Error::NonConvergence {
            what: "laplace_domain_check inner integral",
            estimate: numeric,
        });
    }
    let k = (theta + lam).powf(rho) - lam.powf(rho);
    let closed_form = k / (theta + 1.0) - k / theta;
    Ok(LaplaceCheck {
        theta,
        numeric,
        closed_form,
        abs_error: (numeric - closed_form).abs(),
    })
}

/// Residual of `D^(1,α) u = Γ(α) − u` for `u = γ(α, ·)` on `x_grid`:
/// `(α/Γ(1−α)) ∫₀ˣ u′(x−s) Γ(−α, s) ds − (Γ(α) − u(x))`.
///
/// At `x = 0` the equation does not hold pointwise, so the grid must be
/// positive.
pub fn relaxation_residual(alpha: f64, x_grid: &[f64]) -> Result<GridFunction> {
    check_order("relaxation_residual", alpha)?;
    if let Some(&x) = x_grid.iter().find(|x| !(**x > 0.0)) {
        return Err(domain("relaxation_residual", x, "x > 0"));
    }
    let g = gamma_complete(alpha)?;
    let pre = alpha * rgamma(1.0 - alpha);
    let residuals = x_grid
        .iter()
        .map(|&x| {
            let du = |y: f64| (-y).exp() * y.powf(alpha - 1.0);
            let kernel = |s: f64| upper_inc_gamma(-alpha, s).unwrap_or(f64::NAN);
            let r = singular_convolution(du, kernel, x, -alpha, Some(alpha - 1.0), &caputo_accuracy())?;
            Ok(pre * r - (g - lower_inc_gamma(alpha, x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(x_grid.to_vec(), residuals)
}

/// Grid description embedded in residual reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

/// Serializable summary of a residual computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub operator: String,
    pub params: BTreeMap<String, f64>,
    pub max_residual: f64,
    pub grid: GridSpec,
}

impl ResidualReport {
    pub fn from_residuals(operator: &str, params: BTreeMap<String, f64>, residuals: &GridFunction) -> Self {
        Self {
            operator: operator.to_string(),
            params,
            max_residual: residuals.values.iter().fold(0.0, |m, r| m.max(r.abs())),
            grid: GridSpec {
                lo: residuals.start(),
                hi: residuals.end(),
                points: residuals.grid.len(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("residual reports serialize")
    }
}

/// One η point of the ε-governing-equation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformCheck {
    pub eta: f64,
    pub estimate: MonteCarloEstimate,
    pub target: f64,
    pub pass: bool,
}

/// Laplace-domain check of the ε-governing equation: the Monte Carlo mean
/// of `e^(−ηS(t))` for the ε-floored subordinator against
/// `e^(−η^α O_ε(η) t)`, one stream per path.
pub fn governing_check_eps(
    alpha: f64,
    epsilon: f64,
    t: f64,
    eta_grid: &[f64],
    mc_paths: usize,
    streams: &StreamFactory,
) -> Result<Vec<TransformCheck>> {
    let spec = SubordinatorSpec::floored(alpha, epsilon)?;
    let values = streams
        .par_map(mc_paths, |rng, _| sample_value(&spec, t, rng))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    eta_grid
        .iter()
        .map(|&eta| {
            let samples: Vec<f64> = values.iter().map(|s| (-eta * s).exp()).collect();
            let estimate = mc_mean(&samples)?.with_provenance(streams.master_seed(), mc_paths);
            let target = (-eta.powf(alpha) * o_epsilon_transfer(eta, epsilon, alpha)? * t).exp();
            Ok(TransformCheck {
                eta,
                estimate,
                target,
                pass: estimate.within(target, SIGMA_BAND),
            })
        })
        .collect()
}

/// `∫_ε^∞ (g(x−s) − g(x)) α(s−ε)^(−α) s^(−1)/Γ(1−α) ds`, the ε-truncated
/// Marchaud operator in generator form.
pub fn marchaud_approx<G: Fn(f64) -> f64>(g: G, alpha: f64, epsilon: f64, x: f64) -> Result<f64> {
    generator_integral(|s| g(x - s) - g(x), alpha, epsilon)
}

/// `∫_ε^∞ diff(s) α(s−ε)^(−α) s^(−1)/Γ(1−α) ds` for a difference callback.
pub(crate) fn generator_integral<D: Fn(f64) -> f64>(diff: D, alpha: f64, epsilon: f64) -> Result<f64> {
    check_order("marchaud_approx", alpha)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain("marchaud_approx", epsilon, "epsilon > 0"));
    }
    // in the offset d = s − ε the kernel reads α d^(−α) (ε+d)^(−1)/Γ(1−α)
    let c = alpha * rgamma(1.0 - alpha);
    let f = |d: f64| {
        if d <= 0.0 {
            return 0.0;
        }
        let s = epsilon + d;
        diff(s) * c * d.powf(-alpha) / s
    };
    let acc = Accuracy::QUADRATURE.with_rel_tol(1e-12).with_abs_tol(1e-300);
    let split = epsilon.max(1.0);
    let head = integrate(&f, 0.0, split, PowerHint::lo(-alpha), &acc)?;
    let tail = integrate(&f, split, f64::INFINITY, PowerHint::hi(-1.0 - alpha), &acc)?;
    let total = head.value + tail.value;
    if !total.is_finite() {
        return Err(Error::NonConvergence {
            what: "marchaud_approx (integrand not admissible)",
            estimate: total,
        });
    }
    Ok(total)
}

/// `φ_ε(η)`, shorthand used by the generator identities.
pub fn floored_exponent(alpha: f64, epsilon: f64, eta: f64) -> Result<f64> {
    laplace_exponent(&SubordinatorSpec::floored(alpha, epsilon)?, eta)
}
