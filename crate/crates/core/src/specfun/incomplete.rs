//! Lower and upper incomplete gamma functions.
//!
//! `γ(a, x)` uses the power series `x^a e^-x Σ x^n / (a)_(n+1)` below
//! `x = a + 1` and the complement of the Legendre continued fraction above.
//! `Γ(a, x)` for `a ≤ 0` and small `x` is reached by downward recurrence
//! `Γ(a, x) = (Γ(a+1, x) - x^a e^-x) / a` from a positive order.

use num_complex::Complex64;

use super::gamma::{gamma_unchecked, is_nonpositive_integer};
use super::Accuracy;
use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FPMIN: f64 = 1e-300;
const COMPLEX_SERIES_RADIUS: f64 = 50.0;

fn check_finite(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(what, v, "finite"))
    }
}

/// `Σ x^n / (a)_(n+1)`, the series part of γ(a, x) = x^a e^-x · S.
fn lower_series_sum(a: f64, x: f64) -> Result<f64> {
    let acc = Accuracy::SERIES;
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut small = 0;
    for n in 1..acc.max_terms {
        term *= x / (a + n as f64);
        sum += term;
        if term.abs() <= 0.1 * acc.rel_tol * sum.abs() {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "lower_inc_gamma series",
        estimate: term.abs() / sum.abs(),
    })
}

/// Continued fraction for `Γ(a, x) e^x x^-a`; converges for any real `a`
/// when `x > 0`, quickly once `x ≳ 1`.
fn upper_cf(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() <= 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        what: "upper_inc_gamma continued fraction",
        estimate: f64::NAN,
    })
}

fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x).exp()
}

/// γ(a, x) = ∫₀ˣ e^-w w^(a-1) dw for `a > 0`, `x ≥ 0`.
pub fn lower_inc_gamma(a: f64, x: f64) -> Result<f64> {
    check_finite("lower_inc_gamma", a)?;
    if !(a > 0.0) {
        return Err(domain("lower_inc_gamma", a, "a > 0"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(domain("lower_inc_gamma", x, "x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(gamma_unchecked(a));
    }
    if x < a + 1.0 {
        Ok(prefactor(a, x) * lower_series_sum(a, x)?)
    } else {
        Ok(gamma_unchecked(a) - prefactor(a, x) * upper_cf(a, x)?)
    }
}

/// `γ(a, x) / x^a`, finite at `x = 0` where it equals `1/a`.
pub fn lower_inc_gamma_scaled(a: f64, x: f64) -> Result<f64> {
    check_finite("lower_inc_gamma_scaled", a)?;
    if !(a > 0.0) {
        return Err(domain("lower_inc_gamma_scaled", a, "a > 0"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(domain("lower_inc_gamma_scaled", x, "x >= 0"));
    }
    if x < a + 1.0 {
        Ok((-x).exp() * lower_series_sum(a, x)?)
    } else {
        Ok(lower_inc_gamma(a, x)? / x.powf(a))
    }
}

/// E₁(x) = Γ(0, x) for `0 < x < 1`.
fn exp_integral_e1_small(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let contrib = -term / k as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Γ(a, x) = ∫ₓ^∞ e^-w w^(a-1) dw for real `a`.
///
/// Requires `x ≥ 0`, and `x > 0` when `a ≤ 0` (the integral diverges at 0).
pub fn upper_inc_gamma(a: f64, x: f64) -> Result<f64> {
    check_finite("upper_inc_gamma", a)?;
    if x.is_nan() || x < 0.0 {
        return Err(domain("upper_inc_gamma", x, "x >= 0"));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if a > 0.0 {
        if x == 0.0 {
            return Ok(gamma_unchecked(a));
        }
        if x < a + 1.0 {
            return Ok(gamma_unchecked(a) - prefactor(a, x) * lower_series_sum(a, x)?);
        }
        return Ok(prefactor(a, x) * upper_cf(a, x)?);
    }
    if x == 0.0 {
        return Err(domain("upper_inc_gamma", x, "x > 0 when a <= 0"));
    }
    if x >= 1.0 {
        return Ok(prefactor(a, x) * upper_cf(a, x)?);
    }
    // downward recurrence from a positive order
    let (mut order, mut value) = if is_nonpositive_integer(a) {
        (0.0, exp_integral_e1_small(x))
    } else {
        let start = a + (-a).ceil() + 1.0;
        (start, upper_inc_gamma(start, x)?)
    };
    let ex = (-x).exp();
    while order > a + 0.5 {
        order -= 1.0;
        value = (value - x.powf(order) * ex) / order;
    }
    Ok(value)
}

/// γ(a, z) for complex `z` with `|z| ≤ 50`, via `z^a e^-z Σ z^n/(a)_(n+1)`
/// on the principal branch of `z^a`.
pub fn lower_inc_gamma_complex(a: f64, z: Complex64) -> Result<Complex64> {
    check_finite("lower_inc_gamma_complex", a)?;
    if !(a > 0.0) {
        return Err(domain("lower_inc_gamma_complex", a, "a > 0"));
    }
    let r = z.norm();
    if !r.is_finite() || r > COMPLEX_SERIES_RADIUS {
        return Err(Error::NonConvergence {
            what: "lower_inc_gamma_complex (|z| beyond series radius 50)",
            estimate: r,
        });
    }
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let acc = Accuracy::SERIES;
    let mut term = Complex64::new(1.0 / a, 0.0);
    let mut sum = term;
    let mut small = 0;
    let mut converged = false;
    for n in 1..acc.max_terms {
        term = term * z / (a + n as f64);
        sum += term;
        if term.norm() <= 0.1 * acc.rel_tol * sum.norm() {
            small += 1;
            if small == 3 {
                converged = true;
                break;
            }
        } else {
            small = 0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "lower_inc_gamma_complex series",
            estimate: term.norm() / sum.norm(),
        });
    }
    Ok((z.ln() * a - z).exp() * sum)
}
