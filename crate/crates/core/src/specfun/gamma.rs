//! Complete gamma function via the Lanczos approximation (g = 7, n = 9).

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

pub(crate) fn is_nonpositive_integer(a: f64) -> bool {
    a <= 0.0 && a == a.round()
}

/// Γ(a) for real `a`, rejecting the poles at 0, −1, −2, …
pub fn gamma_complete(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(crate::error::domain("gamma_complete", a, "finite"));
    }
    if is_nonpositive_integer(a) {
        return Err(Error::Pole {
            what: "gamma_complete",
            value: a,
        });
    }
    Ok(gamma_unchecked(a))
}

/// Γ(a) without pole checks. Returns ±inf or NaN at poles and overflows.
pub(crate) fn gamma_unchecked(a: f64) -> f64 {
    if a < 0.5 {
        // reflection
        return PI / ((PI * a).sin() * gamma_unchecked(1.0 - a));
    }
    if a == a.round() && a <= 171.0 {
        return factorial(a as u32 - 1);
    }
    let x = a - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let sum = lanczos_sum(x);
    // split the power so t^(x+1/2) does not overflow before e^-t is applied
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// ln |Γ(a)|.
pub fn ln_gamma(a: f64) -> f64 {
    if a < 0.5 {
        return (PI / (PI * a).sin().abs()).ln() - ln_gamma(1.0 - a);
    }
    let x = a - 1.0;
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

/// 1/Γ(a), which is entire: zero at the poles of Γ.
pub fn rgamma(a: f64) -> f64 {
    if is_nonpositive_integer(a) {
        return 0.0;
    }
    if a > 170.0 {
        return (-ln_gamma(a)).exp();
    }
    1.0 / gamma_unchecked(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_integers_are_factorials() {
        assert_eq!(gamma_complete(1.0).unwrap(), 1.0);
        assert_eq!(gamma_complete(5.0).unwrap(), 24.0);
    }

    #[test]
    fn half_integer_values() {
        let sqrt_pi = PI.sqrt();
        assert_relative_eq!(gamma_complete(0.5).unwrap(), sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(gamma_complete(1.5).unwrap(), 0.5 * sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(gamma_complete(0.5).unwrap(), 1.772_453_850_9, max_relative = 1e-10);
        assert_relative_eq!(gamma_complete(1.5).unwrap(), 0.886_226_925_5, max_relative = 1e-10);
        assert_relative_eq!(
            gamma_complete(-0.5).unwrap(),
            -2.0 * sqrt_pi,
            max_relative = 1e-14
        );
    }

    #[test]
    fn poles_are_errors() {
        for a in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_complete(a), Err(Error::Pole { .. })));
        }
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for a in [0.1, 0.7, 2.5, 10.3, 60.0, -0.4] {
            assert_relative_eq!(
                ln_gamma(a),
                gamma_unchecked(a).abs().ln(),
                max_relative = 1e-12,
                epsilon = 1e-14
            );
        }
        // Stirling check far outside the direct range
        assert_relative_eq!(ln_gamma(200.0), 857.933_669_825_857_5, max_relative = 1e-13);
    }

    #[test]
    fn recurrence_holds() {
        for a in [0.05, 0.3, 0.99, 3.7, 20.2] {
            assert_relative_eq!(
                gamma_complete(a + 1.0).unwrap(),
                a * gamma_complete(a).unwrap(),
                max_relative = 1e-13
            );
        }
    }
}
