//! Monte Carlo reductions, Kolmogorov–Smirnov testing and log-log fits.
//!
//! All reductions use compensated summation over samples kept in index
//! order, so results are bit-identical for a given seed regardless of how
//! the samples were produced in parallel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Asymptotic Kolmogorov critical value at the 1% level.
pub const KS_CRITICAL_1PCT: f64 = 1.6276;

/// Width of the acceptance band, in standard errors, used by every
/// Monte Carlo comparison.
pub const SIGMA_BAND: f64 = 4.0;

/// Sample mean with its standard error and seed provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub master_seed: Option<u64>,
    pub stream_count: usize,
}

impl MonteCarloEstimate {
    pub fn with_provenance(mut self, master_seed: u64, stream_count: usize) -> Self {
        self.master_seed = Some(master_seed);
        self.stream_count = stream_count;
        self
    }

    /// Distance to `target` in units of the standard error (0 when both
    /// the distance and the standard error vanish).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }

    /// `|mean - target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

fn mean_and_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = crate::sum::sum(samples) / n;
    let ss: CompensatedSum = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, ss.value() / (n - 1.0))
}

/// Sample mean and standard error `s/√n`.
pub fn mc_mean(samples: &[f64]) -> Result<MonteCarloEstimate> {
    if samples.len() < 2 {
        return Err(Error::Degenerate {
            got: samples.len(),
            need: 2,
        });
    }
    let (mean, var) = mean_and_var(samples);
    Ok(MonteCarloEstimate {
        mean,
        stderr: (var / samples.len() as f64).sqrt(),
        n: samples.len(),
        master_seed: None,
        stream_count: 0,
    })
}

/// Unbiased sample variance with the large-sample standard error
/// `√((m₄ − s⁴)/n)`.
pub fn mc_variance(samples: &[f64]) -> Result<MonteCarloEstimate> {
    if samples.len() < 4 {
        return Err(Error::Degenerate {
            got: samples.len(),
            need: 4,
        });
    }
    let n = samples.len() as f64;
    let (mean, var) = mean_and_var(samples);
    let m4: CompensatedSum = samples.iter().map(|x| (x - mean).powi(4)).collect();
    let m4 = m4.value() / n;
    Ok(MonteCarloEstimate {
        mean: var,
        stderr: ((m4 - var * var).max(0.0) / n).sqrt(),
        n: samples.len(),
        master_seed: None,
        stream_count: 0,
    })
}

/// Sample covariance with a delta-method standard error (standard error of
/// the mean of centred products).
pub fn mc_covariance(xs: &[f64], ys: &[f64]) -> Result<MonteCarloEstimate> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "covariance of unequal lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate {
            got: xs.len(),
            need: 3,
        });
    }
    let n = xs.len() as f64;
    let mx = crate::sum::sum(xs) / n;
    let my = crate::sum::sum(ys) / n;
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let est = mc_mean(&products)?;
    Ok(MonteCarloEstimate {
        mean: est.mean * n / (n - 1.0),
        ..est
    })
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Degenerate {
            got: xs.len().min(ys.len()),
            need: 3,
        });
    }
    let (mx, vx) = mean_and_var(xs);
    let (my, vy) = mean_and_var(ys);
    let c: CompensatedSum = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let cov = c.value() / (xs.len() as f64 - 1.0);
    Ok(cov / (vx * vy).sqrt())
}

/// Lag-`k` autocorrelation of a sequence.
pub fn lag_correlation(xs: &[f64], lag: usize) -> Result<f64> {
    if xs.len() <= lag + 2 {
        return Err(Error::Degenerate {
            got: xs.len(),
            need: lag + 3,
        });
    }
    correlation(&xs[..xs.len() - lag], &xs[lag..])
}

/// Outcome of a one-sample Kolmogorov–Smirnov test at the 1% level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Sup-distance between the empirical CDF of `samples` and `cdf`.
/// Unsorted input is sorted internally.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Degenerate { got: 0, need: 1 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if !(0.0..=1.0).contains(&f) {
            return Err(crate::error::domain("ks_statistic cdf", f, "0 <= F <= 1"));
        }
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    let threshold = KS_CRITICAL_1PCT / n.sqrt();
    Ok(KsResult {
        statistic: d,
        threshold,
        pass: d < threshold,
    })
}

/// Ordinary least squares line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Least squares of `y` on `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("fit inputs of unequal length".into()));
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate {
            got: xs.len(),
            need: 3,
        });
    }
    let n = xs.len() as f64;
    let mx = crate::sum::sum(xs) / n;
    let my = crate::sum::sum(ys) / n;
    let sxx: CompensatedSum = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let sxy: CompensatedSum = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let syy: CompensatedSum = ys.iter().map(|y| (y - my) * (y - my)).collect();
    let (sxx, sxy, syy) = (sxx.value(), sxy.value(), syy.value());
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: CompensatedSum = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .collect();
    let rss = rss.value().max(0.0);
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - rss / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        slope_stderr: (rss / (n - 2.0) / sxx).sqrt(),
        r_squared,
    })
}

/// Least squares on `(ln x, ln y)`; fits `y ≈ e^intercept · x^slope`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0)) {
        return Err(crate::error::domain("loglog_fit", *bad, "positive inputs"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn constant_samples_have_zero_stderr() {
        let est = mc_mean(&[2.5; 10]).unwrap();
        assert_eq!(est.mean, 2.5);
        assert_eq!(est.stderr, 0.0);
        assert!(est.within(2.5, SIGMA_BAND));
    }

    #[test]
    fn balanced_binary_mean() {
        let est = mc_mean(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(est.mean, 0.5);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(mc_mean(&[1.0]), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn ks_calibration_pass_rate() {
        let f = StreamFactory::new(11).derive("ks-calibration");
        let mut passes = 0;
        for rep in 0..50 {
            let mut rng = f.stream(rep);
            let xs: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
            if ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap().pass {
                passes += 1;
            }
        }
        assert!(passes >= 49, "passes = {passes}");
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = StreamFactory::new(3).stream(0);
        let xs: Vec<f64> = (0..2000).map(|_| rng.random::<f64>() + 0.5).collect();
        assert!(!ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap().pass);
    }

    #[test]
    fn ks_sorts_input() {
        let xs = [0.9, 0.1, 0.5];
        let r = ks_statistic(&xs, |x| x).unwrap();
        assert_relative_eq!(r.statistic, 0.2333333333333333, max_relative = 1e-12);
    }

    #[test]
    fn power_law_fits() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = loglog_fit(&xs, &sq).unwrap();
        assert_relative_eq!(fit.slope, 2.0, max_relative = 1e-14);
        assert_relative_eq!(fit.r_squared, 1.0);
        let inv: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        let fit = loglog_fit(&xs, &inv).unwrap();
        assert_relative_eq!(fit.slope, -1.0, max_relative = 1e-14);
        assert_relative_eq!(fit.intercept, 3f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn loglog_rejects_nonpositive() {
        assert!(loglog_fit(&[1.0, 2.0, 0.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(loglog_fit(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
    }

    #[test]
    fn disjoint_streams_are_uncorrelated() {
        let f = StreamFactory::new(99);
        let n = 20_000;
        let a = f.par_map(n, |rng, _| rng.random::<f64>());
        let b: Vec<f64> = f.derive("b").par_map(n, |rng, _| rng.random::<f64>());
        let rho = correlation(&a, &b).unwrap();
        assert!(rho.abs() < 4.0 / (n as f64).sqrt());
        let lag = lag_correlation(&a, 1).unwrap();
        assert!(lag.abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn variance_and_covariance() {
        let f = StreamFactory::new(5);
        let xs = f.par_map(50_000, |rng, _| rng.random::<f64>());
        let v = mc_variance(&xs).unwrap();
        assert!(v.within(1.0 / 12.0, SIGMA_BAND));
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let c = mc_covariance(&xs, &ys).unwrap();
        assert_relative_eq!(c.mean, 2.0 * v.mean, max_relative = 1e-12);
    }

    #[test]
    fn reductions_are_deterministic() {
        let f = StreamFactory::new(8);
        let a = mc_mean(&f.par_map(10_000, |rng, _| rng.random::<f64>())).unwrap();
        let b = mc_mean(&f.par_map(10_000, |rng, _| rng.random::<f64>())).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}
