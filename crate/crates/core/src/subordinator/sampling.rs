//! Exact samplers: gamma and beta variates, single jumps, and whole
//! compound-Poisson trajectories.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{poisson_rate, Family, SubordinatorSpec};
use crate::error::{domain, Error, Result};

/// Consecutive rejections after which the tempered jump sampler gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 1_000_000;

/// `ln G` for `G ~ Gamma(shape, 1)`.
///
/// Marsaglia–Tsang squeeze for `shape ≥ 1`; smaller shapes use
/// `G(a) = G(a+1) U^(1/a)`, kept in log space so tiny shapes cannot
/// underflow to zero.
fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// One `Gamma(shape, 1)` variate.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(domain("sample_gamma", shape, "shape > 0"));
    }
    Ok(ln_gamma_variate(shape, rng).exp())
}

/// One `Beta(a, b)` variate as `G₁/(G₁+G₂)`.
pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain("sample_beta", a.min(b), "a, b > 0"));
    }
    let l1 = ln_gamma_variate(a, rng);
    let l2 = ln_gamma_variate(b, rng);
    Ok(1.0 / (1.0 + (l2 - l1).exp()))
}

/// `Z = f/(1−U)`, `U ~ Beta(1−α, α)`, computed as `f(1 + G₁/G₂)` so that
/// `U` near 1 keeps full precision.
fn untempered_jump<R: Rng + ?Sized>(alpha: f64, floor: f64, rng: &mut R) -> f64 {
    if alpha == 1.0 {
        return floor;
    }
    let l1 = ln_gamma_variate(1.0 - alpha, rng);
    let l2 = ln_gamma_variate(alpha, rng);
    floor * (1.0 + (l1 - l2).exp())
}

/// One jump from the normalised Lévy measure of `spec`.
///
/// Tempered jumps are plain proposals kept with probability `e^(−θ(Z−1))`.
pub fn sample_jump<R: Rng + ?Sized>(spec: &SubordinatorSpec, rng: &mut R) -> Result<f64> {
    spec.validate()?;
    let a = spec.alpha;
    match spec.family {
        Family::Plain => Ok(untempered_jump(a, 1.0, rng)),
        Family::Floored { epsilon } => Ok(untempered_jump(a, epsilon, rng)),
        Family::Tempered { theta } => {
            for _ in 0..MAX_CONSECUTIVE_REJECTIONS {
                let z = untempered_jump(a, 1.0, rng);
                if theta == 0.0 || rng.random::<f64>() < (-theta * (z - 1.0)).exp() {
                    return Ok(z);
                }
            }
            Err(Error::RejectionExhausted {
                rejections: MAX_CONSECUTIVE_REJECTIONS,
                theta,
            })
        }
        Family::PureDrift => Err(Error::InvalidParameter(
            "a pure drift has no jumps to sample".into(),
        )),
    }
}

fn jump_count<R: Rng + ?Sized>(spec: &SubordinatorSpec, horizon: f64, rng: &mut R) -> Result<usize> {
    let mean = poisson_rate(spec)? * horizon;
    if mean == 0.0 {
        return Ok(0);
    }
    let poisson = Poisson::new(mean).map_err(|e| Error::InvalidParameter(format!("jump count: {e}")))?;
    let n: f64 = poisson.sample(rng);
    Ok(n as usize)
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon >= 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(domain("subordinator horizon", horizon, "finite horizon >= 0"))
    }
}

/// `S(t)` alone, without recording jump epochs.
pub fn sample_value<R: Rng + ?Sized>(spec: &SubordinatorSpec, t: f64, rng: &mut R) -> Result<f64> {
    spec.validate()?;
    check_horizon(t)?;
    let n = jump_count(spec, t, rng)?;
    let mut total = spec.beta0 * t;
    for _ in 0..n {
        total += sample_jump(spec, rng)?;
    }
    Ok(total)
}

/// One compound-Poisson trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub horizon: f64,
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    /// Running sum of `jump_sizes` (drift excluded).
    pub cumulative: Vec<f64>,
    pub drift: f64,
}

/// Draws the jump count, then sorted uniform epochs, then i.i.d. jumps.
pub fn sample_path<R: Rng + ?Sized>(
    spec: &SubordinatorSpec,
    horizon: f64,
    rng: &mut R,
) -> Result<PathSample> {
    spec.validate()?;
    check_horizon(horizon)?;
    let n = jump_count(spec, horizon, rng)?;
    let mut jump_times: Vec<f64> = (0..n).map(|_| horizon * rng.random::<f64>()).collect();
    jump_times.sort_by(f64::total_cmp);
    let jump_sizes = (0..n)
        .map(|_| sample_jump(spec, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(PathSample::new(horizon, jump_times, jump_sizes, spec.beta0))
}

impl PathSample {
    pub fn new(horizon: f64, jump_times: Vec<f64>, jump_sizes: Vec<f64>, drift: f64) -> Self {
        let cumulative = jump_sizes
            .iter()
            .scan(0.0, |acc, z| {
                *acc += z;
                Some(*acc)
            })
            .collect();
        Self {
            horizon,
            jump_times,
            jump_sizes,
            cumulative,
            drift,
        }
    }

    pub fn jump_count(&self) -> usize {
        self.jump_times.len()
    }

    /// Sum of jumps at or before `t` (right-continuous).
    fn jumps_through(&self, t: f64) -> f64 {
        let k = self.jump_times.partition_point(|&s| s <= t);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `β₀t + Σ_(τ_j ≤ t) Z_j`.
    pub fn evaluate_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.horizon) {
            return Err(domain("evaluate_at", t, "0 <= t <= horizon"));
        }
        Ok(self.drift * t + self.jumps_through(t))
    }

    /// `evaluate_at` over many times.
    pub fn evaluate_many(&self, times: &[f64]) -> Result<Vec<f64>> {
        times.iter().map(|&t| self.evaluate_at(t)).collect()
    }

    /// Header `jump_time,jump_size`, one row per jump, shortest round-trip
    /// decimal formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("jump_time,jump_size\n");
        for (t, z) in self.jump_times.iter().zip(&self.jump_sizes) {
            out.push_str(&format!("{t},{z}\n"));
        }
        out
    }
}

/// A path together with the parameters and seed that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub spec: SubordinatorSpec,
    pub master_seed: u64,
    pub stream: u64,
    pub path: PathSample,
}

impl PathRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("path records contain only finite numbers and strings")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;
    use crate::specfun::{gamma_complete, upper_inc_gamma};
    use crate::stats::{ks_statistic, mc_mean, mc_variance, SIGMA_BAND};
    use crate::subordinator::{jump_cdf, laplace_exponent};

    #[test]
    fn gamma_variates_have_right_moments() {
        let f = StreamFactory::new(1).derive("gamma");
        for shape in [0.05, 0.3, 1.0, 2.5, 9.0] {
            let xs = f.par_map(40_000, |rng, _| sample_gamma(shape, rng).unwrap());
            assert!(mc_mean(&xs).unwrap().within(shape, SIGMA_BAND), "shape {shape}");
            assert!(mc_variance(&xs).unwrap().within(shape, SIGMA_BAND), "shape {shape}");
        }
    }

    #[test]
    fn beta_variates_pass_ks() {
        let f = StreamFactory::new(2).derive("beta");
        let (a, b) = (0.3, 0.7);
        let xs = f.par_map(20_000, |rng, _| sample_beta(a, b, rng).unwrap());
        let ks = ks_statistic(&xs, |x| crate::specfun::reg_inc_beta(x.clamp(0.0, 1.0), a, b).unwrap()).unwrap();
        assert!(ks.pass, "{ks:?}");
    }

    #[test]
    fn unit_alpha_jumps_sit_on_floor() {
        let mut rng = StreamFactory::new(3).stream(0);
        let s = SubordinatorSpec::plain(1.0).unwrap();
        let e = SubordinatorSpec::floored(1.0, 0.25).unwrap();
        for _ in 0..100 {
            assert_eq!(sample_jump(&s, &mut rng).unwrap(), 1.0);
            assert_eq!(sample_jump(&e, &mut rng).unwrap(), 0.25);
        }
    }

    #[test]
    fn jumps_respect_floor() {
        let f = StreamFactory::new(4);
        for spec in [
            SubordinatorSpec::plain(0.05).unwrap(),
            SubordinatorSpec::plain(0.95).unwrap(),
            SubordinatorSpec::floored(0.3, 1e-3).unwrap(),
            SubordinatorSpec::tempered(0.5, 3.0).unwrap(),
        ] {
            let floor = spec.floor().unwrap();
            let zs = f.par_map(10_000, |rng, _| sample_jump(&spec, rng).unwrap());
            assert!(zs.iter().all(|&z| z >= floor && z.is_finite()));
        }
    }

    #[test]
    fn tempered_jumps_follow_density() {
        let spec = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let f = StreamFactory::new(5).derive("tempered-ks");
        let zs = f.par_map(20_000, |rng, _| sample_jump(&spec, rng).unwrap());
        let ks = ks_statistic(&zs, |z| jump_cdf(&spec, z).unwrap()).unwrap();
        assert!(ks.pass, "{ks:?}");
    }

    #[test]
    fn tempered_acceptance_rate_matches() {
        // count proposals per accepted jump by replaying the sampler logic
        let (a, theta) = (0.4, 1.5);
        let mut rng = StreamFactory::new(6).stream(0);
        let n = 100_000;
        let mut accepted = 0;
        for _ in 0..n {
            let z = untempered_jump(a, 1.0, &mut rng);
            if rng.random::<f64>() < (-theta * (z - 1.0)).exp() {
                accepted += 1;
            }
        }
        let p = theta.exp() * upper_inc_gamma(a, theta).unwrap() / gamma_complete(a).unwrap();
        let rate = accepted as f64 / n as f64;
        assert!((rate - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{rate} vs {p}");
    }

    #[test]
    fn empty_horizon() {
        let mut rng = StreamFactory::new(7).stream(0);
        let p = sample_path(&SubordinatorSpec::plain(0.5).unwrap(), 0.0, &mut rng).unwrap();
        assert_eq!(p.jump_count(), 0);
        assert_eq!(p.evaluate_at(0.0).unwrap(), 0.0);
    }

    #[test]
    fn path_structure() {
        let spec = SubordinatorSpec::plain(0.5).unwrap().with_drift(0.25).unwrap();
        let mut rng = StreamFactory::new(8).stream(0);
        let p = sample_path(&spec, 50.0, &mut rng).unwrap();
        assert!(p.jump_count() > 0);
        assert!(p.jump_times.windows(2).all(|w| w[0] < w[1]));
        assert!(p.jump_times.iter().all(|&t| (0.0..=50.0).contains(&t)));
        assert_eq!(p.evaluate_at(0.0).unwrap(), 0.0);
        let total: f64 = p.jump_sizes.iter().sum();
        assert!((p.evaluate_at(50.0).unwrap() - (12.5 + total)).abs() < 1e-9);
        // right-continuity at a jump and a flat stretch without drift
        let t0 = p.jump_times[0];
        let before = p.evaluate_at(t0 * 0.999_999).unwrap();
        let at = p.evaluate_at(t0).unwrap();
        assert!((at - before - p.jump_sizes[0]).abs() < 1e-5);
        assert!(p.evaluate_at(50.1).is_err());
        let flat = PathSample::new(p.horizon, p.jump_times.clone(), p.jump_sizes.clone(), 0.0);
        if p.jump_count() > 1 {
            let (a, b) = (p.jump_times[0], p.jump_times[1]);
            let mid = 0.5 * (a + b);
            assert_eq!(flat.evaluate_at(a).unwrap(), flat.evaluate_at(mid).unwrap());
        }
    }

    #[test]
    fn unit_alpha_path_is_poisson_staircase() {
        let spec = SubordinatorSpec::plain(1.0).unwrap();
        let f = StreamFactory::new(9);
        let ends = f.par_map(20_000, |rng, _| {
            let p = sample_path(&spec, 3.0, rng).unwrap();
            assert!(p.cumulative.iter().all(|c| c.fract() == 0.0));
            p.evaluate_at(3.0).unwrap()
        });
        assert!(mc_mean(&ends).unwrap().within(3.0, SIGMA_BAND));
        assert!(mc_variance(&ends).unwrap().within(3.0, SIGMA_BAND));
    }

    #[test]
    fn laplace_identity_small_sample() {
        let f = StreamFactory::new(10);
        for spec in [
            SubordinatorSpec::plain(0.5).unwrap(),
            SubordinatorSpec::tempered(0.7, 1.0).unwrap(),
            SubordinatorSpec::floored(0.3, 0.1).unwrap(),
        ] {
            let eta = 1.0;
            let xs = f.par_map(20_000, |rng, _| (-eta * sample_value(&spec, 1.0, rng).unwrap()).exp());
            let target = (-laplace_exponent(&spec, eta).unwrap()).exp();
            assert!(mc_mean(&xs).unwrap().within(target, SIGMA_BAND), "{spec:?}");
        }
    }

    #[test]
    fn path_and_value_agree_in_law() {
        let spec = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
        let f = StreamFactory::new(11);
        let xs = f.par_map(20_000, |rng, _| sample_path(&spec, 10.0, rng).unwrap().evaluate_at(10.0).unwrap());
        let (m, _) = crate::subordinator::tempered_mean_var(&spec, 10.0).unwrap();
        assert!(mc_mean(&xs).unwrap().within(m, SIGMA_BAND));
    }

    #[test]
    fn pure_drift_path() {
        let spec = SubordinatorSpec::pure_drift(1.0).unwrap();
        let mut rng = StreamFactory::new(12).stream(0);
        let p = sample_path(&spec, 5.0, &mut rng).unwrap();
        assert_eq!(p.jump_count(), 0);
        assert_eq!(p.evaluate_at(2.5).unwrap(), 2.5);
        assert!(sample_jump(&spec, &mut rng).is_err());
    }

    #[test]
    fn paths_are_reproducible() {
        let spec = SubordinatorSpec::plain(0.5).unwrap();
        let f = StreamFactory::new(13);
        let a = sample_path(&spec, 10.0, &mut f.stream(4)).unwrap();
        let b = sample_path(&spec, 10.0, &mut f.stream(4)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let rec = PathRecord {
            spec,
            master_seed: 13,
            stream: 4,
            path: a,
        };
        let back: PathRecord = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn csv_layout() {
        let p = PathSample::new(2.0, vec![0.5, 1.25], vec![1.0, 3.5], 0.0);
        assert_eq!(p.to_csv(), "jump_time,jump_size\n0.5,1\n1.25,3.5\n");
    }
}
