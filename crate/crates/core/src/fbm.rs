//! Fractional Brownian motion, its time change `Z_H(t) = B_H(S_α(t))` by a
//! plain subordinator, and Monte Carlo estimators for the growth exponent of
//! `Var Z_H(t)` and the decay exponent of `Corr(Z_H(t), Z_H(s))`.
//!
//! Exact-theory counterparts use `E S(t)^(2H)` from
//! [`frac_moment`](crate::subordinator::frac_moment): conditionally on the
//! clock, `Z_H` is Gaussian with the fBm covariance evaluated at the clock
//! values, and the clock has stationary independent increments.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::StreamFactory;
use crate::specfun::gamma_complete;
use crate::stats::{loglog_fit, FitResult};
use crate::subordinator::{frac_moment, sample_path, SubordinatorSpec};

/// Hurst index `H ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstParam(f64);

impl HurstParam {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(domain("Hurst parameter", h, "0 < H < 1"));
        }
        Ok(Self(h))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Covariance `½(s^(2H) + t^(2H) − |t−s|^(2H))`.
    pub fn covariance(self, s: f64, t: f64) -> f64 {
        let two_h = 2.0 * self.0;
        0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h))
    }

    /// Refuses parameters outside `H < 1/2`, `α ≥ 2H`.
    pub fn check_lrd_regime(self, alpha: f64) -> Result<()> {
        if self.0 >= 0.5 {
            return Err(Error::Regime(format!(
                "long-range dependence needs H < 1/2, got H = {}",
                self.0
            )));
        }
        if alpha < 2.0 * self.0 {
            return Err(Error::Regime(format!(
                "long-range dependence needs alpha >= 2H, got alpha = {alpha}, 2H = {}",
                2.0 * self.0
            )));
        }
        Ok(())
    }
}

impl TryFrom<f64> for HurstParam {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl From<HurstParam> for f64 {
    fn from(h: HurstParam) -> f64 {
        h.0
    }
}

/// Values of a (possibly time-changed) fBm at increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Smallest admissible `(gap / largest time)^(2H)`: the relative size of
/// the smallest pivot in the factorization.
const MIN_RELATIVE_PIVOT: f64 = 1e-12;

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(domain("sample_fbm_at", t, "finite times >= 0"));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(domain("sample_fbm_at", w[1], "strictly increasing times"));
    }
    Ok(())
}

/// Exact joint draw at arbitrary increasing times. The increments between
/// consecutive times are drawn jointly by Cholesky factorization of their
/// covariance and summed; working with increments keeps the small
/// variances of closely spaced times free of cancellation even when the
/// times themselves are huge. A time of 0 gets the value 0.
pub fn sample_fbm_at<R: Rng + ?Sized>(h: HurstParam, times: &[f64], rng: &mut R) -> Result<FbmPath> {
    check_times(times)?;
    let positive: Vec<f64> = times.iter().copied().filter(|&t| t > 0.0).collect();
    let offset = times.len() - positive.len();
    let mut values = vec![0.0; times.len()];
    if positive.is_empty() {
        return Ok(FbmPath {
            times: times.to_vec(),
            values,
        });
    }
    let two_h = 2.0 * h.value();
    let t_max = positive[positive.len() - 1];
    let min_gap = positive.windows(2).map(|w| w[1] - w[0]).fold(positive[0], f64::min);
    if (min_gap / t_max).powf(two_h) < MIN_RELATIVE_PIVOT {
        return Err(Error::Factorization(format!(
            "times too close: min gap {min_gap:e} at largest time {t_max:e} gives relative pivot {:e} < {MIN_RELATIVE_PIVOT:e}",
            (min_gap / t_max).powf(two_h)
        )));
    }
    let n = positive.len();
    let at = |k: usize| if k == 0 { 0.0 } else { positive[k - 1] };
    let g = |x: f64| x.abs().powf(two_h);
    let cov = DMatrix::from_fn(n, n, |i, j| {
        let (i, j) = (i + 1, j + 1);
        if i == j {
            g(at(i) - at(i - 1))
        } else {
            0.5 * (g(at(i) - at(j - 1)) + g(at(i - 1) - at(j)) - g(at(i) - at(j)) - g(at(i - 1) - at(j - 1)))
        }
    });
    let chol = cov.cholesky().ok_or_else(|| {
        Error::Factorization(format!(
            "increment covariance of {n} times not positive definite (min gap {min_gap:e}, largest time {t_max:e})"
        ))
    })?;
    let z = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    let increments = chol.l() * z;
    let mut acc = 0.0;
    for (v, d) in values[offset..].iter_mut().zip(increments.iter()) {
        acc += d;
        *v = acc;
    }
    Ok(FbmPath {
        times: times.to_vec(),
        values,
    })
}

/// `E|B_H(t)|^q = √(2^q/π) Γ((q+1)/2) t^(qH)` for `q > −1`.
pub fn fbm_abs_moment(h: HurstParam, q: f64, t: f64) -> Result<f64> {
    if !(q > -1.0) {
        return Err(domain("fbm_abs_moment", q, "q > -1"));
    }
    if !(t >= 0.0) {
        return Err(domain("fbm_abs_moment", t, "t >= 0"));
    }
    let unit = (2f64.powf(q) / std::f64::consts::PI).sqrt() * gamma_complete(0.5 * (q + 1.0))?;
    Ok(unit * t.powf(q * h.value()))
}

/// `B_H` read on a plain subordinator clock of index `alpha`, at
/// `eval_times ⊂ [0, horizon]`. The clock and the fBm use separate streams;
/// equal clock values (flat stretches) share one fBm value.
pub fn sample_time_changed_fbm<R1, R2>(
    h: HurstParam,
    alpha: f64,
    horizon: f64,
    eval_times: &[f64],
    clock_rng: &mut R1,
    noise_rng: &mut R2,
) -> Result<FbmPath>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    let clock = sample_clock(alpha, horizon, eval_times, clock_rng)?;
    read_on_clock(h, eval_times, &clock, noise_rng)
}

fn sample_clock<R: Rng + ?Sized>(alpha: f64, horizon: f64, eval_times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let spec = SubordinatorSpec::plain(alpha)?;
    if let Some(&t) = eval_times.iter().find(|t| !(**t >= 0.0 && **t <= horizon)) {
        return Err(domain("sample_time_changed_fbm", t, "0 <= t <= horizon"));
    }
    if eval_times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("eval_times must be strictly increasing".into()));
    }
    sample_path(&spec, horizon, rng)?.evaluate_many(eval_times)
}

fn read_on_clock<R: Rng + ?Sized>(h: HurstParam, eval_times: &[f64], clock: &[f64], rng: &mut R) -> Result<FbmPath> {
    let mut levels = clock.to_vec();
    levels.dedup();
    let fbm = sample_fbm_at(h, &levels, rng)?;
    let mut values = Vec::with_capacity(clock.len());
    let mut k = 0;
    for &c in clock {
        while levels[k] != c {
            k += 1;
        }
        values.push(fbm.values[k]);
    }
    Ok(FbmPath {
        times: eval_times.to_vec(),
        values,
    })
}

/// Exact `Var Z_H(t) = E S_α(t)^(2H)`.
pub fn exact_variance(h: HurstParam, alpha: f64, t: f64) -> Result<f64> {
    frac_moment(&SubordinatorSpec::plain(alpha)?, 2.0 * h.value(), t)
}

/// Exact `Corr(Z_H(t), Z_H(s))` for `t ≥ s > 0`:
/// `½(m(t) + m(s) − m(t−s)) / √(m(t) m(s))` with `m(u) = E S_α(u)^(2H)`.
pub fn exact_correlation(h: HurstParam, alpha: f64, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t >= s) {
        return Err(domain("exact_correlation", t, "t >= s > 0"));
    }
    let m = |u: f64| exact_variance(h, alpha, u);
    let (mt, ms, md) = (m(t)?, m(s)?, m(t - s)?);
    Ok(0.5 * (mt + ms - md) / (mt * ms).sqrt())
}

/// Which exponent an [`ExponentReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    /// Slope of `ln Var Z_H(t)` against `ln t`.
    Variance,
    /// `d` in `Corr(Z_H(t), Z_H(s)) ≈ c t^(−d)`.
    Lrd,
}

/// One row of the per-`t` table behind a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
    pub in_fit: bool,
}

/// Result of an exponent estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub kind: ExponentKind,
    pub h: f64,
    pub alpha: f64,
    pub s: Option<f64>,
    /// Variance slope, or `d` for [`ExponentKind::Lrd`].
    pub estimate: f64,
    /// Jackknife standard error of `estimate`.
    pub stderr: f64,
    /// `e^intercept` of the log-log fit.
    pub prefactor: f64,
    pub fit_window: [f64; 2],
    pub n_paths: usize,
    pub seed: u64,
    pub inconclusive: bool,
    pub table: Vec<ExponentRow>,
}

impl ExponentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Header `t,value,stderr,in_fit`.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("t,value,stderr,in_fit\n");
        for r in &self.table {
            out.push_str(&format!("{},{},{},{}\n", r.t, r.value, r.stderr, r.in_fit));
        }
        out
    }
}

/// Reports with a standard error above this are flagged inconclusive.
pub const INCONCLUSIVE_STDERR: f64 = 0.1;

/// Number of contiguous path blocks used by the jackknife.
const JACKKNIFE_GROUPS: usize = 20;

/// Per-group running sums of `z_t`, `z_t²` and `z_t z_ref`.
#[derive(Debug, Clone)]
struct Moments {
    n: f64,
    sum: Vec<f64>,
    sq: Vec<f64>,
    cross: Vec<f64>,
}

impl Moments {
    fn zeros(len: usize) -> Self {
        Self {
            n: 0.0,
            sum: vec![0.0; len],
            sq: vec![0.0; len],
            cross: vec![0.0; len],
        }
    }

    fn add_path(&mut self, values: &[f64], reference: usize) {
        self.n += 1.0;
        let r = values[reference];
        for (k, &v) in values.iter().enumerate() {
            self.sum[k] += v;
            self.sq[k] += v * v;
            self.cross[k] += v * r;
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + sign * y).collect();
        Self {
            n: self.n + sign * other.n,
            sum: f(&self.sum, &other.sum),
            sq: f(&self.sq, &other.sq),
            cross: f(&self.cross, &other.cross),
        }
    }

    fn variance(&self, k: usize) -> f64 {
        let m = self.sum[k] / self.n;
        (self.sq[k] / self.n - m * m) * self.n / (self.n - 1.0)
    }

    fn correlation(&self, k: usize, reference: usize) -> f64 {
        let (mk, mr) = (self.sum[k] / self.n, self.sum[reference] / self.n);
        let cov = self.cross[k] / self.n - mk * mr;
        let vk = self.sq[k] / self.n - mk * mk;
        let vr = self.sq[reference] / self.n - mr * mr;
        cov / (vk * vr).sqrt()
    }
}

fn jackknife_stderr(leave_outs: &[f64]) -> f64 {
    let g = leave_outs.len() as f64;
    let mean = leave_outs.iter().sum::<f64>() / g;
    let ss: f64 = leave_outs.iter().map(|v| (v - mean) * (v - mean)).sum();
    ((g - 1.0) / g * ss).sqrt()
}

struct Simulated {
    eval_times: Vec<f64>,
    total: Moments,
    groups: Vec<Moments>,
}

fn simulate_moments(
    h: HurstParam,
    alpha: f64,
    eval_times: Vec<f64>,
    reference: usize,
    n_paths: usize,
    streams: &StreamFactory,
) -> Result<Simulated> {
    if n_paths < 2 * JACKKNIFE_GROUPS {
        return Err(Error::Degenerate {
            got: n_paths,
            need: 2 * JACKKNIFE_GROUPS,
        });
    }
    let horizon = eval_times[eval_times.len() - 1];
    let clocks = streams.derive("clock");
    let noise = streams.derive("fbm");
    let paths = clocks.par_map(n_paths, |clock_rng, i| {
        let mut noise_rng = noise.stream(i as u64);
        let clock = sample_clock(alpha, horizon, &eval_times, clock_rng)?;
        read_on_clock(h, &eval_times, &clock, &mut noise_rng).map(|p| p.values)
    });
    let len = eval_times.len();
    let mut groups = vec![Moments::zeros(len); JACKKNIFE_GROUPS];
    for (i, p) in paths.into_iter().enumerate() {
        groups[i * JACKKNIFE_GROUPS / n_paths].add_path(&p?, reference);
    }
    let total = groups.iter().fold(Moments::zeros(len), |acc, g| acc.combine(g, 1.0));
    Ok(Simulated {
        eval_times,
        total,
        groups,
    })
}

fn fit_window(t_grid: &[f64]) -> Result<(Vec<bool>, [f64; 2])> {
    let t_max = t_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = t_max / 10.0;
    let mask: Vec<bool> = t_grid.iter().map(|&t| t >= lo * (1.0 - 1e-12)).collect();
    let count = mask.iter().filter(|m| **m).count();
    if count < 3 {
        return Err(Error::Degenerate { got: count, need: 3 });
    }
    Ok((mask, [lo, t_max]))
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 3 {
        return Err(Error::Degenerate {
            got: t_grid.len(),
            need: 3,
        });
    }
    if let Some(&t) = t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(domain("exponent t grid", t, "finite t > 0"));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("t grid must be strictly increasing".into()));
    }
    Ok(())
}

fn masked_fit(t_grid: &[f64], values: &[f64], mask: &[bool]) -> Result<FitResult> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = t_grid
        .iter()
        .zip(values)
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|((t, v), _)| (*t, *v))
        .unzip();
    loglog_fit(&xs, &ys)
}

/// Log-log slope of the Monte Carlo variance of `Z_H(t)` over the largest
/// decade of `t_grid`; the asymptotic value is `2H/α`.
pub fn estimate_variance_exponent(
    h: HurstParam,
    alpha: f64,
    t_grid: &[f64],
    n_paths: usize,
    streams: &StreamFactory,
) -> Result<ExponentReport> {
    check_grid(t_grid)?;
    let t_max = t_grid[t_grid.len() - 1];
    if t_max < 50.0 || t_max / t_grid[0] < 10f64.powf(1.5) {
        return Err(Error::InvalidParameter(format!(
            "variance exponent needs a grid spanning 1.5 decades up to t >= 50, got [{}, {t_max}]",
            t_grid[0]
        )));
    }
    let (mask, window) = fit_window(t_grid)?;
    let sim = simulate_moments(h, alpha, t_grid.to_vec(), 0, n_paths, streams)?;
    let variances = |m: &Moments| (0..t_grid.len()).map(|k| m.variance(k)).collect::<Vec<f64>>();
    let full = variances(&sim.total);
    let fit = masked_fit(t_grid, &full, &mask)?;
    let mut slopes = Vec::with_capacity(JACKKNIFE_GROUPS);
    let mut per_t: Vec<Vec<f64>> = vec![Vec::with_capacity(JACKKNIFE_GROUPS); t_grid.len()];
    for g in &sim.groups {
        let v = variances(&sim.total.combine(g, -1.0));
        for (k, x) in v.iter().enumerate() {
            per_t[k].push(*x);
        }
        slopes.push(masked_fit(t_grid, &v, &mask)?.slope);
    }
    let stderr = jackknife_stderr(&slopes);
    let table = table_rows(&sim.eval_times, &full, &per_t, &mask);
    Ok(ExponentReport {
        kind: ExponentKind::Variance,
        h: h.value(),
        alpha,
        s: None,
        estimate: fit.slope,
        stderr,
        prefactor: fit.intercept.exp(),
        fit_window: window,
        n_paths,
        seed: streams.master_seed(),
        inconclusive: !(stderr < INCONCLUSIVE_STDERR),
        table,
    })
}

fn table_rows(times: &[f64], values: &[f64], leave_outs: &[Vec<f64>], mask: &[bool]) -> Vec<ExponentRow> {
    times
        .iter()
        .zip(values)
        .zip(leave_outs)
        .zip(mask)
        .map(|(((t, v), lo), m)| ExponentRow {
            t: *t,
            value: *v,
            stderr: jackknife_stderr(lo),
            in_fit: *m,
        })
        .collect()
}

/// Fits `Corr(Z_H(t), Z_H(s)) ≈ c t^(−d)` over the largest decade of
/// `t_grid`. Refuses parameters outside `H < 1/2`, `α ≥ 2H`.
pub fn estimate_lrd_exponent(
    h: HurstParam,
    alpha: f64,
    s: f64,
    t_grid: &[f64],
    n_paths: usize,
    streams: &StreamFactory,
) -> Result<ExponentReport> {
    h.check_lrd_regime(alpha)?;
    check_grid(t_grid)?;
    if !(s > 0.0 && s < t_grid[0]) {
        return Err(domain("estimate_lrd_exponent", s, "0 < s < min t"));
    }
    let (mask, window) = fit_window(t_grid)?;
    let mut eval_times = Vec::with_capacity(t_grid.len() + 1);
    eval_times.push(s);
    eval_times.extend_from_slice(t_grid);
    let sim = simulate_moments(h, alpha, eval_times, 0, n_paths, streams)?;
    let correlations = |m: &Moments| (1..=t_grid.len()).map(|k| m.correlation(k, 0)).collect::<Vec<f64>>();
    let full = correlations(&sim.total);
    let mut per_t: Vec<Vec<f64>> = vec![Vec::with_capacity(JACKKNIFE_GROUPS); t_grid.len()];
    let leave_outs: Vec<Vec<f64>> = sim
        .groups
        .iter()
        .map(|g| correlations(&sim.total.combine(g, -1.0)))
        .collect();
    for lo in &leave_outs {
        for (k, c) in lo.iter().enumerate() {
            per_t[k].push(*c);
        }
    }
    let table = table_rows(t_grid, &full, &per_t, &mask);
    let noisy = table
        .iter()
        .any(|r| r.in_fit && !(r.value > crate::stats::SIGMA_BAND * r.stderr));
    let usable = |vals: &[f64]| mask.iter().zip(vals).all(|(m, v)| !m || *v > 0.0);
    if !usable(&full) || !leave_outs.iter().all(|v| usable(v)) {
        return Err(Error::NonConvergence {
            what: "correlation fit: nonpositive estimates in the fit window",
            estimate: full.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    let fit = masked_fit(t_grid, &full, &mask)?;
    let slopes: Vec<f64> = leave_outs
        .iter()
        .map(|v| masked_fit(t_grid, v, &mask).map(|f| -f.slope))
        .collect::<Result<_>>()?;
    let stderr = jackknife_stderr(&slopes);
    Ok(ExponentReport {
        kind: ExponentKind::Lrd,
        h: h.value(),
        alpha,
        s: Some(s),
        estimate: -fit.slope,
        stderr,
        prefactor: fit.intercept.exp(),
        fit_window: window,
        n_paths,
        seed: streams.master_seed(),
        inconclusive: noisy || !(stderr < INCONCLUSIVE_STDERR),
        table,
    })
}

/// Fit of the exact `Var Z_H(t)` over the largest decade of `t_grid`.
pub fn exact_variance_fit(h: HurstParam, alpha: f64, t_grid: &[f64]) -> Result<FitResult> {
    check_grid(t_grid)?;
    let (mask, _) = fit_window(t_grid)?;
    let v = t_grid.iter().map(|&t| exact_variance(h, alpha, t)).collect::<Result<Vec<_>>>()?;
    masked_fit(t_grid, &v, &mask)
}

/// Fit of the exact correlation over the largest decade of `t_grid`; the
/// decay exponent is `−slope`.
pub fn exact_correlation_fit(h: HurstParam, alpha: f64, s: f64, t_grid: &[f64]) -> Result<FitResult> {
    check_grid(t_grid)?;
    let (mask, _) = fit_window(t_grid)?;
    let c = t_grid
        .iter()
        .map(|&t| exact_correlation(h, alpha, s, t))
        .collect::<Result<Vec<_>>>()?;
    masked_fit(t_grid, &c, &mask)
}

/// `n` points evenly spaced in `ln t` on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(domain("log_grid", lo, "0 < lo < hi, n >= 2"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    Ok(g)
}
