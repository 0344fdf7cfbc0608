//! The verification suites behind `igsub verify <suite>`.
//!
//! Every suite derives its random streams from the master seed and the suite
//! name, so a suite's report depends only on the resolved configuration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::fmt;

use clap::ValueEnum;
use igsub::fbm::{
    estimate_lrd_exponent, estimate_variance_exponent, exact_correlation_fit, exact_variance_fit, log_grid,
    HurstParam,
};
use igsub::operators::{
    eigenfunction_residual, governing_check_eps, laplace_domain_check, o_epsilon_transfer, relaxation_residual,
    GridFunction, OperatorParams,
};
use igsub::rng::StreamFactory;
use igsub::specfun::upper_inc_gamma;
use igsub::stats::{ks_statistic, mc_covariance, mc_mean, mc_variance, SIGMA_BAND};
use igsub::subordination::{
    bm_autocovariance, bm_levy_density, bm_levy_density_with, sample_subordinated_bm, subordinate_symbol,
    BmDensityForm, LevySymbolDescriptor,
};
use igsub::subordinator::{
    frac_moment, frac_moment_asymptote, jump_cdf, laplace_exponent, mv_laplace_exponent, sample_jump,
    sample_mv_path, sample_value, tail_asymptote, tempered_mean_var, DirectionMeasure2D, Family,
    SubordinatorSpec,
};
use igsub::{Error, Result};

use crate::config::ExperimentConfig;
use crate::report::{Check, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Suite {
    Laplace,
    Jumps,
    TemperedMoments,
    Tail,
    Fracmoment,
    EpsConvergence,
    Operators,
    Relaxation,
    BmSymbol,
    BmDensity,
    BmAutocov,
    FbmSubdiffusion,
    FbmLrd,
    Multivariate,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Laplace,
        Suite::Jumps,
        Suite::TemperedMoments,
        Suite::Tail,
        Suite::Fracmoment,
        Suite::EpsConvergence,
        Suite::Operators,
        Suite::Relaxation,
        Suite::BmSymbol,
        Suite::BmDensity,
        Suite::BmAutocov,
        Suite::FbmSubdiffusion,
        Suite::FbmLrd,
        Suite::Multivariate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Laplace => "laplace",
            Suite::Jumps => "jumps",
            Suite::TemperedMoments => "tempered-moments",
            Suite::Tail => "tail",
            Suite::Fracmoment => "fracmoment",
            Suite::EpsConvergence => "eps-convergence",
            Suite::Operators => "operators",
            Suite::Relaxation => "relaxation",
            Suite::BmSymbol => "bm-symbol",
            Suite::BmDensity => "bm-density",
            Suite::BmAutocov => "bm-autocov",
            Suite::FbmSubdiffusion => "fbm-subdiffusion",
            Suite::FbmLrd => "fbm-lrd",
            Suite::Multivariate => "multivariate",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs one suite. Parameter refusals (such as the fBm regime guard) come
/// back as errors.
pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let ctx = Ctx {
        cfg,
        streams: StreamFactory::new(cfg.seed).derive(suite.name()),
        k: SIGMA_BAND * cfg.tolerance_scale,
        scale: cfg.tolerance_scale,
    };
    let checks = match suite {
        Suite::Laplace => laplace(&ctx)?,
        Suite::Jumps => jumps(&ctx)?,
        Suite::TemperedMoments => tempered_moments(&ctx)?,
        Suite::Tail => tail(&ctx)?,
        Suite::Fracmoment => fracmoment(&ctx)?,
        Suite::EpsConvergence => {
            let mut c = eps_convergence(&ctx)?;
            c.extend(governing(&ctx)?);
            c
        }
        Suite::Operators => operators(&ctx)?,
        Suite::Relaxation => relaxation(&ctx)?,
        Suite::BmSymbol => bm_symbol(&ctx)?,
        Suite::BmDensity => bm_density(&ctx)?,
        Suite::BmAutocov => bm_autocov(&ctx)?,
        Suite::FbmSubdiffusion => fbm_subdiffusion(&ctx)?,
        Suite::FbmLrd => fbm_lrd(&ctx)?,
        Suite::Multivariate => multivariate(&ctx)?,
    };
    Ok(SuiteReport::new(suite.name(), cfg, checks))
}

/// Name prefix of the ε-governing-equation checks inside `eps-convergence`.
pub const GOVERNING_PREFIX: &str = "governing";

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    streams: StreamFactory,
    /// Width of Monte Carlo bands in standard errors.
    k: f64,
    /// Multiplier for fixed tolerances.
    scale: f64,
}

impl Ctx<'_> {
    fn paths(&self, default: usize) -> usize {
        self.cfg.paths_or(default)
    }

    fn etas(&self, default: &[f64]) -> Vec<f64> {
        self.cfg.grid.eta.clone().unwrap_or_else(|| default.to_vec())
    }

    fn values(&self, label: &str, spec: &SubordinatorSpec, t: f64, n: usize) -> Result<Vec<f64>> {
        self.streams
            .derive(label)
            .par_map(n, |rng, _| sample_value(spec, t, rng))
            .into_iter()
            .collect()
    }
}

fn describe(spec: &SubordinatorSpec) -> String {
    let mut s = match spec.family {
        Family::Plain => format!("plain alpha={}", spec.alpha),
        Family::Tempered { theta } => format!("tempered alpha={} theta={theta}", spec.alpha),
        Family::Floored { epsilon } => format!("floored alpha={} epsilon={epsilon}", spec.alpha),
        Family::PureDrift => "pure_drift".to_string(),
    };
    if spec.beta0 != 0.0 {
        s.push_str(&format!(" beta0={}", spec.beta0));
    }
    s
}

fn laplace(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let etas = ctx.etas(&[0.5, 1.0, 2.0]);
    let t = 1.0;
    let mut specs = Vec::new();
    for a in [0.3, 0.5, 0.7, 0.9] {
        specs.push(SubordinatorSpec::plain(a)?);
        for theta in [0.5, 1.0, 2.0] {
            specs.push(SubordinatorSpec::tempered(a, theta)?);
        }
        for eps in [0.01, 0.1, 0.5] {
            specs.push(SubordinatorSpec::floored(a, eps)?);
        }
    }
    specs.push(SubordinatorSpec::tempered(0.5, 1.0)?.with_drift(0.5)?);
    let mut checks = Vec::new();
    for spec in &specs {
        let label = describe(spec);
        let values = ctx.values(&label, spec, t, n)?;
        for &eta in &etas {
            let samples: Vec<f64> = values.iter().map(|s| (-eta * s).exp()).collect();
            let est = mc_mean(&samples)?;
            let target = (-t * laplace_exponent(spec, eta)?).exp();
            checks.push(Check::sigma(format!("{label} eta={eta}"), &est, target, ctx.k));
        }
    }
    Ok(checks)
}

fn jumps(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let mut checks = Vec::new();
    let mut ks = |label: String, spec: SubordinatorSpec, rescale: f64| -> Result<()> {
        let reference = SubordinatorSpec::plain(spec.alpha)?;
        let samples = ctx
            .streams
            .derive(&label)
            .par_map(n, |rng, _| sample_jump(&spec, rng).map(|z| z / rescale))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let r = ks_statistic(&samples, |z| jump_cdf(&reference, z).unwrap_or(f64::NAN))?;
        checks.push(Check::below(format!("ks {label}"), r.statistic, r.threshold * ctx.scale));
        Ok(())
    };
    for a in [0.3, 0.5, 0.7] {
        ks(format!("plain alpha={a}"), SubordinatorSpec::plain(a)?, 1.0)?;
    }
    for a in [0.3, 0.5, 0.7] {
        for eps in [0.1, 0.5] {
            ks(format!("floored/epsilon alpha={a} epsilon={eps}"), SubordinatorSpec::floored(a, eps)?, eps)?;
        }
    }
    Ok(checks)
}

fn tempered_moments(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let (a, theta, t) = (0.5, 1.0, 10.0);
    let spec = SubordinatorSpec::tempered(a, theta)?;
    let values = ctx.values("values", &spec, t, n)?;
    let (mean, var) = tempered_mean_var(&spec, t)?;
    Ok(vec![
        Check::sigma("mean alpha=0.5 theta=1 t=10", &mc_mean(&values)?, mean, ctx.k),
        Check::sigma("variance alpha=0.5 theta=1 t=10", &mc_variance(&values)?, var, ctx.k),
    ])
}

fn tail(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(1_000_000);
    let (a, t) = (0.5, 1.0);
    let mut values = ctx.values("values", &SubordinatorSpec::plain(a)?, t, n)?;
    values.sort_by(f64::total_cmp);
    let k = (n / 1000).max(1);
    let x = values[n - k];
    let exceed = values.iter().filter(|&&v| v > x).count();
    let p_hat = exceed as f64 / n as f64;
    let ratio = p_hat / tail_asymptote(a, t, x)?;
    Ok(vec![Check::band(format!("tail ratio alpha=0.5 t=1 x={x}"), ratio, 1.0, 0.2 * ctx.scale)])
}

fn fracmoment(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let (a, p, t) = (0.5, 0.25, 100.0);
    let spec = SubordinatorSpec::plain(a)?;
    let values = ctx.values("values", &spec, t, n)?;
    let powered: Vec<f64> = values.iter().map(|s| s.powf(p)).collect();
    let est = mc_mean(&powered)?;
    let target = frac_moment_asymptote(a, p, t)?;
    Ok(vec![Check::relative("moment alpha=0.5 p=0.25 t=100", est.mean, target, 0.1 * ctx.scale)
        .with_stderr(est.stderr)
        .with_reference(frac_moment(&spec, p, t)?)])
}

fn eps_convergence(_ctx: &Ctx) -> Result<Vec<Check>> {
    let eps_list = [1.0, 0.1, 0.01, 0.001];
    let grid: Vec<f64> = (0..=490).map(|i| 0.1 + i as f64 * 0.01).collect();
    let wide: Vec<f64> = (0..=400).map(|i| 10f64.powf(-4.0 + i as f64 * 0.02)).collect();
    let mut checks = Vec::new();
    for a in [0.3, 0.5, 0.7, 0.9] {
        let mut previous: Option<(f64, f64)> = None;
        for &e in &eps_list {
            let spec = SubordinatorSpec::floored(a, e)?;
            let mut sup = 0.0f64;
            for &eta in &grid {
                sup = sup.max((laplace_exponent(&spec, eta)? - eta.powf(a)).abs());
            }
            if let Some((pe, ps)) = previous {
                checks.push(Check::below(format!("sup_gap alpha={a} epsilon={e} vs {pe}"), sup, ps));
            }
            previous = Some((e, sup));
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &eta in grid.iter().chain(&wide) {
                let o = o_epsilon_transfer(eta, e, a)?;
                lo = lo.min(o);
                hi = hi.max(o);
            }
            checks.push(Check::holds(format!("o_eps_range alpha={a} epsilon={e} min={lo} max={hi}"), lo > 0.0 && hi <= 1.0));
        }
    }
    Ok(checks)
}

fn governing(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let etas = ctx.etas(&[0.5, 1.0, 2.0]);
    let (a, t) = (0.5, 1.0);
    let mut checks = Vec::new();
    for eps in [0.5, 0.1, 0.01] {
        let streams = ctx.streams.derive(&format!("{GOVERNING_PREFIX} epsilon={eps}"));
        for c in governing_check_eps(a, eps, t, &etas, n, &streams)? {
            checks.push(Check::sigma(
                format!("{GOVERNING_PREFIX} alpha={a} epsilon={eps} eta={}", c.eta),
                &c.estimate,
                c.target,
                ctx.k,
            ));
        }
    }
    Ok(checks)
}

fn operators(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for rho in [0.3, 0.5, 0.8] {
        for lam in [0.5, 1.0, 2.0] {
            let p = OperatorParams::new(rho, lam)?;
            for t in [0.5, 1.0, 5.0] {
                let r = eigenfunction_residual(&p, t)?;
                checks.push(Check::at_most(format!("eigenfunction rho={rho} lambda={lam} t={t}"), r, 1e-6 * ctx.scale));
            }
        }
    }
    for (rho, lam) in [(0.5, 1.0), (0.3, 2.0), (0.8, 0.5)] {
        let p = OperatorParams::new(rho, lam)?;
        for theta in [1.0, 2.0] {
            let c = laplace_domain_check(&p, theta)?;
            checks.push(Check::absolute(
                format!("laplace_domain rho={rho} lambda={lam} theta={theta}"),
                c.numeric,
                c.closed_form,
                1e-5 * ctx.scale,
            ));
        }
    }
    Ok(checks)
}

fn relaxation(ctx: &Ctx) -> Result<Vec<Check>> {
    let a = 0.5;
    let grid = GridFunction::uniform_grid(0.1, 10.0, 100);
    let r = relaxation_residual(a, &grid)?;
    let max = r.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(vec![Check::below("relaxation max residual alpha=0.5 x in [0.1, 10]", max, 1e-6 * ctx.scale)])
}

fn bm_symbol(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let t = 1.0;
    let mut checks = Vec::new();
    let specs = [
        SubordinatorSpec::tempered(0.5, 1.0)?,
        SubordinatorSpec::tempered(0.7, 0.5)?.with_drift(0.3)?,
        SubordinatorSpec::plain(0.5)?,
    ];
    for spec in &specs {
        let label = describe(spec);
        let symbol = subordinate_symbol(&LevySymbolDescriptor::brownian(), spec)?;
        let z = ctx
            .streams
            .derive(&label)
            .par_map(n, |rng, _| sample_subordinated_bm(spec, &[t], rng).map(|p| p.outer_values[0]))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        for u in [0.5, 1.0, 2.0, 4.0] {
            let cf = symbol.characteristic_function(u, t)?;
            let re: Vec<f64> = z.iter().map(|x| (u * x).cos()).collect();
            let im: Vec<f64> = z.iter().map(|x| (u * x).sin()).collect();
            checks.push(Check::sigma(format!("re cf {label} u={u}"), &mc_mean(&re)?, cf.re, ctx.k));
            checks.push(Check::sigma(format!("im cf {label} u={u}"), &mc_mean(&im)?, cf.im, ctx.k));
        }
    }
    Ok(checks)
}

fn bm_density(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let tol = 1e-8 * ctx.scale;
    for a in [0.3, 0.5, 0.7] {
        for x in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let k = bm_levy_density_with(BmDensityForm::Kummer, x, a, 0.0)?;
            let q = bm_levy_density_with(BmDensityForm::Quadrature, x, a, 0.0)?;
            let m = bm_levy_density_with(BmDensityForm::MittagLeffler, x, a, 0.0)?;
            checks.push(Check::relative(format!("density kummer vs quadrature alpha={a} x={x}"), q, k, tol));
            checks.push(Check::relative(format!("density kummer vs mittag-leffler alpha={a} x={x}"), m, k, tol));
        }
    }
    for (a, theta) in [(0.5, 1.0), (0.3, 0.5), (0.7, 2.0), (0.5, 0.0)] {
        let f = |x: f64| 2.0 * bm_levy_density(x, a, theta).unwrap_or(f64::NAN);
        let acc = igsub::specfun::Accuracy::QUADRATURE.with_rel_tol(1e-10);
        let mass = igsub::specfun::integrate(f, 0.0, f64::INFINITY, igsub::specfun::PowerHint::NONE, &acc)?.value;
        let rate = a * upper_inc_gamma(a, theta)?;
        checks.push(Check::absolute(format!("density mass alpha={a} theta={theta}"), mass, rate, 1e-6 * ctx.scale));
    }
    Ok(checks)
}

fn bm_autocov(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let grid = [1.0, 3.0];
    let mut checks = Vec::new();
    for spec in [SubordinatorSpec::tempered(0.5, 1.0)?, SubordinatorSpec::tempered(0.5, 1.0)?.with_drift(0.5)?] {
        let label = describe(&spec);
        let paths = ctx
            .streams
            .derive(&label)
            .par_map(n, |rng, _| sample_subordinated_bm(&spec, &grid, rng))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let z1: Vec<f64> = paths.iter().map(|p| p.outer_values[0]).collect();
        let z3: Vec<f64> = paths.iter().map(|p| p.outer_values[1]).collect();
        let target = bm_autocovariance(&spec, 1.0, 3.0)?;
        checks.push(Check::sigma(format!("cov(Z(1),Z(3)) {label}"), &mc_covariance(&z1, &z3)?, target, ctx.k));
        let target = bm_autocovariance(&spec, 3.0, 3.0)?;
        checks.push(Check::sigma(format!("var Z(3) {label}"), &mc_variance(&z3)?, target, ctx.k));
    }
    Ok(checks)
}

fn fbm_pairs(ctx: &Ctx, default: &[(f64, f64)]) -> Vec<(f64, f64)> {
    match (ctx.cfg.fbm.hurst, ctx.cfg.fbm.alpha) {
        (None, None) => default.to_vec(),
        (h, a) => vec![(h.unwrap_or(default[0].0), a.unwrap_or(default[0].1))],
    }
}

fn fbm_subdiffusion(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(10_000);
    let grid = match &ctx.cfg.grid.t {
        Some(g) => g.clone(),
        None => log_grid(1.0, 100.0, 21)?,
    };
    let mut checks = Vec::new();
    for (h, a) in fbm_pairs(ctx, &[(0.2, 0.5), (0.2, 0.8)]) {
        let hp = HurstParam::new(h)?;
        let streams = ctx.streams.derive(&format!("H={h} alpha={a}"));
        let r = estimate_variance_exponent(hp, a, &grid, n, &streams)?;
        let mut c = Check::absolute(format!("variance exponent H={h} alpha={a}"), r.estimate, 2.0 * h / a, 0.1 * ctx.scale)
            .with_stderr(r.stderr);
        if let Ok(exact) = exact_variance_fit(hp, a, &grid) {
            c = c.with_reference(exact.slope);
        }
        checks.push(c);
    }
    Ok(checks)
}

fn fbm_lrd(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(10_000);
    let s = ctx.cfg.fbm.s.unwrap_or(1.0);
    let grid = match &ctx.cfg.grid.t {
        Some(g) => g.clone(),
        None => log_grid(10.0, 100.0, 11)?,
    };
    let mut checks = Vec::new();
    for (h, a) in fbm_pairs(ctx, &[(0.2, 0.5)]) {
        let hp = HurstParam::new(h)?;
        hp.check_lrd_regime(a)?;
        let streams = ctx.streams.derive(&format!("H={h} alpha={a} s={s}"));
        let r = estimate_lrd_exponent(hp, a, s, &grid, n, &streams)?;
        let exact = exact_correlation_fit(hp, a, s, &grid).ok();
        let d = 1.0 - h / a;
        let mut c = Check::absolute(format!("lrd exponent H={h} alpha={a} s={s}"), r.estimate, d, 0.15 * ctx.scale)
            .with_stderr(r.stderr);
        if let Some(f) = exact {
            c = c.with_reference(-f.slope);
        }
        checks.push(c);
        let c_target = s.powf(d);
        let factor = 2f64.powf(ctx.scale);
        let mut c = Check::range(
            format!("lrd prefactor H={h} alpha={a} s={s}"),
            r.prefactor,
            c_target / factor,
            c_target * factor,
        );
        if let Some(f) = exact {
            c = c.with_reference(f.intercept.exp());
        }
        checks.push(c);
    }
    Ok(checks)
}

fn multivariate(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.paths(100_000);
    let (a, eps, t) = (0.5, 0.1, 1.0);
    let m = DirectionMeasure2D::normalized(a, vec![0.0, FRAC_PI_6, 2.0 * FRAC_PI_6, FRAC_PI_2], vec![0.1, 0.2, 0.3, 0.4])?;
    let paths = ctx
        .streams
        .derive("paths")
        .par_map(n, |rng, _| sample_mv_path(a, eps, &m, t, rng))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ends = paths.iter().map(|p| p.evaluate_at(t)).collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for eta in [[1.0, 0.5], [0.3, 2.0]] {
        let samples: Vec<f64> = ends.iter().map(|s| (-(eta[0] * s[0] + eta[1] * s[1])).exp()).collect();
        let target = (-t * mv_laplace_exponent(a, eps, &m, eta)?).exp();
        checks.push(Check::sigma(
            format!("joint transform alpha={a} epsilon={eps} eta=({}, {})", eta[0], eta[1]),
            &mc_mean(&samples)?,
            target,
            ctx.k,
        ));
    }
    let monotone = paths.iter().filter(|p| p.marginals_nondecreasing()).count();
    checks.push(Check::holds(format!("marginals nondecreasing on {monotone}/{n} paths"), monotone == n));
    Ok(checks)
}

/// True when `err` is a parameter-regime refusal.
pub fn is_refusal(err: &Error) -> bool {
    matches!(err, Error::Regime(_))
}
