//! Per-check results and the JSON report of a suite run.

use igsub::stats::MonteCarloEstimate;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

/// Version string embedded in every report and manifest.
pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// How `measured` is compared with `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `|measured − target| ≤ tolerance`, with `tolerance = k·stderr`.
    Sigma,
    /// `|measured − target| ≤ tolerance`.
    Absolute,
    /// `|measured − target| ≤ tolerance·|target|`.
    Relative,
    /// `measured ≤ tolerance`.
    AtMost,
    /// `measured < tolerance`.
    Below,
    /// `target − tolerance ≤ measured ≤ target + tolerance`, stated as a range.
    Range,
    /// A boolean property; `measured` is 1 when it holds.
    Holds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub rule: Rule,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// Exact-theory value for context; never used for pass/fail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, rule: Rule, measured: f64, target: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            rule,
            measured,
            target,
            tolerance,
            stderr: None,
            reference: None,
            pass,
        }
    }

    /// Monte Carlo mean within `k` standard errors of `target`.
    pub fn sigma(name: impl Into<String>, est: &MonteCarloEstimate, target: f64, k: f64) -> Self {
        let tol = k * est.stderr;
        let mut c = Self::new(name, Rule::Sigma, est.mean, target, tol, (est.mean - target).abs() <= tol);
        c.stderr = Some(est.stderr);
        c
    }

    pub fn absolute(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Self::new(name, Rule::Absolute, measured, target, tol, (measured - target).abs() <= tol)
    }

    pub fn relative(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        let pass = (measured - target).abs() <= tol * target.abs();
        Self::new(name, Rule::Relative, measured, target, tol, pass)
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, Rule::AtMost, measured, 0.0, bound, measured <= bound)
    }

    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, Rule::Below, measured, 0.0, bound, measured < bound)
    }

    pub fn range(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        let (target, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        Self::new(name, Rule::Range, measured, target, half, measured >= lo && measured <= hi)
    }

    /// `center − half ≤ measured ≤ center + half`.
    pub fn band(name: impl Into<String>, measured: f64, center: f64, half: f64) -> Self {
        let pass = (measured - center).abs() <= half;
        Self::new(name, Rule::Range, measured, center, half, pass)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, Rule::Holds, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, ok)
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} {} measured={} target={} tol={}",
            self.name, self.measured, self.target, self.tolerance
        );
        if let Some(e) = self.stderr {
            s.push_str(&format!(" stderr={e}"));
        }
        if let Some(r) = self.reference {
            s.push_str(&format!(" exact={r}"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub version: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, config: &ExperimentConfig, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            version: version(),
            master_seed: config.seed,
            config: config.clone(),
            checks,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Checks whose name starts with `prefix`.
    pub fn checks_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }
}

/// Written in place of a report when a suite refuses its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refusal {
    pub suite: String,
    pub version: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub refusal: String,
}
