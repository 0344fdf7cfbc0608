//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits nonzero when any criterion fails. Every suite runs with the
//! default configuration, whose master seed is fixed in the source.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use igsub_cli::config::ExperimentConfig;
use igsub_cli::report::{Check, SuiteReport};
use igsub_cli::suites::{run_suite, Suite, GOVERNING_PREFIX};

struct Outcome {
    pass: bool,
    detail: String,
}

fn summarize<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Outcome {
    let checks: Vec<&Check> = checks.into_iter().collect();
    let failed: Vec<&&Check> = checks.iter().filter(|c| !c.pass).collect();
    let mut detail = format!("{}/{} checks", checks.len() - failed.len(), checks.len());
    for c in failed.iter().take(3) {
        detail.push_str(&format!("; {}", c.summary()));
    }
    Outcome {
        pass: !checks.is_empty() && failed.is_empty(),
        detail,
    }
}

fn within(outcome: Outcome, elapsed: Duration, budget: Duration) -> Outcome {
    let on_time = elapsed <= budget;
    Outcome {
        pass: outcome.pass && on_time,
        detail: format!(
            "{}; runtime {:.1}s (budget {}s)",
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        ),
    }
}

fn headline(report: &SuiteReport) -> String {
    report
        .checks
        .iter()
        .map(|c| {
            let exact = c.reference.map(|r| format!(" exact={r:.4}")).unwrap_or_default();
            format!("{}: {:.4} vs {:.4}{exact}", c.name, c.measured, c.target)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn run(cfg: &ExperimentConfig, suite: Suite, reports: &mut Vec<(Suite, String)>) -> (SuiteReport, Duration) {
    let start = Instant::now();
    let report = run_suite(suite, cfg).unwrap_or_else(|e| panic!("suite {suite} errored: {e}"));
    let elapsed = start.elapsed();
    reports.push((suite, report.to_json()));
    (report, elapsed)
}

fn binary_reports_identical() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "2"].into_iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_igsub"))
            .args(["verify", "bm-autocov", "--threads", threads, "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("igsub exited with {}", status.status));
        }
        outputs.push(std::fs::read(out.join("bm-autocov.json")).map_err(|e| e.to_string())?);
    }
    if outputs[0] == outputs[1] {
        Ok(())
    } else {
        Err("report files differ between runs".into())
    }
}

fn main() -> ExitCode {
    let cfg = ExperimentConfig::default();
    let mut reports = Vec::new();
    let mut lines: Vec<(u32, &str, Outcome)> = Vec::new();

    let (r, t) = run(&cfg, Suite::Laplace, &mut reports);
    lines.push((1, "Laplace-transform identity", within(summarize(&r.checks), t, Duration::from_secs(120))));

    let (r, _) = run(&cfg, Suite::Jumps, &mut reports);
    lines.push((2, "Jump-law exactness (KS at 1%)", summarize(&r.checks)));

    let (r, _) = run(&cfg, Suite::TemperedMoments, &mut reports);
    let mut o = summarize(&r.checks);
    o.detail = format!("{}; {}", o.detail, headline(&r));
    lines.push((3, "Tempered moments", o));

    let (r, _) = run(&cfg, Suite::Tail, &mut reports);
    let mut o = summarize(&r.checks);
    o.detail = format!("{}; {}", o.detail, headline(&r));
    lines.push((4, "Tail asymptote", o));

    let (r, _) = run(&cfg, Suite::Fracmoment, &mut reports);
    let mut o = summarize(&r.checks);
    o.detail = format!("{}; {}", o.detail, headline(&r));
    lines.push((5, "Fractional moment", o));

    let (eps, _) = run(&cfg, Suite::EpsConvergence, &mut reports);
    lines.push((
        6,
        "eps -> 0 convergence",
        summarize(eps.checks.iter().filter(|c| !c.name.starts_with(GOVERNING_PREFIX))),
    ));

    let (ops, _) = run(&cfg, Suite::Operators, &mut reports);
    let (rel, _) = run(&cfg, Suite::Relaxation, &mut reports);
    lines.push((7, "Operator identities", summarize(ops.checks.iter().chain(&rel.checks))));

    lines.push((8, "Governing equation of q_eps", summarize(eps.checks_named(GOVERNING_PREFIX))));

    let (sym, _) = run(&cfg, Suite::BmSymbol, &mut reports);
    let (den, _) = run(&cfg, Suite::BmDensity, &mut reports);
    let (cov, _) = run(&cfg, Suite::BmAutocov, &mut reports);
    lines.push((
        9,
        "Subordinated BM",
        summarize(sym.checks.iter().chain(&den.checks).chain(&cov.checks)),
    ));

    let (var, t_var) = run(&cfg, Suite::FbmSubdiffusion, &mut reports);
    let (lrd, t_lrd) = run(&cfg, Suite::FbmLrd, &mut reports);
    let mut o = within(
        summarize(var.checks.iter().chain(&lrd.checks)),
        t_var + t_lrd,
        Duration::from_secs(600),
    );
    o.detail = format!("{}; {}; {}", o.detail, headline(&var), headline(&lrd));
    lines.push((10, "Time-changed fBm exponents", o));

    let (r, _) = run(&cfg, Suite::Multivariate, &mut reports);
    lines.push((11, "Multivariate joint transform", summarize(&r.checks)));

    let mut mismatched: Vec<String> = reports
        .iter()
        .filter(|(suite, json)| run_suite(*suite, &cfg).map(|r| r.to_json()).as_ref() != Ok(json))
        .map(|(suite, _)| suite.to_string())
        .collect();
    if let Err(e) = binary_reports_identical() {
        mismatched.push(format!("binary: {e}"));
    }
    lines.push((
        12,
        "Determinism",
        Outcome {
            pass: mismatched.is_empty(),
            detail: if mismatched.is_empty() {
                format!("{} suite reports and the CLI report file reproduced byte for byte", reports.len())
            } else {
                format!("differing: {}", mismatched.join(", "))
            },
        },
    ));

    let mut all = true;
    for (n, title, o) in &lines {
        all &= o.pass;
        println!("[{}] criterion {n:>2}: {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
