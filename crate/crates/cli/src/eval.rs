//! `igsub eval <function> <args>`: the analytic surface from the command
//! line.
//!
//! Arguments are positional or `name=value`; Greek names (`α=0.5`, `η=2`)
//! are accepted. Functions of a subordinator take the family first. One
//! argument may be a comma-separated list, in which case the output is a
//! CSV table over that argument.

use std::collections::BTreeMap;

use igsub::fbm::{fbm_abs_moment, HurstParam};
use igsub::operators::o_epsilon_transfer;
use igsub::specfun::{
    gamma_complete, kummer_1f1, ln_gamma, lower_inc_gamma, mittag_leffler3, reg_inc_beta, upper_inc_gamma,
};
use igsub::subordination::bm_levy_density;
use igsub::subordinator::{
    frac_moment, frac_moment_asymptote, jump_cdf, laplace_exponent, poisson_rate, tail_asymptote,
    tempered_mean_var, SubordinatorSpec,
};

use crate::CliError;

type Eval = fn(&Args) -> Result<Vec<f64>, CliError>;

struct Function {
    name: &'static str,
    /// Parameter names in positional order; a trailing `?` marks a
    /// parameter that defaults to 0.
    params: &'static [&'static str],
    /// Whether the first argument names a subordinator family.
    family: bool,
    outputs: &'static [&'static str],
    eval: Eval,
}

struct Args {
    family: Option<String>,
    values: BTreeMap<&'static str, f64>,
}

impl Args {
    fn get(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    fn spec(&self) -> Result<SubordinatorSpec, CliError> {
        let a = self.get("alpha");
        let spec = match self.family.as_deref() {
            Some("plain") => SubordinatorSpec::plain(a)?,
            Some("tempered") => SubordinatorSpec::tempered(a, self.get("theta"))?,
            Some("floored") => SubordinatorSpec::floored(a, self.get("epsilon"))?,
            Some("pure_drift") => return Ok(SubordinatorSpec::pure_drift(self.get("beta0"))?),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown family {other:?}; expected plain, tempered, floored or pure_drift"
                )))
            }
        };
        Ok(spec.with_drift(self.get("beta0"))?)
    }
}

fn one(v: igsub::Result<f64>) -> Result<Vec<f64>, CliError> {
    Ok(vec![v?])
}

const FUNCTIONS: &[Function] = &[
    Function {
        name: "gamma",
        params: &["a"],
        family: false,
        outputs: &["value"],
        eval: |a| one(gamma_complete(a.get("a"))),
    },
    Function {
        name: "ln_gamma",
        params: &["a"],
        family: false,
        outputs: &["value"],
        eval: |a| Ok(vec![ln_gamma(a.get("a"))]),
    },
    Function {
        name: "lower_inc_gamma",
        params: &["a", "x"],
        family: false,
        outputs: &["value"],
        eval: |a| one(lower_inc_gamma(a.get("a"), a.get("x"))),
    },
    Function {
        name: "upper_inc_gamma",
        params: &["a", "x"],
        family: false,
        outputs: &["value"],
        eval: |a| one(upper_inc_gamma(a.get("a"), a.get("x"))),
    },
    Function {
        name: "reg_inc_beta",
        params: &["x", "a", "b"],
        family: false,
        outputs: &["value"],
        eval: |a| one(reg_inc_beta(a.get("x"), a.get("a"), a.get("b"))),
    },
    Function {
        name: "kummer_1f1",
        params: &["a", "c", "z"],
        family: false,
        outputs: &["value"],
        eval: |a| one(kummer_1f1(a.get("a"), a.get("c"), a.get("z"))),
    },
    Function {
        name: "mittag_leffler",
        params: &["alpha", "beta", "gamma", "z"],
        family: false,
        outputs: &["value"],
        eval: |a| one(mittag_leffler3(a.get("alpha"), a.get("beta"), a.get("gamma"), a.get("z"))),
    },
    Function {
        name: "laplace_exponent",
        params: &["alpha", "theta?", "epsilon?", "beta0?", "eta"],
        family: true,
        outputs: &["value"],
        eval: |a| one(laplace_exponent(&a.spec()?, a.get("eta"))),
    },
    Function {
        name: "poisson_rate",
        params: &["alpha", "theta?", "epsilon?"],
        family: true,
        outputs: &["value"],
        eval: |a| one(poisson_rate(&a.spec()?)),
    },
    Function {
        name: "jump_cdf",
        params: &["alpha", "theta?", "epsilon?", "z"],
        family: true,
        outputs: &["value"],
        eval: |a| one(jump_cdf(&a.spec()?, a.get("z"))),
    },
    Function {
        name: "frac_moment",
        params: &["alpha", "theta?", "epsilon?", "beta0?", "p", "t"],
        family: true,
        outputs: &["value"],
        eval: |a| one(frac_moment(&a.spec()?, a.get("p"), a.get("t"))),
    },
    Function {
        name: "frac_moment_asymptote",
        params: &["alpha", "p", "t"],
        family: false,
        outputs: &["value"],
        eval: |a| one(frac_moment_asymptote(a.get("alpha"), a.get("p"), a.get("t"))),
    },
    Function {
        name: "tail_asymptote",
        params: &["alpha", "t", "x"],
        family: false,
        outputs: &["value"],
        eval: |a| one(tail_asymptote(a.get("alpha"), a.get("t"), a.get("x"))),
    },
    Function {
        name: "tempered_mean_var",
        params: &["alpha", "theta", "t", "beta0?"],
        family: false,
        outputs: &["mean", "variance"],
        eval: |a| {
            let spec = SubordinatorSpec::tempered(a.get("alpha"), a.get("theta"))?.with_drift(a.get("beta0"))?;
            let (m, v) = tempered_mean_var(&spec, a.get("t"))?;
            Ok(vec![m, v])
        },
    },
    Function {
        name: "o_epsilon",
        params: &["eta", "epsilon", "alpha"],
        family: false,
        outputs: &["value"],
        eval: |a| one(o_epsilon_transfer(a.get("eta"), a.get("epsilon"), a.get("alpha"))),
    },
    Function {
        name: "bm_levy_density",
        params: &["x", "alpha", "theta?"],
        family: false,
        outputs: &["value"],
        eval: |a| one(bm_levy_density(a.get("x"), a.get("alpha"), a.get("theta"))),
    },
    Function {
        name: "bm_autocovariance",
        params: &["alpha", "theta", "t", "tau", "beta0?"],
        family: false,
        outputs: &["value"],
        eval: |a| {
            let spec = SubordinatorSpec::tempered(a.get("alpha"), a.get("theta"))?.with_drift(a.get("beta0"))?;
            one(igsub::subordination::bm_autocovariance(&spec, a.get("t"), a.get("tau")))
        },
    },
    Function {
        name: "fbm_abs_moment",
        params: &["hurst", "q", "t"],
        family: false,
        outputs: &["value"],
        eval: |a| one(fbm_abs_moment(HurstParam::new(a.get("hurst"))?, a.get("q"), a.get("t"))),
    },
];

/// Names accepted by `eval`.
pub fn function_names() -> Vec<&'static str> {
    FUNCTIONS.iter().map(|f| f.name).collect()
}

fn canonical(key: &str) -> &str {
    match key {
        "α" => "alpha",
        "β" => "beta",
        "γ" => "gamma",
        "θ" => "theta",
        "ε" | "eps" => "epsilon",
        "η" => "eta",
        "τ" => "tau",
        "β₀" | "β0" | "b0" => "beta0",
        "H" | "h" => "hurst",
        other => other,
    }
}

fn usage(f: &Function) -> String {
    let params: Vec<String> = f
        .params
        .iter()
        .map(|p| match p.strip_suffix('?') {
            Some(name) => format!("[{name}=0]"),
            None => p.to_string(),
        })
        .collect();
    let family = if f.family { "<plain|tempered|floored|pure_drift> " } else { "" };
    format!("usage: igsub eval {} {family}{}", f.name, params.join(" "))
}

fn parse_number(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse {raw:?} as a number")))
}

/// Evaluates `name` on `tokens` and returns the text to print.
pub fn eval(name: &str, tokens: &[String]) -> Result<String, CliError> {
    let f = FUNCTIONS.iter().find(|f| f.name == name).ok_or_else(|| {
        CliError::Usage(format!("unknown function {name:?}; available: {}", function_names().join(", ")))
    })?;
    let mut tokens = tokens.iter().map(String::as_str);
    let family = if f.family {
        Some(tokens.next().ok_or_else(|| CliError::Usage(usage(f)))?.to_string())
    } else {
        None
    };
    let names: Vec<(&'static str, bool)> = f
        .params
        .iter()
        .map(|p| match p.strip_suffix('?') {
            Some(n) => (n, true),
            None => (*p, false),
        })
        .collect();
    let mut raw: BTreeMap<&'static str, &str> = BTreeMap::new();
    let mut positional = Vec::new();
    for tok in tokens {
        match tok.split_once('=') {
            Some((k, v)) => {
                let key = canonical(k);
                let (slot, _) = names
                    .iter()
                    .find(|(n, _)| *n == key)
                    .ok_or_else(|| CliError::Usage(format!("unknown argument {k:?}\n{}", usage(f))))?;
                if raw.insert(slot, v).is_some() {
                    return Err(CliError::Usage(format!("{key} given twice\n{}", usage(f))));
                }
            }
            None => positional.push(tok),
        }
    }
    // positionals fill the required slots first, then optional ones
    let mut free = names
        .iter()
        .filter(|(n, opt)| !opt && !raw.contains_key(n))
        .chain(names.iter().filter(|(n, opt)| *opt && !raw.contains_key(n)))
        .map(|(n, _)| *n)
        .collect::<Vec<_>>()
        .into_iter();
    for tok in positional {
        let slot = free
            .next()
            .ok_or_else(|| CliError::Usage(format!("too many arguments\n{}", usage(f))))?;
        raw.insert(slot, tok);
    }
    if let Some((missing, _)) = names.iter().find(|(n, opt)| !opt && !raw.contains_key(n)) {
        return Err(CliError::Usage(format!("missing {missing}\n{}", usage(f))));
    }
    let lists: Vec<&'static str> = raw.iter().filter(|(_, v)| v.contains(',')).map(|(k, _)| *k).collect();
    if lists.len() > 1 {
        return Err(CliError::Usage("at most one argument may be a list".into()));
    }
    let mut scalars = BTreeMap::new();
    for (k, v) in &raw {
        if !v.contains(',') {
            scalars.insert(*k, parse_number(k, v)?);
        }
    }
    match lists.first() {
        None => {
            let out = (f.eval)(&Args {
                family,
                values: scalars,
            })?;
            if out.len() == 1 {
                Ok(format!("{}\n", out[0]))
            } else {
                let header = f.outputs.join(",");
                let row: Vec<String> = out.iter().map(|v| v.to_string()).collect();
                Ok(format!("{header}\n{}\n", row.join(",")))
            }
        }
        Some(key) => {
            let mut table = format!("{key},{}\n", f.outputs.join(","));
            for item in raw[key].split(',') {
                let x = parse_number(key, item)?;
                let mut values = scalars.clone();
                values.insert(key, x);
                let out = (f.eval)(&Args {
                    family: family.clone(),
                    values,
                })?;
                let row: Vec<String> = out.iter().map(|v| v.to_string()).collect();
                table.push_str(&format!("{x},{}\n", row.join(",")));
            }
            Ok(table)
        }
    }
}
