//! `igsub simulate`: path CSVs plus a manifest.

use std::fs;
use std::path::Path;

use igsub::fbm::{sample_time_changed_fbm, HurstParam};
use igsub::rng::StreamFactory;
use igsub::subordination::sample_subordinated_bm;
use igsub::subordinator::{sample_path, Family};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Process};
use crate::report::version;
use crate::CliError;

/// Paths written when neither the config nor `--paths` says otherwise.
pub const DEFAULT_SIM_PATHS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub files: Vec<String>,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn fbm_csv(times: &[f64], values: &[f64]) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in times.iter().zip(values) {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// Writes `path_NNNN.csv` for each path and `manifest.json` into `cfg.out`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Manifest, CliError> {
    let n = cfg.paths_or(DEFAULT_SIM_PATHS);
    let sim = &cfg.simulate;
    if !(sim.horizon >= 0.0 && sim.horizon.is_finite()) {
        return Err(CliError::Config(format!("simulate.horizon must be finite and >= 0, got {}", sim.horizon)));
    }
    let spec = cfg.subordinator.to_spec()?;
    let streams = StreamFactory::new(cfg.seed).derive("simulate");
    let csvs: Vec<String> = match sim.process {
        Process::Subordinator => streams
            .par_map(n, |rng, _| sample_path(&spec, sim.horizon, rng).map(|p| p.to_csv()))
            .into_iter()
            .collect::<Result<_, _>>()?,
        Process::SubordinatedBm => {
            let grid = sim.resolved_time_grid();
            streams
                .par_map(n, |rng, _| sample_subordinated_bm(&spec, &grid, rng).map(|p| p.to_csv()))
                .into_iter()
                .collect::<Result<_, _>>()?
        }
        Process::TimeChangedFbm => {
            if !matches!(spec.family, Family::Plain) || spec.beta0 != 0.0 {
                return Err(CliError::Config(
                    "time_changed_fbm runs on a plain subordinator clock without drift".into(),
                ));
            }
            let h = HurstParam::new(
                sim.hurst
                    .ok_or_else(|| CliError::Config("simulate.hurst is required for time_changed_fbm".into()))?,
            )?;
            let grid = sim.resolved_time_grid();
            let noise = streams.derive("fbm");
            streams
                .derive("clock")
                .par_map(n, |rng, i| {
                    let mut noise_rng = noise.stream(i as u64);
                    sample_time_changed_fbm(h, spec.alpha, sim.horizon, &grid, rng, &mut noise_rng)
                        .map(|p| fbm_csv(&p.times, &p.values))
                })
                .into_iter()
                .collect::<Result<_, _>>()?
        }
    };
    fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", cfg.out.display())))?;
    let mut files = Vec::with_capacity(n);
    for (i, csv) in csvs.iter().enumerate() {
        let name = format!("path_{i:04}.csv");
        write(&cfg.out.join(&name), csv)?;
        files.push(name);
    }
    let manifest = Manifest {
        version: version(),
        master_seed: cfg.seed,
        config: cfg.clone(),
        files,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write(&cfg.out.join("manifest.json"), &json)?;
    Ok(manifest)
}
