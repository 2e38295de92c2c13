//! Scenario execution and output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cdos_core::{sweep_length, sweep_spectrum, LengthCurve, RateResult, Spectrum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, Format, Normalization, Scenario, ScenarioConfig, Sweep};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CDOS_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Runtime(#[from] cdos_core::Error),
    #[error("cannot write {path}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot start worker pool")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// Sweep results in output order.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutput {
    Spectrum {
        k: Vec<f64>,
        gamma_ratio: Vec<f64>,
    },
    Length {
        d: Vec<f64>,
        gamma_ratio: Vec<f64>,
        extremity_field: Vec<Option<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub k_or_d_at_extremum: f64,
    pub gamma_ratio_min: f64,
    pub gamma_ratio_max: f64,
}

impl SweepOutput {
    fn abscissa(&self) -> &[f64] {
        match self {
            SweepOutput::Spectrum { k, .. } => k,
            SweepOutput::Length { d, .. } => d,
        }
    }

    pub fn gamma_ratio(&self) -> &[f64] {
        match self {
            SweepOutput::Spectrum { gamma_ratio, .. } | SweepOutput::Length { gamma_ratio, .. } => {
                gamma_ratio
            }
        }
    }

    /// Index of the first maximum.
    pub fn argmax(&self) -> usize {
        let g = self.gamma_ratio();
        (0..g.len()).fold(0, |best, i| if g[i] > g[best] { i } else { best })
    }

    pub fn summary(&self, scenario: &str) -> Summary {
        let g = self.gamma_ratio();
        Summary {
            scenario: scenario.to_string(),
            k_or_d_at_extremum: self.abscissa()[self.argmax()],
            gamma_ratio_min: g.iter().copied().fold(f64::INFINITY, f64::min),
            gamma_ratio_max: g[self.argmax()],
        }
    }

    pub fn to_csv(&self, scenario: &str, config_hash: &str) -> String {
        let mut out = String::new();
        writeln!(out, "# scenario: {scenario}").unwrap();
        writeln!(out, "# config-sha256: {config_hash}").unwrap();
        match self {
            SweepOutput::Spectrum { k, gamma_ratio } => {
                out.push_str("k,lambda_nm,gamma_ratio\n");
                for (k, g) in k.iter().zip(gamma_ratio) {
                    let lambda = 2.0 * std::f64::consts::PI / k;
                    writeln!(out, "{k:.16e},{lambda:.16e},{g:.16e}").unwrap();
                }
            }
            SweepOutput::Length {
                d,
                gamma_ratio,
                extremity_field,
            } => {
                out.push_str("d_nm,gamma_ratio,extremity_field\n");
                for ((d, g), e) in d.iter().zip(gamma_ratio).zip(extremity_field) {
                    let e = e.unwrap_or(f64::NAN);
                    writeln!(out, "{d:.16e},{g:.16e},{e:.16e}").unwrap();
                }
            }
        }
        out
    }
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn point_normalized(
    scenario: &Scenario,
    rates: &[RateResult],
) -> Result<Vec<f64>, cdos_core::Error> {
    let (p, point) = scenario.sweep.point_reference();
    rates
        .iter()
        .map(|r| {
            let rho = scenario.reference.cdos(&point, &point, r.k)?;
            let denominator = p * p * rho;
            if denominator.is_nan() || denominator < cdos_core::engine::MIN_DENOMINATOR {
                return Err(cdos_core::Error::DegenerateReference { denominator });
            }
            Ok(r.numerator / denominator)
        })
        .collect()
}

/// Runs the sweep on the current rayon pool.
pub fn execute(scenario: &Scenario) -> Result<SweepOutput, cdos_core::Error> {
    let normalize = |rates: &[RateResult]| match scenario.normalization {
        Normalization::SameSource => Ok(rates.iter().map(|r| r.gamma_ratio).collect()),
        Normalization::PointDipole => point_normalized(scenario, rates),
    };
    match &scenario.sweep {
        Sweep::Spectrum { source, k_grid } => {
            let spec: Spectrum<RateResult> =
                sweep_spectrum(source, &scenario.environment, &scenario.reference, k_grid)?;
            Ok(SweepOutput::Spectrum {
                k: spec.k_values().iter().map(|k| k.get()).collect(),
                gamma_ratio: normalize(spec.samples())?,
            })
        }
        Sweep::Length {
            geometry,
            lengths,
            k,
        } => {
            let curve: LengthCurve = sweep_length(
                geometry,
                lengths,
                &scenario.environment,
                &scenario.reference,
                *k,
            )?;
            Ok(SweepOutput::Length {
                gamma_ratio: normalize(&curve.rates)?,
                d: curve.lengths,
                extremity_field: curve.extremity_field,
            })
        }
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available parallelism.
pub fn workers_from_env() -> Result<usize, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ConfigError::Invalid {
                field: WORKERS_ENV.to_string(),
                message: format!("expected a positive integer, got {v:?}"),
            }),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run_with_workers(scenario: &Scenario, workers: usize) -> Result<SweepOutput, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    Ok(pool.install(|| execute(scenario))?)
}

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    pub written: Vec<PathBuf>,
    pub output: SweepOutput,
}

fn write(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|source| RunError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads, runs and writes one scenario. All files are written from the
/// calling thread once the sweep has finished.
pub fn run(req: &RunRequest) -> Result<RunReport, RunError> {
    let (cfg, bytes) = ScenarioConfig::load(&req.config)?;
    let base = req.config.parent().unwrap_or(Path::new("."));
    let scenario = cfg.build(base)?;
    let output = run_with_workers(&scenario, req.workers)?;

    let dir = req
        .out
        .clone()
        .or_else(|| scenario.output.dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| RunError::Write {
        path: dir.clone(),
        source,
    })?;
    let format = req.format.or(scenario.output.format).unwrap_or(Format::Csv);
    let summary = output.summary(&scenario.name);
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let path = dir.join(format!("{}.csv", scenario.name));
        write(&path, &output.to_csv(&scenario.name, &config_hash(&bytes)))?;
        written.push(path);
    }
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join(format!("{}.json", scenario.name));
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
        write(&path, &(json + "\n"))?;
        written.push(path);
    }
    Ok(RunReport {
        summary,
        written,
        output,
    })
}
