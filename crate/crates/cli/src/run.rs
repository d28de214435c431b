//! Command implementations. Each takes a validated config, runs the
//! corresponding pipeline, and returns a [`ReportEnvelope`]; writing the
//! envelope (stdout, --out, --csv) is the binary's job.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use localpress::{
    certify_equilibrium, gibbs_diagnose, partition_function, survey_local_pressure,
    topological_pressure, DiagnoseParams, Error, EstimatorGrid, GibbsVerdict,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{
    CommandResults, EquilibriumResults, GibbsCheckResults, OracleEntry, PressureResults,
    ReportEnvelope,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pressure,
    Equilibrium,
    LocalPressure,
    GibbsCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pressure => "pressure",
            Command::Equilibrium => "equilibrium",
            Command::LocalPressure => "local-pressure",
            Command::GibbsCheck => "gibbs-check",
        }
    }

    /// Only the batched grid commands have a per-point table to export.
    pub fn has_grid(self) -> bool {
        matches!(self, Command::LocalPressure | Command::GibbsCheck)
    }
}

pub fn run_command(command: Command, config: ExperimentConfig) -> Result<ReportEnvelope, CliError> {
    let started = Instant::now();
    let (sft, phi) = config.build_system()?;

    let results = match command {
        Command::Pressure => {
            let report = topological_pressure(&sft, &phi)?;
            let mut oracle = Vec::new();
            for &n in &config.estimator.n_grid {
                match partition_function(&sft, &phi, n) {
                    Ok(z) => {
                        let estimate = z.ln() / n as f64;
                        oracle.push(OracleEntry {
                            n,
                            estimate,
                            gap: (estimate - report.value).abs(),
                        });
                    }
                    // Depths past the enumeration budget are simply not
                    // cross-checked; the spectral value stands on its own.
                    Err(Error::EnumerationBudget { .. }) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            CommandResults::Pressure(PressureResults { report, oracle })
        }
        Command::Equilibrium => {
            let (mu, report) = localpress::equilibrium_measure(&sft, &phi)?;
            let entropy = mu.entropy();
            let integral = mu.integral(&phi)?;
            CommandResults::Equilibrium(EquilibriumResults {
                attainment_gap: report.value - (entropy + integral),
                pressure: report,
                stochastic: mu.stochastic().to_vec(),
                stationary: mu.stationary().to_vec(),
                entropy,
                integral,
            })
        }
        Command::LocalPressure => {
            let (mu, _) = config.build_measure(&sft, &phi)?;
            let est = &config.estimator;
            let batch = mu.sample(est.sample_count, est.capacity, est.seed)?;
            let grid = EstimatorGrid::new(est.n_grid.clone(), vec![est.k])?;
            let survey = survey_local_pressure(&mu, &sft, &phi, &batch, &grid)?;
            CommandResults::LocalPressure(survey)
        }
        Command::GibbsCheck => {
            let (mu, derived) = config.build_measure(&sft, &phi)?;
            let p_top = match &derived {
                Some(report) => report.value,
                None => topological_pressure(&sft, &phi)?.value,
            };
            let est = &config.estimator;
            let batch = mu.sample(est.sample_count, est.capacity, est.seed)?;
            let params = DiagnoseParams::with_tolerances(
                est.n_grid.clone(),
                est.k,
                config.tolerances.slope_tol,
                config.tolerances.const_bound,
            )?;
            let diagnostics = gibbs_diagnose(&mu, &sft, &phi, p_top, &batch, &params)?;
            let equilibrium = if diagnostics.verdict == GibbsVerdict::Rejected {
                None
            } else {
                Some(certify_equilibrium(
                    &mu,
                    &sft,
                    &phi,
                    &batch,
                    &params,
                    config.tolerances.eq_tol,
                )?)
            };
            CommandResults::GibbsCheck(GibbsCheckResults {
                diagnostics,
                equilibrium,
            })
        }
    };

    Ok(ReportEnvelope {
        command: command.name().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        results,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// The per-point grid as CSV rows under the fixed header
/// `point_id,n,k,value`. Local-pressure surveys export the finite-scale
/// estimates; deviation diagnostics export log δ_n.
pub fn grid_csv(envelope: &ReportEnvelope) -> Option<String> {
    let mut out = String::from("point_id,n,k,value\n");
    match &envelope.results {
        CommandResults::LocalPressure(survey) => {
            for point in &survey.per_point {
                for (ki, &k) in survey.grid.k_values().iter().enumerate() {
                    for (ni, &n) in survey.grid.n_values().iter().enumerate() {
                        let value = point.values[ki][ni];
                        out.push_str(&format!("{},{n},{k},{value:?}\n", point.point_id));
                    }
                }
            }
            Some(out)
        }
        CommandResults::GibbsCheck(check) => {
            let diag = &check.diagnostics;
            for (point_id, deltas) in diag.per_point_log_delta.iter().enumerate() {
                for (ni, &n) in diag.n_grid.iter().enumerate() {
                    let value = deltas[ni];
                    out.push_str(&format!("{point_id},{n},{},{value:?}\n", diag.k));
                }
            }
            Some(out)
        }
        _ => None,
    }
}

/// Writes `content` to `path` atomically: the full payload lands under a
/// temporary name first and is renamed into place, so a crash never leaves
/// a half-written report.
pub fn write_atomically(path: &Path, content: &str) -> Result<(), CliError> {
    let io_err = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let base = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    let tmp_path = dir.join(format!(".{base}.tmp-{}", std::process::id()));
    {
        let mut file = std::fs::File::create(&tmp_path).map_err(io_err)?;
        file.write_all(content.as_bytes()).map_err(io_err)?;
        file.flush().map_err(io_err)?;
    }
    std::fs::rename(&tmp_path, path).map_err(io_err)?;
    Ok(())
}
