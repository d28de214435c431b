//! Report envelope written by every command: the effective config, the
//! command name, the typed results, the tool version, and the wall time.
//! Everything except `wall_time_ms` is deterministic for a fixed config.

use localpress::{EquilibriumVerdict, GibbsDiagnostics, LocalPressureSurvey, PressureReport};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEnvelope {
    /// Which subcommand produced this report.
    pub command: String,
    pub tool_version: String,
    /// The config as actually used, including any --seed override.
    pub config: ExperimentConfig,
    pub results: CommandResults,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandResults {
    Pressure(PressureResults),
    Equilibrium(EquilibriumResults),
    LocalPressure(LocalPressureSurvey),
    GibbsCheck(GibbsCheckResults),
}

/// Spectral pressure plus finite-depth partition cross-checks at every
/// depth of the config's n_grid that fits the enumeration budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PressureResults {
    pub report: PressureReport,
    pub oracle: Vec<OracleEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleEntry {
    pub n: usize,
    /// (1/n) · log of the depth-n partition sum.
    pub estimate: f64,
    /// |estimate − spectral value|.
    pub gap: f64,
}

/// The derived equilibrium chain and how exactly it attains the pressure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumResults {
    pub pressure: PressureReport,
    pub stochastic: Vec<Vec<f64>>,
    pub stationary: Vec<f64>,
    pub entropy: f64,
    pub integral: f64,
    /// pressure − (entropy + integral); tiny for a correct build.
    pub attainment_gap: f64,
}

/// Deviation diagnostics, plus the certification verdict whenever the
/// diagnosis did not reject outright.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsCheckResults {
    pub diagnostics: GibbsDiagnostics,
    pub equilibrium: Option<EquilibriumVerdict>,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    /// The deterministic part of the report: the results payload alone,
    /// serialized canonically. Two runs of the same config and seed produce
    /// byte-identical output here.
    pub fn results_json(&self) -> String {
        serde_json::to_string(&self.results).expect("reports contain only finite numbers")
    }
}
