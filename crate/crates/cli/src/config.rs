//! Experiment configuration: a JSON file that pins down the system, the
//! potential, the measure under test, the sampling plan, and the decision
//! tolerances. The echo embedded in every report is enough to re-run the
//! experiment exactly.

use std::path::Path;

use localpress::{
    LocallyConstantPotential, MarkovMeasure, PressureReport, SubshiftOfFiniteType,
    DEFAULT_LOG_CONST_BOUND, DEFAULT_SLOPE_TOL,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub potential: PotentialConfig,
    pub measure: MeasureConfig,
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Alphabet size plus the 0/1 transition matrix, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub alphabet_size: usize,
    pub transition: Vec<Vec<u8>>,
}

/// Window length and the flat value table in lexicographic word order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub range: usize,
    pub table: Vec<f64>,
}

/// Which measure the sampling commands test. `equilibrium` derives the
/// measure from the configured system and potential instead of taking
/// parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum MeasureConfig {
    Bernoulli(Vec<f64>),
    Markov(Vec<Vec<f64>>),
    Equilibrium,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Depths at which estimates are recorded; strictly increasing.
    pub n_grid: Vec<usize>,
    /// Radius exponent: balls have radius 2^{−k}.
    pub k: usize,
    /// Number of points to sample.
    pub sample_count: usize,
    /// Length of each sampled prefix.
    pub capacity: usize,
    /// Sampling seed (overridable with --seed).
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_slope_tol")]
    pub slope_tol: f64,
    #[serde(default = "default_const_bound")]
    pub const_bound: f64,
    #[serde(default = "default_eq_tol")]
    pub eq_tol: f64,
}

fn default_slope_tol() -> f64 {
    DEFAULT_SLOPE_TOL
}

fn default_const_bound() -> f64 {
    DEFAULT_LOG_CONST_BOUND.exp()
}

fn default_eq_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope_tol: default_slope_tol(),
            const_bound: default_const_bound(),
            eq_tol: default_eq_tol(),
        }
    }
}

impl ExperimentConfig {
    /// Reads and parses a config file. A missing file or invalid JSON is a
    /// config error (exit 2), not an i/o error: the path is user input.
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Structural invariants that make the experiment well-posed. Everything
    /// checked here is a property of the file alone; failures exit with
    /// code 2.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = self.system.alphabet_size;
        if m == 0 {
            return Err(CliError::Config("alphabet_size must be >= 1".into()));
        }
        if self.system.transition.len() != m
            || self.system.transition.iter().any(|row| row.len() != m)
        {
            return Err(CliError::Config(format!(
                "transition matrix must be {m}x{m} to match alphabet_size"
            )));
        }
        if self.potential.range == 0 {
            return Err(CliError::Config("potential range must be >= 1".into()));
        }
        let expected = m
            .checked_pow(self.potential.range as u32)
            .ok_or_else(|| CliError::Config("potential table size overflows".into()))?;
        if self.potential.table.len() != expected {
            return Err(CliError::Config(format!(
                "potential table has {} entries; alphabet {m} at range {} needs {expected}",
                self.potential.table.len(),
                self.potential.range,
            )));
        }
        match &self.measure {
            MeasureConfig::Bernoulli(probs) => {
                if probs.len() != m {
                    return Err(CliError::Config(format!(
                        "bernoulli measure needs {m} probabilities, got {}",
                        probs.len()
                    )));
                }
            }
            MeasureConfig::Markov(rows) => {
                if rows.len() != m || rows.iter().any(|row| row.len() != m) {
                    return Err(CliError::Config(format!(
                        "markov measure needs a {m}x{m} matrix"
                    )));
                }
            }
            MeasureConfig::Equilibrium => {}
        }

        let est = &self.estimator;
        if est.n_grid.is_empty() {
            return Err(CliError::Config(
                "estimator n_grid must not be empty".into(),
            ));
        }
        if est.n_grid[0] == 0 {
            return Err(CliError::Config("depths in n_grid must be >= 1".into()));
        }
        if !est.n_grid.windows(2).all(|p| p[0] < p[1]) {
            return Err(CliError::Config(
                "n_grid must be strictly increasing".into(),
            ));
        }
        if est.sample_count == 0 {
            return Err(CliError::Config("sample_count must be >= 1".into()));
        }
        let needed = est.n_grid.last().unwrap() + est.k + self.potential.range - 1;
        if est.capacity < needed {
            return Err(CliError::Config(format!(
                "capacity {} is below max(n_grid) + k + range − 1 = {needed}",
                est.capacity
            )));
        }

        let tol = &self.tolerances;
        if !(tol.slope_tol.is_finite() && tol.slope_tol > 0.0) {
            return Err(CliError::Config("slope_tol must be positive".into()));
        }
        if !(tol.const_bound.is_finite() && tol.const_bound >= 1.0) {
            return Err(CliError::Config("const_bound must be >= 1".into()));
        }
        if !(tol.eq_tol.is_finite() && tol.eq_tol > 0.0) {
            return Err(CliError::Config("eq_tol must be positive".into()));
        }
        Ok(())
    }

    /// Instantiates the shift space and the potential. Errors here mean the
    /// config described an invalid object, so they are config errors.
    pub fn build_system(
        &self,
    ) -> Result<(SubshiftOfFiniteType, LocallyConstantPotential), CliError> {
        let sft = SubshiftOfFiniteType::new(self.system.transition.clone())
            .map_err(|e| CliError::Config(e.to_string()))?;
        let phi =
            LocallyConstantPotential::new(&sft, self.potential.range, self.potential.table.clone())
                .map_err(|e| CliError::Config(e.to_string()))?;
        Ok((sft, phi))
    }

    /// Instantiates the measure under test. Invalid explicit parameters are
    /// config errors; a failed equilibrium derivation (e.g. a reducible
    /// system) is a mathematical failure of the experiment itself.
    pub fn build_measure(
        &self,
        sft: &SubshiftOfFiniteType,
        phi: &LocallyConstantPotential,
    ) -> Result<(MarkovMeasure, Option<PressureReport>), CliError> {
        match &self.measure {
            MeasureConfig::Bernoulli(probs) => {
                let mu = MarkovMeasure::bernoulli(sft, probs.clone())
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok((mu, None))
            }
            MeasureConfig::Markov(rows) => {
                let mu = MarkovMeasure::new(sft, rows.clone())
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok((mu, None))
            }
            MeasureConfig::Equilibrium => {
                let (mu, report) = localpress::equilibrium_measure(sft, phi)?;
                Ok((mu, Some(report)))
            }
        }
    }
}
