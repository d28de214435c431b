//! Finite-scale local pressure: for a point `x`, depth `n`, and radius
//! exponent `k`, the quotient
//!
//! ```text
//! P̂(x, n, k) = (−ln μ(B(x, n, k)) + S_n φ(x)) / n
//! ```
//!
//! where `B(x, n, k)` is the set of points staying within `2^(−k)` of the
//! orbit of `x` for `n` steps — the cylinder on the first `n + k`
//! coordinates — and `S_n φ` is the `n`-term ergodic sum. As `n` grows this
//! converges, for almost every sampled point, to `entropy(μ) + ∫φ dμ`,
//! independently of `k`; [`survey_local_pressure`] measures that convergence
//! over a sampled batch and an `(n, k)` grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MarkovMeasure, SampleBatch};
use crate::potential::LocallyConstantPotential;
use crate::sft::{PointPrefix, SubshiftOfFiniteType};

/// The `(n, k)` evaluation grid: depths `n` (strictly increasing, ≥ 1) and
/// radius exponents `k` (strictly increasing, ≥ 0; the radius is `2^(−k)`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorGrid {
    n_values: Vec<usize>,
    k_values: Vec<usize>,
}

impl EstimatorGrid {
    pub fn new(n_values: Vec<usize>, k_values: Vec<usize>) -> Result<Self> {
        if n_values.is_empty() {
            return Err(Error::InvalidGrid("no depth values n given".into()));
        }
        if k_values.is_empty() {
            return Err(Error::InvalidGrid("no radius exponents k given".into()));
        }
        if n_values[0] == 0 {
            return Err(Error::InvalidGrid("depths n must be >= 1".into()));
        }
        if !n_values.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::InvalidGrid(
                "depth values n must be strictly increasing".into(),
            ));
        }
        if !k_values.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::InvalidGrid(
                "radius exponents k must be strictly increasing".into(),
            ));
        }
        Ok(EstimatorGrid { n_values, k_values })
    }

    pub fn n_values(&self) -> &[usize] {
        &self.n_values
    }

    pub fn k_values(&self) -> &[usize] {
        &self.k_values
    }

    pub fn n_max(&self) -> usize {
        *self.n_values.last().expect("grid is non-empty")
    }

    pub fn k_max(&self) -> usize {
        *self.k_values.last().expect("grid is non-empty")
    }
}

/// Local pressure of `(μ, φ)` at `x` at finite scale `(n, k)`.
///
/// Preconditions: matching alphabets, `n ≥ 1`, and capacity at least
/// `n + k + range(φ) − 1`. A ball of zero measure is a hard error carrying
/// the offending coordinate.
pub fn local_pressure_at(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    x: &PointPrefix,
    n: usize,
    k: usize,
) -> Result<f64> {
    check_alphabets(&[
        mu.alphabet_size(),
        sft.alphabet_size(),
        phi.alphabet_size(),
        x.alphabet_size(),
    ])?;
    check_scale(x, n, k, phi.range())?;
    let log_mass = ball_log_mass(mu, x, n, k)?;
    let birkhoff = x.birkhoff_sum(phi, n)?;
    Ok((birkhoff - log_mass) / n as f64)
}

/// Local entropy at finite scale: the local pressure of the zero potential,
/// `−ln μ(B(x, n, k)) / n`. Needs capacity `n + k`.
pub fn local_entropy_at(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    x: &PointPrefix,
    n: usize,
    k: usize,
) -> Result<f64> {
    check_alphabets(&[mu.alphabet_size(), sft.alphabet_size(), x.alphabet_size()])?;
    if n == 0 {
        return Err(Error::InvalidArgument("depth n must be >= 1".into()));
    }
    let log_mass = ball_log_mass(mu, x, n, k)?;
    Ok((0.0 - log_mass) / n as f64)
}

/// Returns the local pressure (lhs) next to its algebraic decomposition
/// `local entropy + S_n φ / n` (rhs). The two agree up to rounding; they are
/// computed independently so the agreement is a check, not a tautology.
pub fn decomposition_check(
    mu: &MarkovMeasure,
    phi: &LocallyConstantPotential,
    x: &PointPrefix,
    n: usize,
    k: usize,
) -> Result<(f64, f64)> {
    check_alphabets(&[mu.alphabet_size(), phi.alphabet_size(), x.alphabet_size()])?;
    check_scale(x, n, k, phi.range())?;
    let log_mass = ball_log_mass(mu, x, n, k)?;
    let birkhoff = x.birkhoff_sum(phi, n)?;
    let lhs = (birkhoff - log_mass) / n as f64;
    let rhs = (0.0 - log_mass) / n as f64 + birkhoff / n as f64;
    Ok((lhs, rhs))
}

fn check_alphabets(sizes: &[usize]) -> Result<()> {
    if sizes.windows(2).any(|p| p[0] != p[1]) {
        return Err(Error::DimensionMismatch(format!(
            "alphabet sizes disagree: {sizes:?}"
        )));
    }
    Ok(())
}

fn check_scale(x: &PointPrefix, n: usize, k: usize, range: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("depth n must be >= 1".into()));
    }
    let needed = n + k + range - 1;
    if needed > x.capacity() {
        return Err(Error::CapacityExceeded {
            needed,
            capacity: x.capacity(),
        });
    }
    Ok(())
}

/// `ln μ(B(x, n, k))`, failing with the offending coordinate when the ball
/// has zero mass.
fn ball_log_mass(mu: &MarkovMeasure, x: &PointPrefix, n: usize, k: usize) -> Result<f64> {
    let ball = x.dynamical_ball_cylinder(n, k)?;
    mu.log_mass_scan(ball.symbols())
        .map_err(|position| Error::OutsideSupport { position })
}

/// Cumulative tables for one point: log cylinder masses and ergodic partial
/// sums of every prefix, so an `(n, k)` grid is evaluated in constant time
/// per cell. Accumulation order matches the single-point operations exactly,
/// so table-driven values are bitwise identical to single-shot ones.
pub(crate) struct PrefixTables {
    /// `log_mass[j] = ln μ(C_j(x))`, `j = 0..=max_ball_len` (`log_mass[0] = 0`).
    log_mass: Vec<f64>,
    /// `partial_sums[i] = S_i φ(x)`, `i = 0..=max_depth` (`partial_sums[0] = 0`).
    partial_sums: Vec<f64>,
}

impl PrefixTables {
    /// Builds tables covering balls up to length `max_ball_len` and ergodic
    /// sums up to depth `max_depth`.
    pub(crate) fn build(
        mu: &MarkovMeasure,
        phi: &LocallyConstantPotential,
        x: &PointPrefix,
        max_ball_len: usize,
        max_depth: usize,
    ) -> Result<Self> {
        let r = phi.range();
        let scan_len = max_ball_len.max(max_depth + r - 1);
        if scan_len > x.capacity() {
            return Err(Error::CapacityExceeded {
                needed: scan_len,
                capacity: x.capacity(),
            });
        }
        let symbols = x.symbols();
        let mut log_mass = Vec::with_capacity(max_ball_len + 1);
        log_mass.push(0.0);
        let mut acc = 0.0f64;
        for j in 0..max_ball_len {
            let factor = if j == 0 {
                mu.stationary()[symbols[0]]
            } else {
                mu.stochastic()[symbols[j - 1]][symbols[j]]
            };
            if factor == 0.0 {
                return Err(Error::OutsideSupport { position: j });
            }
            acc += factor.ln();
            log_mass.push(acc);
        }
        let mut partial_sums = Vec::with_capacity(max_depth + 1);
        partial_sums.push(0.0);
        let mut sum = 0.0f64;
        for i in 0..max_depth {
            sum += phi.eval(&symbols[i..i + r]);
            partial_sums.push(sum);
        }
        Ok(PrefixTables {
            log_mass,
            partial_sums,
        })
    }

    #[inline]
    pub(crate) fn local_pressure(&self, n: usize, k: usize) -> f64 {
        (self.partial_sums[n] - self.log_mass[n + k]) / n as f64
    }

    #[inline]
    pub(crate) fn local_entropy(&self, n: usize, k: usize) -> f64 {
        (0.0 - self.log_mass[n + k]) / n as f64
    }

    /// `ln R_n = ln μ(B(x,n,k)) + n·p_top − S_n φ(x)`.
    #[inline]
    pub(crate) fn log_gibbs_ratio(&self, p_top: f64, n: usize, k: usize) -> f64 {
        self.log_mass[n + k] + n as f64 * p_top - self.partial_sums[n]
    }
}

/// Per-point outcome of a batch survey: the full value grid plus tail
/// summaries. `values[ki][ni]` is the local pressure at
/// `(n_values[ni], k_values[ki])`; `entropy_values` is the same grid for the
/// zero potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalPressureEstimate {
    /// Index of the point in its batch.
    pub point_id: usize,
    /// Local pressure per grid cell, indexed `[k][n]`.
    pub values: Vec<Vec<f64>>,
    /// Local entropy per grid cell, indexed `[k][n]`.
    pub entropy_values: Vec<Vec<f64>>,
    /// The value at the finest cell `(n_max, k_max)`.
    pub final_value: f64,
    /// Convergence diagnostic: max − min of the values over the most refined
    /// quarter of the depth grid (at least two entries) at `k = k_max`.
    pub tail_oscillation: f64,
    /// `|P̂(x) − P̂(shift x)|` at the finest cell, both at the same `(n, k)`.
    pub shift_defect: f64,
}

/// Outcome of [`survey_local_pressure`] over a sampled batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalPressureSurvey {
    /// The evaluation grid the values index into.
    pub grid: EstimatorGrid,
    /// Fingerprint of the measure the batch was sampled from.
    pub measure_id: String,
    /// The predicted limit: `entropy(μ) + ∫φ dμ`.
    pub target: f64,
    /// Mean over points of the value at the finest cell.
    pub sample_mean: f64,
    /// Population standard deviation of the same values.
    pub sample_std: f64,
    /// Mean over points of the finest-cell shift defect.
    pub invariance_defect: f64,
    /// Raw per-point grids, in batch order.
    pub per_point: Vec<LocalPressureEstimate>,
}

/// Evaluates the local pressure of `(μ, φ)` at every sampled point over the
/// whole `(n, k)` grid and summarizes convergence toward
/// `entropy(μ) + ∫φ dμ`.
///
/// Requires the batch to have been sampled from `μ` (checked by fingerprint)
/// and point capacity at least `n_max + k_max + range(φ)` — one coordinate
/// beyond the single-point precondition, because each point is compared
/// against its shift at the same `(n, k)`.
///
/// Points are processed in parallel; all reductions run in batch order, so
/// the survey is byte-for-byte reproducible.
pub fn survey_local_pressure(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    batch: &SampleBatch,
    grid: &EstimatorGrid,
) -> Result<LocalPressureSurvey> {
    check_alphabets(&[mu.alphabet_size(), sft.alphabet_size(), phi.alphabet_size()])?;
    if batch.measure_id() != mu.id() {
        return Err(Error::MeasureMismatch {
            batch_id: batch.measure_id().to_string(),
            expected_id: mu.id().to_string(),
        });
    }
    if batch.is_empty() {
        return Err(Error::InvalidArgument("batch has no points".into()));
    }
    let r = phi.range();
    let needed = grid.n_max() + grid.k_max() + r;
    for x in batch.points() {
        if x.capacity() < needed {
            return Err(Error::CapacityExceeded {
                needed,
                capacity: x.capacity(),
            });
        }
    }
    let max_ball_len = grid.n_max() + grid.k_max();
    let outcomes: Vec<Result<LocalPressureEstimate>> = batch
        .points()
        .par_iter()
        .enumerate()
        .map(|(point_id, x)| {
            let tables = PrefixTables::build(mu, phi, x, max_ball_len, grid.n_max())?;
            let shifted = x.shift(1)?;
            let shifted_tables =
                PrefixTables::build(mu, phi, &shifted, max_ball_len, grid.n_max())?;
            let mut values = Vec::with_capacity(grid.k_values().len());
            let mut entropy_values = Vec::with_capacity(grid.k_values().len());
            for &k in grid.k_values() {
                let row: Vec<f64> = grid
                    .n_values()
                    .iter()
                    .map(|&n| tables.local_pressure(n, k))
                    .collect();
                let entropy_row: Vec<f64> = grid
                    .n_values()
                    .iter()
                    .map(|&n| tables.local_entropy(n, k))
                    .collect();
                values.push(row);
                entropy_values.push(entropy_row);
            }
            let finest_row = values.last().expect("grid has a k value");
            let final_value = *finest_row.last().expect("grid has an n value");
            let tail_len = (grid.n_values().len() / 4)
                .max(2)
                .min(grid.n_values().len());
            let tail = &finest_row[finest_row.len() - tail_len..];
            let tail_max = tail.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
            let tail_min = tail.iter().fold(f64::INFINITY, |a, &v| a.min(v));
            let shifted_value = shifted_tables.local_pressure(grid.n_max(), grid.k_max());
            Ok(LocalPressureEstimate {
                point_id,
                values,
                entropy_values,
                final_value,
                tail_oscillation: tail_max - tail_min,
                shift_defect: (final_value - shifted_value).abs(),
            })
        })
        .collect();
    let mut per_point = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        per_point.push(outcome?);
    }
    let count = per_point.len() as f64;
    let sample_mean = per_point.iter().map(|e| e.final_value).sum::<f64>() / count;
    let variance = per_point
        .iter()
        .map(|e| {
            let d = e.final_value - sample_mean;
            d * d
        })
        .sum::<f64>()
        / count;
    let invariance_defect = per_point.iter().map(|e| e.shift_defect).sum::<f64>() / count;
    let target = mu.entropy() + mu.integral(phi)?;
    Ok(LocalPressureSurvey {
        grid: grid.clone(),
        measure_id: mu.id().to_string(),
        target,
        sample_mean,
        sample_std: variance.sqrt(),
        invariance_defect,
        per_point,
    })
}
