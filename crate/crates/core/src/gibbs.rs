//! Gibbs-property diagnostics and equilibrium certification.
//!
//! For a candidate measure `μ`, potential `φ`, and topological pressure
//! `P`, the ratio
//!
//! ```text
//! R_n(x) = μ(B(x, n, k)) / exp(−n·P + S_n φ(x))
//! ```
//!
//! measures how far `μ` is from the Gibbs property at `x` and depth `n`. The
//! per-scale correction `δ_n = max(R_n, 1/R_n) ≥ 1` is the smallest constant
//! bounding the ratio from both sides at that `(n, x)`. A measure is graded
//! Gibbs when `δ_n` stays below a fixed constant, weak Gibbs when `ln δ_n`
//! grows sub-linearly (measured by a fitted slope over the tail of the depth
//! grid), and rejected otherwise. Rejection blocks the equilibrium
//! certificate: the pressure-gap criterion is only valid under at least a
//! weak Gibbs hypothesis.
//!
//! All per-point quantities are stored in log space: the raw ratios
//! overflow `f64` (and JSON) as soon as `|ln R_n|` exceeds ~709, which
//! genuinely rejected measures reach quickly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_pressure::PrefixTables;
use crate::measure::{stationarity_defect, MarkovMeasure, SampleBatch, STATIONARY_TOL};
use crate::potential::LocallyConstantPotential;
use crate::pressure::topological_pressure;
use crate::sft::{PointPrefix, SubshiftOfFiniteType};

/// Default tolerance on the fitted slope of `ln δ_n` versus `n`.
pub const DEFAULT_SLOPE_TOL: f64 = 0.01;
/// Natural log of the default uniform bound on `δ_n` (the bound is `e^10`).
pub const DEFAULT_LOG_CONST_BOUND: f64 = 10.0;

/// Grading of a measure against the Gibbs property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GibbsVerdict {
    /// `δ_n` bounded by a constant across the batch and the whole grid.
    Gibbs,
    /// `δ_n` exceeds the constant bound but `ln δ_n` shows no linear growth.
    WeakGibbs,
    /// `ln δ_n` grows (or decays) linearly in `n` for some sampled point.
    Rejected,
}

/// Grid and tolerances for [`gibbs_diagnose`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnoseParams {
    /// Depths at which the ratio is evaluated; strictly increasing, at least
    /// three so the tail half supports a slope fit.
    pub n_grid: Vec<usize>,
    /// Radius exponent: balls have radius `2^(−k)`.
    pub k: usize,
    /// Verdict is weak Gibbs only if every `|fitted slope| ≤ slope_tol`.
    pub slope_tol: f64,
    /// Verdict is Gibbs only if every `δ_n ≤ const_bound`.
    pub const_bound: f64,
}

impl DiagnoseParams {
    /// Grid with the default tolerances ([`DEFAULT_SLOPE_TOL`] and
    /// `exp(`[`DEFAULT_LOG_CONST_BOUND`]`)`).
    pub fn new(n_grid: Vec<usize>, k: usize) -> Result<Self> {
        Self::with_tolerances(n_grid, k, DEFAULT_SLOPE_TOL, DEFAULT_LOG_CONST_BOUND.exp())
    }

    pub fn with_tolerances(
        n_grid: Vec<usize>,
        k: usize,
        slope_tol: f64,
        const_bound: f64,
    ) -> Result<Self> {
        if n_grid.len() < 3 {
            return Err(Error::InvalidGrid(
                "the depth grid needs at least 3 values to fit a tail slope".into(),
            ));
        }
        if n_grid[0] == 0 {
            return Err(Error::InvalidGrid("depths n must be >= 1".into()));
        }
        if !n_grid.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::InvalidGrid(
                "depth values n must be strictly increasing".into(),
            ));
        }
        if !(slope_tol.is_finite() && slope_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "slope tolerance must be positive and finite, got {slope_tol}"
            )));
        }
        if !(const_bound.is_finite() && const_bound >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "constant bound must be finite and >= 1 (δ_n is never below 1), got {const_bound}"
            )));
        }
        Ok(DiagnoseParams {
            n_grid,
            k,
            slope_tol,
            const_bound,
        })
    }

    fn n_max(&self) -> usize {
        *self.n_grid.last().expect("grid has >= 3 entries")
    }
}

/// `ln R_n(x) = ln μ(B(x, n, k)) + n·p_top − S_n φ(x)`.
///
/// This is the overflow-safe form; see [`gibbs_ratio`] for the raw ratio.
/// It relates to the finite-scale local pressure by
/// `ln R_n = −n·(P̂(x, n, k) − p_top)`.
pub fn log_gibbs_ratio(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    p_top: f64,
    x: &PointPrefix,
    n: usize,
    k: usize,
) -> Result<f64> {
    if phi.alphabet_size() != sft.alphabet_size()
        || mu.alphabet_size() != sft.alphabet_size()
        || x.alphabet_size() != sft.alphabet_size()
    {
        return Err(Error::DimensionMismatch(
            "measure, shift, potential, and point must share one alphabet".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("depth n must be >= 1".into()));
    }
    let ball = x.dynamical_ball_cylinder(n, k)?;
    let log_mass = mu
        .log_cylinder_measure(&ball)?
        .ok_or_else(|| zero_ball_error(mu, ball.symbols()))?;
    let birkhoff = x.birkhoff_sum(phi, n)?;
    Ok(log_mass + n as f64 * p_top - birkhoff)
}

/// The Gibbs ratio `R_n(x)` itself. Overflows to `inf`/`0` once
/// `|ln R_n| > ~709`; prefer [`log_gibbs_ratio`] for diagnostics.
pub fn gibbs_ratio(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    p_top: f64,
    x: &PointPrefix,
    n: usize,
    k: usize,
) -> Result<f64> {
    Ok(log_gibbs_ratio(mu, sft, phi, p_top, x, n, k)?.exp())
}

fn zero_ball_error(mu: &MarkovMeasure, symbols: &[usize]) -> Error {
    match mu.log_mass_scan(symbols) {
        Err(position) => Error::OutsideSupport { position },
        Ok(_) => Error::InvariantViolated("ball mass vanished without a zero factor".into()),
    }
}

/// Outcome of [`gibbs_diagnose`]: per-point log ratios and corrections over
/// the depth grid, fitted tail slopes, and the verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsDiagnostics {
    /// Fingerprint of the measure under test.
    pub measure_id: String,
    /// Topological pressure the ratios were computed against.
    pub p_top: f64,
    /// Radius exponent.
    pub k: usize,
    /// Depth grid.
    pub n_grid: Vec<usize>,
    /// `ln R_n(x)` per point (batch order) and depth (grid order).
    pub per_point_log_ratio: Vec<Vec<f64>>,
    /// `ln δ_n(x) = |ln R_n(x)|` per point and depth.
    pub per_point_log_delta: Vec<Vec<f64>>,
    /// Fitted slope of `ln δ_n` versus `n` over the tail half of the grid.
    pub per_point_slope: Vec<f64>,
    /// Largest `ln δ_n` over all points and depths.
    pub max_log_delta: f64,
    /// The slope of largest magnitude (signed).
    pub worst_slope: f64,
    /// Tolerance the slopes were tested against.
    pub slope_tol: f64,
    /// Uniform bound `δ_n` was tested against.
    pub const_bound: f64,
    pub verdict: GibbsVerdict,
}

impl GibbsDiagnostics {
    /// The raw ratio `R_n` at a point and depth index (may overflow).
    pub fn ratio(&self, point: usize, depth_index: usize) -> f64 {
        self.per_point_log_ratio[point][depth_index].exp()
    }

    /// The raw correction `δ_n ≥ 1` at a point and depth index.
    pub fn delta(&self, point: usize, depth_index: usize) -> f64 {
        self.per_point_log_delta[point][depth_index].exp()
    }
}

/// Grades `μ` against the Gibbs property for `(φ, p_top)` over a sampled
/// batch: Gibbs if `δ_n ≤ const_bound` everywhere, otherwise weak Gibbs if
/// every point's fitted tail slope of `ln δ_n` is within `slope_tol` of
/// zero, otherwise rejected.
///
/// Requires point capacity `n_max + k + range(φ) − 1` and a batch drawn from
/// the measure under test (checked by fingerprint). Points are processed in
/// parallel and reduced in batch order.
pub fn gibbs_diagnose(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    p_top: f64,
    batch: &SampleBatch,
    params: &DiagnoseParams,
) -> Result<GibbsDiagnostics> {
    if phi.alphabet_size() != sft.alphabet_size() || mu.alphabet_size() != sft.alphabet_size() {
        return Err(Error::DimensionMismatch(
            "measure, shift, and potential must share one alphabet".into(),
        ));
    }
    if !p_top.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "topological pressure must be finite, got {p_top}"
        )));
    }
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
    let n_max = params.n_max();
    let needed = n_max + params.k + r - 1;
    for x in batch.points() {
        if x.capacity() < needed {
            return Err(Error::CapacityExceeded {
                needed,
                capacity: x.capacity(),
            });
        }
    }
    // Per point: ln R_n over the grid, |ln R_n| over the grid, tail slope.
    type PointOutcome = (Vec<f64>, Vec<f64>, f64);
    let outcomes: Vec<Result<PointOutcome>> = batch
        .points()
        .par_iter()
        .map(|x| {
            let tables = PrefixTables::build(mu, phi, x, n_max + params.k, n_max)?;
            let log_ratio: Vec<f64> = params
                .n_grid
                .iter()
                .map(|&n| tables.log_gibbs_ratio(p_top, n, params.k))
                .collect();
            let log_delta: Vec<f64> = log_ratio.iter().map(|lr| lr.abs()).collect();
            let tail_start = params.n_grid.len() / 2;
            let slope = fitted_slope(&params.n_grid[tail_start..], &log_delta[tail_start..]);
            Ok((log_ratio, log_delta, slope))
        })
        .collect();
    let mut per_point_log_ratio = Vec::with_capacity(outcomes.len());
    let mut per_point_log_delta = Vec::with_capacity(outcomes.len());
    let mut per_point_slope = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let (log_ratio, log_delta, slope) = outcome?;
        per_point_log_ratio.push(log_ratio);
        per_point_log_delta.push(log_delta);
        per_point_slope.push(slope);
    }
    let max_log_delta = per_point_log_delta
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    let worst_slope = per_point_slope
        .iter()
        .fold(0.0f64, |a, &s| if s.abs() > a.abs() { s } else { a });
    let verdict = if max_log_delta <= params.const_bound.ln() {
        GibbsVerdict::Gibbs
    } else if per_point_slope.iter().all(|s| s.abs() <= params.slope_tol) {
        GibbsVerdict::WeakGibbs
    } else {
        GibbsVerdict::Rejected
    };
    Ok(GibbsDiagnostics {
        measure_id: mu.id().to_string(),
        p_top,
        k: params.k,
        n_grid: params.n_grid.clone(),
        per_point_log_ratio,
        per_point_log_delta,
        per_point_slope,
        max_log_delta,
        worst_slope,
        slope_tol: params.slope_tol,
        const_bound: params.const_bound,
        verdict,
    })
}

/// Ordinary least-squares slope of `y` against `n`.
fn fitted_slope(n_values: &[usize], y: &[f64]) -> f64 {
    debug_assert_eq!(n_values.len(), y.len());
    debug_assert!(n_values.len() >= 2);
    let count = n_values.len() as f64;
    let mean_n = n_values.iter().map(|&n| n as f64).sum::<f64>() / count;
    let mean_y = y.iter().sum::<f64>() / count;
    let mut covariance = 0.0;
    let mut variance = 0.0;
    for (&n, &v) in n_values.iter().zip(y) {
        let dn = n as f64 - mean_n;
        covariance += dn * (v - mean_y);
        variance += dn * dn;
    }
    covariance / variance
}

/// One row of the sandwich trace: at depth `n`, the finite-scale local
/// pressure is pinned between `p_top ∓ ln δ_n / n`. The three columns are
/// derived from one log-ratio, so the ordering holds exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichEntry {
    pub point_id: usize,
    pub n: usize,
    /// `p_top − ln δ_n / n`.
    pub lower: f64,
    /// The finite-scale local pressure `p_top − ln R_n / n`.
    pub local_pressure: f64,
    /// `p_top + ln δ_n / n`.
    pub upper: f64,
}

/// Verdict of [`certify_equilibrium`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumVerdict {
    /// Topological pressure of `(shift, φ)`.
    pub p_top: f64,
    /// Metric pressure of the measure: `entropy + ∫φ dμ`.
    pub metric_pressure: f64,
    /// `p_top − metric_pressure`; nonnegative up to `eq_tol`.
    pub gap: f64,
    /// Tolerance the gap was tested against.
    pub eq_tol: f64,
    /// Whether the gap vanishes within `eq_tol`.
    pub is_equilibrium: bool,
    /// Per-point sandwich at the deepest grid depth.
    pub sandwich_trace: Vec<SandwichEntry>,
}

/// Decides whether `μ` is an equilibrium state for `(shift, φ)`: computes
/// the topological pressure, grades `μ` with [`gibbs_diagnose`], and — when
/// the verdict is at least weak Gibbs — compares metric against topological
/// pressure. The hypothesis matters: without it a vanishing gap at the
/// sampled scale would not certify anything, so a rejected diagnosis is an
/// error, not a `false`.
///
/// Also re-checks stationarity of `μ` and that the variational inequality
/// `gap ≥ −eq_tol` holds; violations of either indicate a corrupted input or
/// an internal bug and are reported as errors.
pub fn certify_equilibrium(
    mu: &MarkovMeasure,
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    batch: &SampleBatch,
    params: &DiagnoseParams,
    eq_tol: f64,
) -> Result<EquilibriumVerdict> {
    if !(eq_tol.is_finite() && eq_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "equilibrium tolerance must be positive and finite, got {eq_tol}"
        )));
    }
    let drift = stationarity_defect(mu.stochastic(), mu.stationary());
    if drift > STATIONARY_TOL {
        return Err(Error::InvariantViolated(format!(
            "measure is no longer stationary: ‖πQ − π‖∞ = {drift:.3e}"
        )));
    }
    let report = topological_pressure(sft, phi)?;
    let p_top = report.value;
    let diagnostics = gibbs_diagnose(mu, sft, phi, p_top, batch, params)?;
    if diagnostics.verdict == GibbsVerdict::Rejected {
        return Err(Error::GibbsRejected {
            max_log_delta: diagnostics.max_log_delta,
            worst_slope: diagnostics.worst_slope,
        });
    }
    let metric_pressure = mu.entropy() + mu.integral(phi)?;
    let gap = p_top - metric_pressure;
    if gap < -eq_tol {
        return Err(Error::InvariantViolated(format!(
            "metric pressure exceeds topological pressure by {:.3e}; \
             the variational inequality rules this out",
            -gap
        )));
    }
    let n_deep = params.n_max();
    let deep_index = params.n_grid.len() - 1;
    let n_as_f64 = n_deep as f64;
    let sandwich_trace: Vec<SandwichEntry> = diagnostics
        .per_point_log_ratio
        .iter()
        .enumerate()
        .map(|(point_id, log_ratios)| {
            let lr = log_ratios[deep_index];
            SandwichEntry {
                point_id,
                n: n_deep,
                lower: p_top - lr.abs() / n_as_f64,
                local_pressure: p_top - lr / n_as_f64,
                upper: p_top + lr.abs() / n_as_f64,
            }
        })
        .collect();
    Ok(EquilibriumVerdict {
        p_top,
        metric_pressure,
        gap,
        eq_tol,
        is_equilibrium: gap.abs() <= eq_tol,
        sandwich_trace,
    })
}
