//! Thermodynamic formalism on one-sided subshifts of finite type:
//! topological pressure and equilibrium measures for locally constant
//! potentials, finite-scale local pressure estimators on sampled points,
//! and Gibbs-property diagnostics with an equilibrium certificate.
//!
//! Conventions, used consistently everywhere:
//!
//! * the metric on sequences is `d(u, v) = 2^(−min{i : u_i ≠ v_i})`, so
//!   radii are powers of two, written through their exponent `k`, and the
//!   dynamical ball `B(x, n, 2^(−k))` is the cylinder on the first `n + k`
//!   coordinates;
//! * all logarithms are natural, so entropies and pressures are in nats;
//! * points are finite prefixes with explicit capacity, and every operation
//!   that would read past the capacity fails rather than extrapolates;
//! * randomness comes only from per-point counter-mode generators keyed by
//!   `(seed, point index)`, so every sampled batch and every report is
//!   byte-for-byte reproducible across runs, platforms, and thread counts.

pub mod error;
pub mod gibbs;
pub mod local_pressure;
pub mod measure;
pub mod potential;
pub mod pressure;
pub mod sft;

pub use error::{Error, Result};
pub use gibbs::{
    certify_equilibrium, gibbs_diagnose, gibbs_ratio, log_gibbs_ratio, DiagnoseParams,
    EquilibriumVerdict, GibbsDiagnostics, GibbsVerdict, SandwichEntry, DEFAULT_LOG_CONST_BOUND,
    DEFAULT_SLOPE_TOL,
};
pub use local_pressure::{
    decomposition_check, local_entropy_at, local_pressure_at, survey_local_pressure, EstimatorGrid,
    LocalPressureEstimate, LocalPressureSurvey,
};
pub use measure::{stationary_vector, MarkovMeasure, SampleBatch, ROW_SUM_TOL, STATIONARY_TOL};
pub use potential::LocallyConstantPotential;
pub use pressure::{
    block_recode, equilibrium_measure, partition_function, topological_pressure, transfer_matrix,
    BlockRecoding, PressureReport, MAX_RECODED_ALPHABET, ORACLE_ENUMERATION_BUDGET,
    PERRON_MAX_ITERATIONS, PERRON_RESIDUAL_TOL,
};
pub use sft::{PointPrefix, SubshiftOfFiniteType, Word};
