//! Stationary Markov measures on subshifts of finite type: cylinder masses,
//! entropy, integrals of locally constant potentials, and point sampling.
//!
//! All logarithms are natural. Cylinder masses of long words underflow `f64`
//! (a factor of 0.1 per coordinate reaches the subnormal range near length
//! 400), so every estimator consumes [`MarkovMeasure::log_cylinder_measure`]
//! rather than raw products.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::LocallyConstantPotential;
use crate::sft::{
    format_classes, strongly_connected_components, PointPrefix, SubshiftOfFiniteType, Word,
};

/// Tolerance for row sums of a stochastic matrix.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Tolerance for stationarity, `‖πQ − π‖∞`.
pub const STATIONARY_TOL: f64 = 1e-10;

/// A shift-invariant Markov measure: a row-stochastic matrix `Q` supported on
/// the allowed transitions together with its stationary distribution `π`.
/// The measure of the cylinder on `(w_0, …, w_{n−1})` is
/// `π[w_0] · Q[w_0][w_1] ⋯ Q[w_{n−2}][w_{n−1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    stochastic: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    id: String,
}

impl MarkovMeasure {
    /// Builds the measure from a stochastic matrix, deriving the stationary
    /// distribution. Requires: rows sum to 1 within [`ROW_SUM_TOL`], support
    /// contained in the allowed transitions, a unique closed communicating
    /// class (otherwise [`Error::Reducible`]), and a non-atomic measure
    /// (otherwise [`Error::Atomic`]).
    pub fn new(sft: &SubshiftOfFiniteType, stochastic: Vec<Vec<f64>>) -> Result<Self> {
        validate_stochastic(sft, &stochastic)?;
        reject_atomic(&stochastic)?;
        let stationary = stationary_vector(&stochastic)?;
        let id = measure_id(&stochastic, &stationary);
        Ok(MarkovMeasure {
            stochastic,
            stationary,
            id,
        })
    }

    /// Builds the measure from a stochastic matrix and an explicitly known
    /// stationary distribution (e.g. one obtained in closed form). The vector
    /// is verified: nonnegative, total mass 1 within [`ROW_SUM_TOL`], and
    /// `‖πQ − π‖∞ ≤` [`STATIONARY_TOL`].
    pub fn from_parts(
        sft: &SubshiftOfFiniteType,
        stochastic: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        validate_stochastic(sft, &stochastic)?;
        reject_atomic(&stochastic)?;
        let m = stochastic.len();
        if stationary.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "stationary vector has length {}, matrix is {m}×{m}",
                stationary.len()
            )));
        }
        for (i, &p) in stationary.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::NotStochastic(format!(
                    "stationary entry {i} is {p}; entries must be finite and nonnegative"
                )));
            }
        }
        let total: f64 = stationary.iter().sum();
        if (total - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::NotStochastic(format!(
                "stationary vector sums to {total}, not 1"
            )));
        }
        let defect = stationarity_defect(&stochastic, &stationary);
        if defect > STATIONARY_TOL {
            return Err(Error::NotStochastic(format!(
                "vector is not stationary: ‖πQ − π‖∞ = {defect:.3e}"
            )));
        }
        let id = measure_id(&stochastic, &stationary);
        Ok(MarkovMeasure {
            stochastic,
            stationary,
            id,
        })
    }

    /// The product (Bernoulli) measure with symbol weights `probs`, available
    /// on the full shift: every row of `Q` equals `probs`.
    pub fn bernoulli(sft: &SubshiftOfFiniteType, probs: Vec<f64>) -> Result<Self> {
        let m = sft.alphabet_size();
        if probs.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "got {} symbol weights for an alphabet of {m}",
                probs.len()
            )));
        }
        let stochastic = vec![probs.clone(); m];
        Self::from_parts(sft, stochastic, probs)
    }

    pub fn alphabet_size(&self) -> usize {
        self.stochastic.len()
    }

    pub fn stochastic(&self) -> &[Vec<f64>] {
        &self.stochastic
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// A deterministic fingerprint of the defining data (dimensions and exact
    /// f64 bit patterns), used to tie sampled batches back to their measure.
    pub fn id(&self) -> &str {
        &self.id
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        let m = self.alphabet_size();
        for &s in w.symbols() {
            if s >= m {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet_size: m,
                });
            }
        }
        Ok(())
    }

    /// Measure of the cylinder set on `w`. The empty word denotes the whole
    /// space (mass 1). Returns `Ok(0.0)` for cylinders off the support.
    pub fn cylinder_measure(&self, w: &Word) -> Result<f64> {
        match self.log_cylinder_measure(w)? {
            Some(log_mass) => Ok(log_mass.exp()),
            None => Ok(0.0),
        }
    }

    /// Natural log of the cylinder mass, or `None` when the mass is exactly
    /// zero. This is the numerically safe form: masses of long cylinders
    /// underflow `f64` while their logs stay well in range.
    pub fn log_cylinder_measure(&self, w: &Word) -> Result<Option<f64>> {
        self.check_word(w)?;
        match self.log_mass_scan(w.symbols()) {
            Ok(log_mass) => Ok(Some(log_mass)),
            Err(_position) => Ok(None),
        }
    }

    /// Log-mass of the cylinder on `symbols`, or the coordinate index whose
    /// factor (initial mass or transition) is zero. Symbols must be in range.
    pub(crate) fn log_mass_scan(&self, symbols: &[usize]) -> std::result::Result<f64, usize> {
        if symbols.is_empty() {
            return Ok(0.0);
        }
        let first = self.stationary[symbols[0]];
        if first == 0.0 {
            return Err(0);
        }
        let mut log_mass = first.ln();
        for i in 1..symbols.len() {
            let q = self.stochastic[symbols[i - 1]][symbols[i]];
            if q == 0.0 {
                return Err(i);
            }
            log_mass += q.ln();
        }
        Ok(log_mass)
    }

    /// Entropy rate `−Σ_i π_i Σ_j Q_ij ln Q_ij` (with `0 ln 0 = 0`),
    /// accumulated row by row.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (i, row) in self.stochastic.iter().enumerate() {
            let pi = self.stationary[i];
            if pi == 0.0 {
                continue;
            }
            let mut row_term = 0.0;
            for &q in row {
                if q > 0.0 {
                    row_term += q * q.ln();
                }
            }
            h -= pi * row_term;
        }
        h
    }

    /// The integral `∫ φ dμ = Σ_w μ(C_w) φ(w)` over words `w` of length
    /// `range(φ)`, summing only words of positive mass (so "don't care"
    /// table entries on zero-mass words are never read).
    pub fn integral(&self, phi: &LocallyConstantPotential) -> Result<f64> {
        if phi.alphabet_size() != self.alphabet_size() {
            return Err(Error::DimensionMismatch(format!(
                "potential is over {} symbols, measure over {}",
                phi.alphabet_size(),
                self.alphabet_size()
            )));
        }
        let r = phi.range();
        let mut acc = 0.0;
        let mut word = Vec::with_capacity(r);
        self.integral_rec(phi, r, 1.0, &mut word, &mut acc);
        Ok(acc)
    }

    fn integral_rec(
        &self,
        phi: &LocallyConstantPotential,
        r: usize,
        mass: f64,
        word: &mut Vec<usize>,
        acc: &mut f64,
    ) {
        if word.len() == r {
            *acc += mass * phi.eval(word);
            return;
        }
        for s in 0..self.alphabet_size() {
            let factor = match word.last() {
                None => self.stationary[s],
                Some(&prev) => self.stochastic[prev][s],
            };
            if factor == 0.0 {
                continue;
            }
            word.push(s);
            self.integral_rec(phi, r, mass * factor, word, acc);
            word.pop();
        }
    }

    /// The time average `S_n φ(x) / n` along a sampled prefix. The point must
    /// lie in the measure's support.
    pub fn birkhoff_average(
        &self,
        phi: &LocallyConstantPotential,
        x: &PointPrefix,
        n: usize,
    ) -> Result<f64> {
        let needed = n + phi.range().saturating_sub(1);
        let scan_len = needed.min(x.capacity());
        if let Err(position) = self.log_mass_scan(&x.symbols()[..scan_len]) {
            return Err(Error::OutsideSupport { position });
        }
        Ok(x.birkhoff_sum(phi, n)? / n as f64)
    }

    /// Largest `|ln Q_ij|` over supported transitions.
    pub fn max_abs_log_stochastic(&self) -> f64 {
        self.stochastic
            .iter()
            .flatten()
            .filter(|&&q| q > 0.0)
            .map(|q| q.ln().abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|ln π_i|` over symbols of positive stationary mass.
    pub fn max_abs_log_stationary(&self) -> f64 {
        self.stationary
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p.ln().abs())
            .fold(0.0, f64::max)
    }

    /// Draws `count` independent point prefixes of length `capacity`,
    /// distributed according to the measure.
    ///
    /// Reproducibility contract: point `i` is generated by a dedicated
    /// `ChaCha8` generator seeded with `seed` on stream `i`, so batches are
    /// identical across runs, thread counts, and platforms, and grow
    /// consistently (the first `count` points of a larger batch coincide
    /// with the smaller batch).
    pub fn sample(&self, count: usize, capacity: usize, seed: u64) -> Result<SampleBatch> {
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        let points: Vec<PointPrefix> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                self.draw(capacity, &mut rng)
            })
            .collect();
        Ok(SampleBatch {
            points,
            seed,
            measure_id: self.id.clone(),
        })
    }

    fn draw(&self, capacity: usize, rng: &mut ChaCha8Rng) -> PointPrefix {
        let m = self.alphabet_size();
        let mut symbols: Vec<usize> = Vec::with_capacity(capacity);
        for i in 0..capacity {
            let weights: &[f64] = if i == 0 {
                &self.stationary
            } else {
                self.stochastic[symbols[i - 1]].as_slice()
            };
            let u: f64 = rng.random();
            let mut cumulative = 0.0;
            let mut chosen = None;
            for (s, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                cumulative += w;
                chosen = Some(s);
                if u < cumulative {
                    break;
                }
            }
            // weights sum to 1 up to rounding; the last positive-weight
            // symbol absorbs the residual tail
            symbols.push(chosen.expect("stochastic rows have a positive entry"));
        }
        PointPrefix::from_sampled(m, symbols)
    }
}

/// A reproducible batch of sampled point prefixes, tagged with the seed and
/// the fingerprint of the measure that produced it.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    points: Vec<PointPrefix>,
    seed: u64,
    measure_id: String,
}

impl SampleBatch {
    pub fn points(&self) -> &[PointPrefix] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn measure_id(&self) -> &str {
        &self.measure_id
    }
}

fn validate_stochastic(sft: &SubshiftOfFiniteType, q: &[Vec<f64>]) -> Result<()> {
    let m = sft.alphabet_size();
    if q.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "stochastic matrix has {} rows, alphabet has {m} symbols",
            q.len()
        )));
    }
    for (i, row) in q.iter().enumerate() {
        if row.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has length {}, expected {m}",
                row.len()
            )));
        }
        let mut sum = 0.0;
        for (j, &e) in row.iter().enumerate() {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::NotStochastic(format!(
                    "entry ({i}, {j}) is {e}; entries must be finite and nonnegative"
                )));
            }
            if e > 0.0 && !sft.allows(i, j) {
                return Err(Error::SupportViolation { from: i, to: j });
            }
            sum += e;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::NotStochastic(format!(
                "row {i} sums to {sum}, which differs from 1 by more than {ROW_SUM_TOL:.0e}"
            )));
        }
    }
    Ok(())
}

/// Rejects matrices whose long-run behaviour is supported on finitely many
/// points: if every closed communicating class of the support digraph is
/// deterministic (each of its states has exactly one outgoing transition
/// within the class), the chain eventually locks onto a periodic orbit and
/// the stationary measure is atomic.
fn reject_atomic(q: &[Vec<f64>]) -> Result<()> {
    let m = q.len();
    let adj: Vec<Vec<bool>> = q
        .iter()
        .map(|row| row.iter().map(|&e| e > 0.0).collect())
        .collect();
    let classes = strongly_connected_components(&adj);
    let mut class_of = vec![usize::MAX; m];
    for (c, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = c;
        }
    }
    let mut any_closed_nondeterministic = false;
    let mut witness: Option<Vec<usize>> = None;
    for class in &classes {
        let closed = class
            .iter()
            .all(|&v| (0..m).all(|w| !adj[v][w] || class_of[w] == class_of[v]));
        if !closed {
            continue;
        }
        let deterministic = class
            .iter()
            .all(|&v| adj[v].iter().filter(|&&e| e).count() == 1);
        if deterministic {
            witness.get_or_insert_with(|| class.clone());
        } else {
            any_closed_nondeterministic = true;
        }
    }
    if !any_closed_nondeterministic {
        let class = witness.expect("a finite digraph has a closed class");
        return Err(Error::Atomic(format!(
            "the chain locks onto the periodic orbit through states {class:?}; \
             the stationary measure is a finite set of atoms"
        )));
    }
    Ok(())
}

/// Infinity norm of `πQ − π`.
pub(crate) fn stationarity_defect(q: &[Vec<f64>], pi: &[f64]) -> f64 {
    let m = q.len();
    let mut defect: f64 = 0.0;
    for j in 0..m {
        let image: f64 = (0..m).map(|i| pi[i] * q[i][j]).sum();
        defect = defect.max((image - pi[j]).abs());
    }
    defect
}

/// The stationary distribution of a row-stochastic matrix with a unique
/// closed communicating class. A matrix whose support digraph is not
/// strongly connected is rejected with the list of communicating classes
/// ([`Error::Reducible`]): on such chains the stationary distribution is
/// either non-unique or supported on a proper subsystem, and silently
/// picking one would misattribute every downstream quantity.
pub fn stationary_vector(q: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = q.len();
    if m == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    for (i, row) in q.iter().enumerate() {
        if row.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has length {}, expected {m}",
                row.len()
            )));
        }
        let mut sum = 0.0;
        for &e in row {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::NotStochastic(format!(
                    "row {i} contains {e}; entries must be finite and nonnegative"
                )));
            }
            sum += e;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::NotStochastic(format!(
                "row {i} sums to {sum}, which differs from 1 by more than {ROW_SUM_TOL:.0e}"
            )));
        }
    }
    let adj: Vec<Vec<bool>> = q
        .iter()
        .map(|row| row.iter().map(|&e| e > 0.0).collect())
        .collect();
    let classes = strongly_connected_components(&adj);
    if classes.len() != 1 {
        return Err(Error::Reducible {
            classes: format_classes(&classes),
        });
    }
    // Solve π(Q − I) = 0 with Σπ = 1: transpose to (Qᵀ − I)πᵀ = 0 and
    // replace the last (redundant) equation by the normalization.
    let mut a = vec![vec![0.0f64; m]; m];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = q[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[m - 1].fill(1.0);
    let mut b = vec![0.0f64; m];
    b[m - 1] = 1.0;
    let mut pi = solve_dense(a, b)?;
    for p in pi.iter_mut() {
        if *p < 0.0 {
            if *p < -1e-9 {
                return Err(Error::Numerical(format!(
                    "stationary solve produced a negative probability {p}"
                )));
            }
            *p = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::Numerical(
            "stationary solve produced a non-normalizable vector".into(),
        ));
    }
    for p in pi.iter_mut() {
        *p /= total;
    }
    Ok(pi)
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)] // row `col` is read while row `row` is written
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-300 {
            return Err(Error::Numerical(
                "singular linear system in stationary solve".into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..m {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for j in col..m {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; m];
    for row in (0..m).rev() {
        let mut acc = b[row];
        for j in row + 1..m {
            acc -= a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

fn measure_id(q: &[Vec<f64>], pi: &[f64]) -> String {
    let mut hasher = DefaultHasher::new();
    q.len().hash(&mut hasher);
    for row in q {
        for &e in row {
            e.to_bits().hash(&mut hasher);
        }
    }
    for &p in pi {
        p.to_bits().hash(&mut hasher);
    }
    format!("markov-{}-{:016x}", q.len(), hasher.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full2() -> SubshiftOfFiniteType {
        SubshiftOfFiniteType::full_shift(2).unwrap()
    }

    fn golden_mean() -> SubshiftOfFiniteType {
        SubshiftOfFiniteType::new(vec![vec![1, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn bernoulli_cylinder_masses_are_products() {
        let mu = MarkovMeasure::bernoulli(&full2(), vec![0.25, 0.75]).unwrap();
        let w = Word::new(vec![1, 0, 1]);
        let mass = mu.cylinder_measure(&w).unwrap();
        assert!((mass - 0.75 * 0.25 * 0.75).abs() < 1e-15);
        assert_eq!(mu.cylinder_measure(&Word::empty()).unwrap(), 1.0);
    }

    #[test]
    fn log_mass_survives_where_plain_mass_underflows() {
        let mu = MarkovMeasure::bernoulli(&full2(), vec![0.1, 0.9]).unwrap();
        let w = Word::new(vec![0; 500]);
        let log_mass = mu.log_cylinder_measure(&w).unwrap().unwrap();
        assert!((log_mass - 500.0 * (0.1f64).ln()).abs() < 1e-9);
        assert_eq!(
            mu.cylinder_measure(&w).unwrap(),
            0.0,
            "the plain mass underflows to zero at this length"
        );
    }

    #[test]
    fn zero_mass_cylinders_report_none() {
        let sft = golden_mean();
        let q = vec![vec![0.5, 0.5], vec![1.0, 0.0]];
        let mu = MarkovMeasure::new(&sft, q).unwrap();
        let dead = Word::new(vec![1, 1]);
        assert_eq!(mu.log_cylinder_measure(&dead).unwrap(), None);
        assert_eq!(mu.cylinder_measure(&dead).unwrap(), 0.0);
    }

    #[test]
    fn markov_stationary_distribution_solves_pi_q_eq_pi() {
        let sft = golden_mean();
        let q = vec![vec![0.7, 0.3], vec![1.0, 0.0]];
        let mu = MarkovMeasure::new(&sft, q.clone()).unwrap();
        let pi = mu.stationary();
        // closed form: π = (1/(1+0.3), 0.3/(1+0.3))
        assert!((pi[0] - 1.0 / 1.3).abs() < 1e-12);
        assert!((pi[1] - 0.3 / 1.3).abs() < 1e-12);
        assert!(stationarity_defect(&q, pi) <= STATIONARY_TOL);
    }

    #[test]
    fn support_violations_are_rejected() {
        let sft = golden_mean();
        // positive weight on the forbidden transition 1 -> 1
        let q = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let err = MarkovMeasure::new(&sft, q).unwrap_err();
        assert!(matches!(err, Error::SupportViolation { from: 1, to: 1 }));
    }

    #[test]
    fn bad_rows_are_rejected() {
        let sft = full2();
        let err = MarkovMeasure::new(&sft, vec![vec![0.5, 0.6], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic(_)));
        let err = MarkovMeasure::new(&sft, vec![vec![-0.1, 1.1], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic(_)));
    }

    #[test]
    fn deterministic_chains_are_atomic() {
        // Bernoulli(1, 0): every trajectory is the fixed point 000…
        let err = MarkovMeasure::bernoulli(&full2(), vec![1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Atomic(_)));
        // the period-2 rotation measure is two atoms
        let flip = SubshiftOfFiniteType::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let err = MarkovMeasure::new(&flip, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::Atomic(_)));
    }

    #[test]
    fn transient_states_feeding_a_deterministic_class_are_still_atomic() {
        // from state 0: fair branch; but both closed classes… here the only
        // closed class is {1} (absorbing), which is deterministic.
        let sft = SubshiftOfFiniteType::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let err = MarkovMeasure::new(&sft, vec![vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Atomic(_)));
    }

    #[test]
    fn stationary_vector_rejects_reducible_support() {
        // identity matrix: two closed classes, no unique stationary law
        let q = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let err = stationary_vector(&q).unwrap_err();
        match err {
            Error::Reducible { classes } => {
                assert_eq!(classes, "{0}, {1}");
            }
            other => panic!("expected Reducible, got {other:?}"),
        }
    }

    #[test]
    fn entropy_of_bernoulli_is_shannon() {
        let mu = MarkovMeasure::bernoulli(&full2(), vec![0.5, 0.5]).unwrap();
        assert!((mu.entropy() - (2.0f64).ln()).abs() < 1e-15);
        let mu = MarkovMeasure::bernoulli(&full2(), vec![0.25, 0.75]).unwrap();
        let expected = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((mu.entropy() - expected).abs() < 1e-15);
    }

    #[test]
    fn integral_weights_words_by_mass() {
        let mu = MarkovMeasure::bernoulli(&full2(), vec![0.25, 0.75]).unwrap();
        let phi =
            LocallyConstantPotential::from_fn(&full2(), 1, |w| if w[0] == 1 { 1.0 } else { 0.0 })
                .unwrap();
        assert!((mu.integral(&phi).unwrap() - 0.75).abs() < 1e-15);

        // range 2: φ = 1 on (1, 1); ∫φ dμ = μ(C_{11}) = 0.75²
        let phi2 =
            LocallyConstantPotential::from_fn(&full2(), 2, |w| if w == [1, 1] { 1.0 } else { 0.0 })
                .unwrap();
        assert!((mu.integral(&phi2).unwrap() - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn integral_ignores_table_entries_off_the_support() {
        let sft = golden_mean();
        let q = vec![vec![0.5, 0.5], vec![1.0, 0.0]];
        let mu = MarkovMeasure::new(&sft, q).unwrap();
        // NaN on the dead word (1, 1) must not reach the sum
        let phi = LocallyConstantPotential::new(&sft, 2, vec![1.0, 2.0, 4.0, f64::NAN]).unwrap();
        let pi = mu.stationary();
        let expected = pi[0] * 0.5 * 1.0 + pi[0] * 0.5 * 2.0 + pi[1] * 1.0 * 4.0;
        let got = mu.integral(&phi).unwrap();
        assert!(got.is_finite(), "NaN leaked into the integral");
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_deterministic_and_stream_separated() {
        let mu = MarkovMeasure::bernoulli(&full2(), vec![0.3, 0.7]).unwrap();
        let a = mu.sample(8, 64, 42).unwrap();
        let b = mu.sample(8, 64, 42).unwrap();
        assert_eq!(a.points(), b.points(), "same seed must reproduce the batch");
        let c = mu.sample(4, 64, 42).unwrap();
        assert_eq!(
            &a.points()[..4],
            c.points(),
            "a prefix of a larger batch must match the smaller batch"
        );
        let d = mu.sample(8, 64, 43).unwrap();
        assert_ne!(a.points(), d.points(), "different seeds must differ");
    }

    #[test]
    fn sampled_points_respect_the_support() {
        let sft = golden_mean();
        let q = vec![vec![0.4, 0.6], vec![1.0, 0.0]];
        let mu = MarkovMeasure::new(&sft, q).unwrap();
        let batch = mu.sample(16, 200, 7).unwrap();
        for x in batch.points() {
            assert!(
                sft.is_admissible(x.word()).unwrap(),
                "sampler produced a word leaving the subshift"
            );
            assert!(
                !x.symbols().windows(2).any(|p| p == [1, 1]),
                "sampler used a zero-probability transition"
            );
        }
    }

    #[test]
    fn measure_ids_distinguish_parameters() {
        let a = MarkovMeasure::bernoulli(&full2(), vec![0.3, 0.7]).unwrap();
        let b = MarkovMeasure::bernoulli(&full2(), vec![0.7, 0.3]).unwrap();
        assert_ne!(a.id(), b.id());
        let a2 = MarkovMeasure::bernoulli(&full2(), vec![0.3, 0.7]).unwrap();
        assert_eq!(a.id(), a2.id());
    }

    #[test]
    fn birkhoff_average_requires_support() {
        let sft = golden_mean();
        let q = vec![vec![0.5, 0.5], vec![1.0, 0.0]];
        let mu = MarkovMeasure::new(&sft, q).unwrap();
        let phi = LocallyConstantPotential::constant(&sft, 1.0).unwrap();
        let x = PointPrefix::new(&sft, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(mu.birkhoff_average(&phi, &x, 4).unwrap(), 1.0);

        // a word admissible for the shift but carrying zero measure
        let full = full2();
        let q = vec![vec![0.0, 1.0], vec![0.5, 0.5]];
        let mu = MarkovMeasure::new(&full, q).unwrap();
        let phi = LocallyConstantPotential::constant(&full, 1.0).unwrap();
        let y = PointPrefix::new(&full, vec![0, 0, 1, 1]).unwrap();
        assert!(matches!(
            mu.birkhoff_average(&phi, &y, 4),
            Err(Error::OutsideSupport { position: 1 })
        ));
    }
}
