//! Topological pressure and equilibrium measures via weighted transfer
//! matrices, plus a brute-force partition-function oracle and the block
//! recoding that reduces higher-range potentials to range 2.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MarkovMeasure;
use crate::potential::LocallyConstantPotential;
use crate::sft::{format_classes, SubshiftOfFiniteType, Word};

/// Convergence target for the power iteration: `‖Lv − λv‖∞ / λ`.
pub const PERRON_RESIDUAL_TOL: f64 = 1e-13;
/// Iteration cap before reporting [`Error::NoConvergence`].
pub const PERRON_MAX_ITERATIONS: usize = 100_000;
/// Cap on admissible words enumerated by the partition-function oracle.
pub const ORACLE_ENUMERATION_BUDGET: u128 = 1 << 22;
/// Cap on the alphabet produced by block recoding.
pub const MAX_RECODED_ALPHABET: u128 = 4096;

/// The outcome of a pressure computation. `value = ln(perron_eigenvalue)`.
///
/// The eigenvectors are max-normalized and indexed by the alphabet of the
/// system the transfer matrix was built on; for potentials of range ≥ 3 that
/// is the block alphabet of the recoded presentation, whose size is the
/// length of the vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PressureReport {
    /// Topological pressure (natural log of the spectral radius).
    pub value: f64,
    /// Spectral radius of the weighted transfer matrix.
    pub perron_eigenvalue: f64,
    /// Right Perron eigenvector, max-normalized.
    pub right_eigvec: Vec<f64>,
    /// Left Perron eigenvector, max-normalized.
    pub left_eigvec: Vec<f64>,
    /// Power-iteration rounds used (max over the right and left runs).
    pub iterations: usize,
    /// Final residual `‖Lv − λv‖∞ / λ` (max over the right and left runs).
    pub residual: f64,
}

/// The weighted transfer matrix of a potential of range ≤ 2:
/// `L[i][j] = A[i][j] · exp(φ(i))` for range 1 (weight on the source symbol)
/// and `L[i][j] = A[i][j] · exp(φ(i, j))` for range 2.
pub fn transfer_matrix(
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
) -> Result<Vec<Vec<f64>>> {
    check_dims(sft, phi)?;
    let m = sft.alphabet_size();
    let r = phi.range();
    if r > 2 {
        return Err(Error::RangeTooLarge { range: r, max: 2 });
    }
    let mut l = vec![vec![0.0f64; m]; m];
    for (i, row) in l.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if !sft.allows(i, j) {
                continue;
            }
            let weight = match r {
                1 => phi.eval(&[i]).exp(),
                _ => phi.eval(&[i, j]).exp(),
            };
            if !weight.is_finite() {
                return Err(Error::InvalidPotential(format!(
                    "exp(φ) overflows on the transition ({i}, {j})"
                )));
            }
            *cell = weight;
        }
    }
    Ok(l)
}

/// Topological pressure of `(shift, φ)`: the natural log of the Perron root
/// of the weighted transfer matrix. Potentials of range ≥ 3 are reduced to
/// range 2 by block recoding first, which leaves the pressure unchanged.
///
/// Requires an irreducible and primitive transition structure; reducible
/// systems report their communicating classes instead of a value.
pub fn topological_pressure(
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
) -> Result<PressureReport> {
    check_dims(sft, phi)?;
    if phi.range() > 2 {
        let recoding = block_recode(sft, phi)?;
        return topological_pressure(recoding.sft(), recoding.potential());
    }
    check_spectral_preconditions(sft)?;
    let l = transfer_matrix(sft, phi)?;
    let right = power_iterate(&l)?;
    let left = power_iterate(&transpose(&l))?;
    let rel_gap = (right.eigenvalue - left.eigenvalue).abs() / right.eigenvalue;
    if rel_gap > 1e-9 {
        return Err(Error::Numerical(format!(
            "left and right spectral radii disagree by a relative {rel_gap:.3e}"
        )));
    }
    Ok(PressureReport {
        value: right.eigenvalue.ln(),
        perron_eigenvalue: right.eigenvalue,
        right_eigvec: right.vector,
        left_eigvec: left.vector,
        iterations: right.iterations.max(left.iterations),
        residual: right.residual.max(left.residual),
    })
}

/// The equilibrium measure of `(shift, φ)` for potentials of range ≤ 2,
/// together with the pressure report it was derived from. With Perron data
/// `(λ, h, ν)` the measure is the Markov chain
/// `Q[i][j] = L[i][j] h[j] / (λ h[i])`, `π_i ∝ ν_i h_i`; it satisfies
/// `entropy + ∫φ dμ = pressure`, which is re-verified before returning.
///
/// For range ≥ 3, apply [`block_recode`] and call this on the recoded
/// presentation; the resulting measure lives on the block shift.
pub fn equilibrium_measure(
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
) -> Result<(MarkovMeasure, PressureReport)> {
    check_dims(sft, phi)?;
    if phi.range() > 2 {
        return Err(Error::RangeTooLarge {
            range: phi.range(),
            max: 2,
        });
    }
    let report = topological_pressure(sft, phi)?;
    let l = transfer_matrix(sft, phi)?;
    let m = sft.alphabet_size();
    let lambda = report.perron_eigenvalue;
    let h = &report.right_eigvec;
    let nu = &report.left_eigvec;
    let mut q = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in 0..m {
            q[i][j] = l[i][j] * h[j] / (lambda * h[i]);
        }
        // exact row-stochasticity: the rows sum to 1 up to the eigenvector
        // residual, and renormalizing removes that rounding
        let row_sum: f64 = q[i].iter().sum();
        if !(row_sum.is_finite() && row_sum > 0.0) {
            return Err(Error::Numerical(format!(
                "equilibrium row {i} sums to {row_sum}"
            )));
        }
        for e in q[i].iter_mut() {
            *e /= row_sum;
        }
    }
    let weighted: Vec<f64> = (0..m).map(|i| nu[i] * h[i]).collect();
    let total: f64 = weighted.iter().sum();
    let pi: Vec<f64> = weighted.iter().map(|w| w / total).collect();
    let mu = MarkovMeasure::from_parts(sft, q, pi)?;
    let achieved = mu.entropy() + mu.integral(phi)?;
    let defect = (achieved - report.value).abs();
    if defect > 1e-10 {
        return Err(Error::InvariantViolated(format!(
            "equilibrium construction misses the pressure by {defect:.3e}"
        )));
    }
    Ok((mu, report))
}

/// Brute-force partition function `Z_n = Σ_w exp(S(w))`, summing over all
/// admissible words `w` of length `n`, where `S(w)` adds `φ` over the
/// `n − r + 1` windows fully contained in `w` (an empty sum when `n < r`).
/// `(1/n)·ln Z_n` approaches the pressure at rate `O(1/n)`.
///
/// Enumeration is capped by [`ORACLE_ENUMERATION_BUDGET`]; this is a test
/// oracle, not a production path.
pub fn partition_function(
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
    n: usize,
) -> Result<f64> {
    check_dims(sft, phi)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "partition function needs n >= 1".into(),
        ));
    }
    let count = sft.count_admissible_words(n);
    if count > ORACLE_ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            words: count,
            budget: ORACLE_ENUMERATION_BUDGET,
        });
    }
    let r = phi.range();
    // Kahan-compensated accumulation: the sum has up to ~4 million terms and
    // downstream tests compare logs of ratios of these sums at 1e-12.
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    // iterative DFS over admissible words with per-depth symbol cursors and
    // running window sums (recursion depth would equal n, which is unbounded
    // on a one-symbol alphabet)
    let m = sft.alphabet_size();
    let mut word: Vec<usize> = Vec::with_capacity(n);
    let mut weights: Vec<f64> = Vec::with_capacity(n); // running S after each push
    let mut next_symbol: Vec<usize> = vec![0]; // per-depth cursor
    while !next_symbol.is_empty() {
        if word.len() == n {
            let term = weights.last().copied().unwrap_or(0.0).exp();
            let y = term - compensation;
            let t = sum + y;
            compensation = (t - sum) - y;
            sum = t;
            next_symbol.pop();
            word.pop();
            weights.pop();
            continue;
        }
        let top = next_symbol.len() - 1;
        let mut advanced = false;
        while next_symbol[top] < m {
            let s = next_symbol[top];
            next_symbol[top] += 1;
            if let Some(&prev) = word.last() {
                if !sft.allows(prev, s) {
                    continue;
                }
            }
            word.push(s);
            let prev_weight = weights.last().copied().unwrap_or(0.0);
            let here = if word.len() >= r {
                prev_weight + phi.eval(&word[word.len() - r..])
            } else {
                prev_weight
            };
            weights.push(here);
            next_symbol.push(0);
            advanced = true;
            break;
        }
        if !advanced {
            next_symbol.pop();
            word.pop();
            weights.pop();
        }
    }
    Ok(sum)
}

struct PerronOutcome {
    eigenvalue: f64,
    vector: Vec<f64>,
    iterations: usize,
    residual: f64,
}

/// Power iteration with max-norm normalization on a nonnegative matrix whose
/// support is primitive. Starts from the all-ones vector; converges when
/// `‖Lv − λv‖∞ / λ ≤` [`PERRON_RESIDUAL_TOL`].
fn power_iterate(l: &[Vec<f64>]) -> Result<PerronOutcome> {
    let m = l.len();
    let mut v = vec![1.0f64; m];
    let mut last_residual = f64::INFINITY;
    for iteration in 1..=PERRON_MAX_ITERATIONS {
        let w = mat_vec(l, &v);
        let lambda = w.iter().fold(0.0f64, |a, &x| a.max(x));
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Numerical(format!(
                "power iteration produced spectral estimate {lambda}"
            )));
        }
        let mut residual = 0.0f64;
        for i in 0..m {
            residual = residual.max((w[i] - lambda * v[i]).abs());
        }
        residual /= lambda;
        for i in 0..m {
            v[i] = w[i] / lambda;
        }
        if residual <= PERRON_RESIDUAL_TOL {
            if v.iter().any(|&x| x <= 0.0) {
                return Err(Error::Numerical(
                    "Perron vector has a non-positive entry at convergence".into(),
                ));
            }
            return Ok(PerronOutcome {
                eigenvalue: lambda,
                vector: v,
                iterations: iteration,
                residual,
            });
        }
        last_residual = residual;
    }
    Err(Error::NoConvergence {
        iterations: PERRON_MAX_ITERATIONS,
        residual: last_residual,
    })
}

fn mat_vec(l: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    l.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn transpose(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = l.len();
    let mut t = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in 0..m {
            t[j][i] = l[i][j];
        }
    }
    t
}

fn check_dims(sft: &SubshiftOfFiniteType, phi: &LocallyConstantPotential) -> Result<()> {
    if phi.alphabet_size() != sft.alphabet_size() {
        return Err(Error::DimensionMismatch(format!(
            "potential is over {} symbols, shift over {}",
            phi.alphabet_size(),
            sft.alphabet_size()
        )));
    }
    Ok(())
}

fn check_spectral_preconditions(sft: &SubshiftOfFiniteType) -> Result<()> {
    if !sft.is_irreducible() {
        return Err(Error::Reducible {
            classes: format_classes(&sft.communicating_classes()),
        });
    }
    if !sft.is_primitive() {
        return Err(Error::NotPrimitive(
            "the transition digraph is periodic; the power iteration has no limit".into(),
        ));
    }
    Ok(())
}

/// A presentation of `(shift, φ)` with `range(φ) ≥ 3` as an isomorphic shift
/// on blocks: symbols are the admissible words of length `range − 1`, a
/// block may follow another when they overlap in all but one coordinate, and
/// the induced potential has range 2, evaluating `φ` on the glued word.
/// Pressure and entropy are invariant under this recoding.
#[derive(Debug, Clone)]
pub struct BlockRecoding {
    original_alphabet: usize,
    block_len: usize,
    sft: SubshiftOfFiniteType,
    potential: LocallyConstantPotential,
    blocks: Vec<Vec<usize>>,
    block_index: BTreeMap<Vec<usize>, usize>,
}

/// Builds the block presentation of a potential of range ≥ 3 (the block
/// alphabet is capped at [`MAX_RECODED_ALPHABET`] symbols).
pub fn block_recode(
    sft: &SubshiftOfFiniteType,
    phi: &LocallyConstantPotential,
) -> Result<BlockRecoding> {
    check_dims(sft, phi)?;
    let r = phi.range();
    if r < 3 {
        return Err(Error::InvalidArgument(format!(
            "block recoding applies to range >= 3, got range {r}"
        )));
    }
    let block_len = r - 1;
    let blocks: Vec<Vec<usize>> = sft
        .admissible_words(block_len, MAX_RECODED_ALPHABET)?
        .into_iter()
        .map(|w| w.symbols().to_vec())
        .collect();
    let block_index: BTreeMap<Vec<usize>, usize> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.clone(), i))
        .collect();
    let n_blocks = blocks.len();
    let mut transition = vec![vec![0u8; n_blocks]; n_blocks];
    for (a, block_a) in blocks.iter().enumerate() {
        for (b, block_b) in blocks.iter().enumerate() {
            if block_a[1..] == block_b[..block_len - 1] {
                // the glued word a·b_last is admissible automatically: its
                // final pair equals the final pair of b
                debug_assert!(sft.allows(block_a[block_len - 1], block_b[block_len - 1]));
                transition[a][b] = 1;
            }
        }
    }
    let recoded_sft = SubshiftOfFiniteType::new(transition)?;
    let recoded_phi = LocallyConstantPotential::from_fn(&recoded_sft, 2, |pair| {
        let block_a = &blocks[pair[0]];
        let block_b = &blocks[pair[1]];
        if block_a[1..] == block_b[..block_len - 1] {
            let mut glued = Vec::with_capacity(r);
            glued.extend_from_slice(block_a);
            glued.push(block_b[block_len - 1]);
            phi.eval(&glued)
        } else {
            0.0 // dead entry, never read: the pair is not a transition
        }
    })?;
    Ok(BlockRecoding {
        original_alphabet: sft.alphabet_size(),
        block_len,
        sft: recoded_sft,
        potential: recoded_phi,
        blocks,
        block_index,
    })
}

impl BlockRecoding {
    /// The recoded shift on block symbols.
    pub fn sft(&self) -> &SubshiftOfFiniteType {
        &self.sft
    }

    /// The induced range-2 potential on block symbols.
    pub fn potential(&self) -> &LocallyConstantPotential {
        &self.potential
    }

    /// The block words, indexed by recoded symbol.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn original_alphabet(&self) -> usize {
        self.original_alphabet
    }

    /// Rewrites a word over the original alphabet (length ≥ `block_len`) as
    /// the word of its consecutive blocks; the result is shorter by
    /// `block_len − 1`. Windows that are not admissible blocks are reported
    /// by their starting position.
    pub fn encode_word(&self, w: &Word) -> Result<Word> {
        let symbols = w.symbols();
        if symbols.len() < self.block_len {
            return Err(Error::InvalidArgument(format!(
                "cannot block-encode a word of length {} with blocks of length {}",
                symbols.len(),
                self.block_len
            )));
        }
        for &s in symbols {
            if s >= self.original_alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet_size: self.original_alphabet,
                });
            }
        }
        let mut encoded = Vec::with_capacity(symbols.len() - self.block_len + 1);
        for (position, window) in symbols.windows(self.block_len).enumerate() {
            match self.block_index.get(window) {
                Some(&idx) => encoded.push(idx),
                None => return Err(Error::InadmissibleWord { position }),
            }
        }
        Ok(Word::new(encoded))
    }

    /// Inverse of [`Self::encode_word`]: the first block followed by the last
    /// symbol of each subsequent block. Consecutive blocks must overlap.
    pub fn decode_word(&self, w: &Word) -> Result<Word> {
        let symbols = w.symbols();
        if symbols.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot decode an empty block word".into(),
            ));
        }
        for &b in symbols {
            if b >= self.blocks.len() {
                return Err(Error::SymbolOutOfRange {
                    symbol: b,
                    alphabet_size: self.blocks.len(),
                });
            }
        }
        let mut decoded = self.blocks[symbols[0]].clone();
        for (position, pair) in symbols.windows(2).enumerate() {
            let block_a = &self.blocks[pair[0]];
            let block_b = &self.blocks[pair[1]];
            if block_a[1..] != block_b[..self.block_len - 1] {
                return Err(Error::InadmissibleWord { position });
            }
            decoded.push(block_b[self.block_len - 1]);
        }
        Ok(Word::new(decoded))
    }

    /// Mass that a measure on the block shift assigns to the cylinder of a
    /// word over the original alphabet. Words shorter than a block are
    /// handled by summing the stationary mass of all blocks extending them;
    /// words not admissible in the original shift get mass 0.
    pub fn original_cylinder_measure(&self, mu: &MarkovMeasure, w: &Word) -> Result<f64> {
        if mu.alphabet_size() != self.blocks.len() {
            return Err(Error::DimensionMismatch(format!(
                "measure is over {} symbols, block alphabet has {}",
                mu.alphabet_size(),
                self.blocks.len()
            )));
        }
        let symbols = w.symbols();
        for &s in symbols {
            if s >= self.original_alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet_size: self.original_alphabet,
                });
            }
        }
        if symbols.is_empty() {
            return Ok(1.0);
        }
        if symbols.len() < self.block_len {
            let mass = self
                .blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| b[..symbols.len()] == *symbols)
                .map(|(i, _)| mu.stationary()[i])
                .sum();
            return Ok(mass);
        }
        match self.encode_word(w) {
            Ok(encoded) => mu.cylinder_measure(&encoded),
            Err(Error::InadmissibleWord { .. }) => Ok(0.0),
            Err(other) => Err(other),
        }
    }
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

    fn indicator_of_one(sft: &SubshiftOfFiniteType) -> LocallyConstantPotential {
        LocallyConstantPotential::from_fn(sft, 1, |w| if w[0] == 1 { 1.0 } else { 0.0 }).unwrap()
    }

    const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

    #[test]
    fn zero_potential_pressure_is_log_word_growth() {
        for m in 1..=4 {
            let sft = SubshiftOfFiniteType::full_shift(m).unwrap();
            let phi = LocallyConstantPotential::constant(&sft, 0.0).unwrap();
            let report = topological_pressure(&sft, &phi).unwrap();
            assert!(
                (report.value - (m as f64).ln()).abs() < 1e-12,
                "full shift on {m} symbols must have pressure ln {m}"
            );
        }
        let golden = golden_mean();
        let phi = LocallyConstantPotential::constant(&golden, 0.0).unwrap();
        let report = topological_pressure(&golden, &phi).unwrap();
        assert!((report.value - GOLDEN_RATIO.ln()).abs() < 1e-12);
        assert!((report.perron_eigenvalue - GOLDEN_RATIO).abs() < 1e-12);
    }

    #[test]
    fn range_one_weights_sit_on_the_source_symbol() {
        let sft = full2();
        let phi = indicator_of_one(&sft);
        let l = transfer_matrix(&sft, &phi).unwrap();
        let e = std::f64::consts::E;
        assert_eq!(l[0], vec![1.0, 1.0]);
        assert!((l[1][0] - e).abs() < 1e-15);
        assert!((l[1][1] - e).abs() < 1e-15);
        let report = topological_pressure(&sft, &phi).unwrap();
        assert!((report.value - (1.0 + e).ln()).abs() < 1e-13);
    }

    #[test]
    fn stochastic_weights_have_zero_pressure() {
        // e^{φ(i,j)} = Q[i][j] for a stochastic Q makes L itself stochastic,
        // so the spectral radius is exactly 1
        let sft = golden_mean();
        let q = [[0.5f64, 0.5], [1.0, 0.0]];
        let phi = LocallyConstantPotential::from_fn(&sft, 2, |w| {
            let v = q[w[0]][w[1]];
            if v > 0.0 {
                v.ln()
            } else {
                f64::NAN // inadmissible or off-support: never evaluated
            }
        });
        // NaN lands only on (1,1), which the golden-mean shift forbids
        let phi = phi.unwrap();
        let report = topological_pressure(&sft, &phi).unwrap();
        assert!(report.value.abs() < 1e-13);
    }

    #[test]
    fn adding_a_constant_shifts_pressure_by_it() {
        let sft = golden_mean();
        let base = LocallyConstantPotential::from_fn(&sft, 2, |w| (w[0] as f64) - 0.3).unwrap();
        let shifted =
            LocallyConstantPotential::from_fn(&sft, 2, |w| (w[0] as f64) - 0.3 + 1.75).unwrap();
        let p0 = topological_pressure(&sft, &base).unwrap().value;
        let p1 = topological_pressure(&sft, &shifted).unwrap().value;
        assert!((p1 - (p0 + 1.75)).abs() < 1e-12);
    }

    #[test]
    fn reducible_systems_report_their_classes() {
        let bridge = SubshiftOfFiniteType::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let phi = LocallyConstantPotential::constant(&bridge, 0.0).unwrap();
        match topological_pressure(&bridge, &phi).unwrap_err() {
            Error::Reducible { classes } => assert_eq!(classes, "{0}, {1}"),
            other => panic!("expected Reducible, got {other:?}"),
        }
    }

    #[test]
    fn periodic_systems_are_rejected_as_non_primitive() {
        let flip = SubshiftOfFiniteType::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let phi = LocallyConstantPotential::constant(&flip, 0.0).unwrap();
        assert!(matches!(
            topological_pressure(&flip, &phi).unwrap_err(),
            Error::NotPrimitive(_)
        ));
    }

    #[test]
    fn near_defective_spectra_fail_loudly_instead_of_stalling() {
        // eigenvalue gap ~1e-8: the iteration cannot reach the residual
        // target within the cap and must say so
        let sft = full2();
        let eps = 1e-8f64;
        let phi = LocallyConstantPotential::from_fn(&sft, 2, |w| match (w[0], w[1]) {
            (0, 0) => eps.ln(),
            (1, 1) => (2.0 * eps).ln(),
            _ => 0.0,
        })
        .unwrap();
        assert!(matches!(
            topological_pressure(&sft, &phi).unwrap_err(),
            Error::NoConvergence {
                iterations: PERRON_MAX_ITERATIONS,
                ..
            }
        ));
    }

    #[test]
    fn single_symbol_pressure_is_the_potential_value() {
        let sft = SubshiftOfFiniteType::full_shift(1).unwrap();
        let phi = LocallyConstantPotential::constant(&sft, -0.7).unwrap();
        let report = topological_pressure(&sft, &phi).unwrap();
        assert!((report.value + 0.7).abs() < 1e-14);
    }

    #[test]
    fn partition_function_counts_words_under_zero_potential() {
        let golden = golden_mean();
        let phi = LocallyConstantPotential::constant(&golden, 0.0).unwrap();
        assert_eq!(partition_function(&golden, &phi, 5).unwrap(), 13.0);
        let full = full2();
        let phi = LocallyConstantPotential::constant(&full, 0.0).unwrap();
        assert_eq!(partition_function(&full, &phi, 10).unwrap(), 1024.0);
    }

    #[test]
    fn partition_function_matches_closed_forms() {
        let sft = full2();
        let e = std::f64::consts::E;
        // range 1: each coordinate contributes independently, Z_n = (1+e)^n
        let phi = indicator_of_one(&sft);
        for n in [1usize, 3, 7] {
            let z = partition_function(&sft, &phi, n).unwrap();
            let expected = (1.0 + e).powi(n as i32);
            assert!(
                (z - expected).abs() / expected < 1e-12,
                "Z_{n} = {z}, expected {expected}"
            );
        }
        // range 2, n = 2: one window per word
        let phi2 =
            LocallyConstantPotential::from_fn(&sft, 2, |w| if w[0] == w[1] { 1.0 } else { 0.0 })
                .unwrap();
        let z2 = partition_function(&sft, &phi2, 2).unwrap();
        assert!((z2 - (2.0 + 2.0 * e)).abs() < 1e-12);
        // n below the range: no window fits, so every word has weight 1
        assert_eq!(partition_function(&sft, &phi2, 1).unwrap(), 2.0);
    }

    #[test]
    fn partition_function_budget_is_enforced() {
        let sft = full2();
        let phi = LocallyConstantPotential::constant(&sft, 0.0).unwrap();
        assert!(matches!(
            partition_function(&sft, &phi, 23).unwrap_err(),
            Error::EnumerationBudget { .. }
        ));
    }

    #[test]
    fn equilibrium_of_source_indicator_is_bernoulli() {
        let sft = full2();
        let phi = indicator_of_one(&sft);
        let (mu, report) = equilibrium_measure(&sft, &phi).unwrap();
        let e = std::f64::consts::E;
        let p1 = e / (1.0 + e);
        for i in 0..2 {
            assert!((mu.stochastic()[i][0] - (1.0 - p1)).abs() < 1e-12);
            assert!((mu.stochastic()[i][1] - p1).abs() < 1e-12);
        }
        assert!((mu.stationary()[1] - p1).abs() < 1e-12);
        let achieved = mu.entropy() + mu.integral(&phi).unwrap();
        assert!((achieved - report.value).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_equilibrium_is_the_maximal_entropy_chain() {
        let sft = golden_mean();
        let phi = LocallyConstantPotential::constant(&sft, 0.0).unwrap();
        let (mu, report) = equilibrium_measure(&sft, &phi).unwrap();
        let g = GOLDEN_RATIO;
        let q = mu.stochastic();
        assert!((q[0][0] - 1.0 / g).abs() < 1e-12, "q00 = {}", q[0][0]);
        assert!((q[0][1] - 1.0 / (g * g)).abs() < 1e-12, "q01 = {}", q[0][1]);
        assert!((q[1][0] - 1.0).abs() < 1e-12);
        assert_eq!(q[1][1], 0.0);
        let pi = mu.stationary();
        let g2 = g * g;
        assert!((pi[0] - g2 / (1.0 + g2)).abs() < 1e-12);
        assert!((pi[1] - 1.0 / (1.0 + g2)).abs() < 1e-12);
        assert!((mu.entropy() - g.ln()).abs() < 1e-12);
        assert!((report.value - g.ln()).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_requires_range_at_most_two() {
        let sft = full2();
        let phi = LocallyConstantPotential::from_fn(&sft, 3, |w| w[0] as f64).unwrap();
        assert!(matches!(
            equilibrium_measure(&sft, &phi).unwrap_err(),
            Error::RangeTooLarge { range: 3, max: 2 }
        ));
    }

    #[test]
    fn block_recoding_preserves_pressure() {
        let sft = full2();
        // genuine range-3 dependence
        let phi = LocallyConstantPotential::from_fn(&sft, 3, |w| {
            0.3 * (w[0] as f64) - 0.7 * ((w[1] * w[2]) as f64)
        })
        .unwrap();
        let direct = topological_pressure(&sft, &phi).unwrap().value;
        // oracle comparison: (1/n) ln Z_n − P = O(1/n), with constant small
        // enough here that consecutive n bracket the limit behaviour
        for n in [12usize, 16] {
            let z = partition_function(&sft, &phi, n).unwrap();
            let estimate = z.ln() / n as f64;
            assert!(
                (estimate - direct).abs() < 2.5 / n as f64,
                "oracle at n = {n} gives {estimate}, spectral value {direct}"
            );
        }
    }

    #[test]
    fn block_recoding_structure_on_the_full_shift() {
        let sft = full2();
        let phi = LocallyConstantPotential::from_fn(&sft, 3, |w| (w[0] + w[1] + w[2]) as f64 * 0.1)
            .unwrap();
        let recoding = block_recode(&sft, &phi).unwrap();
        assert_eq!(recoding.blocks().len(), 4, "2² blocks of length 2");
        assert_eq!(recoding.sft().alphabet_size(), 4);
        let transitions: usize = recoding
            .sft()
            .transition()
            .iter()
            .flatten()
            .map(|&e| e as usize)
            .sum();
        assert_eq!(transitions, 8, "each block has exactly 2 successors");
        // encode/decode round trip
        let w = Word::new(vec![0, 1, 1, 0, 1]);
        let encoded = recoding.encode_word(&w).unwrap();
        assert_eq!(encoded.len(), 4);
        assert_eq!(recoding.decode_word(&encoded).unwrap(), w);
    }

    #[test]
    fn block_recoding_respects_forbidden_words() {
        let golden = golden_mean();
        let phi = LocallyConstantPotential::from_fn(&golden, 3, |w| {
            if w.windows(2).any(|p| p == [1, 1]) {
                f64::NAN // off the shift, never evaluated
            } else {
                (w[0] as f64) * 0.2
            }
        })
        .unwrap();
        let recoding = block_recode(&golden, &phi).unwrap();
        // admissible length-2 golden-mean words: 00, 01, 10
        assert_eq!(recoding.blocks(), &[vec![0, 0], vec![0, 1], vec![1, 0]]);
        let err = recoding.encode_word(&Word::new(vec![0, 1, 1])).unwrap_err();
        assert!(matches!(err, Error::InadmissibleWord { position: 1 }));
    }

    #[test]
    fn lifted_measure_masses_match_the_original_alphabet() {
        let sft = full2();
        let phi = LocallyConstantPotential::from_fn(&sft, 3, |w| {
            0.4 * (w[0] as f64) + 0.1 * ((w[1] + w[2]) as f64)
        })
        .unwrap();
        let recoding = block_recode(&sft, &phi).unwrap();
        let (mu, _) = equilibrium_measure(recoding.sft(), recoding.potential()).unwrap();
        // total mass over original symbols
        let m0 = recoding
            .original_cylinder_measure(&mu, &Word::new(vec![0]))
            .unwrap();
        let m1 = recoding
            .original_cylinder_measure(&mu, &Word::new(vec![1]))
            .unwrap();
        assert!((m0 + m1 - 1.0).abs() < 1e-12);
        // additivity: μ(C_w) = Σ_s μ(C_{w·s})
        let base = Word::new(vec![0, 1]);
        let mass = recoding.original_cylinder_measure(&mu, &base).unwrap();
        let split: f64 = (0..2)
            .map(|s| {
                let mut v = base.symbols().to_vec();
                v.push(s);
                recoding
                    .original_cylinder_measure(&mu, &Word::new(v))
                    .unwrap()
            })
            .sum();
        assert!((mass - split).abs() < 1e-12);
        assert_eq!(
            recoding
                .original_cylinder_measure(&mu, &Word::empty())
                .unwrap(),
            1.0
        );
    }
}
