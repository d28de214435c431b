//! Locally constant potentials: real-valued functions on the shift space
//! that depend only on the first `r` coordinates.

use crate::error::{Error, Result};
use crate::sft::SubshiftOfFiniteType;

/// Upper bound on the lookup table size (`m^r` entries).
const MAX_TABLE: usize = 1 << 24;

/// A function `φ(x) = table[x_0, …, x_{r−1}]` depending on the first `r`
/// coordinates only, stored as a dense row-major table over all `m^r` tuples.
///
/// Entries indexed by words that are not admissible for the shift the
/// potential was built against are never read by this crate's algorithms, so
/// they may be arbitrary (even NaN) to mark "don't care" slots. Entries on
/// admissible words must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LocallyConstantPotential {
    alphabet_size: usize,
    range: usize,
    table: Vec<f64>,
    max_abs: f64,
}

impl LocallyConstantPotential {
    /// Builds a potential of the given range from its dense table, indexed
    /// row-major: the word `(s_0, …, s_{r−1})` maps to
    /// `s_0·m^{r−1} + s_1·m^{r−2} + … + s_{r−1}`.
    pub fn new(sft: &SubshiftOfFiniteType, range: usize, table: Vec<f64>) -> Result<Self> {
        if range == 0 {
            return Err(Error::InvalidPotential("range must be >= 1".into()));
        }
        let m = sft.alphabet_size();
        let expected = (m as u128).checked_pow(range as u32);
        let expected = match expected {
            Some(e) if e <= MAX_TABLE as u128 => e as usize,
            _ => {
                return Err(Error::InvalidPotential(format!(
                    "table for alphabet {m} and range {range} exceeds the {MAX_TABLE}-entry cap"
                )))
            }
        };
        if table.len() != expected {
            return Err(Error::InvalidPotential(format!(
                "table has {} entries; alphabet {m} with range {range} needs {expected}",
                table.len()
            )));
        }
        let mut max_abs: f64 = 0.0;
        let mut any_admissible = false;
        let mut window = vec![0usize; range];
        'words: loop {
            let admissible = window.windows(2).all(|p| sft.allows(p[0], p[1]));
            if admissible {
                any_admissible = true;
                let idx = Self::index_of(m, &window);
                let v = table[idx];
                if !v.is_finite() {
                    return Err(Error::InvalidPotential(format!(
                        "non-finite value {v} on admissible word {window:?}"
                    )));
                }
                max_abs = max_abs.max(v.abs());
            }
            // lexicographic increment
            for pos in (0..range).rev() {
                window[pos] += 1;
                if window[pos] < m {
                    continue 'words;
                }
                window[pos] = 0;
            }
            break;
        }
        if !any_admissible {
            return Err(Error::InvalidPotential(
                "no admissible word of the potential's range exists".into(),
            ));
        }
        Ok(LocallyConstantPotential {
            alphabet_size: m,
            range,
            table,
            max_abs,
        })
    }

    /// The constant potential `φ ≡ value` (range 1).
    pub fn constant(sft: &SubshiftOfFiniteType, value: f64) -> Result<Self> {
        Self::new(sft, 1, vec![value; sft.alphabet_size()])
    }

    /// Builds the table by evaluating `f` on every length-`range` tuple
    /// (admissible or not; inadmissible values are ignored).
    pub fn from_fn(
        sft: &SubshiftOfFiniteType,
        range: usize,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        if range == 0 {
            return Err(Error::InvalidPotential("range must be >= 1".into()));
        }
        let m = sft.alphabet_size();
        let size = (m as u128).checked_pow(range as u32);
        let size = match size {
            Some(e) if e <= MAX_TABLE as u128 => e as usize,
            _ => {
                return Err(Error::InvalidPotential(format!(
                    "table for alphabet {m} and range {range} exceeds the {MAX_TABLE}-entry cap"
                )))
            }
        };
        let mut table = Vec::with_capacity(size);
        let mut window = vec![0usize; range];
        loop {
            table.push(f(&window));
            let mut done = true;
            for pos in (0..range).rev() {
                window[pos] += 1;
                if window[pos] < m {
                    done = false;
                    break;
                }
                window[pos] = 0;
            }
            if done {
                break;
            }
        }
        Self::new(sft, range, table)
    }

    #[inline]
    fn index_of(m: usize, window: &[usize]) -> usize {
        let mut idx = 0usize;
        for &s in window {
            idx = idx * m + s;
        }
        idx
    }

    /// Evaluates the potential on a window of exactly `range` symbols.
    ///
    /// Contract: callers pass windows of validated, in-range symbols (all
    /// public entry points validate before reaching this). Violations are
    /// caught by debug assertions and are out-of-contract in release builds.
    #[inline]
    pub fn eval(&self, window: &[usize]) -> f64 {
        debug_assert_eq!(
            window.len(),
            self.range,
            "window length must equal the range"
        );
        debug_assert!(
            window.iter().all(|&s| s < self.alphabet_size),
            "window symbols must be in range"
        );
        self.table[Self::index_of(self.alphabet_size, window)]
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Maximum of `|φ|` over admissible words of length `range`.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}
