//! One-sided subshifts of finite type: alphabets, transition matrices,
//! admissible words, and finite point prefixes.
//!
//! Sequence space carries the metric `d(u, v) = 2^(-min{i : u_i != v_i})`.
//! Two points are within `2^(-k)` of each other exactly when they agree on
//! coordinates `0..=k`, so the set of points that stay within `2^(-k)` of `x`
//! for `n` consecutive shifts is the cylinder on the first `n + k`
//! coordinates of `x`. That correspondence is what makes every ball measure
//! in this crate exactly computable.
//!
//! A point of the shift space is an infinite admissible sequence; we only
//! ever hold a finite prefix with an explicit capacity. Any operation that
//! would read past the capacity is a hard error — nothing is silently
//! extended or truncated.

use crate::error::{Error, Result};
use crate::potential::LocallyConstantPotential;

/// A finite word over the alphabet `{0, …, m−1}`.
///
/// Words do not retain a reference to the shift they came from; admissibility
/// is a relation checked against a specific [`SubshiftOfFiniteType`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    /// The empty word, denoting the whole space as a cylinder.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for Word {
    fn from(symbols: Vec<usize>) -> Self {
        Word::new(symbols)
    }
}

impl From<&[usize]> for Word {
    fn from(symbols: &[usize]) -> Self {
        Word::new(symbols.to_vec())
    }
}

/// A one-sided subshift of finite type over `{0, …, m−1}`, cut out by a
/// square 0/1 transition matrix: a sequence `x` belongs to the space iff
/// `transition[x_i][x_{i+1}] = 1` for every `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubshiftOfFiniteType {
    transition: Vec<Vec<u8>>,
}

impl SubshiftOfFiniteType {
    /// Builds the shift from a square 0/1 matrix. Every symbol must have at
    /// least one allowed successor and one allowed predecessor, so every
    /// admissible finite word extends to an infinite point.
    pub fn new(transition: Vec<Vec<u8>>) -> Result<Self> {
        let m = transition.len();
        if m == 0 {
            return Err(Error::InvalidTransition(
                "alphabet must be non-empty".into(),
            ));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidTransition(format!(
                    "row {i} has length {} but the matrix has {m} rows",
                    row.len()
                )));
            }
            for (j, &e) in row.iter().enumerate() {
                if e > 1 {
                    return Err(Error::InvalidTransition(format!(
                        "entry ({i}, {j}) is {e}; entries must be 0 or 1"
                    )));
                }
            }
        }
        for (s, row) in transition.iter().enumerate() {
            if row.iter().all(|&e| e == 0) {
                return Err(Error::InvalidTransition(format!(
                    "symbol {s} has no allowed successor"
                )));
            }
            if (0..m).all(|i| transition[i][s] == 0) {
                return Err(Error::InvalidTransition(format!(
                    "symbol {s} has no allowed predecessor"
                )));
            }
        }
        Ok(SubshiftOfFiniteType { transition })
    }

    /// The full shift on `m` symbols: every transition allowed.
    pub fn full_shift(m: usize) -> Result<Self> {
        Self::new(vec![vec![1; m]; m])
    }

    pub fn alphabet_size(&self) -> usize {
        self.transition.len()
    }

    pub fn transition(&self) -> &[Vec<u8>] {
        &self.transition
    }

    /// Whether the pair `(a, b)` may occur consecutively. Both symbols must
    /// already be in range; use [`Self::is_admissible`] for checked queries.
    #[inline]
    pub fn allows(&self, a: usize, b: usize) -> bool {
        self.transition[a][b] == 1
    }

    fn check_symbol(&self, s: usize) -> Result<()> {
        if s >= self.alphabet_size() {
            Err(Error::SymbolOutOfRange {
                symbol: s,
                alphabet_size: self.alphabet_size(),
            })
        } else {
            Ok(())
        }
    }

    /// Whether every consecutive pair of `w` is an allowed transition. The
    /// empty word and single symbols are admissible. A symbol outside the
    /// alphabet is an error, not merely an inadmissible word.
    pub fn is_admissible(&self, w: &Word) -> Result<bool> {
        for &s in w.symbols() {
            self.check_symbol(s)?;
        }
        Ok(w.symbols().windows(2).all(|p| self.allows(p[0], p[1])))
    }

    /// Exact number of admissible words of the given length, by dynamic
    /// programming over end symbols (saturating at `u128::MAX`).
    pub fn count_admissible_words(&self, len: usize) -> u128 {
        let m = self.alphabet_size();
        if len == 0 {
            return 1;
        }
        let mut counts = vec![1u128; m]; // counts[s] = words of current length starting at s
        for _ in 1..len {
            let mut next = vec![0u128; m];
            for (a, cell) in next.iter_mut().enumerate() {
                for (b, &count) in counts.iter().enumerate() {
                    if self.allows(a, b) {
                        *cell = cell.saturating_add(count);
                    }
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
    }

    /// All admissible words of the given length in lexicographic order.
    /// Errors when the count exceeds `budget`: enumeration is for oracles and
    /// small exhaustive checks, not production paths.
    pub fn admissible_words(&self, len: usize, budget: u128) -> Result<Vec<Word>> {
        let count = self.count_admissible_words(len);
        if count > budget {
            return Err(Error::EnumerationBudget {
                words: count,
                budget,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut cur = Vec::with_capacity(len);
        self.enumerate_rec(len, &mut cur, &mut out);
        Ok(out)
    }

    fn enumerate_rec(&self, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(Word::new(cur.clone()));
            return;
        }
        for s in 0..self.alphabet_size() {
            if let Some(&prev) = cur.last() {
                if !self.allows(prev, s) {
                    continue;
                }
            }
            cur.push(s);
            self.enumerate_rec(len, cur, out);
            cur.pop();
        }
    }

    /// Strong connectivity of the transition digraph.
    pub fn is_irreducible(&self) -> bool {
        strongly_connected_components(&self.adjacency()).len() == 1
    }

    /// Primitivity: some power of the transition matrix is strictly positive.
    /// Decided through the Wielandt exponent bound `(m−1)² + 1`.
    pub fn is_primitive(&self) -> bool {
        is_primitive_support(&self.adjacency())
    }

    pub(crate) fn communicating_classes(&self) -> Vec<Vec<usize>> {
        strongly_connected_components(&self.adjacency())
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<bool>> {
        self.transition
            .iter()
            .map(|row| row.iter().map(|&e| e == 1).collect())
            .collect()
    }
}

/// A finite prefix of a point of the shift space. The capacity is the number
/// of stored coordinates; operations state how many coordinates they need
/// and fail loudly when the capacity is insufficient, so no result ever
/// depends on coordinates that were never sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointPrefix {
    alphabet_size: usize,
    word: Word,
}

impl PointPrefix {
    /// Wraps an admissible word as a point prefix.
    pub fn new(sft: &SubshiftOfFiniteType, symbols: Vec<usize>) -> Result<Self> {
        let word = Word::new(symbols);
        if !sft.is_admissible(&word)? {
            let position = word
                .symbols()
                .windows(2)
                .position(|p| !sft.allows(p[0], p[1]))
                .expect("inadmissible word must contain a forbidden pair");
            return Err(Error::InadmissibleWord { position });
        }
        Ok(PointPrefix {
            alphabet_size: sft.alphabet_size(),
            word,
        })
    }

    /// Used by the sampler, whose outputs are admissible by construction.
    pub(crate) fn from_sampled(alphabet_size: usize, symbols: Vec<usize>) -> Self {
        PointPrefix {
            alphabet_size,
            word: Word::new(symbols),
        }
    }

    pub fn capacity(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn symbols(&self) -> &[usize] {
        self.word.symbols()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Applies the shift map `k` times: drops the first `k` coordinates.
    /// The result has capacity reduced by `k`.
    pub fn shift(&self, k: usize) -> Result<PointPrefix> {
        if k > self.capacity() {
            return Err(Error::CapacityExceeded {
                needed: k,
                capacity: self.capacity(),
            });
        }
        Ok(PointPrefix {
            alphabet_size: self.alphabet_size,
            word: Word::new(self.symbols()[k..].to_vec()),
        })
    }

    /// The cylinder word of the set of points whose first `n` shifts all stay
    /// within distance `2^(-k)` of the corresponding shifts of this point:
    /// exactly the first `n + k` coordinates.
    pub fn dynamical_ball_cylinder(&self, n: usize, k: usize) -> Result<Word> {
        if n == 0 {
            return Err(Error::InvalidArgument("ball depth n must be >= 1".into()));
        }
        let needed = n + k;
        if needed > self.capacity() {
            return Err(Error::CapacityExceeded {
                needed,
                capacity: self.capacity(),
            });
        }
        Ok(Word::new(self.symbols()[..needed].to_vec()))
    }

    /// The `n`-term ergodic sum `Σ_{i<n} φ(x_i, …, x_{i+r−1})` of a range-`r`
    /// potential along the prefix. Needs `n + r − 1` coordinates.
    pub fn birkhoff_sum(&self, phi: &LocallyConstantPotential, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("ergodic sum needs n >= 1".into()));
        }
        if phi.alphabet_size() != self.alphabet_size {
            return Err(Error::DimensionMismatch(format!(
                "potential is over {} symbols, point over {}",
                phi.alphabet_size(),
                self.alphabet_size
            )));
        }
        let r = phi.range();
        let needed = n + r - 1;
        if needed > self.capacity() {
            return Err(Error::CapacityExceeded {
                needed,
                capacity: self.capacity(),
            });
        }
        let s = self.symbols();
        let mut acc = 0.0;
        for i in 0..n {
            acc += phi.eval(&s[i..i + r]);
        }
        Ok(acc)
    }
}

/// Strongly connected components of a digraph on `{0, …, m−1}` (Tarjan),
/// each component sorted ascending, components ordered by smallest vertex.
pub(crate) fn strongly_connected_components(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<bool>],
        index: Vec<Option<usize>>,
        lowlink: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next_index: usize,
        components: Vec<Vec<usize>>,
    }

    fn visit(st: &mut State, v: usize) {
        st.index[v] = Some(st.next_index);
        st.lowlink[v] = st.next_index;
        st.next_index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in 0..st.adj.len() {
            if !st.adj[v][w] {
                continue;
            }
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.lowlink[v] = st.lowlink[v].min(st.lowlink[w]);
                }
                Some(iw) if st.on_stack[w] => {
                    st.lowlink[v] = st.lowlink[v].min(iw);
                }
                _ => {}
            }
        }
        if st.lowlink[v] == st.index[v].unwrap() {
            let mut component = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            component.sort_unstable();
            st.components.push(component);
        }
    }

    let m = adj.len();
    let mut st = State {
        adj,
        index: vec![None; m],
        lowlink: vec![0; m],
        on_stack: vec![false; m],
        stack: Vec::new(),
        next_index: 0,
        components: Vec::new(),
    };
    for v in 0..m {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.components.sort_by_key(|c| c[0]);
    st.components
}

pub(crate) fn format_classes(classes: &[Vec<usize>]) -> String {
    classes
        .iter()
        .map(|c| {
            let inner = c
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            format!("{{{inner}}}")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Wielandt: a nonnegative m×m matrix is primitive iff its support raised to
/// the power `(m−1)² + 1` is strictly positive.
pub(crate) fn is_primitive_support(adj: &[Vec<bool>]) -> bool {
    let m = adj.len();
    let mut exponent = (m - 1) * (m - 1) + 1;
    let mut result: Option<Vec<Vec<bool>>> = None;
    let mut base = adj.to_vec();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => bool_mat_mul(&r, &base),
            });
        }
        exponent >>= 1;
        if exponent > 0 {
            base = bool_mat_mul(&base, &base);
        }
    }
    result
        .expect("exponent is at least 1")
        .iter()
        .all(|row| row.iter().all(|&e| e))
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let m = a.len();
    let mut c = vec![vec![false; m]; m];
    for i in 0..m {
        for k in 0..m {
            if a[i][k] {
                for j in 0..m {
                    if b[k][j] {
                        c[i][j] = true;
                    }
                }
            }
        }
    }
    c
}
