//! Finite and infinite words over finite alphabets, the prefix metric,
//! cylinders, occurrence counts and natural-density estimates for subsets
//! of the positive integers.
//!
//! Streams are rules, not arrays: every infinite word is a deterministic
//! index-to-symbol rule with a memoized prefix, and every operation that
//! inspects a stream takes an explicit horizon. Metric values are exact
//! dyadic rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::num::{pow2_neg, q_zero, qu, Q};

#[derive(Debug, Error)]
pub enum WordError {
    #[error("alphabet must be non-empty and duplicate-free")]
    BadAlphabet,
    #[error("symbol {0} not in alphabet")]
    UnknownSymbol(u8),
    #[error("empty period word")]
    EmptyPeriod,
}

/// Ordered finite list of distinct symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn new(symbols: Vec<u8>) -> Result<Self, WordError> {
        if symbols.is_empty() {
            return Err(WordError::BadAlphabet);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &s in &symbols {
            if !seen.insert(s) {
                return Err(WordError::BadAlphabet);
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet {
            symbols: vec![0, 1],
        }
    }

    pub fn contains(&self, s: u8) -> bool {
        self.symbols.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }
}

/// Finite word. Symbols are small integers; for binary words 0 and 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    /// Parse a word of decimal digit symbols, e.g. "10110".
    pub fn from_bits(s: &str) -> Self {
        Word(s.bytes().map(|b| b - b'0').collect())
    }

    pub fn zeros(n: usize) -> Self {
        Word(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    /// 0-based positions of nonzero symbols.
    pub fn ones_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn factor(&self, start: usize, len: usize) -> Option<Word> {
        if start + len <= self.0.len() {
            Some(Word(self.0[start..start + len].to_vec()))
        } else {
            None
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

/// Number of occurrences of symbol `a` in `w`.
pub fn occurrences(w: &Word, a: u8) -> usize {
    w.symbols().iter().filter(|&&s| s == a).count()
}

pub(crate) trait StreamGen: Send {
    /// Extend `cache` so that it holds at least `len` symbols. Must be
    /// deterministic: extending twice yields the same prefix.
    fn extend_to(&mut self, cache: &mut Vec<u8>, len: usize);
}

struct RuleGen {
    rule: Box<dyn Fn(usize) -> u8 + Send>,
}

impl StreamGen for RuleGen {
    fn extend_to(&mut self, cache: &mut Vec<u8>, len: usize) {
        while cache.len() < len {
            let i = cache.len();
            cache.push((self.rule)(i));
        }
    }
}

struct StreamState {
    cache: Vec<u8>,
    gen: Box<dyn StreamGen>,
}

/// Lazily evaluated infinite word. Indexing is 0-based: `symbol(0)` is the
/// first symbol. Cloning shares the memoized prefix; `shifted` produces a
/// view onto the same backing rule.
#[derive(Clone)]
pub struct SymbolStream {
    label: String,
    state: Arc<Mutex<StreamState>>,
    offset: usize,
}

impl SymbolStream {
    pub(crate) fn from_gen(label: impl Into<String>, gen: Box<dyn StreamGen>) -> Self {
        SymbolStream {
            label: label.into(),
            state: Arc::new(Mutex::new(StreamState {
                cache: Vec::new(),
                gen,
            })),
            offset: 0,
        }
    }

    pub fn from_rule(
        label: impl Into<String>,
        rule: impl Fn(usize) -> u8 + Send + 'static,
    ) -> Self {
        Self::from_gen(
            label,
            Box::new(RuleGen {
                rule: Box::new(rule),
            }),
        )
    }

    pub fn zeros() -> Self {
        Self::from_rule("zeros", |_| 0)
    }

    /// Infinite repetition of `period`.
    pub fn periodic(period: &Word) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        let p = period.symbols().to_vec();
        Ok(Self::from_rule(format!("({})-periodic", period), move |i| {
            p[i % p.len()]
        }))
    }

    /// `prefix` followed by zeros.
    pub fn eventually_zero(prefix: &Word) -> Self {
        let p = prefix.symbols().to_vec();
        Self::from_rule(format!("{}0^inf", prefix), move |i| {
            p.get(i).copied().unwrap_or(0)
        })
    }

    /// Characteristic stream of an integer set: symbol at 0-based index i
    /// is 1 exactly when the 1-based position i+1 belongs to the set.
    pub fn characteristic(set: &IntegerSet) -> Self {
        let set = set.clone();
        Self::from_rule(format!("char({})", set.label()), move |i| {
            u8::from(set.contains(i as u64 + 1))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symbol(&self, i: usize) -> u8 {
        let idx = self.offset + i;
        let mut st = self.state.lock().unwrap();
        if st.cache.len() <= idx {
            // split borrow: take gen out while extending
            let StreamState { cache, gen } = &mut *st;
            gen.extend_to(cache, idx + 1);
        }
        st.cache[idx]
    }

    pub fn prefix(&self, n: usize) -> Word {
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.symbol(i));
        }
        Word(v)
    }

    /// View of the stream with the first `k` symbols dropped.
    pub fn shifted(&self, k: usize) -> SymbolStream {
        SymbolStream {
            label: self.label.clone(),
            state: Arc::clone(&self.state),
            offset: self.offset + k,
        }
    }

    /// 0-based indices of nonzero symbols among the first `n`.
    pub fn ones_in_prefix(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.symbol(i) != 0).collect()
    }
}

impl fmt::Debug for SymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolStream({}, +{})", self.label, self.offset)
    }
}

/// Subset of the positive integers given by a total membership rule.
#[derive(Clone)]
pub struct IntegerSet {
    label: String,
    pred: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl IntegerSet {
    pub fn new(label: impl Into<String>, pred: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        IntegerSet {
            label: label.into(),
            pred: Arc::new(pred),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Membership of the 1-based integer `m`. Values below 1 are never members.
    pub fn contains(&self, m: u64) -> bool {
        m >= 1 && (self.pred)(m)
    }

    /// Sorted members in [1, n].
    pub fn enumerate_upto(&self, n: u64) -> Vec<u64> {
        (1..=n).filter(|&m| self.contains(m)).collect()
    }

    pub fn naturals() -> Self {
        Self::new("naturals", |_| true)
    }

    pub fn evens() -> Self {
        Self::new("evens", |m| m % 2 == 0)
    }

    pub fn from_members(members: std::collections::BTreeSet<u64>) -> Self {
        Self::new("finite-set", move |m| members.contains(&m))
    }

    /// { base^j : j >= 1 } for base >= 2.
    pub fn powers_of(base: u64) -> Self {
        Self::new(format!("powers-of-{}", base), move |m| {
            let mut p = base;
            while p < m {
                match p.checked_mul(base) {
                    Some(next) => p = next,
                    None => return false,
                }
            }
            p == m
        })
    }

    /// Union over i >= 1 of the blocks {4^i, ..., 4^i + i - 1}: for each i a
    /// run of exactly i consecutive integers starting at 4^i.
    pub fn quartic_blocks() -> Self {
        Self::new("quartic-blocks", |m| {
            let mut p: u64 = 4;
            let mut i: u64 = 1;
            while p <= m {
                if m < p + i {
                    return true;
                }
                match p.checked_mul(4) {
                    Some(next) => p = next,
                    None => return false,
                }
                i += 1;
            }
            false
        })
    }
}

impl fmt::Debug for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerSet({})", self.label)
    }
}

/// Cylinder set of a finite word: streams whose prefix equals the word.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub prefix: Word,
}

impl Cylinder {
    pub fn new(prefix: Word) -> Self {
        Cylinder { prefix }
    }

    pub fn contains(&self, s: &SymbolStream) -> bool {
        s.prefix(self.prefix.len()) == self.prefix
    }
}

/// Result of a prefix-metric evaluation. `value` is 2^(-k) where k-1
/// symbols agree before the first difference, or exactly 0 when the
/// streams agree through the whole scan horizon; the flag distinguishes
/// the latter from genuine equality.
#[derive(Clone, Debug)]
pub struct Rho {
    pub value: Q,
    pub agree_to_horizon: bool,
    /// Exponent: value == 2^(-k). None when agree-to-horizon.
    pub k: Option<u32>,
}

/// Prefix metric 2^(-k), k = 1 + (length of the longest common prefix
/// observed within `horizon` symbols).
pub fn metric_rho(x: &SymbolStream, y: &SymbolStream, horizon: usize) -> Rho {
    assert!(horizon >= 1, "horizon must be at least 1");
    for i in 0..horizon {
        if x.symbol(i) != y.symbol(i) {
            let k = (i + 1) as u32;
            return Rho {
                value: pow2_neg(k),
                agree_to_horizon: false,
                k: Some(k),
            };
        }
    }
    Rho {
        value: q_zero(),
        agree_to_horizon: true,
        k: None,
    }
}

/// Geometric horizon ladder: cap, cap/2, ..., cap/32 (floored, deduplicated,
/// ascending). Serves as the finite stand-in for "n large" in liminf and
/// limsup estimates; restricting to the top five halvings keeps small-n
/// noise out of the running min/max.
pub fn horizon_schedule(cap: u64) -> Vec<u64> {
    let mut pts: Vec<u64> = (0..=5).map(|j| std::cmp::max(1, cap >> j)).collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Finite-horizon density estimate for an integer set. `lower_est` and
/// `upper_est` are the running min/max of |A ∩ [1,n]|/n over the horizon
/// schedule; they are proxies, not limits.
#[derive(Clone, Debug)]
pub struct DensityEstimate {
    pub horizon: u64,
    pub at_horizon: Q,
    pub lower_est: Q,
    pub upper_est: Q,
    /// (n, |A ∩ [1,n]|) at each schedule point.
    pub samples: Vec<(u64, u64)>,
}

pub fn density(a: &IntegerSet, horizon: u64) -> DensityEstimate {
    assert!(horizon >= 1);
    let schedule = horizon_schedule(horizon);
    let mut samples = Vec::with_capacity(schedule.len());
    let mut count: u64 = 0;
    let mut next = 0usize;
    for m in 1..=horizon {
        if a.contains(m) {
            count += 1;
        }
        while next < schedule.len() && schedule[next] == m {
            samples.push((m, count));
            next += 1;
        }
    }
    let frac = |&(n, c): &(u64, u64)| qu(c) / qu(n);
    let at_horizon = frac(samples.last().unwrap());
    let lower_est = samples.iter().map(frac).min().unwrap();
    let upper_est = samples.iter().map(frac).max().unwrap();
    DensityEstimate {
        horizon,
        at_horizon,
        lower_est,
        upper_est,
        samples,
    }
}

/// Outcome of a bounded search for a run of consecutive members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThickScan {
    /// Least start m <= bound with {m, ..., m+len-1} contained in the set.
    FoundAt(u64),
    /// No such run starts at or below the bound. Says nothing about
    /// thickness beyond it.
    NotFoundBelow(u64),
}

/// Search for the least m <= `search_bound` such that the `block_len`
/// consecutive integers starting at m all belong to `a`.
pub fn is_thick(a: &IntegerSet, block_len: u64, search_bound: u64) -> ThickScan {
    assert!(block_len >= 1);
    let mut run_start: u64 = 0; // 0 = no active run
    let limit = search_bound.saturating_add(block_len);
    for m in 1..=limit {
        if a.contains(m) {
            if run_start == 0 {
                run_start = m;
            }
            if m + 1 - run_start >= block_len && run_start <= search_bound {
                return ThickScan::FoundAt(run_start);
            }
        } else if run_start != 0 {
            // the run that just ended was too short; a qualifying run can
            // still start later, possibly inside the scanned range
            run_start = 0;
        }
        if run_start == 0 && m > search_bound {
            break;
        }
    }
    ThickScan::NotFoundBelow(search_bound)
}

/// All length-`word_len` factors of the first `prefix_len` symbols of `x`,
/// with their 0-based start positions.
pub fn language_of_stream(
    x: &SymbolStream,
    word_len: usize,
    prefix_len: usize,
) -> BTreeMap<Word, Vec<usize>> {
    assert!(word_len <= prefix_len);
    let prefix = x.prefix(prefix_len);
    let mut out: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    for start in 0..=prefix_len - word_len {
        let w = prefix.factor(start, word_len).unwrap();
        out.entry(w).or_default().push(start);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(Alphabet::new(vec![0, 1, 0]).is_err());
        assert!(Alphabet::new(vec![]).is_err());
        assert_eq!(Alphabet::binary().len(), 2);
    }

    #[test]
    fn occurrences_counts() {
        assert_eq!(occurrences(&Word::from_bits("10110"), 1), 3);
        assert_eq!(occurrences(&Word::empty(), 0), 0);
        assert_eq!(occurrences(&Word::from_bits("0000"), 1), 0);
    }

    #[test]
    fn occurrences_additive_under_concat() {
        let u = Word::from_bits("10110");
        let v = Word::from_bits("0101");
        for a in [0u8, 1] {
            assert_eq!(
                occurrences(&u.concat(&v), a),
                occurrences(&u, a) + occurrences(&v, a)
            );
        }
    }

    #[test]
    fn rho_identical_streams() {
        let x = SymbolStream::zeros();
        let y = SymbolStream::zeros();
        let r = metric_rho(&x, &y, 16);
        assert!(r.agree_to_horizon);
        assert_eq!(r.value, q(0, 1));
    }

    #[test]
    fn rho_first_symbol_differs() {
        let x = SymbolStream::zeros();
        let y = SymbolStream::eventually_zero(&Word::from_bits("1"));
        let r = metric_rho(&x, &y, 16);
        assert_eq!(r.value, q(1, 2));
        assert_eq!(r.k, Some(1));
    }

    #[test]
    fn rho_common_prefix_two() {
        let x = SymbolStream::eventually_zero(&Word::from_bits("11"));
        let y = SymbolStream::eventually_zero(&Word::from_bits("111"));
        let r = metric_rho(&x, &y, 16);
        assert_eq!(r.value, q(1, 8));
    }

    #[test]
    fn dyadic_gap_property() {
        // any dyadic value strictly below 2^-k is at most 2^-(k+1)
        let x = SymbolStream::eventually_zero(&Word::from_bits("1011"));
        let y = SymbolStream::eventually_zero(&Word::from_bits("1010"));
        let r = metric_rho(&x, &y, 32);
        for k in 0..8u32 {
            if r.value < pow2_neg(k) {
                assert!(r.value <= pow2_neg(k + 1));
            }
        }
    }

    #[test]
    fn stream_shift_views_share_cache() {
        let x = SymbolStream::periodic(&Word::from_bits("10")).unwrap();
        let y = x.shifted(1);
        assert_eq!(x.symbol(0), 1);
        assert_eq!(y.symbol(0), 0);
        assert_eq!(y.shifted(1).symbol(0), 1);
    }

    #[test]
    fn density_of_evens_near_half() {
        let d = density(&IntegerSet::evens(), 10_000);
        let half = q(1, 2);
        let tol = q(1, 1000);
        assert!((d.at_horizon.clone() - half.clone()) < tol);
        assert!((half.clone() - d.lower_est.clone()) < tol);
        assert!((d.upper_est.clone() - half) < tol);
        assert!(d.lower_est <= d.upper_est);
    }

    #[test]
    fn density_of_naturals_is_one() {
        let d = density(&IntegerSet::naturals(), 1000);
        assert_eq!(d.lower_est, q(1, 1));
        assert_eq!(d.upper_est, q(1, 1));
    }

    #[test]
    fn density_converges_for_exact_density_sets() {
        let mut prev_spread = None;
        for h in [1_000u64, 10_000, 100_000] {
            let d = density(&IntegerSet::evens(), h);
            let spread = d.upper_est - d.lower_est;
            if let Some(p) = prev_spread {
                assert!(spread <= p);
            }
            prev_spread = Some(spread);
        }
    }

    #[test]
    fn quartic_blocks_membership() {
        let a = IntegerSet::quartic_blocks();
        assert!(a.contains(4));
        assert!(!a.contains(5));
        assert!(a.contains(16) && a.contains(17) && !a.contains(18));
        assert!(a.contains(64) && a.contains(65) && a.contains(66) && !a.contains(67));
        assert!(!a.contains(1));
    }

    #[test]
    fn thick_scan_naturals() {
        assert_eq!(is_thick(&IntegerSet::naturals(), 5, 100), ThickScan::FoundAt(1));
    }

    #[test]
    fn thick_scan_quartic_blocks_len3() {
        assert_eq!(
            is_thick(&IntegerSet::quartic_blocks(), 3, 1000),
            ThickScan::FoundAt(64)
        );
    }

    #[test]
    fn thick_scan_evens_never() {
        assert_eq!(
            is_thick(&IntegerSet::evens(), 2, 10_000),
            ThickScan::NotFoundBelow(10_000)
        );
    }

    #[test]
    fn stream_factors() {
        let x = SymbolStream::zeros();
        let l = language_of_stream(&x, 2, 10);
        assert_eq!(l.len(), 1);
        assert!(l.contains_key(&Word::from_bits("00")));

        let x = SymbolStream::periodic(&Word::from_bits("10")).unwrap();
        let l = language_of_stream(&x, 2, 10);
        let keys: Vec<String> = l.keys().map(|w| w.to_string()).collect();
        assert_eq!(keys, vec!["01", "10"]);

        let x = SymbolStream::eventually_zero(&Word::from_bits("10010"));
        let l = language_of_stream(&x, 2, 5);
        let keys: Vec<String> = l.keys().map(|w| w.to_string()).collect();
        assert_eq!(keys, vec!["00", "01", "10"]);
    }

    #[test]
    fn cylinder_semantics() {
        let c = Cylinder::new(Word::from_bits("10"));
        assert!(c.contains(&SymbolStream::periodic(&Word::from_bits("10")).unwrap()));
        assert!(!c.contains(&SymbolStream::zeros()));
    }

    #[test]
    fn characteristic_uses_one_based_positions() {
        let w = SymbolStream::characteristic(&IntegerSet::powers_of(2));
        // positions 2,4,8 hold ones; stream index is position-1
        assert_eq!(w.prefix(9).to_string(), "010100010");
    }
}
