//! Spacing shifts: binary subshifts where the distances between 1s are
//! constrained to a set P of positive integers. Provides membership and
//! language enumeration, the decomposition of a thick set into finitely
//! many pairwise disjoint thick parts, a constructive transitive point,
//! and a bounded weak-mixing search.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::num::{q_zero, Q};
use crate::words::{StreamGen, SymbolStream, Word};

#[derive(Debug, Error)]
pub enum SpacingError {
    #[error("enumeration guard exceeded: length {len} > guard {guard}")]
    GuardExceeded { len: usize, guard: usize },
    #[error("insufficient thickness below bound {bound}: no block of length {len} found")]
    InsufficientThickness { len: u64, bound: u64 },
    #[error("point fails the spacing condition on its checked prefix")]
    NotInShift,
    #[error("membership undecided beyond classification frontier {frontier} (asked {asked})")]
    BeyondFrontier { frontier: u64, asked: u64 },
}

/// Result of a block search inside a spacing set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockHit {
    /// Least admissible start of a run of the requested length.
    At(u64),
    /// The next qualifying run starts beyond u64 range; no evaluable
    /// position can lie inside it.
    BeyondU64,
    /// Bounded scan found nothing; says nothing about thickness.
    NotFoundBelow(u64),
}

enum Blocks {
    /// Linear scan up to a fixed bound.
    Scan { bound: u64 },
    /// Closed-form run locator: (length, min_start) -> hit.
    Analytic(Arc<dyn Fn(u64, u64) -> BlockHit + Send + Sync>),
}

/// A subset P of the positive integers used as the distance set of a
/// spacing shift. Carries a membership rule plus a finder for runs of
/// consecutive members.
#[derive(Clone)]
pub struct SpacingSet {
    label: String,
    pred: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    blocks: Arc<Blocks>,
}

impl fmt::Debug for SpacingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpacingSet({})", self.label)
    }
}

impl SpacingSet {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, m: u64) -> bool {
        m >= 1 && (self.pred)(m)
    }

    pub fn enumerate_upto(&self, n: u64) -> Vec<u64> {
        (1..=n).filter(|&m| self.contains(m)).collect()
    }

    /// Generic set backed by a predicate; block searches scan up to `scan_bound`.
    pub fn from_pred(
        label: impl Into<String>,
        pred: impl Fn(u64) -> bool + Send + Sync + 'static,
        scan_bound: u64,
    ) -> Self {
        SpacingSet {
            label: label.into(),
            pred: Arc::new(pred),
            blocks: Arc::new(Blocks::Scan { bound: scan_bound }),
        }
    }

    pub fn from_members(members: BTreeSet<u64>, scan_bound: u64) -> Self {
        Self::from_pred("finite-set", move |m| members.contains(&m), scan_bound)
    }

    pub fn naturals() -> Self {
        SpacingSet {
            label: "naturals".into(),
            pred: Arc::new(|_| true),
            blocks: Arc::new(Blocks::Analytic(Arc::new(|_, min_start| {
                BlockHit::At(std::cmp::max(1, min_start))
            }))),
        }
    }

    /// The union over i >= 1 of {4^i, ..., 4^i + i - 1}. Thick, with thick
    /// complement, and its runs are exactly located: the first run of
    /// length L sits at 4^L.
    pub fn quartic_blocks() -> Self {
        let base = crate::words::IntegerSet::quartic_blocks();
        SpacingSet {
            label: "quartic-blocks".into(),
            pred: Arc::new(move |m| base.contains(m)),
            blocks: Arc::new(Blocks::Analytic(Arc::new(|len, min_start| {
                // block i spans [4^i, 4^i + i - 1]; a run of `len` starting at
                // s needs s >= 4^i and s + len - 1 <= 4^i + i - 1
                let mut p: u64 = 4;
                let mut i: u64 = 1;
                loop {
                    if i >= len {
                        let lo = std::cmp::max(p, min_start);
                        if lo + (len - 1) <= p + (i - 1) {
                            return BlockHit::At(lo);
                        }
                    }
                    match p.checked_mul(4) {
                        Some(next) => p = next,
                        None => return BlockHit::BeyondU64,
                    }
                    i += 1;
                }
            }))),
        }
    }

    pub(crate) fn with_parts(
        label: String,
        pred: Arc<dyn Fn(u64) -> bool + Send + Sync>,
        finder: Arc<dyn Fn(u64, u64) -> BlockHit + Send + Sync>,
    ) -> Self {
        SpacingSet {
            label,
            pred,
            blocks: Arc::new(Blocks::Analytic(finder)),
        }
    }

    /// Least start >= `min_start` of a run of `len` consecutive members.
    pub fn find_block(&self, len: u64, min_start: u64) -> BlockHit {
        assert!(len >= 1);
        match &*self.blocks {
            Blocks::Analytic(f) => f(len, std::cmp::max(1, min_start)),
            Blocks::Scan { bound } => {
                let lo = std::cmp::max(1, min_start);
                if lo > *bound {
                    return BlockHit::NotFoundBelow(*bound);
                }
                let mut run_start: u64 = 0;
                let limit = bound.saturating_add(len);
                for m in lo..=limit {
                    if self.contains(m) {
                        if run_start == 0 {
                            run_start = m;
                        }
                        if m + 1 - run_start >= len {
                            if run_start <= *bound {
                                return BlockHit::At(run_start);
                            }
                            break;
                        }
                    } else {
                        run_start = 0;
                        if m > *bound {
                            break;
                        }
                    }
                }
                BlockHit::NotFoundBelow(*bound)
            }
        }
    }
}

/// The spacing shift over P: binary streams in which any two 1s sit at a
/// distance belonging to P.
#[derive(Clone, Debug)]
pub struct SpacingShift {
    pub p: SpacingSet,
}

impl SpacingShift {
    pub fn new(p: SpacingSet) -> Self {
        SpacingShift { p }
    }

    pub fn admits_word(&self, w: &Word) -> bool {
        is_member(w, &self.p)
    }

    pub fn admits_prefix(&self, x: &SymbolStream, n: usize) -> bool {
        is_member(&x.prefix(n), &self.p)
    }
}

/// Defining condition of the spacing shift on a finite word: every pair of
/// 1s is separated by a distance in P.
pub fn is_member(w: &Word, p: &SpacingSet) -> bool {
    let ones = w.ones_positions();
    for (idx, &a) in ones.iter().enumerate() {
        for &b in &ones[idx + 1..] {
            if !p.contains((b - a) as u64) {
                return false;
            }
        }
    }
    true
}

/// Exactly the length-n binary words satisfying the spacing condition,
/// enumerated with pruning. Guarded: refuses lengths above `guard`.
pub fn language(p: &SpacingSet, n: usize, guard: usize) -> Result<BTreeSet<Word>, SpacingError> {
    if n > guard {
        return Err(SpacingError::GuardExceeded { len: n, guard });
    }
    let mut out = BTreeSet::new();
    let mut cur: Vec<u8> = Vec::with_capacity(n);
    let mut ones: Vec<usize> = Vec::new();
    enumerate(p, n, &mut cur, &mut ones, &mut out);
    Ok(out)
}

fn enumerate(
    p: &SpacingSet,
    n: usize,
    cur: &mut Vec<u8>,
    ones: &mut Vec<usize>,
    out: &mut BTreeSet<Word>,
) {
    if cur.len() == n {
        out.insert(Word::from_symbols(cur.clone()));
        return;
    }
    cur.push(0);
    enumerate(p, n, cur, ones, out);
    cur.pop();

    let pos = cur.len();
    if ones.iter().all(|&a| p.contains((pos - a) as u64)) {
        cur.push(1);
        ones.push(pos);
        enumerate(p, n, cur, ones, out);
        ones.pop();
        cur.pop();
    }
}

/// Decomposition of a thick set P into `parts` pairwise disjoint thick
/// parts. Blocks Q_n (n >= 2) are runs of length n+1 chosen greedily with
/// strictly increasing, non-overlapping starts; Q_1 is everything else.
/// Block i is assigned to part ((i-1) mod parts) + 1, so every part
/// receives infinitely many blocks of unbounded length.
#[derive(Clone)]
pub struct ThickDecomposition {
    inner: Arc<DecompInner>,
}

struct DecompInner {
    source: SpacingSet,
    parts: u64,
    chain: Mutex<ChainState>,
}

struct ChainState {
    /// entry t is Q_{t+2}: (start, len) with len = t+3
    blocks: Vec<(u64, u64)>,
    exhausted: bool,
    /// membership of all m <= frontier is classified by the materialized chain
    frontier: u64,
}

impl fmt::Debug for ThickDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ThickDecomposition({} into {} parts)",
            self.inner.source.label(),
            self.inner.parts
        )
    }
}

pub fn thick_decompose(
    p: &SpacingSet,
    parts: u64,
    bound: u64,
) -> Result<ThickDecomposition, SpacingError> {
    assert!(parts >= 1);
    let d = ThickDecomposition {
        inner: Arc::new(DecompInner {
            source: p.clone(),
            parts,
            chain: Mutex::new(ChainState {
                blocks: Vec::new(),
                exhausted: false,
                frontier: u64::MAX,
            }),
        }),
    };
    // every part must own at least one block below the bound
    d.extend_chain_while(|st| {
        st.blocks.len() < parts as usize
            && st.blocks.last().map_or(true, |&(s, l)| s + l <= bound)
    });
    {
        let st = d.inner.chain.lock().unwrap();
        let enough = st.blocks.len() >= parts as usize
            && st.blocks[..parts as usize]
                .iter()
                .all(|&(s, l)| s + l - 1 <= bound);
        if !enough {
            return Err(SpacingError::InsufficientThickness {
                len: parts + 2,
                bound,
            });
        }
    }
    Ok(d)
}

impl ThickDecomposition {
    pub fn source(&self) -> &SpacingSet {
        &self.inner.source
    }

    pub fn parts(&self) -> u64 {
        self.inner.parts
    }

    fn extend_chain_while(&self, cond: impl Fn(&ChainState) -> bool) {
        let mut st = self.inner.chain.lock().unwrap();
        while !st.exhausted && cond(&st) {
            let n = st.blocks.len() as u64 + 2;
            let min_start = st.blocks.last().map_or(1, |&(s, l)| s + l);
            match self.inner.source.find_block(n + 1, min_start) {
                BlockHit::At(s) => {
                    st.blocks.push((s, n + 1));
                }
                BlockHit::BeyondU64 => {
                    st.exhausted = true;
                    st.frontier = u64::MAX;
                }
                BlockHit::NotFoundBelow(b) => {
                    st.exhausted = true;
                    st.frontier = b;
                }
            }
        }
    }

    /// The materialized block Q_n (n >= 2), extending the chain if needed.
    pub fn q_block(&self, n: u64) -> Option<(u64, u64)> {
        assert!(n >= 2);
        self.extend_chain_while(|st| (st.blocks.len() as u64) < n - 1);
        let st = self.inner.chain.lock().unwrap();
        st.blocks.get((n - 2) as usize).copied()
    }

    /// Which part the member m belongs to: the part of the block Q_i
    /// containing m, or part of Q_1 (block index 1) for leftover members.
    /// Returns None when m is not in the source set.
    pub fn part_of(&self, m: u64) -> Result<Option<u64>, SpacingError> {
        if !self.inner.source.contains(m) {
            return Ok(None);
        }
        self.extend_chain_while(|st| st.blocks.last().map_or(true, |&(s, _)| s <= m));
        let st = self.inner.chain.lock().unwrap();
        if m > st.frontier {
            return Err(SpacingError::BeyondFrontier {
                frontier: st.frontier,
                asked: m,
            });
        }
        let block_index = st
            .blocks
            .iter()
            .position(|&(s, l)| s <= m && m < s + l)
            .map(|t| t as u64 + 2)
            .unwrap_or(1);
        Ok(Some(self.column(block_index)))
    }

    fn column(&self, block_index: u64) -> u64 {
        (block_index - 1) % self.inner.parts + 1
    }

    /// Part j as a spacing set of its own.
    pub fn part(&self, j: u64) -> SpacingSet {
        assert!(j >= 1 && j <= self.inner.parts);
        let d = self.clone();
        let dd = self.clone();
        let pred = Arc::new(move |m: u64| matches!(d.part_of(m), Ok(Some(c)) if c == j));
        let finder =
            Arc::new(move |len: u64, min_start: u64| dd.find_block_in_cols(&[j], len, min_start));
        SpacingSet::with_parts(
            format!(
                "{}[part {}/{}]",
                self.inner.source.label(),
                j,
                self.inner.parts
            ),
            pred,
            finder,
        )
    }

    /// First block of length >= `len` starting at or past `min_start` whose
    /// part index lies in `cols`.
    pub(crate) fn find_block_in_cols(&self, cols: &[u64], len: u64, min_start: u64) -> BlockHit {
        let mut t = 0usize;
        loop {
            self.extend_chain_while(|st| st.blocks.len() <= t);
            let (entry, exhausted, frontier) = {
                let st = self.inner.chain.lock().unwrap();
                (st.blocks.get(t).copied(), st.exhausted, st.frontier)
            };
            match entry {
                Some((s, l)) => {
                    let block_index = t as u64 + 2;
                    if cols.contains(&self.column(block_index)) {
                        if l >= len && s >= min_start {
                            return BlockHit::At(s);
                        }
                        // a run inside a longer block, starting past min_start
                        if s < min_start && s + l >= min_start + len {
                            return BlockHit::At(min_start);
                        }
                    }
                    t += 1;
                }
                None => {
                    debug_assert!(exhausted);
                    return if frontier == u64::MAX {
                        BlockHit::BeyondU64
                    } else {
                        BlockHit::NotFoundBelow(frontier)
                    };
                }
            }
        }
    }

    /// Leftover members (block Q_1) up to a bound, for tests and reports.
    pub fn q1_members_upto(&self, bound: u64) -> Result<Vec<u64>, SpacingError> {
        self.extend_chain_while(|st| st.blocks.last().map_or(true, |&(s, _)| s <= bound));
        let st = self.inner.chain.lock().unwrap();
        let mut out = Vec::new();
        for m in 1..=bound {
            if self.inner.source.contains(m) {
                if m > st.frontier {
                    return Err(SpacingError::BeyondFrontier {
                        frontier: st.frontier,
                        asked: m,
                    });
                }
                let in_block = st.blocks.iter().any(|&(s, l)| s <= m && m < s + l);
                if !in_block {
                    out.push(m);
                }
            }
        }
        Ok(out)
    }
}

/// Bookkeeping handle for a constructed transitive point.
pub struct TransitivePoint {
    pub stream: SymbolStream,
    planner: Arc<Mutex<Planner>>,
}

impl TransitivePoint {
    /// Placements with start below `window` (extends the plan as needed).
    pub fn placements_upto(&self, window: u64) -> Vec<(u64, Word)> {
        {
            let mut pl = self.planner.lock().unwrap();
            pl.extend_plan_past(window);
        }
        let pl = self.planner.lock().unwrap();
        pl.placements
            .iter()
            .filter(|&&(s, _)| s < window)
            .cloned()
            .collect()
    }

    /// Words that could not be placed inside the evaluable index range.
    pub fn skipped_words(&self) -> Vec<Word> {
        let pl = self.planner.lock().unwrap();
        pl.skipped.iter().cloned().collect()
    }

    /// True when the plan has stopped: every later symbol is 0 at every
    /// evaluable index (remaining placements would start beyond u64).
    pub fn plan_complete(&self) -> bool {
        self.planner.lock().unwrap().done
    }
}

struct Planner {
    set: SpacingSet,
    cycle: Vec<Word>,
    next: usize,
    round_placed_ones: bool,
    round_skipped: bool,
    placements: Vec<(u64, Word)>,
    skipped: BTreeSet<Word>,
    ones: Vec<u64>,
    plan_len: u64,
    done: bool,
    gap_scan_cap: u64,
}

impl Planner {
    fn extend_plan_past(&mut self, target: u64) {
        while !self.done && self.plan_len <= target {
            self.step();
        }
    }

    fn step(&mut self) {
        let word = self.cycle[self.next].clone();
        self.next += 1;
        let wrapped = self.next == self.cycle.len();
        if wrapped {
            self.next = 0;
        }

        let ones_rel = word.ones_positions();
        if ones_rel.is_empty() || self.ones.is_empty() {
            self.place(0, &word);
            if !ones_rel.is_empty() {
                self.round_placed_ones = true;
            }
        } else if let Some(g) = self.scan_gap(&ones_rel) {
            self.place(g, &word);
            self.round_placed_ones = true;
        } else if let Some(g) = self.block_gap(&word, &ones_rel) {
            self.place(g, &word);
            self.round_placed_ones = true;
        } else {
            self.skipped.insert(word);
            self.round_skipped = true;
        }

        if wrapped {
            if self.round_skipped && !self.round_placed_ones {
                // no word carrying a 1 can be placed any more; the stream is
                // all zeros from here on at every evaluable index
                self.done = true;
            }
            self.round_placed_ones = false;
            self.round_skipped = false;
        }
    }

    /// Smallest gap g <= cap such that all distances from new 1s to every
    /// existing 1 land in the set.
    fn scan_gap(&self, ones_rel: &[usize]) -> Option<u64> {
        'gaps: for g in 0..=self.gap_scan_cap {
            let start = self.plan_len.checked_add(g)?;
            for &r in ones_rel {
                let pos = start.checked_add(r as u64)?;
                for &a in &self.ones {
                    if !self.set.contains(pos - a) {
                        continue 'gaps;
                    }
                }
            }
            return Some(g);
        }
        None
    }

    /// Gap-alignment fallback: pick a run long enough to contain every
    /// cross distance at once and shift the word so they all land inside.
    fn block_gap(&self, word: &Word, ones_rel: &[usize]) -> Option<u64> {
        let a_min = *self.ones.first().unwrap();
        let a_max = *self.ones.last().unwrap();
        let r_min = *ones_rel.first().unwrap() as u64;
        let r_max = *ones_rel.last().unwrap() as u64;
        let width = (r_max - r_min) + (a_max - a_min) + 1;
        let min_start = self.plan_len.checked_add(r_min)?.checked_sub(a_max)?;
        match self.set.find_block(width, std::cmp::max(1, min_start)) {
            BlockHit::At(m) => {
                // gap such that the smallest cross distance equals m
                let g = m.checked_add(a_max)?.checked_sub(self.plan_len + r_min)?;
                // the placement itself must stay representable
                self.plan_len
                    .checked_add(g)?
                    .checked_add(word.len() as u64)?;
                Some(g)
            }
            BlockHit::BeyondU64 | BlockHit::NotFoundBelow(_) => None,
        }
    }

    fn place(&mut self, gap: u64, word: &Word) {
        let start = self.plan_len + gap;
        for &r in &word.ones_positions() {
            self.ones.push(start + r as u64);
        }
        self.plan_len = start + word.len() as u64;
        self.placements.push((start, word.clone()));
    }
}

struct PlanGen {
    planner: Arc<Mutex<Planner>>,
    mat_next: usize,
}

impl StreamGen for PlanGen {
    fn extend_to(&mut self, cache: &mut Vec<u8>, len: usize) {
        {
            let mut pl = self.planner.lock().unwrap();
            pl.extend_plan_past(len as u64);
        }
        let pl = self.planner.lock().unwrap();
        while cache.len() < len {
            let i = cache.len() as u64;
            while self.mat_next < pl.placements.len() {
                let (s, ref w) = pl.placements[self.mat_next];
                if s + w.len() as u64 <= i {
                    self.mat_next += 1;
                } else {
                    break;
                }
            }
            let sym = match pl.placements.get(self.mat_next) {
                Some(&(s, ref w)) if s <= i => w.get((i - s) as usize).unwrap_or(0),
                _ => 0,
            };
            cache.push(sym);
        }
    }
}

/// Build a point of the spacing shift over P whose orbit keeps entering
/// the cylinder of every enumerable language word: words of up to
/// `word_budget` letters are laid out in rounds, each separated by a gap
/// that keeps every pair of 1s at a distance inside P. Words whose
/// placement would fall beyond the evaluable index range are skipped and
/// recorded.
pub fn transitive_point(
    p: &SpacingSet,
    word_budget: usize,
) -> Result<TransitivePoint, SpacingError> {
    let mut cycle: Vec<Word> = Vec::new();
    for n in 1..=word_budget {
        cycle.extend(language(p, n, word_budget)?);
    }
    let planner = Arc::new(Mutex::new(Planner {
        set: p.clone(),
        cycle,
        next: 0,
        round_placed_ones: false,
        round_skipped: false,
        placements: Vec::new(),
        skipped: BTreeSet::new(),
        ones: Vec::new(),
        plan_len: 0,
        done: false,
        gap_scan_cap: 1 << 16,
    }));
    let gen = PlanGen {
        planner: Arc::clone(&planner),
        mat_next: 0,
    };
    let stream = SymbolStream::from_gen(format!("transitive({})", p.label()), Box::new(gen));
    Ok(TransitivePoint { stream, planner })
}

/// One quadruple's witness in a weak-mixing search.
#[derive(Clone, Debug)]
pub struct WeakMixingWitness {
    pub quadruple: (Word, Word, Word, Word),
    pub gap_len: u64,
    pub w1: Word,
    pub w2: Word,
}

#[derive(Clone, Debug)]
pub enum WeakMixingOutcome {
    /// Every quadruple of length-m language words admits equal-length
    /// connecting words within the bound.
    Certificate { witnesses: Vec<WeakMixingWitness> },
    /// Some quadruple found no connector: exhaustive over all connecting
    /// words up to `exhaustive_cap`, all-zero connectors up to `bound`.
    FailingQuadruple {
        quadruple: (Word, Word, Word, Word),
        exhaustive_cap: u64,
        bound: u64,
    },
}

/// For every u1,u2,v1,v2 in the length-m language, search for words w1,w2
/// of one common length g with u1 w1 v1 and u2 w2 v2 in the language.
/// All-zero connectors are tried for every g <= bound; all binary
/// connectors for g <= exhaustive_cap.
pub fn weak_mixing_check(
    p: &SpacingSet,
    m: usize,
    bound: u64,
    exhaustive_cap: u64,
) -> Result<WeakMixingOutcome, SpacingError> {
    let lang: Vec<Word> = language(p, m, m)?.into_iter().collect();
    let mut witnesses = Vec::new();
    for u1 in &lang {
        for v1 in &lang {
            for u2 in &lang {
                for v2 in &lang {
                    match connector(p, u1, v1, u2, v2, bound, exhaustive_cap) {
                        Some((g, w1, w2)) => witnesses.push(WeakMixingWitness {
                            quadruple: (u1.clone(), u2.clone(), v1.clone(), v2.clone()),
                            gap_len: g,
                            w1,
                            w2,
                        }),
                        None => {
                            return Ok(WeakMixingOutcome::FailingQuadruple {
                                quadruple: (u1.clone(), u2.clone(), v1.clone(), v2.clone()),
                                exhaustive_cap,
                                bound,
                            })
                        }
                    }
                }
            }
        }
    }
    Ok(WeakMixingOutcome::Certificate { witnesses })
}

fn connector(
    p: &SpacingSet,
    u1: &Word,
    v1: &Word,
    u2: &Word,
    v2: &Word,
    bound: u64,
    exhaustive_cap: u64,
) -> Option<(u64, Word, Word)> {
    for g in 0..=bound {
        let w1 = if g <= exhaustive_cap {
            any_connector(p, u1, v1, g)
        } else {
            zero_connector(p, u1, v1, g)
        };
        let Some(w1) = w1 else { continue };
        let w2 = if g <= exhaustive_cap {
            any_connector(p, u2, v2, g)
        } else {
            zero_connector(p, u2, v2, g)
        };
        if let Some(w2) = w2 {
            return Some((g, w1, w2));
        }
    }
    None
}

fn zero_connector(p: &SpacingSet, u: &Word, v: &Word, g: u64) -> Option<Word> {
    let w = Word::zeros(g as usize);
    let glued = u.concat(&w).concat(v);
    is_member(&glued, p).then_some(w)
}

fn any_connector(p: &SpacingSet, u: &Word, v: &Word, g: u64) -> Option<Word> {
    // 2^g candidates, cheapest (all-zero) first
    let g = g as usize;
    for mask in 0..(1u64 << g) {
        let bits: Vec<u8> = (0..g).map(|i| ((mask >> i) & 1) as u8).collect();
        let w = Word::from_symbols(bits);
        let glued = u.concat(&w).concat(v);
        if is_member(&glued, p) {
            return Some(w);
        }
    }
    None
}

/// Minimal observed prefix-metric distance from the orbit of x to the
/// all-zero fixed point, over shifts below `horizon`.
#[derive(Clone, Debug)]
pub struct ProximalityReport {
    pub min_rho: Q,
    pub agree_to_horizon: bool,
    pub at_shift: usize,
    pub horizon: usize,
}

pub fn proximality_estimate(
    p: &SpacingSet,
    x: &SymbolStream,
    horizon: usize,
) -> Result<ProximalityReport, SpacingError> {
    if !is_member(&x.prefix(horizon), p) {
        return Err(SpacingError::NotInShift);
    }
    // the longest zero run starting below `horizon`, looking ahead `horizon`
    let scan = 2 * horizon;
    let prefix = x.prefix(scan);
    let mut best_run = 0usize;
    let mut best_at = 0usize;
    for i in 0..horizon {
        let mut run = 0usize;
        while run < horizon && prefix.get(i + run) == Some(0) {
            run += 1;
        }
        if run > best_run {
            best_run = run;
            best_at = i;
        }
        if best_run >= horizon {
            break;
        }
    }
    if best_run >= horizon {
        Ok(ProximalityReport {
            min_rho: q_zero(),
            agree_to_horizon: true,
            at_shift: best_at,
            horizon,
        })
    } else {
        Ok(ProximalityReport {
            min_rho: crate::num::pow2_neg(best_run as u32 + 1),
            agree_to_horizon: false,
            at_shift: best_at,
            horizon,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{is_thick, IntegerSet, ThickScan};

    fn set_p(values: &[u64]) -> SpacingSet {
        SpacingSet::from_members(values.iter().copied().collect(), 1 << 16)
    }

    #[test]
    fn member_no_ones() {
        let p = set_p(&[]);
        assert!(is_member(&Word::from_bits("0000"), &p));
        assert!(is_member(&Word::empty(), &p));
    }

    #[test]
    fn member_single_pair() {
        let w = Word::from_bits("1001");
        assert!(is_member(&w, &set_p(&[3])));
        assert!(!is_member(&w, &set_p(&[2])));
    }

    #[test]
    fn member_three_ones() {
        let w = Word::from_bits("10101");
        assert!(is_member(&w, &set_p(&[2, 4])));
        assert!(!is_member(&w, &set_p(&[2])));
        assert!(!is_member(&w, &set_p(&[4])));
    }

    #[test]
    fn member_hereditary_under_erasing_ones() {
        let p = set_p(&[2, 4]);
        let w = Word::from_bits("10101");
        assert!(is_member(&w, &p));
        for i in w.ones_positions() {
            let mut v = w.symbols().to_vec();
            v[i] = 0;
            assert!(is_member(&Word::from_symbols(v), &p));
        }
    }

    #[test]
    fn language_small() {
        let any = set_p(&[1, 2, 3]);
        let l1 = language(&any, 1, 8).unwrap();
        assert_eq!(
            l1.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            vec!["0", "1"]
        );

        let with_one = set_p(&[1]);
        assert_eq!(language(&with_one, 2, 8).unwrap().len(), 4);
        let without_one = set_p(&[2]);
        assert_eq!(language(&without_one, 2, 8).unwrap().len(), 3);

        let p2 = set_p(&[2]);
        let l3: Vec<String> = language(&p2, 3, 8)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(l3, vec!["000", "001", "010", "100", "101"]);
    }

    #[test]
    fn language_guard() {
        assert!(matches!(
            language(&set_p(&[1]), 9, 8),
            Err(SpacingError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn language_factorial_and_extendable() {
        let p = SpacingSet::quartic_blocks();
        let l5 = language(&p, 5, 8).unwrap();
        let l4 = language(&p, 4, 8).unwrap();
        for w in &l5 {
            // factors of language words are language words
            assert!(l4.contains(&w.factor(0, 4).unwrap()));
            assert!(l4.contains(&w.factor(1, 4).unwrap()));
        }
        for w in &l4 {
            // zero-extension on either side stays in the language
            assert!(l5.contains(&Word::from_bits("0").concat(w)));
            assert!(l5.contains(&w.concat(&Word::from_bits("0"))));
        }
    }

    #[test]
    fn block_finder_naturals_and_quartic() {
        let n = SpacingSet::naturals();
        assert_eq!(n.find_block(5, 1), BlockHit::At(1));
        assert_eq!(n.find_block(5, 17), BlockHit::At(17));

        let p = SpacingSet::quartic_blocks();
        assert_eq!(p.find_block(1, 1), BlockHit::At(4));
        assert_eq!(p.find_block(2, 1), BlockHit::At(16));
        assert_eq!(p.find_block(3, 1), BlockHit::At(64));
        assert_eq!(p.find_block(3, 65), BlockHit::At(256));
        assert_eq!(p.find_block(40, 1), BlockHit::BeyondU64);
    }

    #[test]
    fn quartic_block_finder_matches_scan() {
        let analytic = SpacingSet::quartic_blocks();
        let scan = SpacingSet::from_pred(
            "quartic-scan",
            {
                let s = IntegerSet::quartic_blocks();
                move |m| s.contains(m)
            },
            100_000,
        );
        for len in 1..=6u64 {
            for min_start in [1u64, 5, 17, 65, 300, 1025] {
                let a = analytic.find_block(len, min_start);
                let b = scan.find_block(len, min_start);
                assert_eq!(a, b, "len={len} min_start={min_start}");
            }
        }
    }

    #[test]
    fn decompose_naturals_block_chain() {
        let d = thick_decompose(&SpacingSet::naturals(), 3, 1000).unwrap();
        assert_eq!(d.q_block(2), Some((1, 3)));
        assert_eq!(d.q_block(3), Some((4, 4)));
        assert_eq!(d.q_block(4), Some((8, 5)));
        assert_eq!(d.q_block(5), Some((13, 6)));
    }

    #[test]
    fn decompose_single_part_is_whole_set() {
        let d = thick_decompose(&SpacingSet::naturals(), 1, 1000).unwrap();
        for m in 1..=200u64 {
            assert_eq!(d.part_of(m).unwrap(), Some(1));
        }
    }

    #[test]
    fn decompose_parts_disjoint_and_cover() {
        let p = SpacingSet::quartic_blocks();
        let d = thick_decompose(&p, 3, 100_000).unwrap();
        let parts: Vec<SpacingSet> = (1..=3).map(|j| d.part(j)).collect();
        for m in 1..=100_000u64 {
            let memberships: Vec<bool> = parts.iter().map(|pj| pj.contains(m)).collect();
            let count = memberships.iter().filter(|&&b| b).count();
            if p.contains(m) {
                assert_eq!(count, 1, "m={m} must be in exactly one part");
            } else {
                assert_eq!(count, 0);
            }
        }
    }

    #[test]
    fn decompose_quartic_part_assignment() {
        let p = SpacingSet::quartic_blocks();
        let d = thick_decompose(&p, 3, 100_000).unwrap();
        // Q_2..Q_7 are the runs of lengths 3..8 at 4^3..4^8
        assert_eq!(d.q_block(2), Some((64, 3)));
        assert_eq!(d.q_block(7), Some((65536, 8)));
        // leftovers 4,16,17 belong to block 1, hence part 1
        assert_eq!(d.q1_members_upto(100).unwrap(), vec![4, 16, 17]);
        assert_eq!(d.part_of(4).unwrap(), Some(1));
        // round-robin: Q_2 -> part 2, Q_3 -> part 3, Q_4 -> part 1
        assert_eq!(d.part_of(64).unwrap(), Some(2));
        assert_eq!(d.part_of(256).unwrap(), Some(3));
        assert_eq!(d.part_of(1024).unwrap(), Some(1));
    }

    #[test]
    fn decompose_parts_are_thick_below_bound() {
        let p = SpacingSet::quartic_blocks();
        let d = thick_decompose(&p, 3, 100_000).unwrap();
        for j in 1..=3u64 {
            let part = d.part(j);
            let as_set = IntegerSet::new("part", move |m| part.contains(m));
            // each part holds a run of length 3 somewhere below 10^5
            assert!(matches!(
                is_thick(&as_set, 3, 100_000),
                ThickScan::FoundAt(_)
            ));
        }
    }

    #[test]
    fn transitive_point_full_shift_contains_all_words() {
        let tp = transitive_point(&SpacingSet::naturals(), 3).unwrap();
        let window = 200usize;
        let prefix = tp.stream.prefix(window);
        for n in 1..=3usize {
            for w in language(&SpacingSet::naturals(), n, 3).unwrap() {
                let found = (0..window - n).any(|s| prefix.factor(s, n).unwrap() == w);
                assert!(found, "word {w} missing");
            }
        }
        assert!(tp.skipped_words().is_empty());
    }

    #[test]
    fn transitive_point_prefix_stays_in_shift() {
        for p in [SpacingSet::naturals(), SpacingSet::quartic_blocks()] {
            let tp = transitive_point(&p, 2).unwrap();
            for n in [10usize, 100, 2000] {
                assert!(
                    is_member(&tp.stream.prefix(n), &p),
                    "prefix {n} of {}",
                    p.label()
                );
            }
        }
    }

    #[test]
    fn transitive_point_quartic_ones_layout() {
        let tp = transitive_point(&SpacingSet::quartic_blocks(), 2).unwrap();
        let ones = tp.stream.ones_in_prefix(5000);
        // pairwise distances must all be quartic-block members
        let p = SpacingSet::quartic_blocks();
        for (i, &a) in ones.iter().enumerate() {
            for &b in &ones[i + 1..] {
                assert!(p.contains((b - a) as u64));
            }
        }
        assert!(ones.len() >= 3, "expected at least three 1s, got {:?}", ones);
    }

    #[test]
    fn weak_mixing_full_shift() {
        let out = weak_mixing_check(&SpacingSet::naturals(), 2, 100, 4).unwrap();
        match out {
            WeakMixingOutcome::Certificate { witnesses } => {
                assert!(witnesses.iter().all(|w| w.gap_len == 0));
            }
            _ => panic!("full shift must certify"),
        }
    }

    #[test]
    fn weak_mixing_quartic() {
        let out = weak_mixing_check(&SpacingSet::quartic_blocks(), 2, 10_000, 4).unwrap();
        assert!(matches!(out, WeakMixingOutcome::Certificate { .. }));
    }

    #[test]
    fn weak_mixing_gap_two_fails_explicitly() {
        let out = weak_mixing_check(&set_p(&[2]), 2, 64, 8).unwrap();
        match out {
            WeakMixingOutcome::FailingQuadruple { quadruple, .. } => {
                let (u1, u2, v1, v2) = quadruple;
                let total_ones: usize = [&u1, &u2, &v1, &v2]
                    .iter()
                    .map(|w| w.ones_positions().len())
                    .sum();
                assert!(total_ones > 0, "only gluings with 1s can fail");
            }
            _ => panic!("spacing set {{2}} is not weakly mixing"),
        }
    }

    #[test]
    fn proximality_zero_stream() {
        let p = SpacingSet::naturals();
        let r = proximality_estimate(&p, &SymbolStream::zeros(), 64).unwrap();
        assert!(r.agree_to_horizon);
        assert_eq!(r.min_rho, q_zero());
    }

    #[test]
    fn proximality_one_then_zeros() {
        let p = SpacingSet::naturals();
        let x = SymbolStream::eventually_zero(&Word::from_bits("1"));
        let r = proximality_estimate(&p, &x, 64).unwrap();
        assert!(r.agree_to_horizon);
        assert_eq!(r.at_shift, 1);
    }

    #[test]
    fn proximality_rejects_non_members() {
        let p = set_p(&[2]);
        let x = SymbolStream::eventually_zero(&Word::from_bits("11"));
        assert!(matches!(
            proximality_estimate(&p, &x, 16),
            Err(SpacingError::NotInShift)
        ));
    }
}
