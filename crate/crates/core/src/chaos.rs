//! Orbit-distance statistics: distribution functions with finite-horizon
//! liminf/limsup proxies, distributional-chaos pair classification for
//! shift pairs via dyadic breakpoints, the zero-density agreement
//! criterion, reduction of one coordinate to the zero stream, Li-Yorke
//! and asymptotic pair evidence, separated-set counting, and tail-factor
//! languages as finite omega-limit proxies.

use std::collections::BTreeSet;

use crate::num::{pow2_neg, q, q_one, qu, CountFrac, Q};
use crate::words::{horizon_schedule, metric_rho, SymbolStream, Word};

/// A dynamical system exposed through iteration and exact distances.
/// `dist` may return 0 for points indistinguishable at the source's
/// resolution; callers that need the distinction use the underlying
/// module's own distance with its flags.
pub trait OrbitSource {
    type Point: Clone;
    fn step(&self, p: &Self::Point) -> Self::Point;
    fn dist(&self, a: &Self::Point, b: &Self::Point) -> Q;
    fn diameter(&self) -> Q;
}

/// The shift acting on symbol streams, with the prefix metric scanned to a
/// fixed horizon.
#[derive(Clone, Debug)]
pub struct ShiftSource {
    pub scan_horizon: usize,
}

impl OrbitSource for ShiftSource {
    type Point = SymbolStream;

    fn step(&self, p: &SymbolStream) -> SymbolStream {
        p.shifted(1)
    }

    fn dist(&self, a: &SymbolStream, b: &SymbolStream) -> Q {
        metric_rho(a, b, self.scan_horizon).value
    }

    fn diameter(&self) -> Q {
        q(1, 2)
    }
}

/// Exact distribution function values over the first n iterates, with
/// running min/max over the horizon schedule as liminf/limsup proxies.
#[derive(Clone, Debug)]
pub struct DistributionProfile {
    pub horizon: usize,
    pub breakpoints: Vec<Q>,
    /// counts |{i < horizon : dist < t}| per breakpoint
    pub counts: Vec<u64>,
    /// per breakpoint: min over the schedule of the count fraction
    pub lower: Vec<Q>,
    /// per breakpoint: max over the schedule of the count fraction
    pub upper: Vec<Q>,
    pub schedule: Vec<u64>,
}

impl DistributionProfile {
    pub fn value_at(&self, idx: usize) -> Q {
        qu(self.counts[idx]) / qu(self.horizon as u64)
    }

    pub fn fraction(&self, idx: usize) -> CountFrac {
        CountFrac::new(self.counts[idx], self.horizon as u64)
    }
}

/// Count fractions of iterates at distance below each breakpoint, over
/// orbit steps 0..n-1, together with schedule-indexed running extremes.
pub fn distribution<S: OrbitSource>(
    src: &S,
    x: &S::Point,
    y: &S::Point,
    n: usize,
    breakpoints: &[Q],
) -> DistributionProfile {
    assert!(n >= 1);
    let schedule = horizon_schedule(n as u64);
    let mut counts = vec![0u64; breakpoints.len()];
    let mut lower: Vec<Option<Q>> = vec![None; breakpoints.len()];
    let mut upper: Vec<Option<Q>> = vec![None; breakpoints.len()];
    let mut sched_idx = 0usize;
    let mut a = x.clone();
    let mut b = y.clone();
    for i in 0..n {
        let d = src.dist(&a, &b);
        for (t, c) in breakpoints.iter().zip(counts.iter_mut()) {
            if d < *t {
                *c += 1;
            }
        }
        let m = (i + 1) as u64;
        if sched_idx < schedule.len() && schedule[sched_idx] == m {
            for (j, c) in counts.iter().enumerate() {
                let f = qu(*c) / qu(m);
                if lower[j].as_ref().map_or(true, |lo| f < *lo) {
                    lower[j] = Some(f.clone());
                }
                if upper[j].as_ref().map_or(true, |hi| f > *hi) {
                    upper[j] = Some(f);
                }
            }
            sched_idx += 1;
        }
        if i + 1 < n {
            a = src.step(&a);
            b = src.step(&b);
        }
    }
    DistributionProfile {
        horizon: n,
        breakpoints: breakpoints.to_vec(),
        counts,
        lower: lower.into_iter().map(Option::unwrap).collect(),
        upper: upper.into_iter().map(Option::unwrap).collect(),
        schedule,
    }
}

/// Pair classification outcomes. Every verdict carries the numbers that
/// produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum PairVerdict {
    Dc1Evidence {
        breakpoint_k: u32,
        lower: Q,
        upper: Q,
    },
    Dc2Evidence {
        breakpoint_k: u32,
        lower: Q,
        upper: Q,
    },
    Dc3Evidence {
        breakpoint_k: u32,
        lower: Q,
        upper: Q,
    },
    NoDc3AtResolution {
        k_max: u32,
        max_gap: Q,
        horizon: usize,
    },
    LyEvidence {
        min_dist: Q,
        max_dist: Q,
    },
    AsymptoticEvidence {
        tail_max: Q,
        tail_start: usize,
    },
    NoLyAtResolution {
        min_dist: Q,
        max_dist: Q,
        tail_max: Q,
    },
}

/// Minimal proxy gap treated as evidence of a genuine liminf/limsup split;
/// smaller gaps are finite-horizon noise.
pub fn dc3_gap_threshold() -> Q {
    q(1, 16)
}

/// Per-breakpoint summary from a shift-pair scan.
#[derive(Clone, Debug)]
pub struct BreakpointRow {
    pub k: u32,
    pub lower: Q,
    pub upper: Q,
}

#[derive(Clone, Debug)]
pub struct ShiftPairReport {
    pub verdict: PairVerdict,
    pub rows: Vec<BreakpointRow>,
    pub horizon: usize,
}

/// Classify a shift pair by scanning only the dyadic breakpoints 2^-k,
/// k <= k_max. The distance between shifted streams is below 2^-k exactly
/// when they agree on at least k symbols, so only agreement run lengths up
/// to k_max matter. Evidence of a distributional gap requires the
/// limsup-liminf proxy difference to reach the gap threshold at some
/// breakpoint.
pub fn classify_shift_pair(
    x: &SymbolStream,
    y: &SymbolStream,
    k_max: u32,
    horizon: usize,
) -> ShiftPairReport {
    assert!(horizon >= 1);
    let schedule = horizon_schedule(horizon as u64);
    let scan = horizon + k_max as usize + 1;
    let mut mismatch_at = vec![false; scan];
    for (i, m) in mismatch_at.iter_mut().enumerate() {
        *m = x.symbol(i) != y.symbol(i);
    }
    // agree[i]: agreeing symbols from position i, capped at k_max + 1
    let mut agree = vec![0u32; horizon];
    let mut run = 0u32;
    for i in (0..scan).rev() {
        run = if mismatch_at[i] {
            0
        } else {
            std::cmp::min(run + 1, k_max + 1)
        };
        if i < horizon {
            agree[i] = run;
        }
    }

    // counts[k] at each schedule point: |{i < m : agree[i] >= k}|
    let ks: Vec<u32> = (0..=k_max).collect();
    let mut counts = vec![0u64; ks.len()];
    let mut lower: Vec<Option<Q>> = vec![None; ks.len()];
    let mut upper: Vec<Option<Q>> = vec![None; ks.len()];
    let mut sched_idx = 0usize;
    for (i, &a) in agree.iter().enumerate() {
        for (j, &k) in ks.iter().enumerate() {
            if a >= k {
                counts[j] += 1;
            }
        }
        let m = (i + 1) as u64;
        if sched_idx < schedule.len() && schedule[sched_idx] == m {
            for (j, c) in counts.iter().enumerate() {
                let f = qu(*c) / qu(m);
                if lower[j].as_ref().map_or(true, |lo| f < *lo) {
                    lower[j] = Some(f.clone());
                }
                if upper[j].as_ref().map_or(true, |hi| f > *hi) {
                    upper[j] = Some(f);
                }
            }
            sched_idx += 1;
        }
    }

    let rows: Vec<BreakpointRow> = ks
        .iter()
        .enumerate()
        .map(|(j, &k)| BreakpointRow {
            k,
            lower: lower[j].clone().unwrap(),
            upper: upper[j].clone().unwrap(),
        })
        .collect();

    let threshold = dc3_gap_threshold();
    let mut max_gap = q(0, 1);
    let mut witness: Option<&BreakpointRow> = None;
    for row in &rows {
        let gap = row.upper.clone() - row.lower.clone();
        if gap > max_gap {
            max_gap = gap.clone();
        }
        if witness.is_none() && gap >= threshold {
            witness = Some(row);
        }
    }
    let verdict = match witness {
        Some(row) => PairVerdict::Dc3Evidence {
            breakpoint_k: row.k,
            lower: row.lower.clone(),
            upper: row.upper.clone(),
        },
        None => PairVerdict::NoDc3AtResolution {
            k_max,
            max_gap,
            horizon,
        },
    };
    ShiftPairReport {
        verdict,
        rows,
        horizon,
    }
}

/// Upgrade a distribution profile to evidence of distributional chaos
/// type 1 or 2 when the upper proxy is exactly 1 at every breakpoint and
/// the lower proxy drops below 1 - 1/16 (type 2) or to exactly 0 (type 1)
/// somewhere; otherwise report the gap evidence or its absence.
pub fn classify_profile(profile: &DistributionProfile) -> PairVerdict {
    let one = q_one();
    let all_upper_one = profile.upper.iter().all(|u| *u == one);
    if all_upper_one {
        for (j, lo) in profile.lower.iter().enumerate() {
            if *lo == q(0, 1) {
                return PairVerdict::Dc1Evidence {
                    breakpoint_k: j as u32,
                    lower: lo.clone(),
                    upper: one,
                };
            }
        }
        for (j, lo) in profile.lower.iter().enumerate() {
            if lo.clone() < one.clone() - dc3_gap_threshold() {
                return PairVerdict::Dc2Evidence {
                    breakpoint_k: j as u32,
                    lower: lo.clone(),
                    upper: one,
                };
            }
        }
    }
    let mut max_gap = q(0, 1);
    let mut witness = None;
    for (j, (lo, hi)) in profile.lower.iter().zip(profile.upper.iter()).enumerate() {
        let gap = hi.clone() - lo.clone();
        if gap > max_gap {
            max_gap = gap.clone();
        }
        if witness.is_none() && gap >= dc3_gap_threshold() {
            witness = Some((j, lo.clone(), hi.clone()));
        }
    }
    match witness {
        Some((j, lower, upper)) => PairVerdict::Dc3Evidence {
            breakpoint_k: j as u32,
            lower,
            upper,
        },
        None => PairVerdict::NoDc3AtResolution {
            k_max: profile.breakpoints.len().saturating_sub(1) as u32,
            max_gap,
            horizon: profile.horizon,
        },
    }
}

/// Densities of 1s in two streams and of their disagreement set, with the
/// exact count inequality disagreements <= ones(x) + ones(y) verified at
/// every schedule point.
#[derive(Clone, Debug)]
pub struct AgreementReport {
    pub horizon: usize,
    /// (n, ones_x, ones_y, disagreements) at each schedule point
    pub samples: Vec<(u64, u64, u64, u64)>,
    pub subadditive_everywhere: bool,
    pub agreement_density_at_horizon: Q,
}

pub fn dc3_density_criterion(
    x: &SymbolStream,
    y: &SymbolStream,
    horizon: usize,
) -> AgreementReport {
    let schedule = horizon_schedule(horizon as u64);
    let mut ones_x = 0u64;
    let mut ones_y = 0u64;
    let mut disagree = 0u64;
    let mut samples = Vec::new();
    let mut sched_idx = 0usize;
    for i in 0..horizon {
        let a = x.symbol(i);
        let b = y.symbol(i);
        ones_x += u64::from(a != 0);
        ones_y += u64::from(b != 0);
        disagree += u64::from(a != b);
        let m = (i + 1) as u64;
        if sched_idx < schedule.len() && schedule[sched_idx] == m {
            samples.push((m, ones_x, ones_y, disagree));
            sched_idx += 1;
        }
    }
    let subadditive_everywhere = samples.iter().all(|&(_, ox, oy, d)| d <= ox + oy);
    let agreement_density_at_horizon = q_one() - qu(disagree) / qu(horizon as u64);
    AgreementReport {
        horizon,
        samples,
        subadditive_everywhere,
        agreement_density_at_horizon,
    }
}

/// Window comparison transferring a pair (x, y) to (zero stream, y):
/// counts of length-l window disagreements between x and y versus windows
/// of y differing from the all-zero word, with the exact bound
/// |A - B| <= |{windows of x that are not all-zero}|.
#[derive(Clone, Debug)]
pub struct ZeroReductionReport {
    pub l: usize,
    /// (s, xy_window_diffs, y_nonzero_windows, x_nonzero_windows)
    pub samples: Vec<(u64, u64, u64, u64)>,
    pub bound_holds_everywhere: bool,
}

pub fn reduce_to_zero(
    x: &SymbolStream,
    y: &SymbolStream,
    l: usize,
    horizon: usize,
) -> ZeroReductionReport {
    assert!(l >= 1);
    let schedule = horizon_schedule(horizon as u64);
    let scan = horizon + l;
    let xw = x.prefix(scan);
    let yw = y.prefix(scan);
    let mut a_count = 0u64; // x window != y window
    let mut b_count = 0u64; // y window != 0^l
    let mut c_count = 0u64; // x window != 0^l
    let mut samples = Vec::new();
    let mut sched_idx = 0usize;
    for k in 0..horizon {
        let mut diff = false;
        let mut y_nonzero = false;
        let mut x_nonzero = false;
        for j in 0..l {
            let xs = xw.get(k + j).unwrap();
            let ys = yw.get(k + j).unwrap();
            diff |= xs != ys;
            y_nonzero |= ys != 0;
            x_nonzero |= xs != 0;
        }
        a_count += u64::from(diff);
        b_count += u64::from(y_nonzero);
        c_count += u64::from(x_nonzero);
        let m = (k + 1) as u64;
        if sched_idx < schedule.len() && schedule[sched_idx] == m {
            samples.push((m, a_count, b_count, c_count));
            sched_idx += 1;
        }
    }
    let bound_holds_everywhere = samples.iter().all(|&(_, a, b, c)| a.abs_diff(b) <= c);
    ZeroReductionReport {
        l,
        samples,
        bound_holds_everywhere,
    }
}

#[derive(Clone, Debug)]
pub struct LyTolerances {
    pub tol_low: Q,
    pub tol_high: Q,
}

impl Default for LyTolerances {
    fn default() -> Self {
        LyTolerances {
            tol_low: pow2_neg(10),
            tol_high: q(1, 4),
        }
    }
}

/// Li-Yorke / asymptotic evidence over a finite orbit segment: LY needs an
/// observed approach below tol_low and a separation above tol_high;
/// asymptotic evidence means the whole trailing quarter stays below
/// tol_low and takes precedence.
pub fn ly_classify<S: OrbitSource>(
    src: &S,
    x: &S::Point,
    y: &S::Point,
    horizon: usize,
    tol: &LyTolerances,
) -> PairVerdict {
    assert!(horizon >= 4);
    let tail_start = horizon - horizon / 4;
    let mut a = x.clone();
    let mut b = y.clone();
    let mut min_dist: Option<Q> = None;
    let mut max_dist: Option<Q> = None;
    let mut tail_max: Option<Q> = None;
    for i in 0..horizon {
        let d = src.dist(&a, &b);
        if min_dist.as_ref().map_or(true, |m| d < *m) {
            min_dist = Some(d.clone());
        }
        if max_dist.as_ref().map_or(true, |m| d > *m) {
            max_dist = Some(d.clone());
        }
        if i >= tail_start && tail_max.as_ref().map_or(true, |m| d > *m) {
            tail_max = Some(d.clone());
        }
        if i + 1 < horizon {
            a = src.step(&a);
            b = src.step(&b);
        }
    }
    let min_dist = min_dist.unwrap();
    let max_dist = max_dist.unwrap();
    let tail_max = tail_max.unwrap();
    if tail_max <= tol.tol_low {
        PairVerdict::AsymptoticEvidence {
            tail_max,
            tail_start,
        }
    } else if min_dist <= tol.tol_low && max_dist >= tol.tol_high {
        PairVerdict::LyEvidence { min_dist, max_dist }
    } else {
        PairVerdict::NoLyAtResolution {
            min_dist,
            max_dist,
            tail_max,
        }
    }
}

/// Greedy maximal subset of `sample` that is (n, eps)-separated: any two
/// kept points are at distance > eps at some step below n. The size is a
/// lower bound for the separated-set count.
pub fn separated_count<S: OrbitSource>(src: &S, sample: &[S::Point], n: usize, eps: &Q) -> usize {
    assert!(n >= 1);
    let orbits: Vec<Vec<S::Point>> = sample
        .iter()
        .map(|p| {
            let mut o = Vec::with_capacity(n);
            let mut cur = p.clone();
            for _ in 0..n {
                o.push(cur.clone());
                cur = src.step(&cur);
            }
            o
        })
        .collect();
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..sample.len() {
        let separated_from_all = kept
            .iter()
            .all(|&j| (0..n).any(|t| src.dist(&orbits[i][t], &orbits[j][t]) > *eps));
        if separated_from_all {
            kept.push(i);
        }
    }
    kept.len()
}

/// Words of the given length occurring in x at some position at or past
/// `tail_start` (0-based), within the first `prefix_len` symbols. A finite
/// proxy for the language of the orbit-tail closure.
pub fn omega_language(
    x: &SymbolStream,
    word_len: usize,
    prefix_len: usize,
    tail_start: usize,
) -> BTreeSet<Word> {
    assert!(tail_start < prefix_len && word_len <= prefix_len - tail_start);
    let prefix = x.prefix(prefix_len);
    let mut out = BTreeSet::new();
    for s in tail_start..=prefix_len - word_len {
        out.insert(prefix.factor(s, word_len).unwrap());
    }
    out
}

/// Dyadic breakpoints 2^0 .. 2^-k_max.
pub fn dyadic_breakpoints(k_max: u32) -> Vec<Q> {
    (0..=k_max).map(pow2_neg).collect()
}

/// A stream whose density of 1s oscillates between near 0 and near 1
/// along factorially growing horizons: with thresholds t_j = (j+1)!, the
/// symbol at 1-based position p is 1 exactly when p lies in an interval
/// (t_{2m}, t_{2m+1}].
pub fn factorial_oscillation_stream() -> SymbolStream {
    SymbolStream::from_rule("factorial-oscillation", |i| {
        let pos = (i + 1) as u64;
        let mut t = 1u64; // t_0 = 1!
        let mut j = 0u64;
        loop {
            let next = match t.checked_mul(j + 2) {
                Some(v) => v,
                None => return 0,
            };
            if pos <= next {
                return u8::from(j % 2 == 0 && pos > t);
            }
            t = next;
            j += 1;
        }
    })
}
