//! Maximum direction sets whose angle-ordered 4-subsets all have slope cross
//! ratio in the admissible set, the resulting bound `b_n`, and the magic
//! number `m_n`.
//!
//! A linear automorphism of the plane acts on slopes by a Möbius map and
//! preserves cross ratios, so three directions of any candidate set can be
//! moved to slopes `0, 1, ∞`. Every further slope `t` then satisfies
//! `⟨0,1,∞,t⟩ ∈ C` in its angle position, which leaves a finite pool (see
//! [`candidate_slopes`]). The search is an exact branch and bound over that
//! pool.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossratio::{cross_ratio, CrossRatioSet, ExtReal, ExtRealJson};
use crate::error::{Error, Result};
use crate::exactnum::{lcm, CycNum, FieldTag};

/// Conductors above this need an explicit opt-in for the search.
pub const LARGE_CONDUCTOR: u32 = 600;

/// Pairwise distinct slopes in angle order.
#[derive(Debug, Clone)]
pub struct SlopeSet {
    pub tag: FieldTag,
    pub slopes: Vec<ExtReal>,
}

impl SlopeSet {
    pub fn new(tag: FieldTag, slopes: Vec<ExtReal>) -> Result<Self> {
        Ok(SlopeSet {
            tag,
            slopes: angle_order(slopes)?,
        })
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }
}

/// Counts from the ordering-sensitivity channel of the search.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDiagnostics {
    /// 4-subsets rejected by the literal angle-ordered test.
    pub literal_rejections: u64,
    /// Of those, how many a cyclic rotation or reversal of the tuple would have accepted.
    pub accepted_after_reordering: u64,
}

#[derive(Debug, Clone)]
pub struct BoundResult {
    pub tag: FieldTag,
    pub bound: usize,
    pub witness: SlopeSet,
    pub exhaustive: bool,
    pub elapsed: Duration,
    pub pool_size: usize,
    pub diagnostics: OrderDiagnostics,
}

fn angle_class(t: &ExtReal) -> u8 {
    match t {
        ExtReal::Infinity => 1,
        ExtReal::Finite(x) => match x.real_sign() {
            Ordering::Less => 2,
            _ => 0,
        },
    }
}

/// Compare two slopes by the angle `θ ∈ [0, π)` of their directions.
pub fn angle_cmp(a: &ExtReal, b: &ExtReal) -> Ordering {
    angle_class(a)
        .cmp(&angle_class(b))
        .then_with(|| match (a, b) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => {
                let (fx, fy) = (x.to_f64(), y.to_f64());
                if (fx - fy).abs() > 1e-9 * (1.0 + fx.abs().max(fy.abs())) {
                    fx.partial_cmp(&fy).unwrap()
                } else {
                    (x - y).real_sign()
                }
            }
            _ => Ordering::Equal,
        })
}

/// Sort slopes by direction angle: nonnegative slopes ascending, then `∞`,
/// then negative slopes ascending.
pub fn angle_order(mut slopes: Vec<ExtReal>) -> Result<Vec<ExtReal>> {
    slopes.sort_by(angle_cmp);
    if slopes.windows(2).any(|w| w[0].same_value(&w[1])) {
        return Err(Error::RepeatedValue);
    }
    Ok(slopes)
}

/// `{0, 1, ∞}` together with `c/(c−1)`, `(c−1)/c` and `1/(1−c)` for every
/// admissible cross ratio `c`: the slopes `t` for which the angle-ordered
/// `{0, 1, ∞, t}` has cross ratio `c` when `t > 1`, `0 < t < 1` and `t < 0`
/// respectively. Returned in angle order, with conductor `N`.
pub fn candidate_slopes(set: &CrossRatioSet) -> Result<Vec<ExtReal>> {
    let big_n = set.tag.big_n;
    let zero = CycNum::zero(big_n);
    let one = CycNum::one(big_n);
    let mut out = vec![
        ExtReal::Finite(zero),
        ExtReal::Finite(one.clone()),
        ExtReal::Infinity,
    ];
    let mut seen: std::collections::HashSet<ExtReal> = out.iter().cloned().collect();
    for v in &set.values {
        let c = v
            .descend(big_n)?
            .ok_or_else(|| Error::Invalid(format!("{v} is not in Q(zeta_{big_n})")))?;
        let c_minus_one = &c - &one;
        let derived = [
            &c * &c_minus_one.inv()?,
            &c_minus_one * &c.inv()?,
            (&one - &c).inv()?,
        ];
        for t in derived {
            let t = ExtReal::Finite(t);
            if seen.insert(t.clone()) {
                out.push(t);
            }
        }
    }
    angle_order(out)
}

/// Exact admissibility oracle for 4-subsets of a fixed slope pool.
struct Admissibility<'a> {
    slopes: &'a [ExtReal],
    approx: Vec<f64>,
    /// admissible values in conductor `N`, sorted by approximation
    values: Vec<(f64, CycNum)>,
    memo: Vec<Mutex<HashMap<[u16; 4], bool>>>,
    rejections: AtomicU64,
    reordered: AtomicU64,
}

const SHARDS: usize = 64;
const NEAR: f64 = 1e-6;

impl<'a> Admissibility<'a> {
    fn new(slopes: &'a [ExtReal], set: &CrossRatioSet) -> Result<Self> {
        let big_n = set.tag.big_n;
        let mut values = Vec::with_capacity(set.len());
        for v in &set.values {
            let d = v
                .descend(big_n)?
                .ok_or_else(|| Error::Invalid(format!("{v} is not in Q(zeta_{big_n})")))?;
            values.push((v.to_f64(), d));
        }
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Admissibility {
            approx: slopes.iter().map(ExtReal::to_f64).collect(),
            slopes,
            values,
            memo: (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect(),
            rejections: AtomicU64::new(0),
            reordered: AtomicU64::new(0),
        })
    }

    fn float_cross_ratio(&self, idx: [usize; 4]) -> f64 {
        let t = idx.map(|i| self.approx[i]);
        let d = |a: usize, b: usize| -> Option<f64> {
            if t[a].is_infinite() || t[b].is_infinite() {
                None
            } else {
                Some(t[a] - t[b])
            }
        };
        let prod = |x: Option<f64>, y: Option<f64>| x.unwrap_or(1.0) * y.unwrap_or(1.0);
        prod(d(2, 0), d(3, 1)) / prod(d(2, 1), d(3, 0))
    }

    /// Candidates in `C` near a float value.
    fn near(&self, x: f64) -> impl Iterator<Item = &CycNum> {
        let lo = x - NEAR * x.abs().max(1.0);
        let hi = x + NEAR * x.abs().max(1.0);
        let start = self.values.partition_point(|v| v.0 < lo);
        self.values[start..]
            .iter()
            .take_while(move |v| v.0 <= hi)
            .map(|v| &v.1)
    }

    /// Exact test `⟨t⟩ = c` without division.
    fn exact_equals(&self, idx: [usize; 4], c: &CycNum) -> bool {
        let t = idx.map(|i| &self.slopes[i]);
        let d = |a: usize, b: usize| -> Option<CycNum> {
            match (t[a], t[b]) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) => Some(x - y),
                _ => None,
            }
        };
        let prod = |x: Option<CycNum>, y: Option<CycNum>| match (x, y) {
            (Some(x), Some(y)) => &x * &y,
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => unreachable!("at most one infinite slope"),
        };
        let num = prod(d(2, 0), d(3, 1));
        let den = prod(d(2, 1), d(3, 0));
        num == &den * c
    }

    fn literal(&self, idx: [usize; 4]) -> bool {
        let x = self.float_cross_ratio(idx);
        self.near(x).any(|c| self.exact_equals(idx, c))
    }

    /// `idx` must be increasing (angle order).
    fn admissible(&self, idx: [usize; 4]) -> bool {
        let key = idx.map(|i| i as u16);
        let shard = (idx[0] * 31 + idx[1] * 17 + idx[2] * 7 + idx[3]) % SHARDS;
        if let Some(&v) = self.memo[shard].lock().unwrap().get(&key) {
            return v;
        }
        let ok = self.literal(idx);
        if !ok {
            self.rejections.fetch_add(1, AtomicOrdering::Relaxed);
            // rotating the angle order once maps λ to λ/(λ−1); reversal fixes λ
            let x = self.float_cross_ratio(idx);
            let rotated = x / (x - 1.0);
            if rotated.is_finite() && self.near(rotated).next().is_some() {
                let rot = [idx[1], idx[2], idx[3], idx[0]];
                if self.literal(rot) {
                    self.reordered.fetch_add(1, AtomicOrdering::Relaxed);
                }
            }
        }
        self.memo[shard].lock().unwrap().insert(key, ok);
        ok
    }
}

fn sorted4(mut v: [usize; 4]) -> [usize; 4] {
    v.sort_unstable();
    v
}

/// Search state shared by all branches.
struct Search<'a> {
    adm: &'a Admissibility<'a>,
    anchors: [usize; 3],
    pair_ok: Vec<Vec<bool>>,
    best: AtomicUsize,
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    nodes: AtomicU64,
}

impl Search<'_> {
    fn compatible(&self, chosen: &[usize], v: usize, c: usize) -> bool {
        if !self.pair_ok[v][c] {
            return false;
        }
        for (i, &s) in chosen.iter().enumerate() {
            for &a in &self.anchors {
                if !self.adm.admissible(sorted4([a, s, v, c])) {
                    return false;
                }
            }
            for &s2 in &chosen[i + 1..] {
                if !self.adm.admissible(sorted4([s, s2, v, c])) {
                    return false;
                }
            }
        }
        true
    }

    fn out_of_time(&self) -> bool {
        if self.timed_out.load(AtomicOrdering::Relaxed) {
            return true;
        }
        let n = self.nodes.fetch_add(1, AtomicOrdering::Relaxed);
        if n.is_multiple_of(256) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out.store(true, AtomicOrdering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    /// Depth-first expansion in lexicographic order; records the first set of
    /// each new maximum size into `found`.
    fn expand(&self, chosen: &mut Vec<usize>, cands: &[usize], found: &mut Vec<usize>) {
        if self.out_of_time() {
            return;
        }
        let size = chosen.len() + 3;
        if chosen.len() > found.len() {
            *found = chosen.clone();
            self.best.fetch_max(size, AtomicOrdering::Relaxed);
        }
        for (i, &v) in cands.iter().enumerate() {
            // prune only when even taking every remaining candidate cannot
            // reach the best size seen so far
            if size + (cands.len() - i) < self.best.load(AtomicOrdering::Relaxed) {
                return;
            }
            let next: Vec<usize> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&c| self.compatible(chosen, v, c))
                .collect();
            if size + 1 + next.len() < self.best.load(AtomicOrdering::Relaxed) {
                continue;
            }
            chosen.push(v);
            self.expand(chosen, &next, found);
            chosen.pop();
            if self.timed_out.load(AtomicOrdering::Relaxed) {
                return;
            }
        }
    }
}

/// Branch and bound over subsets of `pool` that contain the anchors
/// `0, 1, ∞`. `pool` must be in angle order.
pub fn max_admissible_in_pool(
    tag: FieldTag,
    pool: &[ExtReal],
    set: &CrossRatioSet,
    budget: Option<Duration>,
) -> Result<BoundResult> {
    let start = Instant::now();
    let adm = Admissibility::new(pool, set)?;
    let find = |target: &ExtReal| pool.iter().position(|t| t.same_value(target));
    let big_n = tag.big_n;
    let anchors = [
        find(&ExtReal::Finite(CycNum::zero(big_n))),
        find(&ExtReal::Finite(CycNum::one(big_n))),
        find(&ExtReal::Infinity),
    ];
    let [Some(a0), Some(a1), Some(ainf)] = anchors else {
        return Err(Error::Invalid("pool must contain 0, 1 and ∞".into()));
    };
    let anchors = [a0, a1, ainf];
    let others: Vec<usize> = (0..pool.len()).filter(|i| !anchors.contains(i)).collect();

    // a candidate must itself be compatible with the three anchors
    let base: Vec<usize> = others
        .par_iter()
        .copied()
        .filter(|&v| adm.admissible(sorted4([a0, a1, ainf, v])))
        .collect();

    let pair_ok: Vec<Vec<bool>> = (0..pool.len())
        .into_par_iter()
        .map(|v| {
            (0..pool.len())
                .map(|c| {
                    if v == c || anchors.contains(&v) || anchors.contains(&c) {
                        return false;
                    }
                    let pairs = [(a0, a1), (a0, ainf), (a1, ainf)];
                    pairs
                        .iter()
                        .all(|&(x, y)| adm.admissible(sorted4([x, y, v, c])))
                })
                .collect()
        })
        .collect();

    let search = Search {
        adm: &adm,
        anchors,
        pair_ok,
        best: AtomicUsize::new(3),
        deadline: budget.map(|b| start + b),
        timed_out: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
    };

    let branches: Vec<Vec<usize>> = (0..base.len())
        .into_par_iter()
        .map(|i| {
            let v = base[i];
            let next: Vec<usize> = base[i + 1..]
                .iter()
                .copied()
                .filter(|&c| search.compatible(&[], v, c))
                .collect();
            let mut chosen = vec![v];
            let mut found = vec![v];
            search.best.fetch_max(4, AtomicOrdering::Relaxed);
            search.expand(&mut chosen, &next, &mut found);
            found
        })
        .collect();

    let best = branches
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
        .unwrap_or_default();
    let mut members: Vec<usize> = anchors.iter().copied().chain(best).collect();
    members.sort_unstable();
    let slopes: Vec<ExtReal> = members.iter().map(|&i| pool[i].clone()).collect();
    Ok(BoundResult {
        tag,
        bound: slopes.len(),
        witness: SlopeSet { tag, slopes },
        exhaustive: !search.timed_out.load(AtomicOrdering::Relaxed),
        elapsed: start.elapsed(),
        pool_size: pool.len(),
        diagnostics: OrderDiagnostics {
            literal_rejections: adm.rejections.load(AtomicOrdering::Relaxed),
            accepted_after_reordering: adm.reordered.load(AtomicOrdering::Relaxed),
        },
    })
}

/// Refuse conductors above [`LARGE_CONDUCTOR`] unless explicitly allowed.
pub fn check_size(tag: FieldTag, allow_large: bool) -> Result<()> {
    if tag.m > LARGE_CONDUCTOR && !allow_large {
        return Err(Error::TooLarge { n: tag.n, m: tag.m });
    }
    Ok(())
}

/// Largest slope set (normalised to contain `0, 1, ∞`) all of whose
/// angle-ordered 4-subsets have cross ratio in `set`.
pub fn max_admissible_set(
    set: &CrossRatioSet,
    budget: Option<Duration>,
    allow_large: bool,
) -> Result<BoundResult> {
    let tag = set.tag;
    check_size(tag, allow_large)?;
    let pool = candidate_slopes(set)?;
    let pool = if closed_under_rotation(set)? {
        consecutive_anchor_pool(pool)
    } else {
        pool
    };
    max_admissible_in_pool(tag, &pool, set, budget)
}

/// Whether `λ ∈ C` implies `λ/(λ−1) ∈ C`, i.e. admissibility of a 4-subset
/// does not depend on where the cyclic angle order starts.
pub fn closed_under_rotation(set: &CrossRatioSet) -> Result<bool> {
    for v in &set.values {
        let one = CycNum::one(v.conductor());
        if !set.contains(&(v * &(v - &one).inv()?)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Keep the anchors and the negative slopes.
///
/// Any three cyclically consecutive directions of a set can be sent to
/// `0, 1, ∞` by an orientation-preserving linear map, which then sends every
/// other direction strictly between `∞` and `0`, i.e. to a negative slope.
/// When admissibility is rotation independent this loses no maximum.
fn consecutive_anchor_pool(pool: Vec<ExtReal>) -> Vec<ExtReal> {
    pool.into_iter()
        .filter(|t| match t {
            ExtReal::Infinity => true,
            ExtReal::Finite(x) => x.is_zero() || x.is_one() || x.real_sign() == Ordering::Less,
        })
        .collect()
}

/// Re-check every angle-ordered 4-subset of a slope set against `set`,
/// computing each cross ratio exactly.
pub fn verify_admissible(slopes: &SlopeSet, set: &CrossRatioSet) -> Result<bool> {
    let t = &slopes.slopes;
    let k = t.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let cr = cross_ratio(&t[a], &t[b], &t[c], &t[d])?;
                    if !set.contains(&cr) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct MagicResult {
    pub tag: FieldTag,
    pub magic: usize,
    pub bound: BoundResult,
    pub exhaustive: bool,
    pub note: Option<String>,
}

/// Magic number: one more than the largest direction set that can carry a
/// U-polygon. For the square lattice (`n = 4`) the cross-ratio bound is not
/// the lattice bound; the lattice admits six-direction U-polygons and no
/// seven-direction ones, so the answer there is 7.
pub fn magic_number(
    set: &CrossRatioSet,
    budget: Option<Duration>,
    allow_large: bool,
) -> Result<MagicResult> {
    let bound = max_admissible_set(set, budget, allow_large)?;
    let exhaustive = bound.exhaustive;
    let (magic, note) = if set.tag.n == 4 {
        (
            7,
            Some(format!(
                "square lattice: value from the lattice argument (U-polygons exist for six \
                 directions); the cross-ratio search gives bound {}",
                bound.bound
            )),
        )
    } else {
        (bound.bound + 1, None)
    };
    Ok(MagicResult {
        tag: set.tag,
        magic,
        bound,
        exhaustive,
        note,
    })
}

/// Slopes `tan(hπ/N)`, `h = 0..N−1` (with `tan(π/2) = ∞`), exactly, in
/// conductor `lcm(2N, 4)`.
pub fn reference_slopes(big_n: u32) -> Vec<ExtReal> {
    let m = lcm(2 * big_n, 4);
    let i = CycNum::zeta_pow(m, (m / 4) as i64);
    (0..big_n)
        .map(|h| {
            let w = CycNum::zeta_pow(m, (h * (m / (2 * big_n))) as i64);
            let wc = w.conj();
            let re2 = &w + &wc;
            if re2.is_zero() {
                ExtReal::Infinity
            } else {
                let im2 = &(&w - &wc) * &(-&i);
                ExtReal::Finite(&im2 / &re2)
            }
        })
        .collect()
}

fn anchored_profile(t: &[ExtReal]) -> Result<Vec<CycNum>> {
    (3..t.len())
        .map(|j| cross_ratio(&t[0], &t[1], &t[2], &t[j]))
        .collect()
}

/// Whether a linear automorphism of the plane carries the witness directions
/// onto the directions `e^{hπi/N}`.
///
/// Orientation-preserving maps keep the cyclic angle order, so the witness in
/// angle order must match the reference in angle order up to a rotation;
/// the reference is invariant under rotation by `π/N` and under reflection,
/// so matching the fixed labelling is enough. Three slopes fix the Möbius map,
/// and the remaining slopes match iff their cross ratios against the first
/// three agree.
pub fn witness_matches_regular(witness: &SlopeSet) -> Result<bool> {
    let big_n = witness.tag.big_n as usize;
    if witness.len() != big_n {
        return Err(Error::SizeMismatch {
            got: witness.len(),
            expected: big_n,
        });
    }
    let w = angle_order(witness.slopes.clone())?;
    let r = reference_slopes(witness.tag.big_n);
    let pw = anchored_profile(&w)?;
    let pr = anchored_profile(&r)?;
    Ok(pw.iter().zip(&pr).all(|(a, b)| a.same_value(b)))
}

/// Multiset of angle-ordered 4-subset cross ratios, each replaced by the
/// smaller of `λ` and `λ/(λ−1)` (the pair swapped by rotating the angle
/// order), sorted.
pub fn cross_ratio_profile(slopes: &[ExtReal]) -> Result<Vec<CycNum>> {
    let t = angle_order(slopes.to_vec())?;
    let k = t.len();
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let l = cross_ratio(&t[a], &t[b], &t[c], &t[d])?;
                    let one = CycNum::one(l.conductor());
                    let rot = &l * &(&l - &one).inv()?;
                    out.push(if l.real_cmp(&rot)? == Ordering::Greater { rot } else { l });
                }
            }
        }
    }
    out.sort_by(|a, b| a.real_cmp(b).unwrap());
    Ok(out)
}

/// JSON document for the `bound` and `magic` verbs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u32,
    pub bound: usize,
    pub magic: usize,
    pub exhaustive: bool,
    pub witness: Vec<ExtRealJson>,
    pub matches_regular: bool,
    pub elapsed_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub pool_size: usize,
    pub diagnostics: OrderDiagnostics,
}

impl BoundReport {
    pub fn from_magic(r: &MagicResult) -> Result<Self> {
        let matches_regular = if r.bound.bound == r.tag.big_n as usize {
            witness_matches_regular(&r.bound.witness)?
        } else {
            false
        };
        Ok(BoundReport {
            n: r.tag.n,
            bound: r.bound.bound,
            magic: r.magic,
            exhaustive: r.exhaustive,
            witness: r.bound.witness.slopes.iter().map(ExtRealJson::from).collect(),
            matches_regular,
            elapsed_s: r.bound.elapsed.as_secs_f64(),
            note: r.note.clone(),
            pool_size: r.bound.pool_size,
            diagnostics: r.bound.diagnostics.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExtReal {
        ExtReal::rational(4, n, d)
    }

    #[test]
    fn angle_order_examples() {
        let got = angle_order(vec![q(3, 1), q(0, 1), ExtReal::Infinity, q(-1, 1)]).unwrap();
        let want = [q(0, 1), q(3, 1), ExtReal::Infinity, q(-1, 1)];
        assert!(got.iter().zip(&want).all(|(a, b)| a.same_value(b)));

        let got = angle_order(vec![q(2, 1), q(1, 2), q(1, 1)]).unwrap();
        assert!(got[0].same_value(&q(1, 2)) && got[2].same_value(&q(2, 1)));

        let got = angle_order(vec![q(-1, 2), q(-2, 1)]).unwrap();
        assert!(got[0].same_value(&q(-2, 1)));

        assert_eq!(
            angle_order(vec![q(1, 1), q(2, 2)]).unwrap_err(),
            Error::RepeatedValue
        );
    }

    #[test]
    fn reference_slopes_for_twelve() {
        let r = reference_slopes(12);
        assert_eq!(r.len(), 12);
        assert!(r[6].is_infinite());
        for (h, t) in r.iter().enumerate() {
            if h == 6 {
                continue;
            }
            let expect = (h as f64 * std::f64::consts::PI / 12.0).tan();
            assert!((t.to_f64() - expect).abs() < 1e-12);
        }
    }
}
