//! Exhaustive enumeration of stage-group product sets on small grids.
//!
//! Every permutation of a grid with at most nine cells is identified with
//! its Lehmer rank, so a subset of the symmetric group is a bitset of
//! `(m n)!` bits. Product sets `G_{w_1} ... G_{w_k}` are built by repeatedly
//! multiplying the current set by a whole stage group.

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;
use thiserror::Error;

use crate::decompose::MultiGridPermutation;
use crate::lehmer::{self, SmallPerm, MAX_POINTS};
use crate::perm::{AlternationWord, GridPermutation, StageKind};

/// Product of the factor sizes for multi-factor schedules.
pub const MULTI_POINT_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("instance has {points} points, limit is {limit}")]
    InstanceTooLarge { points: usize, limit: usize },
    #[error("factor sizes must be positive, got {0:?}")]
    BadDims(Vec<usize>),
    #[error("axis {axis} is outside 1..={k}")]
    BadAxis { axis: usize, k: usize },
    #[error("consistency violation: {0}")]
    ConsistencyViolation(String),
    #[error("could not start worker pool: {0}")]
    Threads(String),
}

/// A subset of `Sym(N)` keyed by Lehmer rank.
#[derive(Clone, PartialEq, Eq)]
pub struct RankSet {
    bits: Vec<u64>,
    universe: u32,
}

impl std::fmt::Debug for RankSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RankSet({} of {})", self.len(), self.universe)
    }
}

impl RankSet {
    pub fn empty(universe: u32) -> Self {
        Self { bits: vec![0; (universe as usize).div_ceil(64)], universe }
    }

    pub fn full(universe: u32) -> Self {
        let mut s = Self::empty(universe);
        (0..universe).for_each(|r| {
            s.insert(r);
        });
        s
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    /// Returns true if `r` was not yet present.
    pub fn insert(&mut self, r: u32) -> bool {
        let (w, b) = ((r / 64) as usize, r % 64);
        let fresh = self.bits[w] & (1 << b) == 0;
        self.bits[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, r: u32) -> bool {
        self.bits[(r / 64) as usize] & (1 << (r % 64)) != 0
    }

    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    i as u32 * 64 + b
                })
            })
        })
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        Self { bits, universe: self.universe }
    }

    pub fn union(&self, other: &Self) -> Self {
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        Self { bits, universe: self.universe }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Smallest rank not in the set.
    pub fn first_missing(&self) -> Option<u32> {
        (0..self.universe).find(|&r| !self.contains(r))
    }

    fn merge(&mut self, other: &Self) {
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
    }
}

/// All elements of the stage group that only changes coordinate `axis`
/// (1-based) of the product with factor sizes `dims`.
pub fn stage_group(dims: &[usize], axis: usize) -> Vec<SmallPerm> {
    let len: usize = dims.iter().product();
    let i = axis - 1;
    let d = dims[i];
    let stride: usize = dims[i + 1..].iter().product();
    let fibers = len / d;
    let choices = lehmer::factorial(d);
    let local: Vec<SmallPerm> = (0..choices as u32).map(|r| lehmer::unrank(d, r)).collect();
    let count = choices.pow(fibers as u32);
    let mut out = Vec::with_capacity(count as usize);
    let mut pick = vec![0usize; fibers];
    for _ in 0..count {
        let mut g = lehmer::identity();
        for (x, slot) in g.iter_mut().enumerate().take(len) {
            let (hi, rest) = (x / (d * stride), x % (d * stride));
            let (v, lo) = (rest / stride, rest % stride);
            let f = hi * stride + lo;
            *slot = (hi * d * stride + local[pick[f]][v] as usize * stride + lo) as u8;
        }
        out.push(g);
        for p in pick.iter_mut() {
            *p += 1;
            if *p < local.len() {
                break;
            }
            *p = 0;
        }
    }
    out
}

/// Shared enumeration context for one product shape.
pub struct Enumerator {
    dims: Vec<usize>,
    len: usize,
    universe: u32,
    groups: Vec<Vec<SmallPerm>>,
    pool: Option<ThreadPool>,
}

impl Enumerator {
    /// `threads <= 1` runs on the calling thread.
    pub fn new(dims: &[usize], limit: usize, threads: usize) -> Result<Self, CensusError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(CensusError::BadDims(dims.to_vec()));
        }
        let len: usize = dims.iter().product();
        if len > limit.min(MAX_POINTS) {
            return Err(CensusError::InstanceTooLarge { points: len, limit: limit.min(MAX_POINTS) });
        }
        let groups = (1..=dims.len()).map(|a| stage_group(dims, a)).collect();
        let pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| CensusError::Threads(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self { dims: dims.to_vec(), len, universe: lehmer::factorial(len) as u32, groups, pool })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> u64 {
        self.universe as u64
    }

    pub fn group(&self, axis: usize) -> Result<&[SmallPerm], CensusError> {
        self.groups
            .get(axis.wrapping_sub(1))
            .map(Vec::as_slice)
            .ok_or(CensusError::BadAxis { axis, k: self.dims.len() })
    }

    pub fn group_set(&self, axis: usize) -> Result<RankSet, CensusError> {
        let mut s = RankSet::empty(self.universe);
        for g in self.group(axis)? {
            s.insert(lehmer::rank(&g[..self.len]));
        }
        Ok(s)
    }

    /// `{ g ∘ s }` when `group_on_left`, otherwise `{ s ∘ g }`.
    fn products(&self, set: &RankSet, group: &[SmallPerm], group_on_left: bool) -> RankSet {
        if set.is_full() {
            return set.clone();
        }
        let len = self.len;
        let universe = self.universe;
        let total = universe as u64;
        let members: Vec<u32> = set.iter().collect();
        let chunk = |ranks: &[u32]| {
            let mut local = RankSet::empty(universe);
            let mut count = 0u64;
            for &r in ranks {
                let s = lehmer::unrank(len, r);
                for g in group {
                    let p = if group_on_left { lehmer::compose(g, &s, len) } else { lehmer::compose(&s, g, len) };
                    if local.insert(lehmer::rank(&p[..len])) {
                        count += 1;
                        if count == total {
                            return local;
                        }
                    }
                }
            }
            local
        };
        match &self.pool {
            None => chunk(&members),
            Some(pool) => {
                let size = members.len().div_ceil(pool.current_num_threads() * 4).max(1);
                let parts: Vec<RankSet> = pool.install(|| members.par_chunks(size).map(chunk).collect());
                let mut out = RankSet::empty(universe);
                parts.iter().for_each(|p| out.merge(p));
                out
            }
        }
    }

    /// `set · G_axis` (group applied first) or `G_axis · set`.
    pub fn multiply(&self, set: &RankSet, axis: usize, group_on_left: bool) -> Result<RankSet, CensusError> {
        Ok(self.products(set, self.group(axis)?, group_on_left))
    }

    /// The product set `G_{w_1} G_{w_2} ... G_{w_k}` for a word of axes.
    pub fn word_set(&self, word: &[usize]) -> Result<RankSet, CensusError> {
        let mut set = RankSet::empty(self.universe);
        set.insert(lehmer::rank(&lehmer::identity()[..self.len]));
        for &axis in word {
            set = self.multiply(&set, axis, false)?;
        }
        Ok(set)
    }

    pub fn unrank_table(&self, r: u32) -> Vec<usize> {
        lehmer::unrank(self.len, r)[..self.len].iter().map(|&x| x as usize).collect()
    }
}

fn axis_of(kind: StageKind) -> usize {
    match kind {
        StageKind::L => 1,
        StageKind::R => 2,
    }
}

/// The exact product set of a word over `{L, R}` on the `m x n` grid.
pub fn product_set(m: usize, n: usize, word: &AlternationWord, threads: usize) -> Result<RankSet, CensusError> {
    let e = Enumerator::new(&[m, n], MAX_POINTS, threads)?;
    let axes: Vec<usize> = word.letters().iter().map(|&k| axis_of(k)).collect();
    e.word_set(&axes)
}

/// The product set of a multi-factor word of 1-based axes.
pub fn product_set_axes(dims: &[usize], word: &[usize], threads: usize) -> Result<RankSet, CensusError> {
    let limit = if dims.len() <= 2 { MAX_POINTS } else { MULTI_POINT_LIMIT };
    Enumerator::new(dims, limit, threads)?.word_set(word)
}

/// Set sizes for the canonical words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct WordSizes {
    #[serde(rename = "1")]
    pub one: u64,
    pub L: u64,
    pub R: u64,
    pub LR: u64,
    pub RL: u64,
    pub LRL: u64,
    pub RLR: u64,
}

impl WordSizes {
    pub fn entries(&self) -> [(&'static str, u64); 7] {
        [
            ("1", self.one),
            ("L", self.L),
            ("R", self.R),
            ("LR", self.LR),
            ("RL", self.RL),
            ("LRL", self.LRL),
            ("RLR", self.RLR),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyRow {
    pub level: usize,
    pub sigma: u64,
    pub pi: u64,
    pub delta: u64,
    pub union: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hierarchy {
    pub rows: Vec<HierarchyRow>,
    /// Least level whose `Δ_i` is the whole group.
    pub collapse_level: Option<usize>,
    /// Least level whose `Σ_i ∪ Π_i` is the whole group.
    pub join_level: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub m: usize,
    pub n: usize,
    pub total: u64,
    pub sizes: WordSizes,
    /// `m!^n * n!^m`.
    pub lr_formula: u64,
    pub intersection_lr_rl: u64,
    pub union_lr_rl: u64,
    pub hierarchy: Hierarchy,
}

const MAX_LEVEL: usize = 6;

fn hierarchy_with(e: &Enumerator) -> Result<Hierarchy, CensusError> {
    let mut sigma = e.group_set(1)?;
    let mut pi = e.group_set(2)?;
    let mut rows = Vec::new();
    let mut collapse_level = None;
    let mut join_level = None;
    for level in 1..=MAX_LEVEL {
        let delta = sigma.intersection(&pi);
        let union = sigma.union(&pi);
        rows.push(HierarchyRow { level, sigma: sigma.len(), pi: pi.len(), delta: delta.len(), union: union.len() });
        if join_level.is_none() && union.is_full() {
            join_level = Some(level);
        }
        if delta.is_full() {
            collapse_level = Some(level);
            break;
        }
        let next_sigma = e.multiply(&pi, 1, true)?;
        let next_pi = e.multiply(&sigma, 2, true)?;
        sigma = next_sigma;
        pi = next_pi;
    }
    Ok(Hierarchy { rows, collapse_level, join_level })
}

/// The alternation hierarchy `Σ_1 = G_L`, `Π_1 = G_R`,
/// `Σ_{i+1} = G_L Π_i`, `Π_{i+1} = G_R Σ_i`, `Δ_i = Σ_i ∩ Π_i`.
pub fn hierarchy(m: usize, n: usize, threads: usize) -> Result<Hierarchy, CensusError> {
    hierarchy_with(&Enumerator::new(&[m, n], MAX_POINTS, threads)?)
}

/// `m!^n * n!^m`, or `None` on overflow.
pub fn lr_size_formula(m: usize, n: usize) -> Option<u64> {
    let a = lehmer::factorial(m).checked_pow(n as u32)?;
    let b = lehmer::factorial(n).checked_pow(m as u32)?;
    a.checked_mul(b)
}

/// Full census of `Sym(m x n)` for `m n <= 9`.
///
/// Besides computing the sizes it cross-checks the closed-form size of
/// `G_LR`, the equalities `G_LRL = G_RLR = Sym`, and the column/row
/// membership tests against the enumerated sets for every permutation.
pub fn census(m: usize, n: usize, threads: usize) -> Result<CensusReport, CensusError> {
    let e = Enumerator::new(&[m, n], MAX_POINTS, threads)?;
    let (l, r) = (1, 2);
    let set_l = e.group_set(l)?;
    let set_r = e.group_set(r)?;
    let lr = e.multiply(&set_l, r, false)?;
    let rl = e.multiply(&set_r, l, false)?;
    let lrl = e.multiply(&lr, l, false)?;
    let rlr = e.multiply(&rl, r, false)?;
    let total = e.total();

    let sizes = WordSizes {
        one: 1,
        L: set_l.len(),
        R: set_r.len(),
        LR: lr.len(),
        RL: rl.len(),
        LRL: lrl.len(),
        RLR: rlr.len(),
    };
    let lr_formula = lr_size_formula(m, n).expect("bounded by 9!");
    let violation = |msg: String| Err(CensusError::ConsistencyViolation(msg));
    if sizes.LR != lr_formula || sizes.RL != lr_formula {
        return violation(format!("|G_LR| = {}, |G_RL| = {}, formula gives {lr_formula}", sizes.LR, sizes.RL));
    }
    if sizes.LRL != total || sizes.RLR != total {
        return violation(format!("|G_LRL| = {}, |G_RLR| = {}, group has {total}", sizes.LRL, sizes.RLR));
    }
    let rl_word: AlternationWord = AlternationWord::new(vec![StageKind::R, StageKind::L]);
    let lr_word: AlternationWord = AlternationWord::new(vec![StageKind::L, StageKind::R]);
    for rank in 0..e.universe {
        let p = GridPermutation::from_table_unchecked(m, n, e.unrank_table(rank));
        if p.in_word(&rl_word) != rl.contains(rank) || p.in_word(&lr_word) != lr.contains(rank) {
            return violation(format!("membership test disagrees with enumeration at {p:?}"));
        }
    }

    Ok(CensusReport {
        m,
        n,
        total,
        sizes,
        lr_formula,
        intersection_lr_rl: lr.intersection(&rl).len(),
        union_lr_rl: lr.union(&rl).len(),
        hierarchy: hierarchy_with(&e)?,
    })
}

/// Whether a schedule of stage groups covers the whole symmetric group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    pub dims: Vec<usize>,
    /// Axes in application order (first entry applied first).
    pub schedule: Vec<usize>,
    pub product_size: u64,
    pub total: u64,
    pub covered: bool,
    pub witness: Option<MultiGridPermutation>,
}

/// Enumerates the product of the stage groups named by `schedule` and
/// reports whether it is all of `Sym(A_1 x ... x A_k)`.
///
/// A schedule in which two axes each occur at most once cannot cover the
/// group when every factor has at least two elements; a covering result in
/// that situation is reported as a consistency violation.
pub fn lower_bound_check(dims: &[usize], schedule: &[usize]) -> Result<LowerBoundReport, CensusError> {
    let e = Enumerator::new(dims, MULTI_POINT_LIMIT, 1)?;
    let k = dims.len();
    if let Some(&axis) = schedule.iter().find(|&&a| a == 0 || a > k) {
        return Err(CensusError::BadAxis { axis, k });
    }
    // Application order g_1 first means the set G_{i_l} ... G_{i_1}.
    let word: Vec<usize> = schedule.iter().rev().copied().collect();
    let set = e.word_set(&word)?;
    let covered = set.is_full();
    let rare_axes = (1..=k).filter(|a| schedule.iter().filter(|&&s| s == *a).count() <= 1).count();
    if covered && rare_axes >= 2 && dims.iter().all(|&d| d >= 2) {
        return Err(CensusError::ConsistencyViolation(format!(
            "schedule {schedule:?} on {dims:?} covers the group although {rare_axes} axes occur at most once"
        )));
    }
    let witness = match set.first_missing() {
        Some(r) => {
            if set.contains(r) {
                return Err(CensusError::ConsistencyViolation(format!("witness rank {r} is in the product")));
            }
            Some(
                MultiGridPermutation::from_table(dims.to_vec(), e.unrank_table(r))
                    .expect("unranked table is a bijection"),
            )
        }
        None => None,
    };
    Ok(LowerBoundReport {
        dims: dims.to_vec(),
        schedule: schedule.to_vec(),
        product_size: set.len(),
        total: e.total(),
        covered,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> AlternationWord {
        s.parse().unwrap()
    }

    #[test]
    fn rank_set_basics() {
        let mut s = RankSet::empty(130);
        assert!(s.is_empty());
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(129);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 129]);
        assert_eq!(s.first_missing(), Some(0));
        assert!(RankSet::full(130).is_full());
        assert_eq!(RankSet::full(130).first_missing(), None);
        assert!(s.is_subset(&RankSet::full(130)));
    }

    #[test]
    fn stage_group_sizes() {
        assert_eq!(stage_group(&[2, 3], 1).len(), 8);
        assert_eq!(stage_group(&[2, 3], 2).len(), 36);
        assert_eq!(stage_group(&[2, 2, 2], 2).len(), 16);
        let g = stage_group(&[3, 3], 1);
        let mut ranks: Vec<u32> = g.iter().map(|p| lehmer::rank(&p[..9])).collect();
        ranks.sort_unstable();
        ranks.dedup();
        assert_eq!(ranks.len(), 216);
    }

    #[test]
    fn product_set_examples() {
        assert_eq!(product_set(2, 2, &word("1"), 1).unwrap().len(), 1);
        assert_eq!(product_set(2, 2, &word("L"), 1).unwrap().len(), 4);
        assert_eq!(product_set(2, 2, &word("LRL"), 1).unwrap().len(), 24);
        assert_eq!(product_set(2, 2, &word("LR"), 1).unwrap().len(), 16);
        assert!(matches!(product_set(2, 5, &word("L"), 1), Err(CensusError::InstanceTooLarge { points: 10, .. })));
        assert!(matches!(
            product_set_axes(&[3, 3, 1], &[1], 1),
            Err(CensusError::InstanceTooLarge { points: 9, limit: 8 })
        ));
    }

    #[test]
    fn word_sets_are_closed_under_their_leading_group() {
        let e = Enumerator::new(&[2, 3], 9, 1).unwrap();
        for w in [vec![1, 2], vec![1, 2, 1], vec![2, 1], vec![2, 1, 2]] {
            let set = e.word_set(&w).unwrap();
            let again = e.multiply(&set, w[0], true).unwrap();
            assert_eq!(again, set, "{w:?}");
            let last = *w.last().unwrap();
            assert_eq!(e.multiply(&set, last, false).unwrap(), set);
        }
    }

    #[test]
    fn census_2x2() {
        let r = census(2, 2, 1).unwrap();
        assert_eq!(r.total, 24);
        assert_eq!(r.sizes.L, 4);
        assert_eq!(r.sizes.R, 4);
        assert_eq!(r.sizes.LR, 16);
        assert_eq!(r.sizes.LRL, 24);
        assert_eq!(r.hierarchy.collapse_level, Some(3));
    }

    #[test]
    fn census_2x3() {
        let r = census(2, 3, 1).unwrap();
        assert_eq!(r.sizes.LR, 288);
        assert_eq!(r.sizes.RL, 288);
        assert_eq!(r.sizes.LRL, 720);
        assert_eq!(r.hierarchy.collapse_level, Some(3));
    }

    #[test]
    fn degenerate_grids() {
        let r = census(1, 4, 1).unwrap();
        assert_eq!(r.sizes.L, 1);
        assert_eq!(r.sizes.R, 24);
        assert_eq!(r.hierarchy.collapse_level, Some(2));
        let r = census(1, 1, 1).unwrap();
        assert_eq!(r.total, 1);
        assert_eq!(r.hierarchy.collapse_level, Some(1));
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = census(2, 4, 1).unwrap();
        let b = census(2, 4, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn lower_bound_examples() {
        let r = lower_bound_check(&[2, 2], &[1, 2]).unwrap();
        assert!(!r.covered);
        assert_eq!(r.product_size, 16);
        let r = lower_bound_check(&[2, 2], &[2, 1, 2]).unwrap();
        assert!(r.covered);
        assert!(r.witness.is_none());
        assert!(matches!(lower_bound_check(&[2, 2], &[3]), Err(CensusError::BadAxis { axis: 3, k: 2 })));
    }

    #[test]
    fn sizes_json_order() {
        let r = census(2, 2, 1).unwrap();
        let s = serde_json::to_string(&r.sizes).unwrap();
        assert_eq!(s, r#"{"1":1,"L":4,"R":4,"LR":16,"RL":16,"LRL":24,"RLR":24}"#);
    }
}
