//! Factorizations of permutations of a k-fold product `A_1 x ... x A_k`.
//!
//! Points are indexed lexicographically with axis 1 most significant. A
//! stage on axis `i` only changes coordinate `i`, by one permutation of
//! `0..d_i` per assignment of the remaining coordinates (its fiber).
//!
//! The recursion splits the product as `(A_1 x ... x A_{k-1}) x A_k`, takes
//! the three-stage factorization of that grid, and factors the middle
//! column stage fiber by fiber. Pieces for different values of the last
//! coordinate have disjoint supports, so they are merged position-wise into
//! a single stage per schedule slot.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{decompose_two, Order, Verification};
use crate::perm::GridPermutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiError {
    #[error("a product needs at least one factor and every factor must be non-empty, got {0:?}")]
    BadDims(Vec<usize>),
    #[error("table has {len} entries, expected {expected}")]
    WrongLength { len: usize, expected: usize },
    #[error("coordinates {0:?} are out of range")]
    OutOfRange(Vec<usize>),
    #[error("coordinates {0:?} have no image")]
    MissingSource(Vec<usize>),
    #[error("coordinates {0:?} appear more than once as a source")]
    DuplicateSource(Vec<usize>),
    #[error("coordinates {0:?} are the image of more than one source")]
    NotInjective(Vec<usize>),
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: Vec<usize>, right: Vec<usize> },
}

fn check_dims(dims: &[usize]) -> Result<usize, MultiError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(MultiError::BadDims(dims.to_vec()));
    }
    Ok(dims.iter().product())
}

/// Mixed-radix helpers for lexicographic indexing.
fn coords_of(dims: &[usize], mut x: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = x % d;
        x /= d;
    }
    out
}

fn index_of(dims: &[usize], coords: &[usize]) -> usize {
    dims.iter().zip(coords).fold(0, |acc, (&d, &c)| acc * d + c)
}

/// A bijection of the k-fold product of `0..d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGridPermutation {
    dims: Vec<usize>,
    table: Vec<usize>,
}

impl MultiGridPermutation {
    pub fn from_table(dims: Vec<usize>, table: Vec<usize>) -> Result<Self, MultiError> {
        let len = check_dims(&dims)?;
        if table.len() != len {
            return Err(MultiError::WrongLength { len: table.len(), expected: len });
        }
        let mut hit = vec![false; len];
        for &d in &table {
            if d >= len {
                return Err(MultiError::OutOfRange(vec![d]));
            }
            if std::mem::replace(&mut hit[d], true) {
                return Err(MultiError::NotInjective(coords_of(&dims, d)));
            }
        }
        Ok(Self { dims, table })
    }

    /// Builds from explicit `(source, image)` coordinate pairs.
    pub fn build(dims: Vec<usize>, pairs: &[(Vec<usize>, Vec<usize>)]) -> Result<Self, MultiError> {
        let len = check_dims(&dims)?;
        let mut table = vec![usize::MAX; len];
        let mut hit = vec![false; len];
        for (src, dst) in pairs {
            for c in [src, dst] {
                if c.len() != dims.len() || c.iter().zip(&dims).any(|(&x, &d)| x >= d) {
                    return Err(MultiError::OutOfRange(c.clone()));
                }
            }
            let (s, d) = (index_of(&dims, src), index_of(&dims, dst));
            if table[s] != usize::MAX {
                return Err(MultiError::DuplicateSource(src.clone()));
            }
            if std::mem::replace(&mut hit[d], true) {
                return Err(MultiError::NotInjective(dst.clone()));
            }
            table[s] = d;
        }
        if let Some(s) = table.iter().position(|&d| d == usize::MAX) {
            return Err(MultiError::MissingSource(coords_of(&dims, s)));
        }
        Ok(Self { dims, table })
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self, MultiError> {
        let len = check_dims(&dims)?;
        Ok(Self { dims, table: (0..len).collect() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, coords: &[usize]) -> Vec<usize> {
        coords_of(&self.dims, self.table[index_of(&self.dims, coords)])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + '_ {
        self.table.iter().enumerate().map(|(s, &d)| (coords_of(&self.dims, s), coords_of(&self.dims, d)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, MultiError> {
        if self.dims != other.dims {
            return Err(MultiError::DimensionMismatch { left: self.dims.clone(), right: other.dims.clone() });
        }
        Ok(Self { dims: self.dims.clone(), table: other.table.iter().map(|&i| self.table[i]).collect() })
    }

    pub fn invert(&self) -> Self {
        let mut table = vec![0; self.table.len()];
        for (s, &d) in self.table.iter().enumerate() {
            table[d] = s;
        }
        Self { dims: self.dims.clone(), table }
    }
}

#[derive(Serialize, Deserialize)]
struct MultiGridRepr {
    dims: Vec<usize>,
    map: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Serialize for MultiGridPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MultiGridRepr { dims: self.dims.clone(), map: self.pairs().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiGridPermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MultiGridRepr::deserialize(d)?;
        Self::build(r.dims, &r.map).map_err(serde::de::Error::custom)
    }
}

/// A permutation that only changes coordinate `axis` (1-based).
///
/// `perms[f]` permutes `0..d_axis` on fiber `f`, where `f` is the
/// lexicographic index of the other coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiStage {
    pub axis: usize,
    pub perms: Vec<Vec<usize>>,
}

impl MultiStage {
    pub fn identity(dims: &[usize], axis: usize) -> Self {
        let d = dims[axis - 1];
        let fibers = dims.iter().product::<usize>() / d;
        Self { axis, perms: vec![(0..d).collect(); fibers] }
    }

    pub fn fits(&self, dims: &[usize]) -> bool {
        if self.axis == 0 || self.axis > dims.len() {
            return false;
        }
        let d = dims[self.axis - 1];
        let fibers = dims.iter().product::<usize>() / d;
        self.perms.len() == fibers
            && self.perms.iter().all(|p| {
                let mut seen = vec![false; d];
                p.len() == d && p.iter().all(|&x| x < d && !std::mem::replace(&mut seen[x], true))
            })
    }

    /// The full table of this stage on the product with the given `dims`.
    pub fn to_permutation(&self, dims: &[usize]) -> Result<MultiGridPermutation, MultiError> {
        if !self.fits(dims) {
            return Err(MultiError::DimensionMismatch {
                left: dims.to_vec(),
                right: vec![self.axis, self.perms.len()],
            });
        }
        let i = self.axis - 1;
        let d = dims[i];
        let stride: usize = dims[i + 1..].iter().product();
        let len: usize = dims.iter().product();
        let table = (0..len)
            .map(|x| {
                let (hi, rest) = (x / (d * stride), x % (d * stride));
                let (v, lo) = (rest / stride, rest % stride);
                let fiber = hi * stride + lo;
                hi * d * stride + self.perms[fiber][v] * stride + lo
            })
            .collect();
        Ok(MultiGridPermutation { dims: dims.to_vec(), table })
    }
}

/// Stages in application order on a fixed product shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDecomposition {
    pub dims: Vec<usize>,
    pub stages: Vec<MultiStage>,
}

impl MultiDecomposition {
    pub fn schedule(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.axis).collect()
    }

    pub fn compose_all(&self) -> Result<MultiGridPermutation, MultiError> {
        let mut acc = MultiGridPermutation::identity(self.dims.clone())?;
        for s in &self.stages {
            acc = s.to_permutation(&self.dims)?.compose(&acc)?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct MultiDecompositionRepr {
    dims: Vec<usize>,
    schedule: Vec<usize>,
    stages: Vec<MultiStage>,
}

impl Serialize for MultiDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MultiDecompositionRepr { dims: self.dims.clone(), schedule: self.schedule(), stages: self.stages.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MultiDecompositionRepr::deserialize(d)?;
        let axes: Vec<usize> = r.stages.iter().map(|s| s.axis).collect();
        if axes != r.schedule {
            return Err(serde::de::Error::custom(format!(
                "schedule {:?} does not match stage axes {:?}",
                r.schedule, axes
            )));
        }
        Ok(Self { dims: r.dims, stages: r.stages })
    }
}

/// The axis schedule `(k, k-1, ..., 2, 1, 2, ..., k)`.
pub fn schedule_for(k: usize) -> Vec<usize> {
    (1..=k).rev().chain(2..=k).collect()
}

/// Factors `p` into exactly `2k - 1` stages following [`schedule_for`].
pub fn decompose_multi(p: &MultiGridPermutation) -> MultiDecomposition {
    let dims = p.dims.clone();
    let stages = decompose_table(&dims, &p.table);
    MultiDecomposition { dims, stages }
}

fn decompose_table(dims: &[usize], table: &[usize]) -> Vec<MultiStage> {
    let k = dims.len();
    if k == 1 {
        return vec![MultiStage { axis: 1, perms: vec![table.to_vec()] }];
    }
    let inner = &dims[..k - 1];
    let m: usize = inner.iter().product();
    let n = dims[k - 1];
    let grid = GridPermutation::from_table_unchecked(m, n, table.to_vec());
    let mut three = decompose_two(&grid, Order::Rlr).stages.into_iter();
    let (first, middle, last) = (three.next().unwrap(), three.next().unwrap(), three.next().unwrap());

    // Row stages change only the last coordinate; their fibers are the rows.
    let mut out = vec![MultiStage { axis: k, perms: first.perms }];
    let per_fiber: Vec<Vec<MultiStage>> = middle.perms.iter().map(|sigma| decompose_table(inner, sigma)).collect();
    out.extend(merge_fibers(inner, n, &per_fiber));
    out.push(MultiStage { axis: k, perms: last.perms });
    out
}

/// Lifts the sub-decompositions of each last-coordinate fiber into stages of
/// the full product and merges them slot by slot.
fn merge_fibers(inner: &[usize], n: usize, per_fiber: &[Vec<MultiStage>]) -> Vec<MultiStage> {
    let slots = per_fiber[0].len();
    (0..slots)
        .map(|slot| {
            let axis = per_fiber[0][slot].axis;
            let sub_fibers = per_fiber[0][slot].perms.len();
            let mut perms = Vec::with_capacity(sub_fibers * n);
            for f in 0..sub_fibers {
                for stages in per_fiber {
                    debug_assert_eq!(stages[slot].axis, axis);
                    perms.push(stages[slot].perms[f].clone());
                }
            }
            debug_assert_eq!(perms.len(), inner.iter().product::<usize>() / inner[axis - 1] * n);
            MultiStage { axis, perms }
        })
        .collect()
}

/// Lifts one fiber's sub-stage to the full product, identity elsewhere.
#[cfg(test)]
fn lift_single_fiber(inner: &[usize], n: usize, b: usize, sub: &MultiStage) -> MultiStage {
    let d = inner[sub.axis - 1];
    let perms =
        sub.perms.iter().flat_map(|p| (0..n).map(move |c| if c == b { p.clone() } else { (0..d).collect() })).collect();
    MultiStage { axis: sub.axis, perms }
}

/// Why a multi-factor decomposition failed to certify its target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum MultiVerifyFailure {
    Schedule { expected: Vec<usize>, actual: Vec<usize> },
    BadStageShape { index: usize },
    Mismatch { cell: Vec<usize>, expected: Vec<usize>, actual: Vec<usize> },
}

impl fmt::Display for MultiVerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiVerifyFailure::Schedule { expected, actual } => {
                write!(f, "schedule {actual:?} differs from {expected:?}")
            }
            MultiVerifyFailure::BadStageShape { index } => write!(f, "stage {index} has the wrong shape"),
            MultiVerifyFailure::Mismatch { cell, expected, actual } => {
                write!(f, "mismatch at {cell:?}: expected {expected:?}, got {actual:?}")
            }
        }
    }
}

/// Checks the `2k - 1` schedule, stage shapes, and composition against `p`.
pub fn verify_multi(
    d: &MultiDecomposition,
    p: &MultiGridPermutation,
) -> Result<Verification<MultiVerifyFailure>, MultiError> {
    if d.dims != p.dims {
        return Err(MultiError::DimensionMismatch { left: d.dims.clone(), right: p.dims.clone() });
    }
    let expected = schedule_for(d.dims.len());
    if d.schedule() != expected {
        return Ok(Verification::fail(MultiVerifyFailure::Schedule { expected, actual: d.schedule() }));
    }
    if let Some(index) = d.stages.iter().position(|s| !s.fits(&d.dims)) {
        return Ok(Verification::fail(MultiVerifyFailure::BadStageShape { index }));
    }
    let composed = d.compose_all()?;
    let mismatch = composed.table.iter().zip(&p.table).position(|(x, y)| x != y);
    Ok(match mismatch {
        Some(s) => Verification::fail(MultiVerifyFailure::Mismatch {
            cell: coords_of(&d.dims, s),
            expected: coords_of(&d.dims, p.table[s]),
            actual: coords_of(&d.dims, composed.table[s]),
        }),
        None => Verification::pass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{seq::SliceRandom, SeedableRng};

    fn random_perm(dims: &[usize], rng: &mut impl rand::Rng) -> MultiGridPermutation {
        let mut t: Vec<usize> = (0..dims.iter().product()).collect();
        t.shuffle(rng);
        MultiGridPermutation::from_table(dims.to_vec(), t).unwrap()
    }

    #[test]
    fn schedules() {
        assert_eq!(schedule_for(1), vec![1]);
        assert_eq!(schedule_for(2), vec![2, 1, 2]);
        assert_eq!(schedule_for(3), vec![3, 2, 1, 2, 3]);
    }

    #[test]
    fn single_factor_is_one_stage() {
        let p = MultiGridPermutation::from_table(vec![4], vec![2, 0, 3, 1]).unwrap();
        let d = decompose_multi(&p);
        assert_eq!(d.stages, vec![MultiStage { axis: 1, perms: vec![vec![2, 0, 3, 1]] }]);
        assert!(verify_multi(&d, &p).unwrap().ok);
    }

    #[test]
    fn two_factors_match_grid_decomposition() {
        let p = MultiGridPermutation::from_table(vec![2, 3], vec![5, 1, 3, 0, 2, 4]).unwrap();
        let d = decompose_multi(&p);
        let grid = GridPermutation::from_table(2, 3, p.table().to_vec()).unwrap();
        let two = decompose_two(&grid, Order::Rlr);
        assert_eq!(d.schedule(), vec![2, 1, 2]);
        for (ms, s) in d.stages.iter().zip(&two.stages) {
            assert_eq!(ms.perms, s.perms);
        }
    }

    #[test]
    fn cyclic_shift_of_cube() {
        let dims = vec![2, 2, 2];
        let p = MultiGridPermutation::from_table(dims, (0..8).map(|x| (x + 1) % 8).collect()).unwrap();
        let d = decompose_multi(&p);
        assert_eq!(d.schedule(), vec![3, 2, 1, 2, 3]);
        assert_eq!(d.compose_all().unwrap(), p);
        assert!(verify_multi(&d, &p).unwrap().ok);
    }

    #[test]
    fn random_products() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for dims in [vec![3, 2, 4], vec![2, 2, 2, 2], vec![2, 3, 2, 2], vec![5, 1, 3]] {
            for _ in 0..50 {
                let p = random_perm(&dims, &mut rng);
                let d = decompose_multi(&p);
                assert_eq!(d.stages.len(), 2 * dims.len() - 1);
                assert!(verify_multi(&d, &p).unwrap().ok);
            }
        }
    }

    #[test]
    fn fiber_pieces_commute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dims = [2usize, 3, 3];
        let inner = &dims[..2];
        let n = dims[2];
        for _ in 0..20 {
            let p = random_perm(&dims, &mut rng);
            let grid = GridPermutation::from_table(6, 3, p.table().to_vec()).unwrap();
            let middle = &decompose_two(&grid, Order::Rlr).stages[1];
            let per_fiber: Vec<_> = middle.perms.iter().map(|s| decompose_table(inner, s)).collect();
            let merged = merge_fibers(inner, n, &per_fiber);
            for (slot, stage) in merged.iter().enumerate() {
                let pieces: Vec<_> = (0..n)
                    .map(|b| lift_single_fiber(inner, n, b, &per_fiber[b][slot]).to_permutation(&dims).unwrap())
                    .collect();
                let id = MultiGridPermutation::identity(dims.to_vec()).unwrap();
                let forward = pieces.iter().fold(id.clone(), |acc, g| g.compose(&acc).unwrap());
                let backward = pieces.iter().rev().fold(id, |acc, g| g.compose(&acc).unwrap());
                assert_eq!(forward, backward);
                assert_eq!(forward, stage.to_permutation(&dims).unwrap());
            }
        }
    }

    #[test]
    fn stage_only_moves_its_axis() {
        let dims = [2usize, 3, 2];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for axis in 1..=3 {
            let mut st = MultiStage::identity(&dims, axis);
            st.perms.iter_mut().for_each(|p| p.shuffle(&mut rng));
            let g = st.to_permutation(&dims).unwrap();
            for (src, dst) in g.pairs() {
                for i in 0..3 {
                    if i + 1 != axis {
                        assert_eq!(src[i], dst[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn verify_rejects_wrong_schedule_and_mismatch() {
        let dims = vec![2, 2, 2];
        let id = MultiGridPermutation::identity(dims.clone()).unwrap();
        let p = MultiGridPermutation::from_table(dims.clone(), (0..8).map(|x| (x + 1) % 8).collect()).unwrap();
        let ids = MultiDecomposition {
            dims: dims.clone(),
            stages: schedule_for(3).into_iter().map(|a| MultiStage::identity(&dims, a)).collect(),
        };
        assert!(verify_multi(&ids, &id).unwrap().ok);
        let v = verify_multi(&ids, &p).unwrap();
        assert_eq!(
            v.failure,
            Some(MultiVerifyFailure::Mismatch { cell: vec![0, 0, 0], expected: vec![0, 0, 1], actual: vec![0, 0, 0] })
        );
        let short = MultiDecomposition { dims: dims.clone(), stages: ids.stages[..4].to_vec() };
        assert!(matches!(verify_multi(&short, &id).unwrap().failure, Some(MultiVerifyFailure::Schedule { .. })));
    }

    #[test]
    fn build_validates() {
        assert!(matches!(MultiGridPermutation::from_table(vec![], vec![]), Err(MultiError::BadDims(_))));
        assert!(matches!(
            MultiGridPermutation::from_table(vec![2, 2], vec![0, 0, 1, 2]),
            Err(MultiError::NotInjective(_))
        ));
        let pairs = vec![(vec![0, 0], vec![0, 1]), (vec![0, 1], vec![0, 0])];
        assert!(MultiGridPermutation::build(vec![1, 2], &pairs).is_ok());
        assert!(MultiGridPermutation::build(vec![2, 2], &pairs).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = MultiGridPermutation::from_table(vec![2, 1, 2], vec![3, 2, 0, 1]).unwrap();
        let back: MultiGridPermutation = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let d = decompose_multi(&p);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains(r#""schedule":[3,2,1,2,3]"#));
        let back: MultiDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
