//! Finite-support permutations of `N x N`.
//!
//! Such a permutation is the identity outside a finite set, so it restricts
//! to a permutation of the smallest grid containing its support. The grid
//! factorization extended by the identity factors the original.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{decompose_two, Order, Verification, VerifyFailure};
use crate::perm::{Decomposition, GridPermutation, Point, StageKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparseError {
    #[error("point ({}, {}) appears more than once as a source", .0.0, .0.1)]
    DuplicateSource(Point),
    #[error("point ({}, {}) appears more than once as an image", .0.0, .0.1)]
    DuplicateImage(Point),
    #[error("point ({}, {}) is an image but not a source, so the map is not a permutation", .0.0, .0.1)]
    NotClosed(Point),
}

/// A bijection of `N x N` that is the identity off `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePermutation {
    support: BTreeMap<Point, Point>,
}

impl SparsePermutation {
    pub fn new(pairs: &[(Point, Point)]) -> Result<Self, SparseError> {
        let mut support = BTreeMap::new();
        let mut images = BTreeSet::new();
        for &(src, dst) in pairs {
            if support.insert(src, dst).is_some() {
                return Err(SparseError::DuplicateSource(src));
            }
            if !images.insert(dst) {
                return Err(SparseError::DuplicateImage(dst));
            }
        }
        if let Some(&dst) = images.iter().find(|d| !support.contains_key(d)) {
            return Err(SparseError::NotClosed(dst));
        }
        // Fixed points carry no information.
        support.retain(|s, d| s != d);
        Ok(Self { support })
    }

    pub fn support(&self) -> &BTreeMap<Point, Point> {
        &self.support
    }

    pub fn apply(&self, p: Point) -> Point {
        self.support.get(&p).copied().unwrap_or(p)
    }

    /// Smallest `(m, n)` with every moved point inside `0..m x 0..n`.
    pub fn bounding_grid(&self) -> (usize, usize) {
        self.support.iter().flat_map(|(s, d)| [s, d]).fold((0, 0), |(m, n), &(a, b)| (m.max(a + 1), n.max(b + 1)))
    }

    /// Restriction to the `m x n` grid; the grid must contain the support.
    pub fn to_grid(&self, m: usize, n: usize) -> GridPermutation {
        let mut table: Vec<usize> = (0..m * n).collect();
        for (&(a, b), &(a2, b2)) in &self.support {
            table[a * n + b] = a2 * n + b2;
        }
        GridPermutation::from_table(m, n, table).expect("support fits the grid")
    }
}

#[derive(Serialize, Deserialize)]
struct SparseRepr {
    support: Vec<(Point, Point)>,
}

impl Serialize for SparsePermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SparseRepr { support: self.support.iter().map(|(&a, &b)| (a, b)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SparseRepr::deserialize(d)?;
        Self::new(&r.support).map_err(serde::de::Error::custom)
    }
}

/// A grid decomposition acting as the identity outside its bounding grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseDecomposition {
    pub grid: Decomposition,
}

impl SparseDecomposition {
    pub fn apply(&self, (mut a, mut b): Point) -> Point {
        if a >= self.grid.m || b >= self.grid.n {
            return (a, b);
        }
        for s in &self.grid.stages {
            match s.kind {
                StageKind::L => a = s.perms[b][a],
                StageKind::R => b = s.perms[a][b],
            }
        }
        (a, b)
    }

    /// Checks the grid decomposition against the restriction of `p`, and
    /// that `p` moves nothing outside the grid.
    pub fn verify(&self, p: &SparsePermutation) -> Verification {
        let (m, n) = (self.grid.m, self.grid.n);
        if let Some((&cell, &expected)) = p.support.iter().find(|(&(a, b), _)| a >= m || b >= n) {
            return Verification::fail(VerifyFailure::Mismatch { cell, expected, actual: cell });
        }
        if self.grid.stages.is_empty() {
            return match p.support.iter().next() {
                Some((&cell, &expected)) => {
                    Verification::fail(VerifyFailure::Mismatch { cell, expected, actual: cell })
                }
                None => Verification::pass(),
            };
        }
        super::verify_decomposition(&self.grid, &p.to_grid(m, n))
            .unwrap_or_else(|_| Verification::fail(VerifyFailure::BadStageShape { index: 0 }))
    }
}

/// Factors a finite-support permutation over its bounding grid. The empty
/// support yields a decomposition with no stages on a `0 x 0` grid.
pub fn decompose_finite_support(p: &SparsePermutation, order: Order) -> SparseDecomposition {
    let (m, n) = p.bounding_grid();
    if p.support.is_empty() {
        return SparseDecomposition { grid: Decomposition { m: 0, n: 0, stages: Vec::new() } };
    }
    SparseDecomposition { grid: decompose_two(&p.to_grid(m, n), order) }
}
