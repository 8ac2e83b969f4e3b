//! Permutations of a finite product grid `{0..m-1} x {0..n-1}` and the two
//! stage groups acting on it.
//!
//! A point `(a, b)` is a (row, column) pair; its linear index is `a * n + b`.
//! Composition is right-to-left: `f.compose(&g)` is the map `x -> f(g(x))`.
//!
//! The column group `G_L` permutes each column independently, i.e. it only
//! changes the row coordinate. The row group `G_R` permutes each row
//! independently and only changes the column coordinate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A grid point `(row, column)`.
pub type Point = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("grid dimensions must be positive, got {m}x{n}")]
    EmptyGrid { m: usize, n: usize },
    #[error("point ({}, {}) appears more than once as a source", .0.0, .0.1)]
    DuplicateSource(Point),
    #[error("point ({}, {}) has no image", .0.0, .0.1)]
    MissingSource(Point),
    #[error("point ({}, {}) lies outside the {m}x{n} grid", .point.0, .point.1)]
    RangeViolation { point: Point, m: usize, n: usize },
    #[error("point ({}, {}) is the image of more than one source", .0.0, .0.1)]
    NotInjective(Point),
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("stage entry {index} is not a permutation of 0..{len}")]
    InvalidStagePerm { index: usize, len: usize },
    #[error("unsupported word {0:?}: letters must be L or R")]
    UnsupportedWord(String),
}

/// Which stage group a letter or stage refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StageKind {
    /// Column group: per-column permutations of the row index.
    L,
    /// Row group: per-row permutations of the column index.
    R,
}

impl StageKind {
    pub fn opposite(self) -> Self {
        match self {
            StageKind::L => StageKind::R,
            StageKind::R => StageKind::L,
        }
    }

    pub fn letter(self) -> char {
        match self {
            StageKind::L => 'L',
            StageKind::R => 'R',
        }
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Result of classifying a permutation against the two stage groups.
///
/// The identity lies in both groups and is reported as `Both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StageClass {
    L,
    R,
    Both,
    Neither,
}

impl StageClass {
    /// Whether an element of this class belongs to the group `kind`.
    pub fn is_in(self, kind: StageKind) -> bool {
        matches!((self, kind), (StageClass::Both, _) | (StageClass::L, StageKind::L) | (StageClass::R, StageKind::R))
    }
}

impl fmt::Display for StageClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StageClass::L => "L",
            StageClass::R => "R",
            StageClass::Both => "Both",
            StageClass::Neither => "Neither",
        };
        f.write_str(s)
    }
}

/// A bijection of the `m x n` grid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GridPermutation {
    m: usize,
    n: usize,
    /// `table[a * n + b]` is the linear index of the image of `(a, b)`.
    table: Vec<usize>,
}

impl fmt::Debug for GridPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridPermutation({}x{}, {:?})", self.m, self.n, self.table)
    }
}

fn check_dims(m: usize, n: usize) -> Result<(), PermError> {
    if m == 0 || n == 0 {
        return Err(PermError::EmptyGrid { m, n });
    }
    Ok(())
}

impl GridPermutation {
    /// Builds a permutation from explicit `(source, image)` pairs.
    pub fn build(m: usize, n: usize, pairs: &[(Point, Point)]) -> Result<Self, PermError> {
        check_dims(m, n)?;
        let len = m * n;
        let mut table = vec![usize::MAX; len];
        let mut hit = vec![false; len];
        for &(src, dst) in pairs {
            for pt in [src, dst] {
                if pt.0 >= m || pt.1 >= n {
                    return Err(PermError::RangeViolation { point: pt, m, n });
                }
            }
            let s = src.0 * n + src.1;
            let d = dst.0 * n + dst.1;
            if table[s] != usize::MAX {
                return Err(PermError::DuplicateSource(src));
            }
            if hit[d] {
                return Err(PermError::NotInjective(dst));
            }
            table[s] = d;
            hit[d] = true;
        }
        if let Some(s) = table.iter().position(|&d| d == usize::MAX) {
            return Err(PermError::MissingSource((s / n, s % n)));
        }
        Ok(Self { m, n, table })
    }

    /// Builds a permutation from a table of linear image indices.
    pub fn from_table(m: usize, n: usize, table: Vec<usize>) -> Result<Self, PermError> {
        check_dims(m, n)?;
        if table.len() != m * n {
            let missing = table.len().min(m * n);
            return Err(PermError::MissingSource((missing / n, missing % n)));
        }
        let mut hit = vec![false; table.len()];
        for &d in &table {
            if d >= m * n {
                return Err(PermError::RangeViolation { point: (d / n, d % n), m, n });
            }
            if hit[d] {
                return Err(PermError::NotInjective((d / n, d % n)));
            }
            hit[d] = true;
        }
        Ok(Self { m, n, table })
    }

    pub(crate) fn from_table_unchecked(m: usize, n: usize, table: Vec<usize>) -> Self {
        debug_assert_eq!(table.len(), m * n);
        Self { m, n, table }
    }

    pub fn identity(m: usize, n: usize) -> Result<Self, PermError> {
        check_dims(m, n)?;
        Ok(Self { m, n, table: (0..m * n).collect() })
    }

    /// The coordinate swap `(a, b) -> (b, a)` on a square grid.
    pub fn flip(size: usize) -> Result<Self, PermError> {
        check_dims(size, size)?;
        let table = (0..size * size).map(|i| (i % size) * size + i / size).collect();
        Ok(Self { m: size, n: size, table })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, (a, b): Point) -> Point {
        let d = self.table[a * self.n + b];
        (d / self.n, d % self.n)
    }

    /// All `(source, image)` pairs in lexicographic source order.
    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.n;
        self.table.iter().enumerate().map(move |(s, &d)| ((s / n, s % n), (d / n, d % n)))
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &d)| i == d)
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Self) -> Result<Self, PermError> {
        if self.dims() != other.dims() {
            return Err(PermError::DimensionMismatch { left: self.dims(), right: other.dims() });
        }
        let table = other.table.iter().map(|&i| self.table[i]).collect();
        Ok(Self { m: self.m, n: self.n, table })
    }

    pub fn invert(&self) -> Self {
        let mut table = vec![0; self.table.len()];
        for (s, &d) in self.table.iter().enumerate() {
            table[d] = s;
        }
        Self { m: self.m, n: self.n, table }
    }

    /// Conjugates by the coordinate swap: the result acts on the `n x m`
    /// grid and maps `(b, a)` to `(b', a')` whenever `self` maps `(a, b)`
    /// to `(a', b')`.
    pub fn transpose(&self) -> Self {
        let (m, n) = (self.m, self.n);
        let mut table = vec![0; m * n];
        for a in 0..m {
            for b in 0..n {
                let d = self.table[a * n + b];
                let (a2, b2) = (d / n, d % n);
                table[b * m + a] = b2 * m + a2;
            }
        }
        Self { m: n, n: m, table }
    }

    /// Classifies `self` against the column group and the row group.
    pub fn stage_kind(&self) -> StageClass {
        let n = self.n;
        let mut keeps_col = true;
        let mut keeps_row = true;
        for (s, &d) in self.table.iter().enumerate() {
            keeps_col &= s % n == d % n;
            keeps_row &= s / n == d / n;
            if !keeps_col && !keeps_row {
                return StageClass::Neither;
            }
        }
        match (keeps_col, keeps_row) {
            (true, true) => StageClass::Both,
            (true, false) => StageClass::L,
            (false, true) => StageClass::R,
            (false, false) => StageClass::Neither,
        }
    }

    /// True iff for every column `b` the map `a -> row(self(a, b))` is a
    /// bijection. This characterizes the set `G_R G_L`.
    pub fn columns_hit_every_row(&self) -> bool {
        let (m, n) = (self.m, self.n);
        let mut seen = vec![false; m];
        for b in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for a in 0..m {
                let row = self.table[a * n + b] / n;
                if std::mem::replace(&mut seen[row], true) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff for every row `a` the map `b -> column(self(a, b))` is a
    /// bijection. This characterizes the set `G_L G_R`.
    pub fn rows_hit_every_column(&self) -> bool {
        let n = self.n;
        let mut seen = vec![false; n];
        for row in self.table.chunks(n) {
            seen.iter_mut().for_each(|s| *s = false);
            for &d in row {
                if std::mem::replace(&mut seen[d % n], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Membership in the product set `G_w`.
    ///
    /// Repeated letters collapse because each stage group is closed under
    /// composition, and any collapsed word of length three or more equals the
    /// full symmetric group. Every word therefore has a closed-form answer.
    pub fn in_word(&self, word: &AlternationWord) -> bool {
        let w = word.collapsed();
        match w.letters() {
            [] => self.is_identity(),
            [k] => self.stage_kind().is_in(*k),
            [StageKind::R, StageKind::L] => self.columns_hit_every_row(),
            [StageKind::L, StageKind::R] => self.rows_hit_every_column(),
            _ => true,
        }
    }
}

/// A word over `{L, R}` naming the product set `G_{w_1} G_{w_2} ... G_{w_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AlternationWord {
    letters: Vec<StageKind>,
}

impl AlternationWord {
    pub fn new(letters: Vec<StageKind>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[StageKind] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Merges runs of equal letters.
    pub fn collapsed(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.dedup();
        Self { letters }
    }
}

impl fmt::Display for AlternationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        self.letters.iter().try_for_each(|k| write!(f, "{k}"))
    }
}

impl FromStr for AlternationWord {
    type Err = PermError;

    /// Parses `"LRL"`, `"rl"`, or `"1"` / `""` for the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Self::default());
        }
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'L' => Ok(StageKind::L),
                'R' => Ok(StageKind::R),
                _ => Err(PermError::UnsupportedWord(s.to_string())),
            })
            .collect::<Result<_, _>>()
            .map(Self::new)
    }
}

/// One element of `G_L` or `G_R`, stored as its family of small permutations.
///
/// For `kind = L` there is one permutation of `0..m` per column; for
/// `kind = R` one permutation of `0..n` per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stage {
    pub kind: StageKind,
    pub perms: Vec<Vec<usize>>,
}

fn is_perm(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

impl Stage {
    pub fn new(kind: StageKind, perms: Vec<Vec<usize>>) -> Result<Self, PermError> {
        for (index, p) in perms.iter().enumerate() {
            if !is_perm(p) {
                return Err(PermError::InvalidStagePerm { index, len: p.len() });
            }
        }
        Ok(Self { kind, perms })
    }

    pub fn identity(kind: StageKind, m: usize, n: usize) -> Self {
        let perms = match kind {
            StageKind::L => vec![(0..m).collect(); n],
            StageKind::R => vec![(0..n).collect(); m],
        };
        Self { kind, perms }
    }

    /// Grid dimensions implied by the stored family, if non-empty.
    pub fn implied_dims(&self) -> Option<(usize, usize)> {
        let inner = self.perms.first()?.len();
        Some(match self.kind {
            StageKind::L => (inner, self.perms.len()),
            StageKind::R => (self.perms.len(), inner),
        })
    }

    /// Whether the family has the shape required on an `m x n` grid.
    pub fn fits(&self, m: usize, n: usize) -> bool {
        let (count, inner) = match self.kind {
            StageKind::L => (n, m),
            StageKind::R => (m, n),
        };
        self.perms.len() == count && self.perms.iter().all(|p| p.len() == inner && is_perm(p))
    }

    pub fn as_grid_permutation(&self, m: usize, n: usize) -> Result<GridPermutation, PermError> {
        if !self.fits(m, n) {
            return Err(PermError::DimensionMismatch { left: (m, n), right: self.implied_dims().unwrap_or((0, 0)) });
        }
        let mut table = vec![0; m * n];
        for a in 0..m {
            for b in 0..n {
                table[a * n + b] = match self.kind {
                    StageKind::L => self.perms[b][a] * n + b,
                    StageKind::R => a * n + self.perms[a][b],
                };
            }
        }
        Ok(GridPermutation { m, n, table })
    }

    /// The same stage viewed on the transposed grid (kind flips, data stays).
    pub fn transposed(&self) -> Self {
        Self { kind: self.kind.opposite(), perms: self.perms.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.perms.iter().all(|p| p.iter().enumerate().all(|(i, &x)| i == x))
    }
}

/// An ordered list of stages in application order: the represented
/// permutation is `stages[k-1] ∘ ... ∘ stages[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub m: usize,
    pub n: usize,
    pub stages: Vec<Stage>,
}

impl Decomposition {
    /// The stage kinds in application order, e.g. `"RLR"`.
    pub fn order(&self) -> String {
        self.stages.iter().map(|s| s.kind.letter()).collect()
    }

    pub fn is_alternating(&self) -> bool {
        self.stages.windows(2).all(|w| w[0].kind != w[1].kind)
    }

    pub fn compose_all(&self) -> Result<GridPermutation, PermError> {
        let mut acc = GridPermutation::identity(self.m, self.n)?;
        for s in &self.stages {
            acc = s.as_grid_permutation(self.m, self.n)?.compose(&acc)?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionRepr {
    order: String,
    /// Optional on input; inferred from the first stage when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    stages: Vec<Stage>,
}

impl Serialize for Decomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DecompositionRepr { order: self.order(), m: Some(self.m), n: Some(self.n), stages: self.stages.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DecompositionRepr::deserialize(d)?;
        let order: String = r.stages.iter().map(|s| s.kind.letter()).collect();
        if order != r.order {
            return Err(serde::de::Error::custom(format!(
                "order {:?} does not match stage kinds {:?}",
                r.order, order
            )));
        }
        let implied = r.stages.first().and_then(Stage::implied_dims).unwrap_or((0, 0));
        Ok(Self { m: r.m.unwrap_or(implied.0), n: r.n.unwrap_or(implied.1), stages: r.stages })
    }
}

#[derive(Serialize, Deserialize)]
struct GridPermutationRepr {
    m: usize,
    n: usize,
    map: Vec<(Point, Point)>,
}

impl Serialize for GridPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GridPermutationRepr { m: self.m, n: self.n, map: self.pairs().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridPermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = GridPermutationRepr::deserialize(d)?;
        Self::build(r.m, r.n, &r.map).map_err(serde::de::Error::custom)
    }
}
