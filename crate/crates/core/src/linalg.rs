//! Matrices over prime fields and block-stage factorizations of `GL(m + n, p)`.
//!
//! With the block split `m + n`, an L-stage is a matrix `[[P, Q], [0, I]]`
//! (row operations that only write the top `m` rows) and an R-stage is
//! `[[I, 0], [R, S]]` (row operations that only write the bottom `n` rows).
//! [`decompose_linear`] writes any invertible matrix as `L1 * R * L2`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{Order, Verification};
use crate::perm::{StageClass, StageKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("modulus {0} is not a prime below 65536")]
    NotPrime(u64),
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("fields differ: p = {0} vs p = {1}")]
    FieldMismatch(u32, u32),
    #[error("block split must have positive parts, got m = {m}, n = {n}")]
    BadSplit { m: usize, n: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("exhaustive stage enumeration is limited to p <= 5, got p = {0}")]
    FieldTooLarge(u32),
}

/// The field of integers modulo a prime `p < 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u64> for PrimeField {
    type Error = LinalgError;

    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Self::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if !(2..1 << 16).contains(&p) || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(Self { p: p as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn reduce(self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    pub fn add(self, x: u32, y: u32) -> u32 {
        (x + y) % self.p
    }

    pub fn sub(self, x: u32, y: u32) -> u32 {
        (x + self.p - y) % self.p
    }

    pub fn mul(self, x: u32, y: u32) -> u32 {
        ((x as u64 * y as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(self, x: u32) -> u32 {
        assert!(!x.is_multiple_of(self.p), "zero has no inverse");
        // x^(p-2) by square-and-multiply.
        let (mut base, mut exp, mut acc) = (x, self.p - 2, 1u32);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// A dense row-major matrix over a prime field with reduced entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix(p={}, {:?})", self.field.p, self.to_rows())
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (self.field.p - 1).to_string().len();
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    /// Builds a matrix, reducing every entry modulo `p`.
    pub fn new(field: PrimeField, rows: usize, cols: usize, entries: &[u64]) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::BadShape { rows, cols, len: entries.len() });
        }
        let entries = entries.iter().map(|&x| field.reduce(x)).collect();
        Ok(Self { field, rows, cols, entries })
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(LinalgError::BadShape { rows: rows.len(), cols, len: bad.len() });
        }
        let flat: Vec<u64> = rows.iter().flatten().copied().collect();
        Self::new(field, rows.len(), cols, &flat)
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.entries[i * size + i] = 1;
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: u32) {
        self.entries[r * self.cols + c] = self.field.reduce(x as u64);
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[u32]>::to_vec).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field.p, other.field.p));
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let p = self.field.p as u64;
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = (0..self.cols).fold(0u64, |acc, k| (acc + self.get(i, k) as u64 * other.get(k, j) as u64) % p);
                out.entries[i * other.cols + j] = s as u32;
            }
        }
        Ok(out)
    }

    /// Row-echelon rank.
    pub fn rank(&self) -> usize {
        let mut w = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| w.get(r, c) != 0) else { continue };
            w.swap_rows(rank, piv);
            let inv = self.field.inv(w.get(rank, c));
            for r in rank + 1..self.rows {
                let f = self.field.mul(w.get(r, c), inv);
                if f != 0 {
                    w.add_row_multiple(r, rank, self.field.sub(0, f));
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotInvertible);
        }
        let n = self.rows;
        let mut w = self.clone();
        let mut inv = Self::identity(self.field, n);
        for c in 0..n {
            let piv = (c..n).find(|&r| w.get(r, c) != 0).ok_or(LinalgError::NotInvertible)?;
            w.swap_rows(c, piv);
            inv.swap_rows(c, piv);
            let s = self.field.inv(w.get(c, c));
            w.scale_row(c, s);
            inv.scale_row(c, s);
            for r in 0..n {
                let f = w.get(r, c);
                if r != c && f != 0 {
                    let neg = self.field.sub(0, f);
                    w.add_row_multiple(r, c, neg);
                    inv.add_row_multiple(r, c, neg);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.entries.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: u32) {
        for c in 0..self.cols {
            let k = i * self.cols + c;
            self.entries[k] = self.field.mul(self.entries[k], s);
        }
    }

    /// `row[target] += factor * row[source]`.
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: u32) {
        for c in 0..self.cols {
            let add = self.field.mul(self.entries[source * self.cols + c], factor);
            let k = target * self.cols + c;
            self.entries[k] = self.field.add(self.entries[k], add);
        }
    }

    fn apply(&mut self, op: RowOp) {
        match op {
            RowOp::Swap { a, b } => self.swap_rows(a, b),
            RowOp::Scale { row, factor } => self.scale_row(row, factor),
            RowOp::AddMultiple { target, source, factor } => self.add_row_multiple(target, source, factor),
        }
    }

    /// Conjugation by the block swap that moves the last `n` coordinates in
    /// front of the first `m`. Turns split `(m, n)` into `(n, m)`.
    pub fn block_swap_conjugate(&self, split: BlockSplit) -> Self {
        let size = self.rows;
        let to = |i: usize| if i < split.m { i + split.n } else { i - split.m };
        let mut out = Self::zeros(self.field, size, size);
        for i in 0..size {
            for j in 0..size {
                out.entries[to(i) * size + to(j)] = self.get(i, j);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    p: u64,
    rows: Vec<Vec<u64>>,
}

impl Serialize for FieldMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = self.to_rows().into_iter().map(|r| r.into_iter().map(u64::from).collect()).collect();
        MatrixRepr { p: self.field.p as u64, rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        let field = PrimeField::new(r.p).map_err(serde::de::Error::custom)?;
        Self::from_rows(field, &r.rows).map_err(serde::de::Error::custom)
    }
}

/// Sizes of the two diagonal blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSplit {
    pub m: usize,
    pub n: usize,
}

impl BlockSplit {
    pub fn new(m: usize, n: usize) -> Result<Self, LinalgError> {
        if m == 0 || n == 0 {
            return Err(LinalgError::BadSplit { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn size(self) -> usize {
        self.m + self.n
    }

    pub fn swapped(self) -> Self {
        Self { m: self.n, n: self.m }
    }
}

/// An elementary row operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RowOp {
    Swap { a: usize, b: usize },
    Scale { row: usize, factor: u32 },
    AddMultiple { target: usize, source: usize, factor: u32 },
}

impl fmt::Display for RowOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowOp::Swap { a, b } => write!(f, "swap r{a} r{b}"),
            RowOp::Scale { row, factor } => write!(f, "r{row} *= {factor}"),
            RowOp::AddMultiple { target, source, factor } => write!(f, "r{target} += {factor}*r{source}"),
        }
    }
}

impl RowOp {
    fn targets(self) -> usize {
        match self {
            RowOp::Swap { a, .. } => a,
            RowOp::Scale { row, .. } => row,
            RowOp::AddMultiple { target, .. } => target,
        }
    }
}

/// A block-constrained invertible matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearStage {
    pub kind: StageKind,
    pub split: BlockSplit,
    #[serde(flatten)]
    pub matrix: FieldMatrix,
}

/// Three stages with `stages[0] * stages[1] * stages[2]` equal to the input.
///
/// `ops[i]` is the operation sequence that reduced the input during phase
/// `i`; stage `i` is the inverse of the product of those operations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearDecomposition {
    pub order: Order,
    pub split: BlockSplit,
    pub stages: Vec<LinearStage>,
    #[serde(skip)]
    pub ops: Vec<Vec<RowOp>>,
}

impl LinearDecomposition {
    pub fn product(&self) -> FieldMatrix {
        let first = self.stages[0].matrix.clone();
        self.stages[1..].iter().fold(first, |acc, s| acc.mul(&s.matrix).expect("stage shapes agree"))
    }
}

/// Why a linear decomposition failed to certify its target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum LinearVerifyFailure {
    /// The stage kinds do not spell the declared order.
    Order { expected: String, actual: String },
    /// Stage `index` is not an invertible matrix of its declared block shape.
    BadStageShape { index: usize },
    /// The product differs from the target at `(row, col)`.
    Mismatch { row: usize, col: usize, expected: u32, actual: u32 },
}

impl fmt::Display for LinearVerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearVerifyFailure::Order { expected, actual } => {
                write!(f, "stage kinds {actual} differ from the declared order {expected}")
            }
            LinearVerifyFailure::BadStageShape { index } => write!(f, "stage {index} has the wrong block shape"),
            LinearVerifyFailure::Mismatch { row, col, expected, actual } => {
                write!(f, "mismatch at entry ({row}, {col}): expected {expected}, got {actual}")
            }
        }
    }
}

/// Checks stage kinds, block shapes and the product against `target`.
pub fn verify_linear(
    d: &LinearDecomposition,
    target: &FieldMatrix,
) -> Result<Verification<LinearVerifyFailure>, LinalgError> {
    let size = d.split.size();
    if target.rows != size || target.cols != size {
        return Err(LinalgError::DimensionMismatch { left: (size, size), right: (target.rows, target.cols) });
    }
    let expected: String = d.order.kinds().iter().map(|k| k.letter()).collect();
    let actual: String = d.stages.iter().map(|s| s.kind.letter()).collect();
    if expected != actual {
        return Ok(Verification::fail(LinearVerifyFailure::Order { expected, actual }));
    }
    for (index, s) in d.stages.iter().enumerate() {
        if s.matrix.field != target.field {
            return Err(LinalgError::FieldMismatch(s.matrix.field.p, target.field.p));
        }
        let fits = s.split == d.split
            && s.matrix.rows == size
            && s.matrix.cols == size
            && linear_stage_kind(&s.matrix, d.split)?.is_in(s.kind);
        if !fits {
            return Ok(Verification::fail(LinearVerifyFailure::BadStageShape { index }));
        }
    }
    let product = d.product();
    let mismatch = (0..size * size).find(|&i| product.entries[i] != target.entries[i]);
    Ok(match mismatch {
        Some(i) => Verification::fail(LinearVerifyFailure::Mismatch {
            row: i / size,
            col: i % size,
            expected: target.entries[i],
            actual: product.entries[i],
        }),
        None => Verification::pass(),
    })
}

/// Classifies `m` against the two block stage groups for `split`.
pub fn linear_stage_kind(mat: &FieldMatrix, split: BlockSplit) -> Result<StageClass, LinalgError> {
    let size = split.size();
    if mat.rows != size || mat.cols != size {
        return Err(LinalgError::DimensionMismatch { left: (mat.rows, mat.cols), right: (size, size) });
    }
    if !mat.is_invertible() {
        return Ok(StageClass::Neither);
    }
    let (m, n) = (split.m, split.n);
    let id = |r: usize, c: usize| u32::from(r == c);
    // L: bottom rows are [0 | I]. R: top rows are [I | 0].
    let bottom_fixed = (m..m + n).all(|r| (0..size).all(|c| mat.get(r, c) == id(r, c)));
    let top_fixed = (0..m).all(|r| (0..size).all(|c| mat.get(r, c) == id(r, c)));
    Ok(match (bottom_fixed, top_fixed) {
        (true, true) => StageClass::Both,
        (true, false) => StageClass::L,
        (false, true) => StageClass::R,
        (false, false) => StageClass::Neither,
    })
}

struct Reducer {
    work: FieldMatrix,
    acc: FieldMatrix,
    log: Vec<RowOp>,
}

impl Reducer {
    fn op(&mut self, op: RowOp) {
        self.work.apply(op);
        self.acc.apply(op);
        self.log.push(op);
    }

    /// Finishes a phase: returns the stage (inverse of the accumulated
    /// operations) and resets the accumulator.
    fn finish(&mut self, kind: StageKind, split: BlockSplit, ops: &mut Vec<Vec<RowOp>>) -> LinearStage {
        let f = self.work.field;
        let acc = std::mem::replace(&mut self.acc, FieldMatrix::identity(f, split.size()));
        ops.push(std::mem::take(&mut self.log));
        let matrix = acc.inverse().expect("products of elementary operations are invertible");
        LinearStage { kind, split, matrix }
    }
}

/// Factors an invertible matrix as `L1 * R * L2`.
///
/// Phase 1 writes only top rows and turns the top-left block into the
/// identity. Phase 2 writes only bottom rows: it clears the bottom-left block
/// and reduces the bottom-right block to the identity. Phase 3 writes only top
/// rows and clears the top-right block.
pub fn decompose_linear(mat: &FieldMatrix, split: BlockSplit) -> Result<LinearDecomposition, LinalgError> {
    let size = split.size();
    if mat.rows != size || mat.cols != size {
        return Err(LinalgError::DimensionMismatch { left: (mat.rows, mat.cols), right: (size, size) });
    }
    if !mat.is_invertible() {
        return Err(LinalgError::NotInvertible);
    }
    let f = mat.field;
    let m = split.m;
    let mut red = Reducer { work: mat.clone(), acc: FieldMatrix::identity(f, size), log: Vec::new() };
    let mut ops = Vec::with_capacity(3);
    let mut stages = Vec::with_capacity(3);

    for j in 0..m {
        if let Some(r) = (j..m).find(|&r| red.work.get(r, j) != 0) {
            if r != j {
                red.op(RowOp::Swap { a: j, b: r });
            }
        } else {
            // Row j is zero on columns 0..=j. Borrow a bottom row whose
            // column-j entry survives reduction by the pivot rows above.
            let reduced = |w: &FieldMatrix, r: usize| {
                (0..j).fold(w.get(r, j), |acc, i| f.sub(acc, f.mul(w.get(r, i), w.get(i, j))))
            };
            let r = (m..size)
                .find(|&r| reduced(&red.work, r) != 0)
                .unwrap_or_else(|| panic!("no pivot for column {j}: leading block columns are dependent"));
            red.op(RowOp::AddMultiple { target: j, source: r, factor: 1 });
            for i in 0..j {
                let x = red.work.get(j, i);
                if x != 0 {
                    red.op(RowOp::AddMultiple { target: j, source: i, factor: f.sub(0, x) });
                }
            }
        }
        let piv = red.work.get(j, j);
        assert!(piv != 0, "pivot vanished in column {j}");
        if piv != 1 {
            red.op(RowOp::Scale { row: j, factor: f.inv(piv) });
        }
        for r in 0..m {
            let x = red.work.get(r, j);
            if r != j && x != 0 {
                red.op(RowOp::AddMultiple { target: r, source: j, factor: f.sub(0, x) });
            }
        }
    }
    debug_assert!(red.log.iter().all(|op| op.targets() < m));
    stages.push(red.finish(StageKind::L, split, &mut ops));

    for r in m..size {
        for j in 0..m {
            let x = red.work.get(r, j);
            if x != 0 {
                red.op(RowOp::AddMultiple { target: r, source: j, factor: f.sub(0, x) });
            }
        }
    }
    for j in m..size {
        let r = (j..size).find(|&r| red.work.get(r, j) != 0).ok_or(LinalgError::NotInvertible)?;
        if r != j {
            red.op(RowOp::Swap { a: j, b: r });
        }
        let piv = red.work.get(j, j);
        if piv != 1 {
            red.op(RowOp::Scale { row: j, factor: f.inv(piv) });
        }
        for r in m..size {
            let x = red.work.get(r, j);
            if r != j && x != 0 {
                red.op(RowOp::AddMultiple { target: r, source: j, factor: f.sub(0, x) });
            }
        }
    }
    debug_assert!(red.log.iter().all(|op| op.targets() >= m));
    stages.push(red.finish(StageKind::R, split, &mut ops));

    for r in 0..m {
        for j in m..size {
            let x = red.work.get(r, j);
            if x != 0 {
                red.op(RowOp::AddMultiple { target: r, source: j, factor: f.sub(0, x) });
            }
        }
    }
    stages.push(red.finish(StageKind::L, split, &mut ops));
    debug_assert_eq!(red.work, FieldMatrix::identity(f, size));

    Ok(LinearDecomposition { order: Order::Lrl, split, stages, ops })
}

/// Factors an invertible matrix as `R1 * L * R2` by conjugating with the
/// block swap, factoring, and conjugating back.
pub fn decompose_linear_rlr(mat: &FieldMatrix, split: BlockSplit) -> Result<LinearDecomposition, LinalgError> {
    let size = split.size();
    if mat.rows != size || mat.cols != size {
        return Err(LinalgError::DimensionMismatch { left: (mat.rows, mat.cols), right: (size, size) });
    }
    let swapped = split.swapped();
    let d = decompose_linear(&mat.block_swap_conjugate(split), swapped)?;
    let stages = d
        .stages
        .into_iter()
        .map(|s| LinearStage { kind: s.kind.opposite(), split, matrix: s.matrix.block_swap_conjugate(swapped) })
        .collect();
    Ok(LinearDecomposition { order: Order::Rlr, split, stages, ops: d.ops })
}

/// Factors in the requested stage order.
pub fn decompose_linear_ordered(
    mat: &FieldMatrix,
    split: BlockSplit,
    order: Order,
) -> Result<LinearDecomposition, LinalgError> {
    match order {
        Order::Lrl => decompose_linear(mat, split),
        Order::Rlr => decompose_linear_rlr(mat, split),
    }
}

/// Decides by enumeration whether the 2x2 swap is *not* a product `L * R`
/// of single stages over the given field (split `1 + 1`).
pub fn swap_not_in_lr(field: PrimeField) -> Result<bool, LinalgError> {
    let p = field.modulus();
    if p > 5 {
        return Err(LinalgError::FieldTooLarge(p));
    }
    let swap = FieldMatrix::from_rows(field, &[vec![0, 1], vec![1, 0]])?;
    let p = p as u64;
    for a in 1..p {
        for q in 0..p {
            let l = FieldMatrix::from_rows(field, &[vec![a, q], vec![0, 1]])?;
            for r in 0..p {
                for s in 1..p {
                    let rs = FieldMatrix::from_rows(field, &[vec![1, 0], vec![r, s]])?;
                    if l.mul(&rs)? == swap {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Every invertible `size x size` matrix over `field`, in lexicographic
/// order of their entry vectors. Intended for tiny desk-check instances.
pub fn all_invertible(field: PrimeField, size: usize) -> Vec<FieldMatrix> {
    let p = field.modulus() as u64;
    let cells = size * size;
    let total = p.checked_pow(cells as u32).expect("enumeration size overflows");
    (0..total)
        .filter_map(|mut code| {
            let mut entries = vec![0u64; cells];
            for e in entries.iter_mut().rev() {
                *e = code % p;
                code /= p;
            }
            let m = FieldMatrix::new(field, size, size, &entries).expect("shape matches");
            m.is_invertible().then_some(m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn mat(p: u64, rows: &[&[u64]]) -> FieldMatrix {
        FieldMatrix::from_rows(f(p), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn field_construction() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(65521).is_ok());
        assert_eq!(PrimeField::new(1).unwrap_err(), LinalgError::NotPrime(1));
        assert_eq!(PrimeField::new(91).unwrap_err(), LinalgError::NotPrime(91));
        assert_eq!(PrimeField::new(65537).unwrap_err(), LinalgError::NotPrime(65537));
        let g = f(7);
        for x in 1..7 {
            assert_eq!(g.mul(x, g.inv(x)), 1);
        }
        let big = f(65521);
        assert_eq!(big.mul(65520, 65520), 1);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(f(2), 4).rank(), 4);
        assert!(FieldMatrix::identity(f(2), 4).is_invertible());
        assert_eq!(FieldMatrix::zeros(f(2), 2, 2).rank(), 0);
        let ones = mat(2, &[&[1, 1], &[1, 1]]);
        assert_eq!(ones.rank(), 1);
        assert!(!ones.is_invertible());
        assert_eq!(mat(3, &[&[1, 2, 0], &[2, 1, 0]]).rank(), 1);
        assert!(!mat(5, &[&[1, 2, 3], &[0, 1, 4]]).is_invertible());
    }

    #[test]
    fn inverse_round_trip() {
        let a = mat(7, &[&[3, 1, 4], &[1, 5, 2], &[6, 5, 3]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), FieldMatrix::identity(f(7), 3));
        assert_eq!(mat(2, &[&[1, 1], &[1, 1]]).inverse().unwrap_err(), LinalgError::NotInvertible);
    }

    #[test]
    fn stage_kind_examples() {
        let s = BlockSplit::new(1, 1).unwrap();
        assert_eq!(linear_stage_kind(&FieldMatrix::identity(f(2), 2), s).unwrap(), StageClass::Both);
        assert_eq!(linear_stage_kind(&mat(2, &[&[1, 1], &[0, 1]]), s).unwrap(), StageClass::L);
        assert_eq!(linear_stage_kind(&mat(2, &[&[1, 0], &[1, 1]]), s).unwrap(), StageClass::R);
        assert_eq!(linear_stage_kind(&mat(2, &[&[0, 1], &[1, 0]]), s).unwrap(), StageClass::Neither);
        assert!(linear_stage_kind(&FieldMatrix::identity(f(2), 3), s).is_err());
    }

    #[test]
    fn identity_gives_identity_stages() {
        let s = BlockSplit::new(2, 3).unwrap();
        let id = FieldMatrix::identity(f(5), 5);
        let d = decompose_linear(&id, s).unwrap();
        assert!(d.stages.iter().all(|st| st.matrix == id));
    }

    #[test]
    fn xor_swap() {
        let s = BlockSplit::new(1, 1).unwrap();
        let swap = mat(2, &[&[0, 1], &[1, 0]]);
        let d = decompose_linear(&swap, s).unwrap();
        assert_eq!(d.stages[0].matrix, mat(2, &[&[1, 1], &[0, 1]]));
        assert_eq!(d.stages[1].matrix, mat(2, &[&[1, 0], &[1, 1]]));
        assert_eq!(d.stages[2].matrix, mat(2, &[&[1, 1], &[0, 1]]));
        assert_eq!(d.product(), swap);
    }

    fn check(m: &FieldMatrix, split: BlockSplit, order: Order) {
        let d = decompose_linear_ordered(m, split, order).unwrap();
        assert_eq!(&d.product(), m);
        let kinds = order.kinds();
        for (st, k) in d.stages.iter().zip(kinds) {
            assert_eq!(st.kind, k);
            assert!(linear_stage_kind(&st.matrix, split).unwrap().is_in(k), "{m:?} {order}");
        }
    }

    #[test]
    fn exhaustive_gl2_f3() {
        let all = all_invertible(f(3), 2);
        assert_eq!(all.len(), 48);
        let s = BlockSplit::new(1, 1).unwrap();
        for m in &all {
            check(m, s, Order::Lrl);
            check(m, s, Order::Rlr);
        }
    }

    #[test]
    fn uneven_splits_over_f5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(1, 3), (3, 1), (2, 3), (4, 2)] {
            let split = BlockSplit::new(m, n).unwrap();
            let mut done = 0;
            while done < 30 {
                let entries: Vec<u64> = (0..(m + n) * (m + n)).map(|_| rng.gen_range(0..5)).collect();
                let mat = FieldMatrix::new(f(5), m + n, m + n, &entries).unwrap();
                if mat.is_invertible() {
                    check(&mat, split, Order::Lrl);
                    check(&mat, split, Order::Rlr);
                    done += 1;
                }
            }
        }
    }

    #[test]
    fn phase_ops_respect_block_rows() {
        let split = BlockSplit::new(2, 2).unwrap();
        for mat in all_invertible(f(2), 4).iter().step_by(97) {
            let d = decompose_linear(mat, split).unwrap();
            assert!(d.ops[0].iter().all(|op| op.targets() < 2));
            assert!(d.ops[1].iter().all(|op| op.targets() >= 2));
            assert!(d.ops[2].iter().all(|op| op.targets() < 2));
        }
    }

    #[test]
    fn singular_rejected() {
        let s = BlockSplit::new(1, 1).unwrap();
        assert_eq!(decompose_linear(&mat(3, &[&[1, 2], &[2, 1]]), s).unwrap_err(), LinalgError::NotInvertible);
    }

    #[test]
    fn swap_counterexample() {
        for p in [2, 3, 5] {
            assert!(swap_not_in_lr(f(p)).unwrap());
        }
        assert_eq!(swap_not_in_lr(f(7)).unwrap_err(), LinalgError::FieldTooLarge(7));
    }

    #[test]
    fn json_forms() {
        let m = mat(3, &[&[1, 2], &[0, 1]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"p":3,"rows":[[1,2],[0,1]]}"#);
        assert_eq!(serde_json::from_str::<FieldMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<FieldMatrix>(r#"{"p":4,"rows":[[1]]}"#).is_err());
        let d = decompose_linear(&mat(2, &[&[0, 1], &[1, 0]]), BlockSplit::new(1, 1).unwrap()).unwrap();
        let js = serde_json::to_value(&d.stages[0]).unwrap();
        assert_eq!(js["kind"], "L");
        assert_eq!(js["split"]["m"], 1);
        assert_eq!(js["rows"][0][1], 1);
    }
}
