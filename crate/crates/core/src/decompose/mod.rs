//! Three-stage factorizations of grid permutations.
//!
//! [`decompose_two`] writes any permutation of an `m x n` grid as a row
//! stage, a column stage and a row stage (or the transposed pattern). The
//! first row stage rearranges each row so that afterwards every column holds
//! exactly one cell destined for each row; the matching step guarantees
//! such an arrangement exists. The column stage then sorts every column by
//! destination row, and the last row stage places cells within their rows.

mod multi;
mod sparse;

pub use multi::{
    decompose_multi, schedule_for, verify_multi, MultiDecomposition, MultiError, MultiGridPermutation, MultiStage,
    MultiVerifyFailure,
};
pub use sparse::{decompose_finite_support, SparseDecomposition, SparseError, SparsePermutation};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matching;
use crate::perm::{Decomposition, GridPermutation, PermError, Point, Stage, StageKind};

/// Stage pattern of a three-stage factorization, in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Order {
    #[default]
    #[serde(rename = "RLR")]
    Rlr,
    #[serde(rename = "LRL")]
    Lrl,
}

impl Order {
    pub fn kinds(self) -> [StageKind; 3] {
        match self {
            Order::Rlr => [StageKind::R, StageKind::L, StageKind::R],
            Order::Lrl => [StageKind::L, StageKind::R, StageKind::L],
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Rlr => "RLR",
            Order::Lrl => "LRL",
        })
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "RLR" => Ok(Order::Rlr),
            "LRL" => Ok(Order::Lrl),
            _ => Err(format!("unknown order {s:?}, expected rlr or lrl")),
        }
    }
}

/// Factors `p` into exactly three alternating stages whose composition
/// (first stage applied first) equals `p`.
pub fn decompose_two(p: &GridPermutation, order: Order) -> Decomposition {
    match order {
        Order::Rlr => decompose_rlr(p),
        Order::Lrl => {
            let d = decompose_rlr(&p.transpose());
            Decomposition { m: p.m(), n: p.n(), stages: d.stages.iter().map(Stage::transposed).collect() }
        }
    }
}

fn decompose_rlr(p: &GridPermutation) -> Decomposition {
    let (m, n) = p.dims();
    let table = p.table();
    let dest_row = |a: usize, j: usize| table[a * n + j] / n;

    // arrangement[a][c] = original column of the cell moved to column c of row a.
    let mut arrangement: Vec<Vec<usize>> = (0..m).map(|_| (0..n).collect()).collect();
    let mut counts = vec![vec![0usize; m]; m];
    for a in 0..m {
        for j in 0..n {
            counts[a][dest_row(a, j)] += 1;
        }
    }
    for c in 0..n {
        let target =
            matching::kuhn(&counts).unwrap_or_else(|e| panic!("regular count matrix without a perfect matching: {e}"));
        for (a, row) in arrangement.iter_mut().enumerate() {
            let want = target[a];
            let j = (c..n)
                .find(|&j| dest_row(a, row[j]) == want)
                .expect("matched value missing from the unfrozen part of its row");
            row.swap(c, j);
            counts[a][want] -= 1;
        }
    }

    let first: Vec<Vec<usize>> = arrangement
        .iter()
        .map(|row| {
            let mut tau = vec![0; n];
            for (c, &j) in row.iter().enumerate() {
                tau[j] = c;
            }
            tau
        })
        .collect();

    // After the first stage, every column holds each destination row once.
    let mut middle = vec![vec![0usize; m]; n];
    let mut source_row = vec![vec![usize::MAX; m]; n];
    for c in 0..n {
        for a in 0..m {
            let r = dest_row(a, arrangement[a][c]);
            assert_eq!(source_row[c][r], usize::MAX, "column {c} receives destination row {r} twice");
            source_row[c][r] = a;
            middle[c][a] = r;
        }
    }

    let last: Vec<Vec<usize>> = (0..m)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let a = source_row[c][r];
                    table[a * n + arrangement[a][c]] % n
                })
                .collect()
        })
        .collect();

    Decomposition {
        m,
        n,
        stages: vec![
            Stage { kind: StageKind::R, perms: first },
            Stage { kind: StageKind::L, perms: middle },
            Stage { kind: StageKind::R, perms: last },
        ],
    }
}

/// Why a decomposition failed to certify its target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum VerifyFailure {
    /// Stages `index - 1` and `index` have the same kind.
    NotAlternating { index: usize },
    /// Stage `index` does not have the family shape required by the grid.
    BadStageShape { index: usize },
    /// The composition differs from the target at `cell`.
    Mismatch { cell: Point, expected: Point, actual: Point },
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::NotAlternating { index } => {
                write!(f, "stages {} and {index} have the same kind", index - 1)
            }
            VerifyFailure::BadStageShape { index } => write!(f, "stage {index} has the wrong shape"),
            VerifyFailure::Mismatch { cell, expected, actual } => write!(
                f,
                "mismatch at ({}, {}): expected ({}, {}), got ({}, {})",
                cell.0, cell.1, expected.0, expected.1, actual.0, actual.1
            ),
        }
    }
}

/// Outcome of [`verify_decomposition`]; `failure` is `None` on success.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification<F = VerifyFailure> {
    pub ok: bool,
    pub failure: Option<F>,
}

impl<F> Verification<F> {
    pub(crate) fn pass() -> Self {
        Self { ok: true, failure: None }
    }

    pub(crate) fn fail(failure: F) -> Self {
        Self { ok: false, failure: Some(failure) }
    }
}

/// Checks that `d` alternates, that every stage is shape-valid, and that the
/// composition equals `p`. The first mismatching cell is reported in
/// lexicographic order.
pub fn verify_decomposition(d: &Decomposition, p: &GridPermutation) -> Result<Verification, PermError> {
    if (d.m, d.n) != p.dims() {
        return Err(PermError::DimensionMismatch { left: (d.m, d.n), right: p.dims() });
    }
    if let Some(i) = d.stages.windows(2).position(|w| w[0].kind == w[1].kind) {
        return Ok(Verification::fail(VerifyFailure::NotAlternating { index: i + 1 }));
    }
    if let Some(index) = d.stages.iter().position(|s| !s.fits(d.m, d.n)) {
        return Ok(Verification::fail(VerifyFailure::BadStageShape { index }));
    }
    let composed = d.compose_all()?;
    let mismatch = composed.pairs().zip(p.pairs()).find(|((_, actual), (_, expected))| actual != expected);
    Ok(match mismatch {
        Some(((cell, actual), (_, expected))) => Verification::fail(VerifyFailure::Mismatch { cell, expected, actual }),
        None => Verification::pass(),
    })
}
