//! Text and JSON input formats.
//!
//! Every reader accepts either the JSON form of the object or its line
//! oriented text form; input whose first non-blank character is `{` is
//! treated as JSON. In text forms blank lines and `#` comments are skipped.
//!
//! * grid permutation: `m n`, then `a b -> a2 b2` per cell
//! * multi-factor permutation: `d1 d2 ... dk`, then `x1 .. xk -> y1 .. yk`
//! * finite-support permutation: `a b -> a2 b2` per moved point
//! * matrix: `p rows cols`, then one row of integers per line
//! * poset: element count, then `a < b` per relation

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use thiserror::Error;

use crate::decompose::{MultiError, MultiGridPermutation, SparseError, SparsePermutation};
use crate::linalg::{FieldMatrix, LinalgError, PrimeField};
use crate::perm::{Decomposition, GridPermutation, PermError, Point};
use crate::poset::{FinitePoset, PosetError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Multi(#[from] MultiError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

pub fn looks_like_json(input: &str) -> bool {
    input.trim_start().starts_with('{')
}

fn json<T: DeserializeOwned>(input: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(input)?)
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>, FormatError> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("expected a non-negative integer, found {t:?}"))))
        .collect()
}

/// Parses `x1 .. xk -> y1 .. yk` with exactly `k` coordinates on each side.
fn arrow(line: usize, text: &str, k: usize) -> Result<(Vec<usize>, Vec<usize>), FormatError> {
    let (src, dst) = text.split_once("->").ok_or_else(|| parse_err(line, "expected `source -> image`"))?;
    let (src, dst) = (numbers(line, src)?, numbers(line, dst)?);
    if src.len() != k || dst.len() != k {
        return Err(parse_err(line, format!("expected {k} coordinates on each side of `->`")));
    }
    Ok((src, dst))
}

fn point_arrow(line: usize, text: &str) -> Result<(Point, Point), FormatError> {
    let (s, d) = arrow(line, text, 2)?;
    Ok(((s[0], s[1]), (d[0], d[1])))
}

pub fn read_grid(input: &str) -> Result<GridPermutation, FormatError> {
    if looks_like_json(input) {
        return json(input);
    }
    let mut lines = content_lines(input);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let dims: Vec<usize> = numbers(line, header)?;
    let [m, n] = dims[..] else { return Err(parse_err(line, "expected `m n`")) };
    let pairs = lines.map(|(l, t)| point_arrow(l, t)).collect::<Result<Vec<_>, _>>()?;
    Ok(GridPermutation::build(m, n, &pairs)?)
}

pub fn write_grid(p: &GridPermutation) -> String {
    let mut out = format!("{} {}\n", p.m(), p.n());
    for ((a, b), (a2, b2)) in p.pairs() {
        let _ = writeln!(out, "{a} {b} -> {a2} {b2}");
    }
    out
}

pub fn read_multi(input: &str) -> Result<MultiGridPermutation, FormatError> {
    if looks_like_json(input) {
        return json(input);
    }
    let mut lines = content_lines(input);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let dims: Vec<usize> = numbers(line, header)?;
    if dims.is_empty() {
        return Err(parse_err(line, "expected the factor sizes"));
    }
    let pairs = lines.map(|(l, t)| arrow(l, t, dims.len())).collect::<Result<Vec<_>, _>>()?;
    Ok(MultiGridPermutation::build(dims, &pairs)?)
}

pub fn write_multi(p: &MultiGridPermutation) -> String {
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut out = format!("{}\n", join(p.dims()));
    for (s, d) in p.pairs() {
        let _ = writeln!(out, "{} -> {}", join(&s), join(&d));
    }
    out
}

pub fn read_sparse(input: &str) -> Result<SparsePermutation, FormatError> {
    if looks_like_json(input) {
        return json(input);
    }
    let pairs = content_lines(input).map(|(l, t)| point_arrow(l, t)).collect::<Result<Vec<_>, _>>()?;
    Ok(SparsePermutation::new(&pairs)?)
}

pub fn read_matrix(input: &str) -> Result<FieldMatrix, FormatError> {
    if looks_like_json(input) {
        return json(input);
    }
    let mut lines = content_lines(input);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let head: Vec<u64> = numbers(line, header)?;
    let [p, rows, cols] = head[..] else { return Err(parse_err(line, "expected `p rows cols`")) };
    let field = PrimeField::new(p)?;
    let mut entries = Vec::new();
    let mut count = 0;
    for (line, text) in lines {
        let row: Vec<u64> = numbers(line, text)?;
        if row.len() as u64 != cols {
            return Err(parse_err(line, format!("expected {cols} entries, found {}", row.len())));
        }
        entries.extend(row);
        count += 1;
    }
    if count != rows {
        return Err(parse_err(line, format!("header announces {rows} rows, found {count}")));
    }
    Ok(FieldMatrix::new(field, rows as usize, cols as usize, &entries)?)
}

pub fn read_decomposition(input: &str) -> Result<Decomposition, FormatError> {
    json(input)
}

pub fn read_poset(input: &str) -> Result<FinitePoset, FormatError> {
    Ok(input.parse()?)
}

/// Renders a grid permutation as an `m x n` table of image coordinates.
pub fn grid_table(p: &GridPermutation) -> String {
    let cells: Vec<String> = p.pairs().map(|(_, (a, b))| format!("({a},{b})")).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells.chunks(p.n()) {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_text_and_json_agree() {
        let text = "2 2\n0 0 -> 0 0\n0 1 -> 1 0\n# swap\n1 0 -> 0 1\n1 1 -> 1 1\n";
        let p = read_grid(text).unwrap();
        assert_eq!(p, GridPermutation::flip(2).unwrap());
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(read_grid(&j).unwrap(), p);
        assert_eq!(read_grid(&write_grid(&p)).unwrap(), p);
    }

    #[test]
    fn grid_text_errors() {
        assert!(matches!(read_grid(""), Err(FormatError::Parse { line: 1, .. })));
        assert!(matches!(read_grid("2 2 2\n"), Err(FormatError::Parse { line: 1, .. })));
        assert!(matches!(read_grid("1 1\n0 0 0 -> 0 0"), Err(FormatError::Parse { line: 2, .. })));
        assert!(matches!(read_grid("1 2\n0 0 -> 0 0"), Err(FormatError::Perm(PermError::MissingSource((0, 1))))));
        assert!(matches!(read_grid("{"), Err(FormatError::Json(_))));
    }

    #[test]
    fn multi_round_trip() {
        let p = MultiGridPermutation::from_table(vec![2, 1, 2], vec![3, 0, 1, 2]).unwrap();
        assert_eq!(read_multi(&write_multi(&p)).unwrap(), p);
        assert_eq!(read_multi(&serde_json::to_string(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn sparse_text() {
        let p = read_sparse("0 0 -> 5 7\n5 7 -> 0 0\n").unwrap();
        assert_eq!(p.apply((0, 0)), (5, 7));
        assert!(matches!(read_sparse("0 0 -> 1 1"), Err(FormatError::Sparse(_))));
    }

    #[test]
    fn matrix_text() {
        let m = read_matrix("2 2 2\n0 1\n1 0\n").unwrap();
        assert_eq!(m.to_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(read_matrix("4 1 1\n1"), Err(FormatError::Linalg(LinalgError::NotPrime(4)))));
        assert!(matches!(read_matrix("2 2 2\n0 1\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(read_matrix("2 2 2\n0 1 1\n1 0"), Err(FormatError::Parse { line: 2, .. })));
    }

    #[test]
    fn table_rendering() {
        let t = grid_table(&GridPermutation::flip(2).unwrap());
        assert_eq!(t, "(0,0) (1,0)\n(0,1) (1,1)\n");
    }
}
