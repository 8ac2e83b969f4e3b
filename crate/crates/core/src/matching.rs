//! Permutation matrices below doubly regular count matrices.
//!
//! A square nonnegative integer matrix whose rows and columns all sum to the
//! same `n >= 1` always dominates some permutation matrix. [`hall_matching`]
//! finds one with Kuhn's augmenting-path search.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("value {value} occurs {count} times, expected {expected}")]
    NotBalanced { value: usize, count: usize, expected: usize },
    #[error("value {value} at row {row} is outside 0..{m}")]
    ValueOutOfRange { row: usize, value: usize, m: usize },
    #[error("row {row} has length {len}, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("{what} {index} sums to {sum}, expected {expected}")]
    NotRegular { what: &'static str, index: usize, sum: usize, expected: usize },
    #[error("no perfect matching; rows {violator:?} have fewer neighbors than members")]
    NoPerfectMatching { violator: Vec<usize> },
}

/// Square count matrix with every row and column summing to `regularity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityMatrix {
    entries: Vec<Vec<usize>>,
    regularity: usize,
}

impl MultiplicityMatrix {
    pub fn new(entries: Vec<Vec<usize>>, regularity: usize) -> Result<Self, MatchingError> {
        let m = entries.len();
        for (row, r) in entries.iter().enumerate() {
            if r.len() != m {
                return Err(MatchingError::Ragged { row, len: r.len(), expected: m });
            }
            let sum: usize = r.iter().sum();
            if sum != regularity {
                return Err(MatchingError::NotRegular { what: "row", index: row, sum, expected: regularity });
            }
        }
        for col in 0..m {
            let sum: usize = entries.iter().map(|r| r[col]).sum();
            if sum != regularity {
                return Err(MatchingError::NotRegular { what: "column", index: col, sum, expected: regularity });
            }
        }
        Ok(Self { entries, regularity })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn regularity(&self) -> usize {
        self.regularity
    }

    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }

    /// Subtracts the permutation matrix of `matching`; the result is
    /// `(regularity - 1)`-regular.
    pub fn decrement(&mut self, matching: &Matching) {
        for (a, &b) in matching.target.iter().enumerate() {
            assert!(self.entries[a][b] > 0, "matching leaves the support at ({a}, {b})");
            self.entries[a][b] -= 1;
        }
        self.regularity -= 1;
    }
}

/// A permutation `a -> target[a]` with `N[a][target[a]] >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    target: Vec<usize>,
}

impl Matching {
    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn get(&self, row: usize) -> usize {
        self.target[row]
    }
}

/// Counts, for each row `a` of an `m x n` projection matrix over `0..m`, how
/// often each value occurs: `N[a][v] = |{ j : proj[a][j] = v }|`.
pub fn multiplicity_matrix(proj: &[Vec<usize>]) -> Result<MultiplicityMatrix, MatchingError> {
    let m = proj.len();
    let n = proj.first().map_or(0, Vec::len);
    let mut entries = vec![vec![0; m]; m];
    let mut totals = vec![0; m];
    for (row, r) in proj.iter().enumerate() {
        if r.len() != n {
            return Err(MatchingError::Ragged { row, len: r.len(), expected: n });
        }
        for &value in r {
            if value >= m {
                return Err(MatchingError::ValueOutOfRange { row, value, m });
            }
            entries[row][value] += 1;
            totals[value] += 1;
        }
    }
    if let Some((value, &count)) = totals.iter().enumerate().find(|&(_, &c)| c != n) {
        return Err(MatchingError::NotBalanced { value, count, expected: n });
    }
    Ok(MultiplicityMatrix { entries, regularity: n })
}

/// Finds a permutation matrix below `matrix`.
///
/// Rows are processed in increasing order and each augmenting search scans
/// columns in increasing order, so the result is deterministic.
pub fn hall_matching(matrix: &MultiplicityMatrix) -> Result<Matching, MatchingError> {
    kuhn(&matrix.entries).map(|target| Matching { target })
}

/// Kuhn's algorithm on the support of `entries`. On failure returns the
/// rows of the last failed alternating tree, whose neighborhood is one
/// smaller than the row set.
pub(crate) fn kuhn(entries: &[Vec<usize>]) -> Result<Vec<usize>, MatchingError> {
    let m = entries.len();
    let mut row_of_col = vec![usize::MAX; m];
    let mut visited = vec![false; m];
    for a in 0..m {
        visited.iter_mut().for_each(|v| *v = false);
        if !augment(entries, a, &mut visited, &mut row_of_col) {
            let mut violator: Vec<usize> =
                std::iter::once(a).chain((0..m).filter(|&c| visited[c]).map(|c| row_of_col[c])).collect();
            violator.sort_unstable();
            return Err(MatchingError::NoPerfectMatching { violator });
        }
    }
    let mut target = vec![0; m];
    for (c, &a) in row_of_col.iter().enumerate() {
        target[a] = c;
    }
    Ok(target)
}

/// Takes the lowest free column in the support of row `a` if there is one,
/// otherwise searches for an augmenting path scanning columns in order.
fn augment(entries: &[Vec<usize>], a: usize, visited: &mut [bool], row_of_col: &mut [usize]) -> bool {
    if let Some(c) = (0..entries.len()).find(|&c| entries[a][c] > 0 && !visited[c] && row_of_col[c] == usize::MAX) {
        visited[c] = true;
        row_of_col[c] = a;
        return true;
    }
    for c in 0..entries.len() {
        if entries[a][c] == 0 || visited[c] {
            continue;
        }
        visited[c] = true;
        if row_of_col[c] == usize::MAX || augment(entries, row_of_col[c], visited, row_of_col) {
            row_of_col[c] = a;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn multiplicity_examples() {
        let n = multiplicity_matrix(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(n.entries(), &[vec![1, 1], vec![1, 1]]);
        let n = multiplicity_matrix(&[vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(n.entries(), &[vec![2, 0], vec![0, 2]]);
        assert_eq!(
            multiplicity_matrix(&[vec![0, 0], vec![0, 1]]).unwrap_err(),
            MatchingError::NotBalanced { value: 0, count: 3, expected: 2 }
        );
        assert!(matches!(
            multiplicity_matrix(&[vec![0, 2], vec![1, 0]]),
            Err(MatchingError::ValueOutOfRange { value: 2, .. })
        ));
    }

    #[test]
    fn matching_examples() {
        let ones = MultiplicityMatrix::new(vec![vec![1, 1], vec![1, 1]], 2).unwrap();
        assert_eq!(hall_matching(&ones).unwrap().target(), &[0, 1]);
        let anti = MultiplicityMatrix::new(vec![vec![0, 2], vec![2, 0]], 2).unwrap();
        assert_eq!(hall_matching(&anti).unwrap().target(), &[1, 0]);
        for m in 1..5 {
            for n in 1..4 {
                let diag = (0..m).map(|a| (0..m).map(|b| if a == b { n } else { 0 }).collect()).collect();
                let diag = MultiplicityMatrix::new(diag, n).unwrap();
                assert_eq!(hall_matching(&diag).unwrap().target(), (0..m).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn irregular_matrix_rejected() {
        assert!(matches!(
            MultiplicityMatrix::new(vec![vec![1, 1], vec![2, 0]], 2),
            Err(MatchingError::NotRegular { what: "column", .. })
        ));
    }

    #[test]
    fn violator_is_a_hall_obstruction() {
        // Rows 0 and 1 both only reach column 0.
        let entries = vec![vec![1, 0, 0], vec![1, 0, 0], vec![0, 1, 1]];
        match kuhn(&entries).unwrap_err() {
            MatchingError::NoPerfectMatching { violator } => {
                assert_eq!(violator, vec![0, 1]);
                let entries = &entries;
                let nbhd: std::collections::BTreeSet<_> =
                    violator.iter().flat_map(|&a| (0..3).filter(move |&c| entries[a][c] > 0)).collect();
                assert!(nbhd.len() < violator.len());
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    fn balanced_projection() -> impl Strategy<Value = Vec<Vec<usize>>> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(m, n)| {
            let values: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat_n(v, n)).collect();
            Just(values).prop_shuffle().prop_map(move |v| v.chunks(n).map(<[usize]>::to_vec).collect())
        })
    }

    proptest! {
        #[test]
        fn regular_matrices_always_match(proj in balanced_projection()) {
            let mut nm = multiplicity_matrix(&proj).unwrap();
            let n = nm.regularity();
            for round in 0..n {
                let matching = hall_matching(&nm).unwrap();
                for (a, &b) in matching.target().iter().enumerate() {
                    prop_assert!(nm.entries()[a][b] >= 1);
                }
                nm.decrement(&matching);
                prop_assert_eq!(nm.regularity(), n - round - 1);
                // Re-validation checks every row and column sum.
                prop_assert!(MultiplicityMatrix::new(nm.entries().to_vec(), nm.regularity()).is_ok());
            }
        }
    }
}
