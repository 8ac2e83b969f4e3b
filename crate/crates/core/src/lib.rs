//! Alternating stage factorizations of permutations of product sets.
//!
//! A permutation of `A x B` that only changes the first coordinate belongs
//! to the column group `G_L`; one that only changes the second belongs to
//! the row group `G_R`. Every permutation of a finite grid is a product of
//! three alternating stages; this crate computes such factorizations,
//! verifies them, and enumerates the product sets of small grids.

pub mod census;
pub mod cli;
pub mod decompose;
pub mod format;
pub mod group;
pub mod lehmer;
pub mod linalg;
pub mod matching;
pub mod perm;
pub mod poset;
