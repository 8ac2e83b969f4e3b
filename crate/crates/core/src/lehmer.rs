//! Lexicographic ranks of small permutations (Lehmer codes).

/// Largest permutation length the census handles.
pub const MAX_POINTS: usize = 9;

/// A permutation of `0..len` for `len <= MAX_POINTS`, padded with identity.
pub type SmallPerm = [u8; MAX_POINTS];

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Lexicographic index of `perm` among all permutations of its length.
pub fn rank(perm: &[u8]) -> u32 {
    let len = perm.len();
    let mut r = 0u32;
    let mut used = 0u16;
    for (i, &x) in perm.iter().enumerate() {
        let smaller_unused = (x as u32) - (used & ((1u16 << x) - 1)).count_ones();
        r = r * (len - i) as u32 + smaller_unused;
        used |= 1 << x;
    }
    r
}

/// Inverse of [`rank`] for permutations of `0..len`.
pub fn unrank(len: usize, mut r: u32) -> SmallPerm {
    debug_assert!(len <= MAX_POINTS);
    let mut digits = [0u32; MAX_POINTS];
    for i in (0..len).rev() {
        let base = (len - i) as u32;
        digits[i] = r % base;
        r /= base;
    }
    let mut out = identity();
    let mut free: u16 = (1 << len) - 1;
    for i in 0..len {
        let mut skip = digits[i];
        let mut bits = free;
        loop {
            let x = bits.trailing_zeros();
            if skip == 0 {
                out[i] = x as u8;
                free &= !(1 << x);
                break;
            }
            skip -= 1;
            bits &= bits - 1;
        }
    }
    out
}

pub fn identity() -> SmallPerm {
    std::array::from_fn(|i| i as u8)
}

/// `outer ∘ inner` on the first `len` points.
#[inline]
pub fn compose(outer: &SmallPerm, inner: &SmallPerm, len: usize) -> SmallPerm {
    let mut out = identity();
    for x in 0..len {
        out[x] = outer[inner[x] as usize];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_follow_lexicographic_order() {
        let expected: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for (r, p) in expected.iter().enumerate() {
            assert_eq!(rank(p), r as u32);
            assert_eq!(&unrank(3, r as u32)[..3], p);
        }
        assert_eq!(rank(&[8, 7, 6, 5, 4, 3, 2, 1, 0]), 362_879);
        assert_eq!(factorial(9), 362_880);
        assert_eq!(factorial(0), 1);
    }

    proptest! {
        #[test]
        fn rank_unrank_round_trip(len in 1usize..=9, seed in any::<u32>()) {
            let r = seed % factorial(len) as u32;
            let p = unrank(len, r);
            prop_assert_eq!(rank(&p[..len]), r);
        }
    }
}
