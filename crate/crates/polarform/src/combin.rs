//! Index enumeration for the extended-blossom sums.
//!
//! Everything is expressed over index ranges `0..len` in lexicographic
//! order so that term enumeration, and hence floating-point summation
//! order, is deterministic.

use itertools::Itertools;

/// All strictly increasing `size`-tuples of indices below `len`.
pub fn index_subsets(len: usize, size: usize) -> Vec<Vec<usize>> {
    if size > len {
        return Vec::new();
    }
    (0..len).combinations(size).collect()
}

/// All non-decreasing `size`-tuples of indices below `len` (multisets,
/// repetition allowed).
pub fn index_multisets(len: usize, size: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return if size == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..len).combinations_with_replacement(size).collect()
}

/// Number of `size`-multisets over `len` symbols: `C(len + size - 1, size)`.
pub fn multiset_count(len: usize, size: usize) -> usize {
    if size == 0 {
        return 1;
    }
    if len == 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..size as u128 {
        acc = acc * (len as u128 + i) / (i + 1);
    }
    acc as usize
}

/// Number of `size`-subsets over `len` symbols.
pub fn subset_count(len: usize, size: usize) -> usize {
    if size > len {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..size as u128 {
        acc = acc * (len as u128 - i) / (i + 1);
    }
    acc as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_enumeration_matches_count() {
        for len in 0..=4 {
            for size in 0..=5 {
                assert_eq!(
                    index_multisets(len, size).len(),
                    multiset_count(len, size),
                    "len={len} size={size}"
                );
            }
        }
    }

    #[test]
    fn subsets_are_lexicographic_and_counted() {
        let subs = index_subsets(4, 2);
        assert_eq!(subs.len(), subset_count(4, 2));
        assert_eq!(subs[0], vec![0, 1]);
        assert_eq!(subs.last().unwrap(), &vec![2, 3]);
        let mut sorted = subs.clone();
        sorted.sort();
        assert_eq!(subs, sorted);
    }

    #[test]
    fn multisets_allow_repeats() {
        let ms = index_multisets(2, 2);
        assert_eq!(ms, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }
}
