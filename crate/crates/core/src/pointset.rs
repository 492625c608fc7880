//! Point sets over the `n * n` points of a net, stored as a single `u128`.
//!
//! Point `(row, col)` has id `row * n + col`; orders up to 11 fit.

use std::cmp::Ordering;
use std::fmt;

/// Largest order whose point set fits in a `u128`.
pub const MAX_ORDER: usize = 11;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PointSet(pub u128);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    /// All `count` points `0..count`.
    pub fn full(count: usize) -> Self {
        if count >= 128 {
            PointSet(u128::MAX)
        } else {
            PointSet((1u128 << count) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        PointSet(1u128 << p)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        let mut s = PointSet::EMPTY;
        for p in points {
            s.insert(p);
        }
        s
    }

    #[inline]
    pub fn contains(self, p: usize) -> bool {
        self.0 >> p & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, p: usize) {
        self.0 |= 1u128 << p;
    }

    #[inline]
    pub fn remove(&mut self, p: usize) {
        self.0 &= !(1u128 << p);
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn meet(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    #[inline]
    pub fn join(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    #[inline]
    pub fn xor(self, other: PointSet) -> PointSet {
        PointSet(self.0 ^ other.0)
    }

    #[inline]
    pub fn minus(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    /// Number of shared points.
    #[inline]
    pub fn meet_count(self, other: PointSet) -> u32 {
        (self.0 & other.0).count_ones()
    }

    #[inline]
    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest point, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> PointIter {
        PointIter(self.0)
    }

    /// Lexicographic comparison of the ascending point sequences.
    ///
    /// For sets of equal size the set holding the smallest point of the
    /// symmetric difference comes first.
    pub fn lex_cmp(self, other: PointSet) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            // `self` has the smaller element at the first difference, unless
            // `other` already ran out of elements (only possible for unequal sizes).
            let below = low - 1;
            if (other.0 & below).count_ones() == other.len() as u32 && other.0 & !below == 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        } else {
            let below = low - 1;
            if (self.0 & below).count_ones() == self.len() as u32 && self.0 & !below == 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(*other)
    }
}

pub struct PointIter(u128);

impl Iterator for PointIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let p = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(p)
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for PointIter {}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let a = PointSet::from_points([0, 5, 99]);
        assert_eq!(a.len(), 3);
        assert!(a.contains(99));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 5, 99]);
        assert_eq!(a.first(), Some(0));
        assert_eq!(PointSet::full(100).len(), 100);
    }

    fn sorted_points(s: PointSet) -> Vec<usize> {
        s.iter().collect()
    }

    proptest! {
        #[test]
        fn lex_cmp_matches_sequence_order(a in any::<u128>(), b in any::<u128>()) {
            let (a, b) = (PointSet(a), PointSet(b));
            prop_assert_eq!(a.lex_cmp(b), sorted_points(a).cmp(&sorted_points(b)));
        }
    }
}
