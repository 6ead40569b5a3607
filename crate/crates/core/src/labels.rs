//! Finite label sets as machine-word bitsets.
//!
//! Labels are positive integers `1..=64`; bit `i` of the word encodes label
//! `i + 1`. All set algebra is O(1) word operations, which dominates the cost
//! of exhaustive enumeration.

use crate::error::{Error, Result};
use std::fmt;

pub const MAX_LABEL: u32 = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    /// Set containing the single label `label`. Panics outside `1..=64`.
    pub fn singleton(label: u32) -> Self {
        assert!(
            (1..=MAX_LABEL).contains(&label),
            "label {label} out of range 1..=64"
        );
        LabelSet(1u64 << (label - 1))
    }

    pub fn checked_singleton(label: u32) -> Result<Self> {
        if (1..=MAX_LABEL).contains(&label) {
            Ok(LabelSet(1u64 << (label - 1)))
        } else {
            Err(Error::LabelOutOfRange(label))
        }
    }

    /// The set `{1, ..., n}`. Panics if `n > 64`.
    pub fn full(n: u32) -> Self {
        assert!(n <= MAX_LABEL, "label capacity is 64, got {n}");
        if n == 0 {
            LabelSet(0)
        } else if n == MAX_LABEL {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << n) - 1)
        }
    }

    pub fn from_labels<I: IntoIterator<Item = u32>>(labels: I) -> Result<Self> {
        let mut s = LabelSet::EMPTY;
        for l in labels {
            s = s.union(LabelSet::checked_singleton(l)?);
        }
        Ok(s)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, label: u32) -> bool {
        (1..=MAX_LABEL).contains(&label) && self.0 & (1u64 << (label - 1)) != 0
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    pub fn difference(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: LabelSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest label in the set. Panics on the empty set.
    pub fn min_label(self) -> u32 {
        assert!(!self.is_empty(), "min_label of empty set");
        self.0.trailing_zeros() + 1
    }

    pub fn labels(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let l = bits.trailing_zeros() + 1;
                bits &= bits - 1;
                Some(l)
            }
        })
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.labels().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let a = LabelSet::from_labels([1, 3, 5]).unwrap();
        let b = LabelSet::from_labels([3, 4]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.intersection(b), LabelSet::singleton(3));
        assert_eq!(a.union(b).len(), 4);
        assert_eq!(a.difference(b), LabelSet::from_labels([1, 5]).unwrap());
        assert!(LabelSet::singleton(3).is_subset(a));
        assert!(!a.is_subset(b));
        assert_eq!(a.min_label(), 1);
        assert_eq!(a.to_string(), "{1,3,5}");
    }

    #[test]
    fn full_and_bounds() {
        assert_eq!(LabelSet::full(4).len(), 4);
        assert_eq!(LabelSet::full(64).len(), 64);
        assert!(LabelSet::full(64).contains(64));
        assert!(LabelSet::checked_singleton(0).is_err());
        assert!(LabelSet::checked_singleton(65).is_err());
    }

    #[test]
    fn label_iteration_is_sorted() {
        let a = LabelSet::from_labels([9, 2, 64, 17]).unwrap();
        let v: Vec<u32> = a.labels().collect();
        assert_eq!(v, vec![2, 9, 17, 64]);
    }
}
