use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A multiset of positive integer observations.
///
/// Stored as distinct values in ascending order with their multiplicities, so
/// the weighted and the expanded forms of the same data compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSample {
    distinct: Vec<(u64, u64)>,
    total: u64,
}

impl CountSample {
    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Result<Self> {
        Self::from_weighted(values.into_iter().map(|k| (k, 1)))
    }

    /// Builds a sample from `(value, multiplicity)` pairs. Repeated values are
    /// merged and zero multiplicities ignored.
    pub fn from_weighted<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (k, n) in pairs {
            if k == 0 {
                return Err(Error::Domain("observations must be >= 1"));
            }
            if n > 0 {
                *counts.entry(k).or_insert(0u64) += n;
            }
        }
        let total = counts.values().sum();
        if total == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            distinct: counts.into_iter().collect(),
            total,
        })
    }

    /// Distinct values in ascending order with multiplicities.
    pub fn distinct(&self) -> &[(u64, u64)] {
        &self.distinct
    }

    /// Number of observations, counting multiplicity.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn min(&self) -> u64 {
        self.distinct[0].0
    }

    pub fn max(&self) -> u64 {
        self.distinct[self.distinct.len() - 1].0
    }

    /// Expanded values in ascending order.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.distinct
            .iter()
            .flat_map(|&(k, n)| core::iter::repeat_n(k, n as usize))
    }

    /// Number of observations `>= k`.
    pub fn count_at_least(&self, k: u64) -> u64 {
        let idx = self.distinct.partition_point(|&(v, _)| v < k);
        self.distinct[idx..].iter().map(|&(_, n)| n).sum()
    }

    /// Number of observations in `[lo, hi]`; `hi = None` means unbounded.
    pub fn count_in(&self, lo: u64, hi: Option<u64>) -> u64 {
        let start = self.distinct.partition_point(|&(v, _)| v < lo);
        let end = match hi {
            Some(h) => self.distinct.partition_point(|&(v, _)| v <= h),
            None => self.distinct.len(),
        };
        self.distinct[start..end.max(start)]
            .iter()
            .map(|&(_, n)| n)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn weighted_and_expanded_agree() {
        let a = CountSample::from_values([3, 1, 1, 7, 3, 3]).unwrap();
        let b = CountSample::from_weighted([(1, 2), (3, 3), (7, 1), (9, 0)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 6);
        assert_eq!(a.values().collect::<Vec<_>>(), vec![1, 1, 3, 3, 3, 7]);
        assert_eq!((a.min(), a.max()), (1, 7));
    }

    #[test]
    fn rejects_zero_and_empty() {
        assert_eq!(CountSample::from_values([]), Err(Error::EmptySample));
        assert!(matches!(
            CountSample::from_values([1, 0]),
            Err(Error::Domain(_))
        ));
        assert_eq!(
            CountSample::from_weighted([(4, 0)]),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn range_counts() {
        let s = CountSample::from_values([1, 1, 2, 4, 10]).unwrap();
        assert_eq!(s.count_at_least(2), 3);
        assert_eq!(s.count_at_least(11), 0);
        assert_eq!(s.count_in(2, Some(4)), 2);
        assert_eq!(s.count_in(5, None), 1);
        assert_eq!(s.count_in(3, Some(3)), 0);
    }
}
