//! Pearson χ² goodness of fit and empirical survival curves.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::distributions::MixtureModel;
use crate::error::{Error, Result};
use crate::math;
use crate::sample::CountSample;

/// Smallest expected count a bin may carry.
pub const MIN_EXPECTED: f64 = 5.0;
pub const MIN_BINS: usize = 3;
/// Smallest sample for which the binned test is attempted.
pub const MIN_SAMPLE: u64 = 25;

/// Contiguous range of counts `[lo, hi]`; `hi = None` is the open tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofBin {
    pub lo: u64,
    pub hi: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub rejected: bool,
    pub n_params: usize,
    pub bins: Vec<GofBin>,
}

/// Partitions `k >= 1` into contiguous bins, each holding at least
/// [`MIN_EXPECTED`] expected observations under `model`. The last bin is open
/// and absorbs the model's remaining tail mass.
pub fn expected_bins(model: &MixtureModel, total: u64) -> Vec<(u64, Option<u64>, f64)> {
    let n = total as f64;
    let mut bins: Vec<(u64, Option<u64>, f64)> = Vec::new();
    let mut start = 1u64;
    loop {
        let ccdf_start = model.ccdf_unchecked(start);
        let tail = n * ccdf_start;
        if tail < MIN_EXPECTED {
            match bins.last_mut() {
                Some(last) => {
                    last.1 = None;
                    last.2 += tail;
                }
                None => bins.push((start, None, tail)),
            }
            break;
        }
        // smallest end with N (ccdf(start) - ccdf(end + 1)) >= MIN_EXPECTED
        let target = ccdf_start - MIN_EXPECTED / n;
        let reaches = |end: u64| model.ccdf_unchecked(end + 1) <= target;
        let cap = u64::MAX / 4;
        let mut width = 1u64;
        while !reaches(start + width - 1) && width < cap {
            width = width.saturating_mul(2);
        }
        if width >= cap && !reaches(start + width - 1) {
            bins.push((start, None, tail));
            break;
        }
        let (mut lo, mut hi) = (start + width / 2, start + width - 1);
        if width == 1 {
            lo = start;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if reaches(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let end = lo;
        let rest = n * model.ccdf_unchecked(end + 1);
        if rest < MIN_EXPECTED {
            bins.push((start, None, tail));
            break;
        }
        bins.push((start, Some(end), tail - rest));
        start = end + 1;
    }
    bins
}

/// Pearson test of `data` against `model`, binned by [`expected_bins`].
///
/// `n_params` is the number of parameters estimated from `data`; pass 0 when
/// the model was fixed in advance.
pub fn chi_square_test(
    model: &MixtureModel,
    data: &CountSample,
    n_params: usize,
    alpha: f64,
) -> Result<GofReport> {
    if data.total() < MIN_SAMPLE {
        return Err(Error::SampleTooSmall {
            got: data.total(),
            need: MIN_SAMPLE,
        });
    }
    let bins = expected_bins(model, data.total())
        .into_iter()
        .map(|(lo, hi, expected)| GofBin {
            lo,
            hi,
            observed: data.count_in(lo, hi),
            expected,
        })
        .collect();
    chi_square_from_bins(bins, n_params, alpha)
}

/// Pearson statistic and p-value for already-binned counts.
pub fn chi_square_from_bins(bins: Vec<GofBin>, n_params: usize, alpha: f64) -> Result<GofReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "significance level {alpha} outside (0, 1)"
        )));
    }
    if bins.len() < MIN_BINS {
        return Err(Error::InsufficientBins { bins: bins.len() });
    }
    if bins.len() <= 1 + n_params {
        return Err(Error::NonPositiveDof {
            bins: bins.len(),
            n_params,
        });
    }
    let dof = bins.len() - 1 - n_params;
    let chi2: f64 = bins
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    let p_value = math::chi_square_sf(chi2, dof as f64)?;
    Ok(GofReport {
        chi2,
        dof,
        p_value,
        alpha,
        rejected: p_value < alpha,
        n_params,
        bins,
    })
}

/// Fraction of the sample at or above each distinct observed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCcdf {
    pub points: Vec<(u64, f64)>,
}

pub fn empirical_ccdf(data: &CountSample) -> EmpiricalCcdf {
    let total = data.total() as f64;
    let mut at_least = data.total();
    let points = data
        .distinct()
        .iter()
        .map(|&(k, n)| {
            let point = (k, at_least as f64 / total);
            at_least -= n;
            point
        })
        .collect();
    EmpiricalCcdf { points }
}

impl EmpiricalCcdf {
    /// Largest absolute gap to `model`'s CCDF over the observed values.
    pub fn sup_distance(&self, model: &MixtureModel) -> f64 {
        self.points
            .iter()
            .map(|&(k, frac)| (frac - model.ccdf_unchecked(k)).abs())
            .fold(0.0, f64::max)
    }
}
