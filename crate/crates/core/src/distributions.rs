//! Probability functions of the gamma-mixed geometric family.
//!
//! A single component with scale `b` and shape `v` is the discrete Lomax law
//!
//! ```text
//! P(K >= k) = (b / (b + k - 1))^v                     k = 1, 2, ...
//! P(K  = k) = (b / (b + k - 1))^v - (b / (b + k))^v
//! ```
//!
//! which is what a geometric count with rate `λ` becomes once `λ` is drawn
//! from a gamma density with shape `v` and rate `b`. A [`MixtureModel`] is a
//! weighted sum of such components.
//!
//! The PMF is never evaluated as the difference of the two powers above: for
//! `k >> b` they agree to most of their digits. Instead each component uses
//! `ccdf(k) * -expm1(-v * ln1p(1 / (k - 1 + b)))`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

pub const SCALE_MIN: f64 = 1e-6;
pub const SCALE_MAX: f64 = 1e9;
pub const SHAPE_MIN: f64 = 1e-6;
pub const SHAPE_MAX: f64 = 1e3;
/// Allowed deviation of the component weights from a unit sum.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// One weighted discrete Lomax component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComponent")]
pub struct LomaxComponent {
    weight: f64,
    scale: f64,
    shape: f64,
}

#[derive(Deserialize)]
struct RawComponent {
    weight: f64,
    scale: f64,
    shape: f64,
}

impl TryFrom<RawComponent> for LomaxComponent {
    type Error = Error;

    fn try_from(raw: RawComponent) -> Result<Self> {
        LomaxComponent::new(raw.weight, raw.scale, raw.shape)
    }
}

impl LomaxComponent {
    pub fn new(weight: f64, scale: f64, shape: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(alloc::format!(
                "weight {weight} outside [0, 1]"
            )));
        }
        check_scale(scale)?;
        check_shape(shape)?;
        Ok(Self {
            weight,
            scale,
            shape,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Mean of the gamma-distributed hidden rate, `v / b`.
    pub fn mean_rate(&self) -> f64 {
        self.shape / self.scale
    }

    pub fn mixing(&self) -> GammaMixing {
        GammaMixing {
            shape: self.shape,
            rate: self.scale,
        }
    }

    /// Unweighted `P(K >= k)` of this component.
    pub fn ccdf(&self, k: u64) -> Result<f64> {
        check_support(k)?;
        Ok(self.ccdf_unchecked(k))
    }

    /// Unweighted `P(K = k)` of this component.
    pub fn pmf(&self, k: u64) -> Result<f64> {
        check_support(k)?;
        Ok(self.pmf_unchecked(k))
    }

    pub fn log_pmf(&self, k: u64) -> Result<f64> {
        check_support(k)?;
        Ok(self.log_pmf_unchecked(k))
    }

    #[inline]
    pub(crate) fn log_ccdf_unchecked(&self, k: u64) -> f64 {
        if k == 1 {
            return 0.0;
        }
        -self.shape * math::ln_1p((k - 1) as f64 / self.scale)
    }

    #[inline]
    pub(crate) fn ccdf_unchecked(&self, k: u64) -> f64 {
        if k == 1 {
            return 1.0;
        }
        math::exp(self.log_ccdf_unchecked(k))
    }

    /// `P(K = k | K >= k)`, the one-step hazard.
    #[inline]
    fn hazard(&self, k: u64) -> f64 {
        -math::exp_m1(-self.shape * math::ln_1p(1.0 / ((k - 1) as f64 + self.scale)))
    }

    #[inline]
    pub(crate) fn pmf_unchecked(&self, k: u64) -> f64 {
        self.ccdf_unchecked(k) * self.hazard(k)
    }

    #[inline]
    pub(crate) fn log_pmf_unchecked(&self, k: u64) -> f64 {
        self.log_ccdf_unchecked(k) + math::ln(self.hazard(k))
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| self.mean_rate().total_cmp(&other.mean_rate()))
            .then_with(|| self.scale.total_cmp(&other.scale))
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if !(SCALE_MIN..=SCALE_MAX).contains(&scale) {
        return Err(Error::InvalidParameter(alloc::format!(
            "scale {scale} outside [{SCALE_MIN}, {SCALE_MAX}]"
        )));
    }
    Ok(())
}

fn check_shape(shape: f64) -> Result<()> {
    if !(SHAPE_MIN..=SHAPE_MAX).contains(&shape) {
        return Err(Error::InvalidParameter(alloc::format!(
            "shape {shape} outside [{SHAPE_MIN}, {SHAPE_MAX}]"
        )));
    }
    Ok(())
}

#[inline]
fn check_support(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::Domain("support starts at k = 1"))
    } else {
        Ok(())
    }
}

/// Finite mixture of discrete Lomax components.
///
/// Components are kept in canonical order: descending weight, ties broken by
/// ascending mean rate `v / b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture")]
pub struct MixtureModel {
    components: Vec<LomaxComponent>,
}

#[derive(Deserialize)]
struct RawMixture {
    components: Vec<LomaxComponent>,
}

impl TryFrom<RawMixture> for MixtureModel {
    type Error = Error;

    fn try_from(raw: RawMixture) -> Result<Self> {
        MixtureModel::new(raw.components)
    }
}

impl MixtureModel {
    /// Builds a model whose weights already sum to one.
    pub fn new(mut components: Vec<LomaxComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter(
                "a mixture needs at least one component".into(),
            ));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(alloc::format!(
                "component weights sum to {total}, expected 1"
            )));
        }
        components.sort_by(LomaxComponent::canonical_cmp);
        Ok(Self { components })
    }

    /// Builds a model after dividing every weight by the total weight.
    pub fn normalized(components: Vec<LomaxComponent>) -> Result<Self> {
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidParameter(
                "component weights must have a positive sum".into(),
            ));
        }
        let components = components
            .into_iter()
            .map(|c| LomaxComponent::new(c.weight / total, c.scale, c.shape))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn single(scale: f64, shape: f64) -> Result<Self> {
        Self::new(alloc::vec![LomaxComponent::new(1.0, scale, shape)?])
    }

    pub fn components(&self) -> &[LomaxComponent] {
        &self.components
    }

    /// Number of components `M`.
    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// Number of free parameters, `3M - 1`.
    pub fn n_params(&self) -> usize {
        3 * self.components.len() - 1
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        check_support(k)?;
        Ok(self.pmf_unchecked(k))
    }

    /// `P(K >= k)`; exactly 1 at `k = 1`.
    pub fn ccdf(&self, k: u64) -> Result<f64> {
        check_support(k)?;
        Ok(self.ccdf_unchecked(k))
    }

    pub fn log_pmf(&self, k: u64) -> Result<f64> {
        check_support(k)?;
        Ok(self.log_pmf_unchecked(k))
    }

    #[inline]
    pub(crate) fn pmf_unchecked(&self, k: u64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.pmf_unchecked(k))
            .sum()
    }

    #[inline]
    pub(crate) fn ccdf_unchecked(&self, k: u64) -> f64 {
        if k == 1 {
            return 1.0;
        }
        self.components
            .iter()
            .map(|c| c.weight * c.ccdf_unchecked(k))
            .sum()
    }

    #[inline]
    pub(crate) fn log_pmf_unchecked(&self, k: u64) -> f64 {
        let p = self.pmf_unchecked(k);
        if p >= f64::MIN_POSITIVE {
            return math::ln(p);
        }
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| math::ln(c.weight) + c.log_pmf_unchecked(k))
            .fold(f64::NEG_INFINITY, math::log_add_exp)
    }
}

/// Maximum-entropy geometric law of a single state's representation count,
/// `P(s) = (e^λ - 1) e^{-sλ}` for `s = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricState {
    rate: f64,
}

impl GeometricState {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Domain("geometric rate must be finite and > 0"));
        }
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn pmf(&self, s: u64) -> Result<f64> {
        check_support(s)?;
        // (e^λ - 1) e^{-sλ} rewritten as (1 - e^{-λ}) e^{-(s-1)λ}
        Ok(-math::exp_m1(-self.rate) * math::exp(-((s - 1) as f64) * self.rate))
    }

    /// `e^λ / (e^λ - 1)`.
    pub fn mean(&self) -> f64 {
        1.0 / -math::exp_m1(-self.rate)
    }
}

/// Gamma density of the hidden rate, shape `v` and rate `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaMixing {
    pub shape: f64,
    pub rate: f64,
}

impl GammaMixing {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
            return Err(Error::Domain("gamma shape and rate must be finite and > 0"));
        }
        Ok(Self { shape, rate })
    }

    pub fn pdf(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain("gamma density needs lambda >= 0"));
        }
        if lambda == 0.0 {
            return Ok(match self.shape.partial_cmp(&1.0) {
                Some(Ordering::Less) => f64::INFINITY,
                Some(Ordering::Equal) => self.rate,
                _ => 0.0,
            });
        }
        let log_pdf = self.shape * math::ln(self.rate) + (self.shape - 1.0) * math::ln(lambda)
            - self.rate * lambda
            - math::log_gamma(self.shape)?;
        Ok(math::exp(log_pdf))
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }
}

/// Continuous Lomax density `v b^v (k + b)^{-v-1}` on `k >= 0`.
pub fn continuous_lomax_pdf(scale: f64, shape: f64, k: f64) -> Result<f64> {
    check_positive(scale, shape)?;
    if !(k >= 0.0) {
        return Err(Error::Domain("continuous Lomax density needs k >= 0"));
    }
    let denom = k + scale;
    Ok(shape * math::exp(shape * math::ln(scale / denom)) / denom)
}

/// Lognormal-shaped approximation of the tail for a large auxiliary `m`.
///
/// Evaluated as `v b^v k^{-v-1} exp(-v ln(k)^2 / (2m))`, which is the same
/// expression after expanding the square; the `e^{vm/2}` factors cancel
/// analytically instead of overflowing.
pub fn lognormal_asymptote(scale: f64, shape: f64, m: f64, k: f64) -> Result<f64> {
    check_positive(scale, shape)?;
    if !(m > 0.0) {
        return Err(Error::Domain("lognormal asymptote needs m > 0"));
    }
    if !(k > 0.0) {
        return Err(Error::Domain("lognormal asymptote needs k > 0"));
    }
    let ln_k = math::ln(k);
    let log_density = math::ln(shape) + shape * math::ln(scale)
        - (shape + 1.0) * ln_k
        - shape * ln_k * ln_k / (2.0 * m);
    Ok(math::exp(log_density))
}

fn check_positive(scale: f64, shape: f64) -> Result<()> {
    if !(scale > 0.0 && shape > 0.0) || !scale.is_finite() || !shape.is_finite() {
        return Err(Error::Domain("scale and shape must be finite and > 0"));
    }
    Ok(())
}

/// Rank/size relation of `l` units whose sizes follow the continuous Lomax
/// density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankModel {
    shape: f64,
    scale: f64,
    population: u64,
}

impl RankModel {
    pub fn new(shape: f64, scale: f64, population: u64) -> Result<Self> {
        check_positive(scale, shape)?;
        if population == 0 {
            return Err(Error::Domain("rank model needs at least one unit"));
        }
        Ok(Self {
            shape,
            scale,
            population,
        })
    }

    pub fn from_component(component: &LomaxComponent, population: u64) -> Result<Self> {
        Self::new(component.shape, component.scale, population)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    /// Expected rank of a unit of size `x`: `l b^v (b + x)^{-v}`.
    pub fn rank_of_size(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain("size must be >= 0"));
        }
        let l = self.population as f64;
        Ok(l * math::exp(-self.shape * math::ln_1p(x / self.scale)))
    }

    /// Relative frequency of the `r`-th most popular unit,
    /// `b l^{-1+1/v} r^{-1/v} - b / l`, clamped at zero.
    pub fn rank_frequency(&self, r: u64) -> Result<f64> {
        if r == 0 || r > self.population {
            return Err(Error::Domain("rank must lie in [1, l]"));
        }
        let l = self.population as f64;
        // (b / l) * ((l / r)^{1/v} - 1); exactly zero at r = l
        let growth = math::exp_m1(math::ln(l / r as f64) / self.shape);
        Ok((self.scale / l * growth).max(0.0))
    }
}
