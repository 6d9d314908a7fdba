//! Generative samplers with known truth.
//!
//! Output is produced in shards of [`SHARD_LEN`] draws; shard `i` reads the
//! ChaCha stream `i` of the seed, so results do not depend on how shards are
//! scheduled and a longer run extends a shorter one.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::distributions::{GeometricState, MixtureModel};
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{Stream, SHARD_LEN};
use crate::sample::CountSample;

fn sharded<F>(n: usize, seed: u64, mut draw: F) -> Vec<u64>
where
    F: FnMut(&mut Stream) -> u64,
{
    let mut out = Vec::with_capacity(n);
    let mut shard = 0u64;
    while out.len() < n {
        let mut stream = Stream::new(seed, shard);
        let take = (n - out.len()).min(SHARD_LEN);
        out.extend((0..take).map(|_| draw(&mut stream)));
        shard += 1;
    }
    out
}

/// `1 + floor(E / λ)` for a unit exponential `E`, given `ln λ`.
/// Saturates at `u64::MAX` when the rate is too small to represent the count.
#[inline]
fn geometric_from_log_rate(stream: &mut Stream, log_rate: f64) -> u64 {
    let wait = stream.exponential() * math::exp(-log_rate);
    let k = 1.0 + math::floor(wait);
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k as u64
    }
}

/// Draws from the mixture in draw order: component by weight, hidden rate
/// `λ ~ Gamma(v, rate b)`, then `K = 1 + floor(-ln(U) / λ)`.
pub fn draw_mixture(model: &MixtureModel, n: usize, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be >= 1"));
    }
    let components = model.components();
    let mut cumulative = Vec::with_capacity(components.len());
    let mut acc = 0.0;
    for c in components {
        acc += c.weight();
        cumulative.push(acc);
    }
    let last_live = components
        .iter()
        .rposition(|c| c.weight() > 0.0)
        .unwrap_or(components.len() - 1);
    Ok(sharded(n, seed, |stream| {
        let u = stream.uniform();
        let idx = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last_live)
            .min(last_live);
        let c = &components[idx];
        let log_rate = stream.log_gamma_variate(c.shape()) - math::ln(c.scale());
        geometric_from_log_rate(stream, log_rate)
    }))
}

pub fn sample_mixture(model: &MixtureModel, n: usize, seed: u64) -> Result<CountSample> {
    CountSample::from_values(draw_mixture(model, n, seed)?)
}

/// Inverse-transform draws of the geometric representation count.
pub fn draw_geometric(state: &GeometricState, n: usize, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be >= 1"));
    }
    let log_rate = math::ln(state.rate());
    Ok(sharded(n, seed, |stream| {
        geometric_from_log_rate(stream, log_rate)
    }))
}

pub fn sample_geometric_state(state: &GeometricState, n: usize, seed: u64) -> Result<CountSample> {
    CountSample::from_values(draw_geometric(state, n, seed)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompetingObservablesConfig {
    /// Number of competing observables `N`.
    pub observables: u32,
    /// Observation period.
    pub theta: f64,
    /// Representation efficiency in `(0, 1]`.
    pub rho: f64,
    /// State rate.
    pub mu: f64,
    pub draws: usize,
    pub seed: u64,
}

impl CompetingObservablesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.observables == 0 {
            return Err(Error::InvalidParameter(
                "need at least one competing observable".into(),
            ));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidParameter(
                "theta must be finite and > 0".into(),
            ));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidParameter("rho must lie in (0, 1]".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be finite and > 0".into()));
        }
        if self.draws == 0 {
            return Err(Error::InvalidParameter("draws must be >= 1".into()));
        }
        Ok(())
    }

    /// Total count budget `θ ρ μ`.
    pub fn budget(&self) -> f64 {
        self.theta * self.rho * self.mu
    }
}

/// Draws of `k0` together with the exact and limiting reference laws.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetingObservables {
    config: CompetingObservablesConfig,
    sorted: Vec<f64>,
}

/// Rates of `N + 1` observables are uniform on the hyperplane
/// `Σ w = ρ μ`; the observed count is `k0 = θ w0`.
pub fn simulate_competing_observables(
    config: &CompetingObservablesConfig,
) -> Result<CompetingObservables> {
    config.validate()?;
    let budget = config.budget();
    let coords = config.observables as usize + 1;
    let mut sorted = Vec::with_capacity(config.draws);
    let mut shard = 0u64;
    while sorted.len() < config.draws {
        let mut stream = Stream::new(config.seed, shard);
        let take = (config.draws - sorted.len()).min(SHARD_LEN);
        for _ in 0..take {
            // normalized exponentials are uniform on the simplex
            let first = stream.exponential();
            let mut total = first;
            for _ in 1..coords {
                total += stream.exponential();
            }
            sorted.push(budget * first / total);
        }
        shard += 1;
    }
    sorted.sort_by(f64::total_cmp);
    Ok(CompetingObservables {
        config: *config,
        sorted,
    })
}

impl CompetingObservables {
    pub fn config(&self) -> &CompetingObservablesConfig {
        &self.config
    }

    /// Draws of `k0` in ascending order.
    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Rate of the exponential limit, `N / (θ ρ μ)`.
    pub fn limit_rate(&self) -> f64 {
        self.config.observables as f64 / self.config.budget()
    }

    /// Fraction of draws `>= x`.
    pub fn empirical_ccdf(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&s| s < x);
        (self.sorted.len() - below) as f64 / self.sorted.len() as f64
    }

    /// `(1 - x / θρμ)^N` on `[0, θρμ]`.
    pub fn exact_ccdf(&self, x: f64) -> f64 {
        let frac = (x / self.config.budget()).clamp(0.0, 1.0);
        math::exp(self.config.observables as f64 * math::ln_1p(-frac))
    }

    pub fn exponential_ccdf(&self, x: f64) -> f64 {
        math::exp(-x.max(0.0) * self.limit_rate())
    }

    /// Supremum distance between the empirical and the exact CCDF.
    pub fn sup_distance_to_exact(&self) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let exact = self.exact_ccdf(x);
                let at = (n - i as f64) / n;
                let after = (n - i as f64 - 1.0) / n;
                (at - exact).abs().max((after - exact).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Supremum distance between the exact law and its exponential limit,
    /// scanned on `points` evenly spaced values of `[0, upper]`.
    pub fn exact_vs_limit_distance(&self, upper: f64, points: usize) -> f64 {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let x = upper * i as f64 / (points - 1) as f64;
                (self.exact_ccdf(x) - self.exponential_ccdf(x)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Rows `(x, empirical, exact, exponential limit)` on an even grid of
    /// `[0, upper]`.
    pub fn reference_curve(&self, upper: f64, points: usize) -> Vec<[f64; 4]> {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let x = upper * i as f64 / (points - 1) as f64;
                [
                    x,
                    self.empirical_ccdf(x),
                    self.exact_ccdf(x),
                    self.exponential_ccdf(x),
                ]
            })
            .collect()
    }
}
