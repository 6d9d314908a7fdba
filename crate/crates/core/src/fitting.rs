//! Maximum-likelihood fitting of discrete Lomax mixtures, model-order
//! selection by AIC, and the power-law and lognormal baselines.
//!
//! The mixture likelihood is maximized with the simplex method over an
//! unconstrained parameter vector
//!
//! ```text
//! [ln b_1, ln v_1, ..., ln b_M, ln v_M, z_1, ..., z_{M-1}]
//! ```
//!
//! where the weights come from stick breaking on the logits `z`:
//! `c_1 = s_1`, `c_j = s_j Π_{i<j} (1 - s_i)`, `c_M = Π (1 - s_i)`,
//! `s = 1 / (1 + e^{-z})`. Points whose scale or shape leave the allowed box
//! are rejected by the objective.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    LomaxComponent, MixtureModel, SCALE_MAX, SCALE_MIN, SHAPE_MAX, SHAPE_MIN,
};
use crate::error::{Error, Result};
use crate::math;
use crate::optim::{self, SimplexOptions};
use crate::rng::Stream;
use crate::sample::CountSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Number of multi-starts; the first is the moment seed.
    pub starts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per start.
    pub max_evals: u64,
    /// Relative spread of the simplex log-likelihoods that counts as converged.
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            starts: 20,
            seed: 0,
            max_evals: 50_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: MixtureModel,
    pub log_likelihood: f64,
    pub n_params: usize,
    pub aic: f64,
    pub sample_size: u64,
    /// Whether the selected start met the tolerance before the evaluation cap.
    pub converged: bool,
    pub starts_used: usize,
    pub seed: u64,
    /// Objective evaluations summed over all starts.
    pub evaluations: u64,
}

impl FitResult {
    pub fn order(&self) -> usize {
        self.model.order()
    }
}

/// `Σ multiplicity · ln P(k)` over the distinct values of `data`.
pub fn log_likelihood(model: &MixtureModel, data: &CountSample) -> f64 {
    data.distinct()
        .iter()
        .map(|&(k, n)| n as f64 * model.log_pmf_unchecked(k))
        .sum()
}

/// Akaike information criterion, `-2 ln L + 2n`.
pub fn aic(log_likelihood: f64, n_params: usize) -> f64 {
    -2.0 * log_likelihood + 2.0 * n_params as f64
}

/// Free parameters of an `M`-component mixture: `3M - 1`.
pub fn mixture_n_params(order: usize) -> usize {
    3 * order - 1
}

struct Objective {
    km1: Vec<f64>,
    counts: Vec<f64>,
    order: usize,
    scratch: Vec<f64>,
    weights: Vec<f64>,
}

const LN_SCALE_MIN: f64 = -13.815_510_557_964_274; // ln 1e-6
const LN_SCALE_MAX: f64 = 20.723_265_836_946_41; // ln 1e9
const LN_SHAPE_MIN: f64 = -13.815_510_557_964_274; // ln 1e-6
const LN_SHAPE_MAX: f64 = 6.907_755_278_982_137; // ln 1e3

impl Objective {
    fn new(data: &CountSample, order: usize) -> Self {
        let (km1, counts): (Vec<f64>, Vec<f64>) = data
            .distinct()
            .iter()
            .map(|&(k, n)| ((k - 1) as f64, n as f64))
            .unzip();
        let len = km1.len();
        Self {
            km1,
            counts,
            order,
            scratch: vec![0.0; len],
            weights: vec![0.0; order],
        }
    }

    fn in_box(x: &[f64], order: usize) -> bool {
        (0..order).all(|i| {
            let (ln_b, ln_v) = (x[2 * i], x[2 * i + 1]);
            (LN_SCALE_MIN..=LN_SCALE_MAX).contains(&ln_b)
                && (LN_SHAPE_MIN..=LN_SHAPE_MAX).contains(&ln_v)
        })
    }

    /// Negative log-likelihood at the unconstrained point `x`.
    fn value(&mut self, x: &[f64]) -> f64 {
        if !Self::in_box(x, self.order) {
            return f64::INFINITY;
        }
        stick_breaking(&x[2 * self.order..], &mut self.weights);
        self.scratch.iter_mut().for_each(|p| *p = 0.0);
        for i in 0..self.order {
            let c = self.weights[i];
            if c <= 0.0 {
                continue;
            }
            let b = math::exp(x[2 * i]);
            let v = math::exp(x[2 * i + 1]);
            let inv_b = 1.0 / b;
            for (p, &km1) in self.scratch.iter_mut().zip(&self.km1) {
                let ccdf = math::exp(-v * math::ln_1p(km1 * inv_b));
                let hazard = -math::exp_m1(-v * math::ln_1p(1.0 / (km1 + b)));
                *p += c * ccdf * hazard;
            }
        }
        let mut ll = 0.0;
        for (j, (&p, &n)) in self.scratch.iter().zip(&self.counts).enumerate() {
            let log_p = if p >= f64::MIN_POSITIVE {
                math::ln(p)
            } else {
                self.log_pmf_slow(x, self.km1[j])
            };
            ll += n * log_p;
        }
        -ll
    }

    fn log_pmf_slow(&self, x: &[f64], km1: f64) -> f64 {
        let mut acc = f64::NEG_INFINITY;
        for i in 0..self.order {
            let c = self.weights[i];
            if c <= 0.0 {
                continue;
            }
            let b = math::exp(x[2 * i]);
            let v = math::exp(x[2 * i + 1]);
            let log_ccdf = -v * math::ln_1p(km1 / b);
            let hazard = -math::exp_m1(-v * math::ln_1p(1.0 / (km1 + b)));
            acc = math::log_add_exp(acc, math::ln(c) + log_ccdf + math::ln(hazard));
        }
        acc
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + math::exp(-z))
    } else {
        let e = math::exp(z);
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    math::ln(p / (1.0 - p))
}

fn stick_breaking(logits: &[f64], weights: &mut [f64]) {
    let mut remaining = 1.0;
    for (w, &z) in weights.iter_mut().zip(logits) {
        let s = sigmoid(z);
        *w = remaining * s;
        remaining *= 1.0 - s;
    }
    if let Some(last) = weights.last_mut() {
        *last = remaining;
    }
}

fn encode(components: &[(f64, f64, f64)]) -> Vec<f64> {
    let order = components.len();
    let mut x = Vec::with_capacity(3 * order - 1);
    for &(_, b, v) in components {
        x.push(math::ln(b.clamp(SCALE_MIN, SCALE_MAX)));
        x.push(math::ln(v.clamp(SHAPE_MIN, SHAPE_MAX)));
    }
    let mut remaining = 1.0;
    for &(c, _, _) in &components[..order - 1] {
        let s = if remaining > 0.0 { c / remaining } else { 0.5 };
        x.push(logit(s));
        remaining -= c;
    }
    x
}

fn decode(x: &[f64], order: usize) -> Result<MixtureModel> {
    let mut weights = vec![0.0; order];
    stick_breaking(&x[2 * order..], &mut weights);
    let components = (0..order)
        .map(|i| {
            let b = math::exp(x[2 * i]).clamp(SCALE_MIN, SCALE_MAX);
            let v = math::exp(x[2 * i + 1]).clamp(SHAPE_MIN, SHAPE_MAX);
            LomaxComponent::new(weights[i].clamp(0.0, 1.0), b, v)
        })
        .collect::<Result<Vec<_>>>()?;
    MixtureModel::normalized(components)
}

/// Moment seed: the sorted observations are split into `order` equal-count
/// groups; each group gives a component with `v = 1`, `b` = group mean and
/// weight = group mass.
fn moment_seed(data: &CountSample, order: usize) -> Vec<(f64, f64, f64)> {
    let total = data.total();
    let mut groups = vec![(0u64, 0.0f64); order];
    let mut seen = 0u64;
    for &(k, n) in data.distinct() {
        let mut left = n;
        while left > 0 {
            let g = ((seen as u128 * order as u128) / total as u128) as usize;
            let group_end = ((g as u128 + 1) * total as u128).div_ceil(order as u128) as u64;
            let take = left.min(group_end - seen);
            groups[g].0 += take;
            groups[g].1 += take as f64 * k as f64;
            seen += take;
            left -= take;
        }
    }
    groups
        .into_iter()
        .map(|(n, sum)| {
            let mass = n as f64 / total as f64;
            let mean = if n > 0 { sum / n as f64 } else { 1.0 };
            (mass, mean, 1.0)
        })
        .collect()
}

fn jittered(seed: &[(f64, f64, f64)], stream: &mut Stream) -> Vec<(f64, f64, f64)> {
    let spread = core::f64::consts::LN_2;
    let mut out: Vec<(f64, f64, f64)> = seed
        .iter()
        .map(|&(c, b, v)| {
            let c = c * math::exp(spread * stream.normal());
            let b = b * math::exp(spread * stream.normal());
            let v = v * math::exp(spread * stream.normal());
            (c, b, v)
        })
        .collect();
    let total: f64 = out.iter().map(|t| t.0).sum();
    out.iter_mut().for_each(|t| t.0 /= total);
    out
}

struct StartOutcome {
    model: MixtureModel,
    log_likelihood: f64,
    converged: bool,
    evaluations: u64,
}

/// Compares candidate fits: higher likelihood first, then canonical
/// parameter order, then start index.
fn better(a: &StartOutcome, b: &StartOutcome) -> bool {
    match a.log_likelihood.total_cmp(&b.log_likelihood) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let key = |m: &MixtureModel| {
                m.components()
                    .iter()
                    .flat_map(|c| [c.weight(), c.scale(), c.shape()])
                    .collect::<Vec<_>>()
            };
            let (ka, kb) = (key(&a.model), key(&b.model));
            ka.iter()
                .zip(&kb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
                == Ordering::Less
        }
    }
}

/// Simplex passes per start; later passes restart from the previous optimum
/// to guard against a collapsed simplex.
const MAX_PASSES: usize = 3;

fn run_start(
    data: &CountSample,
    order: usize,
    init: &[(f64, f64, f64)],
    config: &FitConfig,
) -> Result<StartOutcome> {
    let mut objective = Objective::new(data, order);
    let mut x = encode(init);
    let mut evaluations = 0u64;
    let mut converged = false;
    let mut value = objective.value(&x);
    evaluations += 1;
    for pass in 0..MAX_PASSES {
        let budget = config.max_evals.saturating_sub(evaluations);
        if budget == 0 {
            converged = false;
            break;
        }
        let options = SimplexOptions {
            step: if pass == 0 { 0.5 } else { 0.1 },
            tol: config.tol,
            max_evals: budget,
        };
        let m = optim::minimize(|p| objective.value(p), &x, &options);
        evaluations += m.evaluations;
        converged = m.converged;
        let improvement = value - m.value;
        if m.value <= value {
            x = m.x;
            value = m.value;
        }
        if !converged || improvement <= config.tol * value.abs().max(1.0) {
            break;
        }
    }
    let model = decode(&x, order)?;
    let log_likelihood = log_likelihood(&model, data);
    Ok(StartOutcome {
        model,
        log_likelihood,
        converged,
        evaluations,
    })
}

/// Fits an `order`-component mixture by multi-start maximum likelihood.
pub fn fit_mixture(data: &CountSample, order: usize, config: &FitConfig) -> Result<FitResult> {
    if order == 0 {
        return Err(Error::InvalidParameter("mixture order must be >= 1".into()));
    }
    if config.starts == 0 {
        return Err(Error::InvalidParameter("need at least one start".into()));
    }
    let n_params = mixture_n_params(order);
    if data.total() < n_params as u64 {
        return Err(Error::SampleTooSmall {
            got: data.total(),
            need: n_params as u64,
        });
    }
    if data.distinct().len() == 1 {
        return Err(Error::DegenerateData(
            "all observations are equal; the likelihood has no interior maximum",
        ));
    }

    let seed_point = moment_seed(data, order);
    let mut best: Option<StartOutcome> = None;
    let mut evaluations = 0u64;
    let mut any_converged = false;
    for start in 0..config.starts {
        let init = if start == 0 {
            seed_point.clone()
        } else {
            let mut stream = Stream::new(config.seed, start as u64);
            jittered(&seed_point, &mut stream)
        };
        let outcome = run_start(data, order, &init, config)?;
        evaluations += outcome.evaluations;
        any_converged |= outcome.converged;
        if !outcome.log_likelihood.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| better(&outcome, b)) {
            best = Some(outcome);
        }
    }

    match best {
        Some(b) if any_converged => Ok(FitResult {
            aic: aic(b.log_likelihood, n_params),
            model: b.model,
            log_likelihood: b.log_likelihood,
            n_params,
            sample_size: data.total(),
            converged: b.converged,
            starts_used: config.starts,
            seed: config.seed,
            evaluations,
        }),
        other => Err(Error::NotConverged {
            components: order,
            starts: config.starts,
            evaluations,
            best_log_likelihood: other.map_or(f64::NEG_INFINITY, |b| b.log_likelihood),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Successful fits in ascending order of `M`.
    pub fits: Vec<FitResult>,
    /// Orders whose fit failed, with the error message.
    pub failures: Vec<(usize, alloc::string::String)>,
    /// Index into `fits` of the minimum-AIC model.
    pub best_index: usize,
}

impl ScanResult {
    pub fn best(&self) -> &FitResult {
        &self.fits[self.best_index]
    }

    /// AIC of the runner-up minus AIC of the best fit.
    pub fn delta_aic_runner_up(&self) -> Option<f64> {
        let best = self.best().aic;
        self.fits
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.best_index)
            .map(|(_, f)| f.aic - best)
            .min_by(f64::total_cmp)
    }

    /// AIC of every fit minus the minimum.
    pub fn delta_aic(&self) -> Vec<f64> {
        let best = self.best().aic;
        self.fits.iter().map(|f| f.aic - best).collect()
    }
}

/// Fits `M = 1..=max_order` and selects the minimum AIC, preferring the
/// smaller `M` on ties.
pub fn scan_orders(data: &CountSample, max_order: usize, config: &FitConfig) -> Result<ScanResult> {
    if max_order == 0 {
        return Err(Error::InvalidParameter("maximum order must be >= 1".into()));
    }
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    let mut last_error = None;
    for order in 1..=max_order {
        match fit_mixture(data, order, config) {
            Ok(fit) => fits.push(fit),
            Err(e) => {
                failures.push((order, alloc::format!("{e}")));
                last_error = Some(e);
            }
        }
    }
    if fits.is_empty() {
        return Err(last_error.unwrap_or(Error::EmptySample));
    }
    let mut best_index = 0;
    for (i, f) in fits.iter().enumerate() {
        if f.aic < fits[best_index].aic {
            best_index = i;
        }
    }
    Ok(ScanResult {
        fits,
        failures,
        best_index,
    })
}

/// Where a one-parameter baseline estimate ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryStatus {
    Interior,
    /// The exponent pressed against 1, where the law stops being normalizable.
    AtLowerBound,
    AtUpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Exponent `β` of `P(k) = k^{-β} / ζ(β)`.
    pub exponent: f64,
    pub log_likelihood: f64,
    pub n_params: usize,
    pub aic: f64,
    pub sample_size: u64,
    pub status: BoundaryStatus,
}

pub const POWER_LAW_EXPONENT_MIN: f64 = 1.0 + 1e-6;
pub const POWER_LAW_EXPONENT_MAX: f64 = 50.0;

/// Log-likelihood of the zeta law with exponent `beta`.
pub fn power_law_log_likelihood(data: &CountSample, beta: f64) -> Result<f64> {
    let sum_ln: f64 = data
        .distinct()
        .iter()
        .map(|&(k, n)| n as f64 * math::ln(k as f64))
        .sum();
    Ok(-beta * sum_ln - data.total() as f64 * math::ln(math::zeta(beta)?))
}

/// Maximum-likelihood exponent of the discrete power law on `k >= 1`.
///
/// The log-likelihood is concave in `β`, so a golden-section search over
/// `[POWER_LAW_EXPONENT_MIN, POWER_LAW_EXPONENT_MAX]` finds the maximum.
pub fn fit_power_law(data: &CountSample) -> Result<PowerLawFit> {
    let sum_ln: f64 = data
        .distinct()
        .iter()
        .map(|&(k, n)| n as f64 * math::ln(k as f64))
        .sum();
    let n = data.total() as f64;
    let objective = |beta: f64| -> f64 {
        match math::zeta(beta) {
            Ok(z) => -beta * sum_ln - n * math::ln(z),
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let inv_phi = (math::sqrt(5.0) - 1.0) / 2.0;
    let (mut lo, mut hi) = (POWER_LAW_EXPONENT_MIN, POWER_LAW_EXPONENT_MAX);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > 1e-10 * (1.0 + lo.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    let candidates = [
        (0.5 * (lo + hi), objective(0.5 * (lo + hi))),
        (POWER_LAW_EXPONENT_MIN, objective(POWER_LAW_EXPONENT_MIN)),
        (POWER_LAW_EXPONENT_MAX, objective(POWER_LAW_EXPONENT_MAX)),
    ];
    let (exponent, ll) = candidates
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or(candidates[0]);

    let edge = 1e-6;
    let status = if exponent - POWER_LAW_EXPONENT_MIN < edge {
        BoundaryStatus::AtLowerBound
    } else if POWER_LAW_EXPONENT_MAX - exponent < edge {
        BoundaryStatus::AtUpperBound
    } else {
        BoundaryStatus::Interior
    };
    Ok(PowerLawFit {
        exponent,
        log_likelihood: ll,
        n_params: 1,
        aic: aic(ll, 1),
        sample_size: data.total(),
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LognormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub log_likelihood: f64,
    pub n_params: usize,
    pub aic: f64,
    pub sample_size: u64,
}

/// Closed-form continuous lognormal MLE on the observed counts.
pub fn fit_lognormal(data: &CountSample) -> Result<LognormalFit> {
    lognormal_from_weighted(
        data.distinct().iter().map(|&(k, n)| (k as f64, n as f64)),
        data.total(),
    )
}

/// Lognormal MLE on positive real observations.
pub fn fit_lognormal_values(values: &[f64]) -> Result<LognormalFit> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if values.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain(
            "lognormal observations must be finite and > 0",
        ));
    }
    lognormal_from_weighted(values.iter().map(|&x| (x, 1.0)), values.len() as u64)
}

fn lognormal_from_weighted<I>(pairs: I, total: u64) -> Result<LognormalFit>
where
    I: Iterator<Item = (f64, f64)> + Clone,
{
    let n = total as f64;
    let sum_ln: f64 = pairs.clone().map(|(x, w)| w * math::ln(x)).sum();
    let mu = sum_ln / n;
    let var = pairs
        .map(|(x, w)| {
            let d = math::ln(x) - mu;
            w * d * d
        })
        .sum::<f64>()
        / n;
    // variance below rounding noise of mu counts as zero
    if !(var > 1e-24 * (1.0 + mu * mu)) {
        return Err(Error::ZeroLogVariance { mu });
    }
    let sigma = math::sqrt(var);
    let ln_two_pi = math::ln(2.0 * core::f64::consts::PI);
    let ll = -sum_ln - n * math::ln(sigma) - 0.5 * n * ln_two_pi - 0.5 * n;
    Ok(LognormalFit {
        mu,
        sigma,
        log_likelihood: ll,
        n_params: 2,
        aic: aic(ll, 2),
        sample_size: total,
    })
}
