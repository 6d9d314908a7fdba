//! Finite mixtures of discrete Lomax distributions for heavy-tailed count
//! data.
//!
//! A count `K >= 1` is modeled as geometric with a hidden rate `λ` that is
//! itself gamma distributed; mixing gives the discrete Lomax law, and a
//! weighted sum of `M` such laws captures data produced by several
//! independent subsystems. The crate provides:
//!
//! - [`distributions`]: numerically stable PMF/CCDF evaluation plus the
//!   continuous, rank-frequency and lognormal-asymptote companions,
//! - [`fitting`]: multi-start maximum likelihood, AIC order selection, and
//!   power-law / lognormal baselines,
//! - [`gof`]: Pearson χ² tests and empirical CCDFs,
//! - [`ingest`]: reply-delay extraction from message events,
//! - [`simulate`]: samplers from the generating mechanism.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod distributions;
pub mod error;
pub mod fitting;
pub mod gof;
pub mod ingest;
pub mod math;
pub mod optim;
pub mod rng;
pub mod sample;
pub mod simulate;

pub use distributions::{
    continuous_lomax_pdf, lognormal_asymptote, GammaMixing, GeometricState, LomaxComponent,
    MixtureModel, RankModel,
};
pub use error::{Error, Result};
pub use fitting::{
    aic, fit_lognormal, fit_mixture, fit_power_law, log_likelihood, scan_orders, FitConfig,
    FitResult, LognormalFit, PowerLawFit, ScanResult,
};
pub use gof::{chi_square_test, empirical_ccdf, EmpiricalCcdf, GofBin, GofReport};
pub use ingest::{discretize, extract_reply_delays, MessageEvent, ReplyDelaySample, ReplyRule};
pub use sample::CountSample;
pub use simulate::{
    sample_geometric_state, sample_mixture, simulate_competing_observables,
    CompetingObservablesConfig,
};
