use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty sample")]
    EmptySample,

    #[error("sample too small: {got} observations, need at least {need}")]
    SampleTooSmall { got: u64, need: u64 },

    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),

    #[error("log-variance is zero (mu = {mu}); lognormal fit is degenerate")]
    ZeroLogVariance { mu: f64 },

    #[error(
        "no start converged for M = {components}: best log-likelihood {best_log_likelihood}, \
         {evaluations} evaluations over {starts} starts"
    )]
    NotConverged {
        components: usize,
        starts: usize,
        evaluations: u64,
        best_log_likelihood: f64,
    },

    #[error("only {bins} bins with expected count >= 5; need at least 3")]
    InsufficientBins { bins: usize },

    #[error("non-positive degrees of freedom: {bins} bins, {n_params} fitted parameters")]
    NonPositiveDof { bins: usize, n_params: usize },

    #[error("no message pairs produced a reply delay")]
    NoReplies,
}

pub type Result<T> = core::result::Result<T, Error>;
