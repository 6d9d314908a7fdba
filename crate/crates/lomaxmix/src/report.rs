//! The versioned JSON fit report.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use lomaxmix_core::fitting::{LognormalFit, PowerLawFit};
use lomaxmix_core::{
    CountSample, FitResult, GofReport, LomaxComponent, MixtureModel, ReplyRule, Result, ScanResult,
};

pub const SCHEMA_VERSION: &str = "lomaxmix/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub c: f64,
    pub b: f64,
    pub v: f64,
    /// Mean hidden rate `v / b`.
    pub mean_lambda: f64,
}

impl From<&LomaxComponent> for ComponentSummary {
    fn from(c: &LomaxComponent) -> Self {
        Self {
            c: c.weight(),
            b: c.scale(),
            v: c.shape(),
            mean_lambda: c.mean_rate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: usize,
    pub log_likelihood: f64,
    pub aic: f64,
    pub delta_aic: f64,
    pub n_params: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFailure {
    pub m: usize,
    pub error: String,
}

/// A step that may fail without invalidating the rest of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Failed { error: String },
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Failed {
                error: e.to_string(),
            },
        }
    }
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub power_law: Outcome<PowerLawFit>,
    pub lognormal: Outcome<LognormalFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub starts: usize,
    pub max_order: usize,
    pub dt: f64,
    pub reply_rule: ReplyRule,
    pub alpha: f64,
    pub max_evals: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: String,
    /// SHA-256 of the canonical `k:n` listing of the input counts.
    pub input_digest: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub components: Vec<ComponentSummary>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub n_params: usize,
    pub sample_size: u64,
    pub converged: bool,
    pub scan: Vec<ScanRow>,
    pub scan_failures: Vec<ScanFailure>,
    pub gof: Outcome<GofReport>,
    pub baselines: Baselines,
    pub config: ConfigEcho,
    /// Wall-clock creation time; excluded from `report_digest`.
    pub generated_at: String,
    /// SHA-256 of the report serialized with empty `generated_at` and
    /// `report_digest`.
    pub report_digest: String,
}

/// Digest of the sample's distinct values and multiplicities, independent
/// of the order the values were read in.
pub fn sample_digest(data: &CountSample) -> String {
    let mut hasher = Sha256::new();
    for (k, n) in data.distinct() {
        hasher.update(format!("{k}:{n}\n"));
    }
    format!("{:x}", hasher.finalize())
}

impl FitReport {
    /// Assembles a report around `scan`'s best fit.
    pub fn from_scan(
        data: &CountSample,
        scan: &ScanResult,
        gof: Outcome<GofReport>,
        baselines: Baselines,
        config: ConfigEcho,
        generated_at: String,
    ) -> Self {
        let best: &FitResult = scan.best();
        let rows = scan
            .fits
            .iter()
            .zip(scan.delta_aic())
            .map(|(f, delta_aic)| ScanRow {
                m: f.order(),
                log_likelihood: f.log_likelihood,
                aic: f.aic,
                delta_aic,
                n_params: f.n_params,
                converged: f.converged,
            })
            .collect();
        let failures = scan
            .failures
            .iter()
            .map(|(m, error)| ScanFailure {
                m: *m,
                error: error.clone(),
            })
            .collect();
        let mut report = Self {
            schema_version: SCHEMA_VERSION.to_string(),
            input_digest: sample_digest(data),
            m: best.order(),
            components: best.model.components().iter().map(Into::into).collect(),
            log_likelihood: best.log_likelihood,
            aic: best.aic,
            n_params: best.n_params,
            sample_size: best.sample_size,
            converged: best.converged,
            scan: rows,
            scan_failures: failures,
            gof,
            baselines,
            config,
            generated_at,
            report_digest: String::new(),
        };
        report.report_digest = report.content_digest();
        report
    }

    /// Digest over everything except the timestamp and the digest itself.
    pub fn content_digest(&self) -> String {
        let mut bare = self.clone();
        bare.generated_at.clear();
        bare.report_digest.clear();
        let bytes = serde_json::to_vec(&bare).expect("report serializes");
        format!("{:x}", Sha256::digest(bytes))
    }

    /// Rebuilds the fitted mixture from the component table.
    pub fn model(&self) -> Result<MixtureModel> {
        let components = self
            .components
            .iter()
            .map(|c| LomaxComponent::new(c.c, c.b, c.v))
            .collect::<Result<Vec<_>>>()?;
        MixtureModel::normalized(components)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
