//! Recovery of known parameters from synthetic data.

mod support;

use lomaxmix_core::fitting::{fit_lognormal_values, BoundaryStatus};
use lomaxmix_core::rng::Stream;
use lomaxmix_core::{
    aic, chi_square_test, fit_lognormal, fit_mixture, fit_power_law, log_likelihood,
    sample_mixture, scan_orders, CountSample, Error, FitConfig, MixtureModel,
};
use support::oracle;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn single_component_recovery() {
    let truth = MixtureModel::single(2.0, 1.5).unwrap();
    let data = sample_mixture(&truth, 50_000, 5).unwrap();
    let fit = fit_mixture(&data, 1, &FitConfig::default()).unwrap();
    let c = fit.model.components()[0];
    assert!(rel(c.scale(), 2.0) < 0.05, "b = {}", c.scale());
    assert!(rel(c.shape(), 1.5) < 0.05, "v = {}", c.shape());
    assert!(fit.converged);
    assert!(fit.log_likelihood >= log_likelihood(&truth, &data));
    assert_eq!(fit.n_params, 2);
    assert_eq!(fit.aic, aic(fit.log_likelihood, 2));
}

#[test]
fn scan_on_single_component_data_prefers_one() {
    let truth = MixtureModel::single(5.0, 2.0).unwrap();
    let data = sample_mixture(&truth, 5_000, 9).unwrap();
    let config = FitConfig {
        starts: 5,
        ..FitConfig::default()
    };
    let scan = scan_orders(&data, 3, &config).unwrap();
    assert_eq!(scan.best().order(), 1);
    assert_eq!(scan.fits.len(), 3);
    // nested models can only gain likelihood up to optimizer slack
    for w in scan.fits.windows(2) {
        assert!(w[1].log_likelihood >= w[0].log_likelihood - 1e-3);
    }
    let single = scan_orders(&data, 1, &config).unwrap();
    assert_eq!(single.best_index, 0);
    assert_eq!(single.delta_aic_runner_up(), None);
}

#[test]
fn power_law_exponent_recovery() {
    let mut stream = Stream::new(17, 0);
    let values = oracle::sample_zeta(2.5, 50_000, || stream.uniform());
    let data = CountSample::from_values(values).unwrap();
    let fit = fit_power_law(&data).unwrap();
    assert!(rel(fit.exponent, 2.5) < 0.02, "beta = {}", fit.exponent);
    assert_eq!(fit.status, BoundaryStatus::Interior);
    assert_eq!(fit.n_params, 1);
}

#[test]
fn power_law_on_all_ones_hits_the_upper_bound() {
    let data = CountSample::from_weighted([(1, 100), (2, 1)]).unwrap();
    let fit = fit_power_law(&data).unwrap();
    assert!(fit.exponent > 5.0);
    let ones = CountSample::from_weighted([(1, 100)]).unwrap();
    assert_eq!(
        fit_power_law(&ones).unwrap().status,
        BoundaryStatus::AtUpperBound
    );
}

#[test]
fn lognormal_recovery_and_comparison() {
    // exp of normal draws via Box-Muller on a fixed stream
    let mut stream = Stream::new(23, 0);
    let values: Vec<f64> = (0..20_000)
        .map(|_| {
            let u1 = stream.open_uniform();
            let u2 = stream.uniform();
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            (1.0 + 0.5 * z).exp()
        })
        .collect();
    let fit = fit_lognormal_values(&values).unwrap();
    assert!(rel(fit.mu, 1.0) < 0.02);
    assert!(rel(fit.sigma, 0.5) < 0.02);

    let truth = MixtureModel::single(2.0, 1.5).unwrap();
    let data = sample_mixture(&truth, 10_000, 3).unwrap();
    let ln = fit_lognormal(&data).unwrap();
    let mix = fit_mixture(&data, 1, &FitConfig::default()).unwrap();
    assert!(ln.aic > mix.aic);
}

#[test]
fn constant_log_sample_has_zero_variance() {
    let data = CountSample::from_weighted([(4, 30)]).unwrap();
    assert!(matches!(
        fit_lognormal(&data),
        Err(Error::ZeroLogVariance { .. })
    ));
    assert!(matches!(
        fit_mixture(&data, 1, &FitConfig::default()),
        Err(Error::DegenerateData(_))
    ));
}

#[test]
fn chi_square_rejection_rate_is_near_nominal() {
    let truth = MixtureModel::single(3.0, 2.0).unwrap();
    let trials = 600u64;
    let rejections = (0..trials)
        .filter(|&seed| {
            let data = sample_mixture(&truth, 2_000, 500 + seed).unwrap();
            chi_square_test(&truth, &data, 0, 0.1).unwrap().rejected
        })
        .count();
    // binomial sd at p = 0.1 is about 0.012
    let rate = rejections as f64 / trials as f64;
    assert!((0.07..=0.13).contains(&rate), "rate {rate}");
}

#[test]
fn fitted_model_passes_its_own_goodness_of_fit() {
    let truth = MixtureModel::single(3.0, 2.0).unwrap();
    let data = sample_mixture(&truth, 5_000, 77).unwrap();
    let fit = fit_mixture(&data, 1, &FitConfig::default()).unwrap();
    let report = chi_square_test(&fit.model, &data, fit.n_params, 0.001).unwrap();
    assert!(!report.rejected, "p = {}", report.p_value);
}
