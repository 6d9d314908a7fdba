//! Scalar float helpers and special functions.
//!
//! With the `std` feature the elementary functions go through the platform
//! libm; without it they are routed to the pure-Rust `libm` crate so the
//! crate builds on `no_std` targets.

use crate::error::{Error, Result};

macro_rules! unary {
    ($($name:ident => $libm:ident),* $(,)?) => {
        $(
            #[inline]
            pub fn $name(x: f64) -> f64 {
                #[cfg(feature = "std")]
                {
                    x.$name()
                }
                #[cfg(not(feature = "std"))]
                {
                    libm::$libm(x)
                }
            }
        )*
    };
}

unary! {
    ln => log,
    ln_1p => log1p,
    exp => exp,
    exp_m1 => expm1,
    sqrt => sqrt,
    floor => floor,
    ceil => ceil,
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + ln_1p(exp(lo - hi))
}

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain("log_gamma requires a finite x > 0"));
    }
    Ok(libm::lgamma(x))
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 100_000;

/// Regularized upper incomplete gamma function `Q(a, x) = Γ(a, x) / Γ(a)`.
///
/// Series expansion of `P` below `x < a + 1`, Lentz continued fraction for
/// `Q` above it.
pub fn regularized_upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain("incomplete gamma requires a finite a > 0"));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain("incomplete gamma requires x >= 0"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let log_prefactor = a * ln(x) - x - log_gamma(a)?;
    if x < a + 1.0 {
        Ok(1.0 - lower_series(a, x, log_prefactor))
    } else {
        Ok(upper_continued_fraction(a, x, log_prefactor))
    }
}

/// Regularized lower incomplete gamma `P(a, x) = 1 - Q(a, x)`.
pub fn regularized_lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain("incomplete gamma requires a finite a > 0"));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain("incomplete gamma requires x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let log_prefactor = a * ln(x) - x - log_gamma(a)?;
    if x < a + 1.0 {
        Ok(lower_series(a, x, log_prefactor))
    } else {
        Ok(1.0 - upper_continued_fraction(a, x, log_prefactor))
    }
}

fn lower_series(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    (sum * exp(log_prefactor)).min(1.0)
}

fn upper_continued_fraction(a: f64, x: f64, log_prefactor: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (exp(log_prefactor) * h).clamp(0.0, 1.0)
}

/// Upper-tail probability of the χ² distribution with `dof` degrees of freedom.
pub fn chi_square_sf(statistic: f64, dof: f64) -> Result<f64> {
    if !(dof > 0.0) {
        return Err(Error::Domain("chi-square needs dof > 0"));
    }
    if statistic <= 0.0 {
        return Ok(1.0);
    }
    regularized_upper_incomplete_gamma(0.5 * dof, 0.5 * statistic)
}

/// Riemann zeta `ζ(s)` for `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain("zeta requires a finite s > 1"));
    }
    // Direct sum to N-1, then the integral tail plus Bernoulli corrections.
    const N: f64 = 12.0;
    // B_2j / (2j)!
    const B2J_OVER_FACT: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let mut sum = 0.0;
    let mut k = N - 1.0;
    while k >= 1.0 {
        sum += powf(k, -s);
        k -= 1.0;
    }
    let n_pow = powf(N, -s);
    sum += N * n_pow / (s - 1.0) + 0.5 * n_pow;
    // Rising factorial s(s+1)...(s+2j-2) times N^{-s-2j+1}.
    let mut rising = s;
    let mut n_term = n_pow / N;
    for (j, coeff) in B2J_OVER_FACT.iter().enumerate() {
        sum += coeff * rising * n_term;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        n_term /= N * N;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn log_gamma_small_integers() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-14);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.0).is_err());
    }

    #[test]
    fn log_gamma_matches_stirling_at_large_x() {
        for &x in &[1e3f64, 1e4, 1e6] {
            let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x)
                - 1.0 / (360.0 * x * x * x);
            let got = log_gamma(x).unwrap();
            assert!(((got - stirling) / stirling).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn upper_gamma_exponential_tail() {
        let q = regularized_upper_incomplete_gamma(1.0, 1.0).unwrap();
        assert!((q - (-1f64).exp()).abs() < 1e-15);
        for &x in &[1e-3, 0.5, 3.0, 40.0, 700.0] {
            let q = regularized_upper_incomplete_gamma(1.0, x).unwrap();
            assert!(((q - (-x).exp()) / (-x).exp()).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn upper_gamma_integer_shape_is_poisson_cdf() {
        // Q(n, x) = sum_{j<n} e^{-x} x^j / j!
        for &n in &[2u32, 5, 17] {
            for &x in &[0.1f64, 1.0, 4.0, 16.5, 60.0] {
                let mut term = (-x).exp();
                let mut sum = term;
                for j in 1..n {
                    term *= x / j as f64;
                    sum += term;
                }
                let q = regularized_upper_incomplete_gamma(n as f64, x).unwrap();
                assert!(((q - sum) / sum).abs() < 1e-10, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn lower_and_upper_are_complementary() {
        for &(a, x) in &[(0.3, 0.2), (2.5, 1.0), (10.0, 12.0), (1e3, 990.0)] {
            let p = regularized_lower_incomplete_gamma(a, x).unwrap();
            let q = regularized_upper_incomplete_gamma(a, x).unwrap();
            assert!((p + q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_gamma_rejects_bad_input() {
        assert!(regularized_upper_incomplete_gamma(0.0, 1.0).is_err());
        assert!(regularized_upper_incomplete_gamma(1.0, -1.0).is_err());
        assert_eq!(regularized_upper_incomplete_gamma(3.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-10);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
        // ζ(s) ~ 1/(s-1) + γ near the pole
        let s = 1.0 + 1e-6;
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((zeta(s).unwrap() - (1.0 / (s - 1.0) + euler_gamma)).abs() < 1e-5);
        assert!((zeta(60.0).unwrap() - 1.0).abs() < 1e-17 + 1e-18);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn log_add_exp_handles_infinities() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add_exp(-1000.0, -1000.0) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
