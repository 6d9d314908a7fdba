//! Reference computations that share no code path with the library:
//! adaptive quadrature of the gamma-mixed geometric integral, a plain series
//! for the χ² tail, and inverse-CDF samplers for baseline laws.

#![allow(dead_code)]

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (7-point rule).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod integration on `[a, b]` to relative tolerance `rel`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: (f64, f64),
        rel: f64,
        depth: u32,
    ) -> f64 {
        let (value, err) = whole;
        if err <= rel * value.abs() || err < 1e-300 || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        let left = gauss_kronrod_15(f, a, mid);
        let right = gauss_kronrod_15(f, mid, b);
        recurse(f, a, mid, left, rel, depth - 1) + recurse(f, mid, b, right, rel, depth - 1)
    }
    let whole = gauss_kronrod_15(f, a, b);
    recurse(f, a, b, whole, rel, 60)
}

/// `∫ g(λ) (1 - e^{-λ}) e^{-(k-1)λ} dλ` for the gamma density `g` with
/// shape `v` and rate `b`, by quadrature after substituting
/// `λ = t / (b + k - 1)`.
pub fn gamma_mixed_geometric_pmf(scale: f64, shape: f64, k: u64) -> f64 {
    let s = scale + (k - 1) as f64;
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        ((shape - 1.0) * t.ln() - t).exp() * -(-t / s).exp_m1()
    };
    // on [0, 1] substitute t = u^{1/v}, which absorbs the t^{v-1} singularity
    let head = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let t = u.powf(1.0 / shape);
        (-t).exp() * -(-t / s).exp_m1() / shape
    };
    let breaks = [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0];
    let integral: f64 = integrate(&head, 0.0, 1.0, 1e-12)
        + breaks
            .windows(2)
            .map(|w| integrate(&integrand, w[0], w[1], 1e-12))
            .sum::<f64>();
    let log_prefactor = shape * (scale / s).ln() - libm::lgamma(shape);
    log_prefactor.exp() * integral
}

/// `Q(a, x)` from the power series of the lower function,
/// `P(a, x) = e^{-x} x^a Σ x^n / Γ(a + n + 1)`.
pub fn upper_gamma_by_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / libm::tgamma(a + 1.0);
    let mut sum = term;
    let mut n = 1.0;
    while term > 1e-20 * sum {
        term *= x / (a + n);
        sum += term;
        n += 1.0;
    }
    1.0 - (-x).exp() * x.powf(a) * sum
}

/// Half-integer closed form `Q(5/2, y) = erfc(√y) + e^{-y} (2/√π)(√y + 2/3 y^{3/2})`.
pub fn upper_gamma_five_halves(y: f64) -> f64 {
    let r = y.sqrt();
    libm::erfc(r) + (-y).exp() * 2.0 / std::f64::consts::PI.sqrt() * (r + 2.0 / 3.0 * y * r)
}

/// Riemann zeta by brute-force partial sums with an integral tail.
pub fn zeta_brute(s: f64) -> f64 {
    let n = 200_000u64;
    let head: f64 = (1..n).rev().map(|k| (k as f64).powf(-s)).sum();
    let nf = n as f64;
    head + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s)
}

/// Inverse-CDF draws from `P(k) = k^{-β} / ζ(β)`, given a source of
/// uniforms on `[0, 1)`.
pub fn sample_zeta<U: FnMut() -> f64>(beta: f64, n: usize, mut uniform: U) -> Vec<u64> {
    let z = zeta_brute(beta);
    // tabulate the CDF until the remaining tail is below 1e-9
    let mut cdf = Vec::new();
    let mut acc = 0.0;
    let mut k = 1u64;
    while acc < 1.0 - 1e-9 && k < 5_000_000 {
        acc += (k as f64).powf(-beta) / z;
        cdf.push(acc);
        k += 1;
    }
    (0..n)
        .map(|_| {
            let u = uniform();
            let idx = cdf.partition_point(|&c| c < u);
            if idx < cdf.len() {
                idx as u64 + 1
            } else {
                // continuous-tail approximation beyond the table
                let kmax = cdf.len() as f64;
                let tail = 1.0 - u;
                (kmax * ((1.0 - acc) / tail).powf(1.0 / (beta - 1.0))).ceil() as u64
            }
        })
        .collect()
}

/// Size `x` with `l (b / (b + x))^v = r`, found by bisection.
pub fn invert_rank(scale: f64, shape: f64, population: f64, rank: f64) -> f64 {
    let rank_of = |x: f64| population * (scale / (scale + x)).powf(shape);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while rank_of(hi) > rank {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rank_of(mid) > rank {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
