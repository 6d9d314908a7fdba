//! Derivative-free minimization by the Nelder–Mead simplex method.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which behave
//! better than the classic (1, 2, 0.5, 0.5) set once the problem has more
//! than a handful of dimensions.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Initial edge length along every coordinate.
    pub step: f64,
    /// Stop once `|f_worst - f_best| <= tol * max(|f_best|, 1)`.
    pub tol: f64,
    pub max_evals: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`. Non-finite objective values are treated
/// as `+inf`, which lets callers encode box constraints by rejection.
pub fn minimize<F>(mut f: F, x0: &[f64], options: &SimplexOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0u64;
    let mut eval = |x: &[f64], evals: &mut u64| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if n == 0 {
        let value = eval(x0, &mut evals);
        return Minimum {
            x: Vec::new(),
            value,
            evaluations: evals,
            converged: true,
        };
    }

    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += options.step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p, &mut evals)).collect();

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;

    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let f_best = values[best];
        let spread = values[worst] - f_best;
        if f_best.is_finite() && spread <= options.tol * f_best.abs().max(1.0) {
            converged = true;
            break;
        }
        if evals >= options.max_evals {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&points[idx]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= nf);

        let worst_point = &points[worst];
        for i in 0..n {
            trial[i] = centroid[i] + alpha * (centroid[i] - worst_point[i]);
        }
        let f_reflect = eval(&trial, &mut evals);

        if f_reflect < f_best {
            for i in 0..n {
                trial2[i] = centroid[i] + gamma * (trial[i] - centroid[i]);
            }
            let f_expand = eval(&trial2, &mut evals);
            if f_expand < f_reflect {
                points[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                points[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            points[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        let outside = f_reflect < values[worst];
        for i in 0..n {
            trial2[i] = if outside {
                centroid[i] + rho * (trial[i] - centroid[i])
            } else {
                centroid[i] - rho * (centroid[i] - points[worst][i])
            };
        }
        let f_contract = eval(&trial2, &mut evals);
        let accept = if outside {
            f_contract <= f_reflect
        } else {
            f_contract < values[worst]
        };
        if accept {
            points[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let anchor = points[best].clone();
        for &idx in &order[1..] {
            for (x, a) in points[idx].iter_mut().zip(&anchor) {
                *x = a + sigma * (*x - a);
            }
            values[idx] = eval(&points[idx], &mut evals);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: points.swap_remove(best),
        value: values[best],
        evaluations: evals,
        converged,
    }
}
