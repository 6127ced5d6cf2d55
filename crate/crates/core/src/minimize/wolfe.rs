use nalgebra::{DMatrix, DVector};

use super::{best_prefix, linear_oracle_chain, MinimizationResult, Sense};
use crate::error::{Result, SubmodError};
use crate::function::FunctionInstance;

#[derive(Clone, Copy, Debug)]
pub struct MnpOptions {
    /// Stop when `|x|^2 - <x, q> <= tol`; default `1e-10 max(1, |f(V)|)`.
    pub tol: Option<f64>,
    /// Cap on major cycles (linear-oracle calls).
    pub max_iterations: usize,
}

impl Default for MnpOptions {
    fn default() -> Self {
        MnpOptions {
            tol: None,
            max_iterations: 10_000,
        }
    }
}

/// Coefficients at or below this are treated as zero.
const COEF_EPS: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(points: &[Vec<f64>], coef: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points[0].len()];
    for (p, &c) in points.iter().zip(coef) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += c * pi;
        }
    }
    x
}

/// Minimizer of `|sum_i a_i p_i|` over the affine hull (`sum_i a_i = 1`),
/// from the bordered Gram system; least squares when it is singular.
fn affine_minimizer(points: &[Vec<f64>]) -> Vec<f64> {
    let m = points.len();
    let mut k = DMatrix::<f64>::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..=i {
            let g = dot(&points[i], &points[j]);
            k[(i, j)] = g;
            k[(j, i)] = g;
        }
        k[(i, m)] = 1.0;
        k[(m, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let solved = k
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()) && (&k * s - &rhs).amax() <= 1e-9 * k.amax().max(1.0));
    let s = match solved {
        Some(s) => s,
        None => k.svd(true, true).solve(&rhs, 1e-12).unwrap_or_else(|_| {
            let mut e = DVector::zeros(m + 1);
            e[m - 1] = 1.0;
            e
        }),
    };
    let mut a: Vec<f64> = s.iter().take(m).copied().collect();
    let total: f64 = a.iter().sum();
    if total.abs() > COEF_EPS {
        a.iter_mut().for_each(|v| *v /= total);
    }
    a
}

/// Minimum-norm point of the base polytope by Wolfe's algorithm, and the
/// minimizers read off its sign pattern.
///
/// With `theta = 1e-8 max(1, |x|_inf)`, `{j : x_j < -theta}` and
/// `{j : x_j <= theta}` are prefixes of the final ascending sweep, so their
/// values come from that sweep's chain without extra evaluations. The best
/// prefix of the sweep is considered as well; the smallest and largest
/// prefixes attaining the minimum are returned.
pub fn min_norm_point(f: &mut FunctionInstance, opts: &MnpOptions) -> Result<MinimizationResult> {
    let n = f.n();
    let before = f.counters();
    let (q0, _, chain0) = linear_oracle_chain(f, &vec![0.0; n], Sense::Minimize)?;
    let fv = chain0.last().copied().unwrap_or(0.0);
    let tol = opts.tol.unwrap_or(1e-10 * fv.abs().max(1.0));

    let mut points = vec![q0.weights];
    let mut coef = vec![1.0];
    let mut x = points[0].clone();
    let mut iterations = 0;
    let mut values = Vec::new();
    let (sigma, chain, gap) = loop {
        iterations += 1;
        let (q, sigma, chain) = linear_oracle_chain(f, &x, Sense::Minimize)?;
        values.push(best_prefix(&chain).1);
        let xx = dot(&x, &x);
        let gap = xx - dot(&x, &q.weights);
        if gap <= tol + 1e-12 * xx || points.iter().any(|p| *p == q.weights) {
            break (sigma, chain, gap.max(0.0));
        }
        if iterations >= opts.max_iterations {
            return Err(SubmodError::NonConvergence {
                iterations,
                gap,
                best: x,
            });
        }
        points.push(q.weights);
        coef.push(0.0);
        for _ in 0..=points.len() {
            let alpha = affine_minimizer(&points);
            if alpha.iter().all(|&a| a > COEF_EPS) {
                coef = alpha;
                break;
            }
            let mut theta = 1.0f64;
            let mut drop = 0;
            for (i, (&a, &l)) in alpha.iter().zip(&coef).enumerate() {
                if a <= COEF_EPS {
                    let t = if l - a > 0.0 { (l / (l - a)).max(0.0) } else { 0.0 };
                    if t < theta {
                        theta = t;
                        drop = i;
                    }
                }
            }
            for (l, a) in coef.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            coef[drop] = 0.0;
            let mut i = 0;
            while i < points.len() {
                if coef[i] <= COEF_EPS && points.len() > 1 {
                    points.swap_remove(i);
                    coef.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = coef.iter().sum();
            coef.iter_mut().for_each(|l| *l /= total);
        }
        x = combine(&points, &coef);
    };

    let theta = 1e-8 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let prefix_value = |len: usize| if len == 0 { 0.0 } else { chain[len - 1] };
    let lo = x.iter().filter(|&&v| v < -theta).count();
    let hi = x.iter().filter(|&&v| v <= theta).count();
    let (best_len, _) = best_prefix(&chain);
    let candidates = [lo, hi, best_len];
    let value = candidates
        .iter()
        .map(|&l| prefix_value(l))
        .fold(f64::INFINITY, f64::min);
    let slack = 1e-9 * value.abs().max(1.0);
    let attaining: Vec<usize> = candidates
        .into_iter()
        .filter(|&l| prefix_value(l) <= value + slack)
        .collect();
    let (min_len, max_len) = (
        *attaining.iter().min().expect("non-empty"),
        *attaining.iter().max().expect("non-empty"),
    );
    let take = |len: usize| {
        let mut s = sigma.order()[..len].to_vec();
        s.sort_unstable();
        s
    };
    Ok(MinimizationResult {
        minimizer_min: take(min_len),
        minimizer_max: take(max_len),
        value,
        iterations,
        counters: f.counters() - before,
        gap,
        point: x,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::FunctionSpec;

    #[test]
    fn modular_point_is_the_weights() {
        let mut f = FunctionSpec::Modular {
            weights: vec![-1.0, 2.0],
        }
        .build()
        .unwrap();
        let r = min_norm_point(&mut f, &MnpOptions::default()).unwrap();
        assert_eq!(r.point, vec![-1.0, 2.0]);
        assert_eq!(r.minimizer_min, vec![0]);
        assert_eq!(r.value, -1.0);
    }

    #[test]
    fn symmetric_cut_has_empty_and_full_minimizers() {
        let mut f = FunctionSpec::GraphCut {
            similarity: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            lambda: 1.0,
        }
        .build()
        .unwrap();
        let r = min_norm_point(&mut f, &MnpOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.minimizer_min.is_empty());
        assert_eq!(r.minimizer_max, vec![0, 1]);
        assert!(r.point.iter().sum::<f64>().abs() < 1e-12);
    }
}
