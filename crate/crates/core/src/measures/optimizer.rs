//! Seeded multi-start Nelder–Mead on the phase torus.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Independent starts; the first is always the all-zero point.
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations per local search.
    pub max_iters: usize,
    /// Simplex diameter below which a local search stops.
    pub xtol: f64,
    /// Spread of simplex values below which a local search stops.
    pub ftol: f64,
    /// Edge length of the initial simplex, in radians.
    pub initial_step: f64,
    /// Extra local searches restarted from the best vertex.
    pub polish_rounds: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            max_iters: 20_000,
            xtol: 1e-10,
            ftol: 1e-14,
            initial_step: 0.6,
            polish_rounds: 2,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::OutOfRange("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::OutOfRange("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Adaptive-parameter Nelder–Mead (reflection 1, expansion 1+2/n,
/// contraction 3/4−1/(2n), shrink 1−1/n).
pub fn nelder_mead<F>(f: &mut F, x0: &[f64], step: f64, cfg: &OptimizerConfig) -> LocalResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return LocalResult {
            x: Vec::new(),
            value: f(x0),
            evals: 1,
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    while evals < cfg.max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter <= cfg.xtol || spread <= cfg.ftol {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = &simplex[n];
        for i in 0..n {
            trial[i] = centroid[i] + alpha * (centroid[i] - worst[i]);
        }
        let fr = f(&trial);
        evals += 1;

        if fr < values[0] {
            for i in 0..n {
                trial2[i] = centroid[i] + gamma * (trial[i] - centroid[i]);
            }
            let fe = f(&trial2);
            evals += 1;
            if fe < fr {
                simplex[n].copy_from_slice(&trial2);
                values[n] = fe;
            } else {
                simplex[n].copy_from_slice(&trial);
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n].copy_from_slice(&trial);
            values[n] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst vertex
        let outside = fr < values[n];
        for i in 0..n {
            trial2[i] = if outside {
                centroid[i] + rho * (trial[i] - centroid[i])
            } else {
                centroid[i] + rho * (simplex[n][i] - centroid[i])
            };
        }
        let fc = f(&trial2);
        evals += 1;
        if fc < fr.min(values[n]) {
            simplex[n].copy_from_slice(&trial2);
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for j in 1..=n {
            for i in 0..n {
                simplex[j][i] = best[i] + sigma * (simplex[j][i] - best[i]);
            }
            values[j] = f(&simplex[j]);
        }
        evals += n;
    }

    let (best, &value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty simplex");
    LocalResult {
        x: simplex[best].clone(),
        value,
        evals,
        converged,
    }
}

#[derive(Debug, Clone)]
pub struct MultiStartResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Starting point of restart `r`: zeros for `r = 0`, otherwise uniform on
/// `[0, 2π)^n` from a ChaCha8 stream keyed by `(seed, r)`.
pub fn start_point(n: usize, seed: u64, r: usize) -> Vec<f64> {
    if r == 0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    (0..n).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Runs `cfg.restarts` local searches (in parallel) and keeps the best,
/// breaking ties by the lowest restart index so the result does not depend
/// on scheduling.
pub fn multistart_minimize<F>(
    objective: F,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<MultiStartResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let runs: Vec<LocalResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut f = |x: &[f64]| objective(x);
            let mut res = nelder_mead(&mut f, &start_point(n, cfg.seed, r), cfg.initial_step, cfg);
            let mut step = cfg.initial_step * 0.1;
            for _ in 0..cfg.polish_rounds {
                let polished = nelder_mead(&mut f, &res.x, step, cfg);
                let improved = polished.value < res.value;
                let evals = res.evals + polished.evals;
                if improved {
                    res = polished;
                }
                res.evals = evals;
                step *= 0.1;
            }
            res
        })
        .collect();
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, f64)>, (i, r)| match acc {
            Some((_, v)) if v <= r.value => acc,
            _ => Some((i, r.value)),
        })
        .expect("restarts >= 1");
    let best = &runs[best_idx];
    Ok(MultiStartResult {
        x: best.x.clone(),
        value: best.value,
        restarts_used: runs.len(),
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let mut f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 0.3).powi(2))
                .sum::<f64>()
        };
        let r = nelder_mead(&mut f, &[1.0, -1.0, 2.0], 0.5, &OptimizerConfig::default());
        assert!(r.converged);
        assert!(r.value < 1e-14);
        assert!(r.x.iter().all(|v| (v - 0.3).abs() < 1e-6));
    }

    #[test]
    fn rosenbrock() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&mut f, &[-1.2, 1.0], 0.5, &OptimizerConfig::default());
        assert!(r.value < 1e-12, "{}", r.value);
    }

    #[test]
    fn multistart_finds_global_minimum_of_periodic_function() {
        // cos(x) + 0.5 cos(3x) has its global minimum near x = π with a local one elsewhere
        let obj = |x: &[f64]| x[0].cos() + 0.5 * (3.0 * x[0]).cos();
        let cfg = OptimizerConfig::default();
        let r = multistart_minimize(obj, 1, &cfg).unwrap();
        let grid_min = (0..100_000)
            .map(|i| obj(&[TAU * i as f64 / 100_000.0]))
            .fold(f64::INFINITY, f64::min);
        assert!(r.value <= grid_min + 1e-9);
    }

    #[test]
    fn reproducible_and_validated() {
        let obj = |x: &[f64]| x.iter().map(|v| v.sin()).sum::<f64>();
        let cfg = OptimizerConfig {
            seed: 9,
            ..Default::default()
        };
        let a = multistart_minimize(obj, 4, &cfg).unwrap();
        let b = multistart_minimize(obj, 4, &cfg).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(start_point(3, 1, 0), vec![0.0; 3]);
        assert_ne!(start_point(3, 1, 1), start_point(3, 1, 2));

        let bad = OptimizerConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(multistart_minimize(obj, 2, &bad).is_err());
    }
}
