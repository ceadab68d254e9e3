//! Perron eigenvalue of `B` by power iteration.
//!
//! The iteration runs on `B + I`, which has Perron value `λ₁ + 1` and no
//! other eigenvalue of that modulus, so bipartite or otherwise periodic
//! graphs do not make the iterate oscillate. The estimate is the geometric
//! mean of the growth factors `‖(B+I)x_k‖ / ‖x_k‖` over a sliding window.
//! Convergence requires the window's relative spread and the relative
//! residual `‖Bx − λx‖ / λ` to both fall below `tol`.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use super::NBOperator;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub window: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            window: 32,
        }
    }
}

impl PowerConfig {
    /// `max_iter = max(500, ⌈10·ln(2|E|)/ln a⌉)` for an operator whose
    /// expected Perron value is `a`.
    pub fn for_operator(op: &NBOperator, a: f64) -> Self {
        let guess = if a > 1.0 {
            (10.0 * (op.dim().max(2) as f64).ln() / a.ln()).ceil() as usize
        } else {
            usize::MAX
        };
        Self {
            max_iter: guess.max(500),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub lambda1: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Unit-norm right Perron vector.
    #[serde(skip)]
    pub right: Vec<f64>,
}

impl SpectralResult {
    /// Left Perron vector: since `Bᵀ = J B J` with `J` the edge reversal,
    /// it is the reversal of the right one.
    pub fn left(&self, op: &NBOperator) -> Vec<f64> {
        op.reversed(&self.right)
    }
}

/// JSON form `{lambda1, iterations, residual, n, m, seed}`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpectralRecord {
    pub lambda1: f64,
    pub iterations: usize,
    pub residual: f64,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl SpectralRecord {
    pub fn new(result: &SpectralResult, op: &NBOperator, seed: u64) -> Self {
        Self {
            lambda1: result.lambda1,
            iterations: result.iterations,
            residual: result.residual,
            n: op.vertex_count(),
            m: op.dim() / 2,
            seed,
        }
    }
}

pub fn power_iterate(op: &NBOperator, cfg: &PowerConfig, seed: u64) -> Result<SpectralResult> {
    power_iterate_with(op, cfg, seed, Exec::Parallel)
}

pub fn power_iterate_with(
    op: &NBOperator,
    cfg: &PowerConfig,
    seed: u64,
    exec: Exec,
) -> Result<SpectralResult> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::Graph("operator has no directed edges".into()));
    }
    let window = cfg.window.max(1);
    let mut rng = seed::rng(seed);
    let mut x: Vec<f64> = (0..dim).map(|_| 1.0 + 0.5 * rng.random::<f64>()).collect();
    normalize(&mut x);
    let mut y = vec![0.0; dim];
    let mut logs: VecDeque<f64> = VecDeque::with_capacity(window + 1);
    let mut estimate = f64::NAN;

    for k in 1..=cfg.max_iter {
        op.apply_with(exec, &x, &mut y);
        y.iter_mut().zip(&x).for_each(|(yi, xi)| *yi += xi);
        let growth = norm(&y);
        logs.push_back(growth.ln());
        if logs.len() > window {
            logs.pop_front();
        }
        let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;
        let mu = mean_log.exp();
        estimate = mu - 1.0;

        let converged = if logs.len() == window {
            let (lo, hi) = logs
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
            let spread = hi.exp() - lo.exp();
            // ‖Bx − λx‖ = ‖(B+I)x − μx‖ for unit x
            let residual = y
                .iter()
                .zip(&x)
                .map(|(yi, xi)| (yi - mu * xi).powi(2))
                .sum::<f64>()
                .sqrt();
            let scale = estimate.max(1.0);
            (spread / mu < cfg.tol && residual / scale < cfg.tol).then_some(residual / scale)
        } else {
            None
        };

        std::mem::swap(&mut x, &mut y);
        x.iter_mut().for_each(|v| *v /= growth);

        if let Some(residual) = converged {
            return Ok(SpectralResult {
                lambda1: estimate,
                iterations: k,
                residual,
                right: x,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        last_estimate: estimate,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn normalize(x: &mut [f64]) {
    let n = norm(x);
    x.iter_mut().for_each(|v| *v /= n);
}
