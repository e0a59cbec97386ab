use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{BlockPartition, BsblHyperparams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LambdaMode {
    /// Noise variance held at the given value.
    Fixed(f64),
    /// Noise variance learned with the other hyperparameters.
    Learn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// EM iteration cap for the Bayesian solver.
    pub max_iters: usize,
    /// Block `i` is pruned once `gamma_i < prune_threshold * max_j gamma_j`.
    pub prune_threshold: f64,
    /// Stop when the relative change of the estimate falls below this.
    pub convergence_tol: f64,
    pub lambda_mode: LambdaMode,
    pub learn_correlation: bool,
    /// Residual-norm tolerance for the constrained l1 / block-l1 baselines. Zero means
    /// the equality-constrained problem, approximated with a tiny penalty.
    pub epsilon: f64,
    /// Iteration cap for the proximal-gradient baselines.
    pub baseline_max_iters: usize,
    /// KKT tolerance for the proximal-gradient baselines, relative to the penalty weight.
    pub kkt_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 300,
            prune_threshold: 1e-4,
            convergence_tol: 1e-6,
            lambda_mode: LambdaMode::Learn,
            learn_correlation: true,
            epsilon: 0.0,
            baseline_max_iters: 20_000,
            kkt_tol: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iters == 0 || self.baseline_max_iters == 0 {
            return Err(Error::InvalidInput("iteration caps must be at least 1".into()));
        }
        if !positive(self.prune_threshold) || !positive(self.convergence_tol) || !positive(self.kkt_tol) {
            return Err(Error::InvalidInput("solver thresholds must be positive".into()));
        }
        if let LambdaMode::Fixed(l) = self.lambda_mode {
            if !positive(l) {
                return Err(Error::InvalidInput(format!("fixed noise variance {l} must be positive")));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidInput("epsilon must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Output of every solver in this module.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub x_hat: DVector<f64>,
    /// Learned block scales for the Bayesian solver; block l2 norms of `x_hat` for the baselines.
    pub gamma: Vec<f64>,
    pub iterations: usize,
    pub final_cost: f64,
    pub converged: bool,
    pub cost_trace: Vec<f64>,
    /// Final hyperparameters (Bayesian solver only).
    pub hyper: Option<BsblHyperparams>,
    /// Penalty weight used (baselines only).
    pub rho: Option<f64>,
    /// Final KKT residual (baselines only).
    pub kkt_residual: Option<f64>,
}

impl SolverResult {
    /// Indices of blocks holding at least one nonzero coefficient.
    pub fn support(&self, partition: &BlockPartition) -> Vec<usize> {
        partition
            .ranges()
            .enumerate()
            .filter(|(_, r)| self.x_hat.rows(r.start, r.len()).iter().any(|v| *v != 0.0))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of blocks whose l2 norm exceeds `rel` times the largest block norm.
    pub fn significant_blocks(&self, partition: &BlockPartition, rel: f64) -> Vec<usize> {
        let norms: Vec<f64> = partition
            .ranges()
            .map(|r| self.x_hat.rows(r.start, r.len()).norm())
            .collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return Vec::new();
        }
        norms
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > rel * max)
            .map(|(i, _)| i)
            .collect()
    }
}
