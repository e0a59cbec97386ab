//! Noiseless oracle-equivalence check on small planted instances.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::Result;
use crate::linalg::ar1_toeplitz;
use crate::rng::SeededRng;
use crate::solver::{block_l1_solve, brute_force_oracle, bsbl_solve, BlockPartition, SensingProblem, SolverOptions};

pub struct PlantedInstance {
    pub problem: SensingProblem,
    pub x_true: DVector<f64>,
    /// Indices of the nonzero blocks, ascending.
    pub active: Vec<usize>,
}

/// Gaussian `m x (blocks * block_size)` sensing matrix with entries `N(0, 1/m)` and
/// `n_active` random blocks drawn from an AR(1) process with coefficient `corr`.
/// `snr_db = None` gives noiseless data.
pub fn planted_instance(
    seed: u64,
    m: usize,
    blocks: usize,
    block_size: usize,
    n_active: usize,
    corr: f64,
    snr_db: Option<f64>,
) -> Result<PlantedInstance> {
    let mut rng = SeededRng::new(seed);
    let n = blocks * block_size;
    let scale = 1.0 / (m as f64).sqrt();
    let phi = DMatrix::from_fn(m, n, |_, _| rng.normal() * scale);
    let partition = BlockPartition::uniform(blocks, block_size)?;
    let mut order: Vec<usize> = (0..blocks).collect();
    rng.shuffle(&mut order);
    let mut active: Vec<usize> = order[..n_active.min(blocks)].to_vec();
    active.sort_unstable();

    let factor = crate::linalg::cholesky(&ar1_toeplitz(block_size, corr), "AR(1) correlation")?.l();
    let mut x = DVector::zeros(n);
    for &b in &active {
        let z = DVector::from_fn(block_size, |_, _| rng.normal());
        x.rows_mut(b * block_size, block_size).copy_from(&(&factor * z));
    }
    let clean = &phi * &x;
    let y = match snr_db {
        None => clean,
        Some(snr) => {
            let sigma = clean.norm() / (m as f64).sqrt() * 10f64.powf(-snr / 20.0);
            let noise = DVector::from_fn(m, |_, _| rng.normal() * sigma);
            clean + noise
        }
    };
    Ok(PlantedInstance { problem: SensingProblem::new(phi, y, partition)?, x_true: x, active })
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub instances: usize,
    pub bsbl_matches: usize,
    pub block_l1_matches: usize,
    pub tolerance: f64,
}

impl SelftestReport {
    /// At least 19 of 20 BSBL and 17 of 20 block-l1 recoveries match the oracle.
    pub fn passed(&self) -> bool {
        self.bsbl_matches * 20 >= 19 * self.instances && self.block_l1_matches * 20 >= 17 * self.instances
    }
}

/// Compares both block solvers with exhaustive search on 20 noiseless
/// instances (`m = 10`, four blocks of four, one planted block).
pub fn selftest(seed: u64) -> Result<SelftestReport> {
    let tolerance = 1e-3;
    let mut report = SelftestReport { instances: 20, bsbl_matches: 0, block_l1_matches: 0, tolerance };
    let opts = SolverOptions::default();
    for i in 0..report.instances as u64 {
        let inst = planted_instance(seed.wrapping_add(i), 10, 4, 4, 1, 0.8, None)?;
        let oracle = brute_force_oracle(&inst.problem, 1)?;
        let norm = oracle.x.norm().max(f64::MIN_POSITIVE);
        let close = |x: &DVector<f64>| (x - &oracle.x).norm() / norm < tolerance;
        if close(&bsbl_solve(&inst.problem, &opts)?.x_hat) {
            report.bsbl_matches += 1;
        }
        if close(&block_l1_solve(&inst.problem, &opts)?.x_hat) {
            report.block_l1_matches += 1;
        }
    }
    Ok(report)
}
