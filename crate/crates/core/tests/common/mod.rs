#![allow(dead_code)]

use bsbl::rng::SeededRng;
use bsbl::solver::SensingProblem;
use nalgebra::{DMatrix, DVector};

pub struct Instance {
    pub problem: SensingProblem,
    pub x_true: DVector<f64>,
    pub active: Vec<usize>,
}

pub fn gaussian_matrix(rng: &mut SeededRng, m: usize, n: usize) -> DMatrix<f64> {
    let scale = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, n, |_, _| rng.normal() * scale)
}

/// Random block-sparse instance. Active block entries follow an AR(1) process with coefficient
/// `corr`; `snr_db = None` gives noiseless data.
pub fn block_instance(
    seed: u64,
    m: usize,
    blocks: usize,
    block_size: usize,
    n_active: usize,
    corr: f64,
    snr_db: Option<f64>,
) -> Instance {
    let p = bsbl::bench::planted_instance(seed, m, blocks, block_size, n_active, corr, snr_db).unwrap();
    Instance { problem: p.problem, x_true: p.x_true, active: p.active }
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn nmse(estimate: &DVector<f64>, truth: &DVector<f64>) -> f64 {
    (estimate - truth).norm_squared() / truth.norm_squared()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Straightforward evaluation of the marginal-likelihood cost: explicit block-diagonal prior,
/// LU determinant and explicit inverse.
pub fn dense_cost(phi: &DMatrix<f64>, y: &DVector<f64>, sizes: &[usize], gamma: &[f64], corr: &[f64], lambda: f64) -> f64 {
    let sigma0 = dense_prior(sizes, gamma, corr);
    let m = phi.nrows();
    let c = DMatrix::<f64>::identity(m, m) * lambda + phi * sigma0 * phi.transpose();
    let det = c.clone().lu().determinant();
    let inv = c.try_inverse().unwrap();
    det.ln() + (y.transpose() * inv * y)[(0, 0)]
}

pub fn dense_prior(sizes: &[usize], gamma: &[f64], corr: &[f64]) -> DMatrix<f64> {
    let n: usize = sizes.iter().sum();
    let mut s = DMatrix::zeros(n, n);
    let mut start = 0;
    for (b, &size) in sizes.iter().enumerate() {
        for p in 0..size {
            for q in 0..size {
                let lag = (p as i32 - q as i32).abs();
                s[(start + p, start + q)] = gamma[b] * corr[b].powi(lag);
            }
        }
        start += size;
    }
    s
}
