//! Exhaustive search over block supports. Exponential; meant for tests and tiny problems.

use nalgebra::{DMatrix, DVector};

use super::SensingProblem;
use crate::error::{Error, Result};

/// Largest number of candidate supports the oracle will enumerate.
pub const MAX_CANDIDATES: u128 = 100_000;

/// Residuals within this fraction of `||y||` count as ties.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub x: DVector<f64>,
    /// Selected blocks, ascending.
    pub support: Vec<usize>,
    pub residual: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Least-squares fit of `y` on every block support with at most `max_active_blocks` blocks.
///
/// Returns the fit with the smallest residual; near-ties go to the smaller
/// support, then to the lexicographically smallest block list.
pub fn brute_force_oracle(problem: &SensingProblem, max_active_blocks: usize) -> Result<OracleSolution> {
    let partition = problem.partition();
    let k = partition.num_blocks();
    let max_active = max_active_blocks.min(k);
    let candidates: u128 = (0..=max_active).map(|s| binomial(k, s)).sum();
    if candidates > MAX_CANDIDATES {
        return Err(Error::TooManyCandidates {
            candidates,
            limit: MAX_CANDIDATES,
        });
    }

    let y = problem.y();
    let tie = TIE_TOLERANCE * y.norm();
    let mut best = OracleSolution {
        x: DVector::zeros(problem.n()),
        support: Vec::new(),
        residual: y.norm(),
    };

    for size in 1..=max_active {
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            let cols: Vec<usize> = support.iter().flat_map(|&b| partition.range(b)).collect();
            let sub = DMatrix::from_fn(problem.m(), cols.len(), |r, c| problem.phi()[(r, cols[c])]);
            let coef = sub
                .clone()
                .svd(true, true)
                .solve(y, 1e-12)
                .map_err(|e| Error::Numeric(format!("least squares failed: {e}")))?;
            let residual = (y - &sub * &coef).norm();
            // Enumeration order is (size, lexicographic), so only strict improvements replace.
            if residual < best.residual - tie {
                let mut x = DVector::zeros(problem.n());
                for (c, &col) in cols.iter().enumerate() {
                    x[col] = coef[c];
                }
                best = OracleSolution {
                    x,
                    support: support.clone(),
                    residual,
                };
            }
            if !next_combination(&mut support, k) {
                break;
            }
        }
    }
    Ok(best)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
