//! Block sparse Bayesian learning.
//!
//! Each block `x_i` has prior `N(0, gamma_i B_i)` with `B_i` an AR(1) Toeplitz
//! matrix, and the noise is `N(0, lambda I)`. Hyperparameters are fitted by
//! minimizing the negative log marginal likelihood
//!
//! ```text
//! L = log|lambda I + Phi Sigma0 Phi^T| + y^T (lambda I + Phi Sigma0 Phi^T)^-1 y
//! ```
//!
//! with EM updates. Every accepted step is checked against the cost: a
//! correlation update or a pruning step that would raise `L` is dropped in
//! favour of the plain EM step, which cannot raise it.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{BlockPartition, LambdaMode, SensingProblem, SolverOptions, SolverResult};
use crate::error::{Error, Result};
use crate::linalg::{ar1_toeplitz, chol_logdet, cholesky};

/// Correlation coefficients are kept inside this bound so every `B_i` stays positive definite.
pub const MAX_CORRELATION: f64 = 0.99;

/// Relative slack allowed between consecutive cost values.
pub const COST_SLACK: f64 = 1e-8;
/// Rises between [`COST_SLACK`] and this are attributed to roundoff in a nearly singular
/// `C`: the solver stops at the current iterate instead of failing.
pub const STALL_SLACK: f64 = 1e-6;

/// Lower bound on the learned noise variance, relative to `||y||^2 / m`.
const LAMBDA_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsblHyperparams {
    /// Block scales. Zero exactly when the block is pruned.
    pub gamma: Vec<f64>,
    /// AR(1) coefficient of each block's correlation matrix.
    pub corr: Vec<f64>,
    /// Noise variance.
    pub lambda: f64,
    pub active: Vec<bool>,
}

impl BsblHyperparams {
    /// `gamma_i = 1`, `r_i = 0`, `lambda = 0.01 ||y||^2 / m` (or the fixed value).
    pub fn initial(problem: &SensingProblem, opts: &SolverOptions) -> Self {
        let k = problem.partition().num_blocks();
        let lambda = match opts.lambda_mode {
            LambdaMode::Fixed(l) => l,
            LambdaMode::Learn => 0.01 * problem.y().norm_squared() / problem.m() as f64,
        };
        Self {
            gamma: vec![1.0; k],
            corr: vec![0.0; k],
            lambda,
            active: vec![true; k],
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self, partition: &BlockPartition) -> Result<()> {
        let k = partition.num_blocks();
        if self.gamma.len() != k || self.corr.len() != k || self.active.len() != k {
            return Err(Error::Dimension(format!(
                "hyperparameters describe {} blocks, partition has {k}",
                self.gamma.len()
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidInput(format!("noise variance {} must be positive", self.lambda)));
        }
        for i in 0..k {
            let g = self.gamma[i];
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidInput(format!("gamma[{i}] = {g} must be finite and >= 0")));
            }
            if (g > 0.0) != self.active[i] {
                return Err(Error::InvalidInput(format!(
                    "block {i}: active flag disagrees with gamma = {g}"
                )));
            }
            if !(self.corr[i].abs() < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "corr[{i}] = {} must lie in (-1, 1)",
                    self.corr[i]
                )));
            }
        }
        Ok(())
    }

    /// `gamma_i * B_i`.
    pub fn block_prior(&self, block: usize, size: usize) -> DMatrix<f64> {
        ar1_toeplitz(size, self.corr[block]) * self.gamma[block]
    }

    /// Full block-diagonal prior covariance `Sigma0`.
    pub fn prior_covariance(&self, partition: &BlockPartition) -> DMatrix<f64> {
        let n = partition.total();
        let mut s = DMatrix::zeros(n, n);
        for (i, r) in partition.ranges().enumerate() {
            if self.active[i] {
                s.view_mut((r.start, r.start), (r.len(), r.len()))
                    .copy_from(&self.block_prior(i, r.len()));
            }
        }
        s
    }

    /// Hyperparameters for data scaled by `sqrt(factor)`: gamma and lambda scale by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            gamma: self.gamma.iter().map(|g| g * factor).collect(),
            corr: self.corr.clone(),
            lambda: self.lambda * factor,
            active: self.active.clone(),
        }
    }

    fn prune(&mut self, block: usize) {
        self.gamma[block] = 0.0;
        self.active[block] = false;
    }
}

/// Borrowed view of problem data, so the normalized frame can reuse the matrix.
#[derive(Clone, Copy)]
struct Data<'a> {
    phi: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    partition: &'a BlockPartition,
}

impl<'a> Data<'a> {
    fn of(problem: &'a SensingProblem) -> Self {
        Self {
            phi: problem.phi(),
            y: problem.y(),
            partition: problem.partition(),
        }
    }

    fn m(&self) -> usize {
        self.phi.nrows()
    }
}

/// Everything derived from factorizing `C = lambda I + Phi Sigma0 Phi^T` over the working set.
struct Factorization {
    active_blocks: Vec<usize>,
    /// Columns of `Phi_a Sigma0_a`, one slab per active block, in `active_blocks` order.
    phi_sigma: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    /// `C^-1 y`.
    alpha: DVector<f64>,
    cost: f64,
}

fn factorize(hyper: &BsblHyperparams, data: Data<'_>) -> Result<Factorization> {
    let m = data.m();
    let active_blocks: Vec<usize> = (0..hyper.num_blocks()).filter(|&i| hyper.active[i]).collect();
    let n_active: usize = active_blocks.iter().map(|&i| data.partition.size(i)).sum();

    let mut phi_a = DMatrix::zeros(m, n_active);
    let mut phi_sigma = DMatrix::zeros(m, n_active);
    let mut col = 0;
    for &i in &active_blocks {
        let r = data.partition.range(i);
        let block = data.phi.columns(r.start, r.len());
        phi_a.columns_mut(col, r.len()).copy_from(&block);
        phi_sigma
            .columns_mut(col, r.len())
            .copy_from(&(block * hyper.block_prior(i, r.len())));
        col += r.len();
    }

    let mut c = &phi_sigma * phi_a.transpose();
    c = (&c + c.transpose()) * 0.5;
    for d in 0..m {
        c[(d, d)] += hyper.lambda;
    }
    let chol = cholesky(&c, "marginal covariance lambda*I + Phi*Sigma0*Phi^T")?;
    let alpha = chol.solve(data.y);
    let cost = chol_logdet(&chol) + data.y.dot(&alpha);
    if !cost.is_finite() {
        return Err(Error::Numeric(format!("cost evaluated to {cost}")));
    }
    Ok(Factorization {
        active_blocks,
        phi_sigma,
        chol,
        alpha,
        cost,
    })
}

/// Sufficient statistics of the posterior needed by the M-step.
struct PosteriorStats {
    /// Posterior mean over all `n` entries (zeros in pruned blocks).
    mu: DVector<f64>,
    /// Diagonal blocks of the posterior covariance (`None` for pruned blocks).
    sigma_blocks: Vec<Option<DMatrix<f64>>>,
    /// `||y - Phi mu||^2`.
    resid_sq: f64,
    /// `Tr(Sigma_x Phi^T Phi)`.
    trace_term: f64,
}

fn posterior_stats(hyper: &BsblHyperparams, fac: &Factorization, data: Data<'_>) -> Result<PosteriorStats> {
    let m = data.m();
    let l = fac.chol.l();
    let w = l
        .solve_lower_triangular(&fac.phi_sigma)
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let mu_a = fac.phi_sigma.tr_mul(&fac.alpha);

    let mut mu = DVector::zeros(data.partition.total());
    let mut sigma_blocks = vec![None; hyper.num_blocks()];
    let mut col = 0;
    for &i in &fac.active_blocks {
        let r = data.partition.range(i);
        mu.rows_mut(r.start, r.len()).copy_from(&mu_a.rows(col, r.len()));
        let wi = w.columns(col, r.len());
        let mut s = hyper.block_prior(i, r.len()) - wi.tr_mul(&wi);
        s = (&s + s.transpose()) * 0.5;
        sigma_blocks[i] = Some(s);
        col += r.len();
    }

    // y - Phi mu = lambda C^-1 y, and Tr(Phi Sigma_x Phi^T) = lambda (m - lambda Tr(C^-1)).
    let resid_sq = hyper.lambda * hyper.lambda * fac.alpha.norm_squared();
    let l_inv = l
        .solve_lower_triangular(&DMatrix::identity(m, m))
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let trace_c_inv = l_inv.norm_squared();
    let trace_term = (hyper.lambda * (m as f64 - hyper.lambda * trace_c_inv)).max(0.0);

    Ok(PosteriorStats {
        mu,
        sigma_blocks,
        resid_sq,
        trace_term,
    })
}

/// One EM M-step. With `learn_corr` the AR(1) coefficients are re-estimated first and the
/// scales are then fitted for the new correlation matrices; otherwise correlations are kept.
fn m_step(
    hyper: &BsblHyperparams,
    stats: &PosteriorStats,
    data: Data<'_>,
    opts: &SolverOptions,
    learn_corr: bool,
) -> Result<BsblHyperparams> {
    let k = hyper.num_blocks();
    let second_moment = |i: usize| -> Option<DMatrix<f64>> {
        let r = data.partition.range(i);
        let mu_i = stats.mu.rows(r.start, r.len());
        stats.sigma_blocks[i].as_ref().map(|s| s + &mu_i * mu_i.transpose())
    };
    let moments: Vec<Option<DMatrix<f64>>> = (0..k).map(second_moment).collect();

    let mut next = hyper.clone();
    if learn_corr {
        // Blocks of equal size share one coefficient: the mean of their lag-1 / lag-0 ratios.
        let mut by_size: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
        for (i, e) in moments.iter().enumerate() {
            let Some(e) = e else { continue };
            let size = data.partition.size(i);
            let entry = by_size.entry(size).or_insert((0.0, 0));
            if size < 2 {
                entry.1 += 1;
                continue;
            }
            let m0 = e.diagonal().mean();
            let m1 = (0..size - 1).map(|p| e[(p, p + 1)]).sum::<f64>() / (size - 1) as f64;
            let r = if m0 > 0.0 { m1 / m0 } else { 0.0 };
            if r.is_finite() {
                entry.0 += r;
                entry.1 += 1;
            }
        }
        for i in 0..k {
            if !hyper.active[i] {
                continue;
            }
            if let Some(&(sum, count)) = by_size.get(&data.partition.size(i)) {
                let r = if count > 0 { sum / count as f64 } else { 0.0 };
                next.corr[i] = r.clamp(-MAX_CORRELATION, MAX_CORRELATION);
            }
        }
    }

    for (i, e) in moments.iter().enumerate() {
        let Some(e) = e else { continue };
        let size = data.partition.size(i);
        let b = ar1_toeplitz(size, next.corr[i]);
        let b_chol = cholesky(&b, "intra-block correlation matrix")?;
        let g = b_chol.solve(e).trace() / size as f64;
        if g.is_finite() && g > 0.0 {
            next.gamma[i] = g;
        } else {
            next.prune(i);
        }
    }

    if opts.lambda_mode == LambdaMode::Learn {
        let m = data.m() as f64;
        let floor = (LAMBDA_FLOOR * data.y.norm_squared() / m).max(f64::MIN_POSITIVE);
        next.lambda = ((stats.resid_sq + stats.trace_term) / m).max(floor);
    }
    Ok(next)
}

/// EM step guarded by the cost: the correlation-learning candidate is kept only if it does
/// not raise the cost, otherwise the fixed-correlation EM step is used.
fn guarded_update(
    hyper: &BsblHyperparams,
    current_cost: f64,
    stats: &PosteriorStats,
    data: Data<'_>,
    opts: &SolverOptions,
) -> Result<(BsblHyperparams, Factorization)> {
    if opts.learn_correlation {
        let cand = m_step(hyper, stats, data, opts, true)?;
        if let Ok(fac) = factorize(&cand, data) {
            if fac.cost <= current_cost {
                return Ok((cand, fac));
            }
        }
    }
    let cand = m_step(hyper, stats, data, opts, false)?;
    let fac = factorize(&cand, data)?;
    Ok((cand, fac))
}

/// Prunes blocks far below the largest scale, unless doing so raises the cost.
fn guarded_prune(
    hyper: BsblHyperparams,
    fac: Factorization,
    data: Data<'_>,
    opts: &SolverOptions,
) -> Result<(BsblHyperparams, Factorization)> {
    let max = hyper.gamma.iter().cloned().fold(0.0, f64::max);
    let cut = opts.prune_threshold * max;
    let doomed: Vec<usize> = (0..hyper.num_blocks())
        .filter(|&i| hyper.active[i] && hyper.gamma[i] < cut)
        .collect();
    if doomed.is_empty() {
        return Ok((hyper, fac));
    }
    let mut pruned = hyper.clone();
    for &i in &doomed {
        pruned.prune(i);
    }
    match factorize(&pruned, data) {
        Ok(pfac) if pfac.cost <= fac.cost => Ok((pruned, pfac)),
        _ => Ok((hyper, fac)),
    }
}

/// Negative log marginal likelihood (up to constants) of `y` under `hyper`.
pub fn compute_cost(hyper: &BsblHyperparams, problem: &SensingProblem) -> Result<f64> {
    hyper.validate(problem.partition())?;
    Ok(factorize(hyper, Data::of(problem))?.cost)
}

/// Posterior mean and covariance of `x` given `hyper`. Rows and columns of pruned blocks are zero.
pub fn posterior_moments(
    hyper: &BsblHyperparams,
    problem: &SensingProblem,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    hyper.validate(problem.partition())?;
    let data = Data::of(problem);
    let fac = factorize(hyper, data)?;
    let l = fac.chol.l();
    let w = l
        .solve_lower_triangular(&fac.phi_sigma)
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let mu_a = fac.phi_sigma.tr_mul(&fac.alpha);
    let partition = problem.partition();

    let cols: Vec<usize> = fac
        .active_blocks
        .iter()
        .flat_map(|&i| partition.range(i))
        .collect();
    let mut sigma0_a = DMatrix::zeros(cols.len(), cols.len());
    let mut at = 0;
    for &i in &fac.active_blocks {
        let size = partition.size(i);
        sigma0_a
            .view_mut((at, at), (size, size))
            .copy_from(&hyper.block_prior(i, size));
        at += size;
    }
    let sigma_a = sigma0_a - w.tr_mul(&w);

    let n = partition.total();
    let mut mu = DVector::zeros(n);
    let mut sigma = DMatrix::zeros(n, n);
    for (a, &p) in cols.iter().enumerate() {
        mu[p] = mu_a[a];
        for (b, &q) in cols.iter().enumerate() {
            sigma[(p, q)] = 0.5 * (sigma_a[(a, b)] + sigma_a[(b, a)]);
        }
    }
    Ok((mu, sigma))
}

/// One guarded EM update from explicit posterior moments.
///
/// The returned hyperparameters never raise [`compute_cost`] beyond rounding:
/// if re-estimating the correlations would, the correlations are left unchanged.
pub fn em_update(
    hyper: &BsblHyperparams,
    mu: &DVector<f64>,
    sigma_x: &DMatrix<f64>,
    problem: &SensingProblem,
    opts: &SolverOptions,
) -> Result<BsblHyperparams> {
    hyper.validate(problem.partition())?;
    let n = problem.n();
    if mu.len() != n || sigma_x.nrows() != n || sigma_x.ncols() != n {
        return Err(Error::Dimension(format!(
            "posterior moments must have length {n} and shape {n}x{n}"
        )));
    }
    let data = Data::of(problem);
    let partition = problem.partition();
    let sigma_blocks = (0..hyper.num_blocks())
        .map(|i| {
            hyper.active[i].then(|| {
                let r = partition.range(i);
                sigma_x.view((r.start, r.start), (r.len(), r.len())).into_owned()
            })
        })
        .collect();
    let resid = problem.y() - problem.phi() * mu;
    let gram = problem.phi().tr_mul(problem.phi());
    let trace_term = sigma_x.component_mul(&gram).sum();
    let stats = PosteriorStats {
        mu: mu.clone(),
        sigma_blocks,
        resid_sq: resid.norm_squared(),
        trace_term,
    };
    let current = factorize(hyper, data)?.cost;
    Ok(guarded_update(hyper, current, &stats, data, opts)?.0)
}

/// Recovers a block-sparse `x` from `y = Phi x + noise`.
///
/// Runs in the frame where `||y|| = 1` (scales and noise variance rescale
/// accordingly), so the result is covariant under `y -> c y`. Outputs are
/// reported in the caller's frame.
pub fn bsbl_solve(problem: &SensingProblem, opts: &SolverOptions) -> Result<SolverResult> {
    opts.validate()?;
    let partition = problem.partition();
    let k = partition.num_blocks();
    let m = problem.m();
    let scale = problem.y().norm();

    if scale == 0.0 {
        let (lambda, cost) = match opts.lambda_mode {
            LambdaMode::Fixed(l) => (l, m as f64 * l.ln()),
            LambdaMode::Learn => (f64::MIN_POSITIVE, f64::NEG_INFINITY),
        };
        return Ok(SolverResult {
            x_hat: DVector::zeros(problem.n()),
            gamma: vec![0.0; k],
            iterations: 0,
            final_cost: cost,
            converged: true,
            cost_trace: vec![cost],
            hyper: Some(BsblHyperparams {
                gamma: vec![0.0; k],
                corr: vec![0.0; k],
                lambda,
                active: vec![false; k],
            }),
            rho: None,
            kkt_residual: None,
        });
    }

    let y_unit = problem.y() / scale;
    let data = Data {
        phi: problem.phi(),
        y: &y_unit,
        partition,
    };
    let scale_sq = scale * scale;
    // Cost in the caller's frame differs by the constant m log(scale^2).
    let offset = m as f64 * scale_sq.ln();

    let mut hyper = BsblHyperparams {
        gamma: vec![1.0; k],
        corr: vec![0.0; k],
        lambda: match opts.lambda_mode {
            LambdaMode::Fixed(l) => l / scale_sq,
            LambdaMode::Learn => 0.01 / m as f64,
        },
        active: vec![true; k],
    };
    let mut fac = factorize(&hyper, data)?;
    let mut trace = vec![fac.cost + offset];
    let mut prev_mu: Option<DVector<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;

    let stats = loop {
        let stats = posterior_stats(&hyper, &fac, data)?;
        if let Some(prev) = &prev_mu {
            let change = (&stats.mu - prev).norm();
            if change <= opts.convergence_tol * stats.mu.norm() {
                converged = true;
                break stats;
            }
        }
        if iterations == opts.max_iters {
            break stats;
        }

        let (next, next_fac) = guarded_update(&hyper, fac.cost, &stats, data, opts)?;
        let (next, next_fac) = guarded_prune(next, next_fac, data, opts)?;
        iterations += 1;

        let previous = *trace.last().expect("trace starts non-empty");
        let current = next_fac.cost + offset;
        if current > previous + COST_SLACK * previous.abs() {
            if current <= previous + STALL_SLACK * previous.abs() {
                log::debug!("bsbl stalled at iteration {iterations}: cost {previous:.12e} -> {current:.12e}");
                iterations -= 1;
                converged = true;
                break stats;
            }
            trace.push(current);
            return Err(Error::Divergence {
                iteration: iterations,
                previous,
                current,
                trace,
            });
        }
        trace.push(current);
        log::trace!("bsbl iter {iterations}: cost {current:.12e}, active {}", next_fac.active_blocks.len());

        hyper = next;
        fac = next_fac;
        prev_mu = Some(stats.mu);
    };

    let out_hyper = hyper.scaled(scale_sq);
    Ok(SolverResult {
        x_hat: stats.mu * scale,
        gamma: out_hyper.gamma.clone(),
        iterations,
        final_cost: fac.cost + offset,
        converged,
        cost_trace: trace,
        hyper: Some(out_hyper),
        rho: None,
        kkt_residual: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_problem() -> SensingProblem {
        let mut y = DVector::zeros(8);
        y[2] = 1.0;
        y[3] = 1.0;
        SensingProblem::new(DMatrix::identity(8, 8), y, BlockPartition::uniform(4, 2).unwrap()).unwrap()
    }

    #[test]
    fn zero_data_prunes_everything() {
        let phi = DMatrix::from_fn(5, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let p = SensingProblem::new(phi, DVector::zeros(5), BlockPartition::uniform(3, 2).unwrap()).unwrap();
        let r = bsbl_solve(&p, &SolverOptions::default()).unwrap();
        assert!(r.x_hat.iter().all(|v| *v == 0.0));
        assert!(r.hyper.unwrap().active.iter().all(|a| !a));
    }

    #[test]
    fn identity_dictionary_recovers_single_block() {
        let p = identity_problem();
        let opts = SolverOptions {
            lambda_mode: LambdaMode::Fixed(1e-10),
            ..Default::default()
        };
        let r = bsbl_solve(&p, &opts).unwrap();
        let err = (&r.x_hat - p.y()).norm() / p.y().norm();
        assert!(err < 1e-4, "relative error {err}");
        assert_eq!(r.support(p.partition()), vec![1]);
        let h = r.hyper.unwrap();
        assert_eq!(h.active, vec![false, true, false, false]);
    }

    #[test]
    fn zero_prior_cost_is_data_energy() {
        let phi = DMatrix::from_fn(4, 4, |i, j| (i + 2 * j) as f64);
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5, 0.0]);
        let p = SensingProblem::new(phi, y, BlockPartition::uniform(2, 2).unwrap()).unwrap();
        let h = BsblHyperparams {
            gamma: vec![0.0, 0.0],
            corr: vec![0.0, 0.0],
            lambda: 1.0,
            active: vec![false, false],
        };
        assert!((compute_cost(&h, &p).unwrap() - 5.25).abs() < 1e-14);
        let zero = p.with_y(DVector::zeros(4)).unwrap();
        assert_eq!(compute_cost(&h, &zero).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_prior_gives_zero_posterior() {
        let p = identity_problem();
        let h = BsblHyperparams {
            gamma: vec![0.0; 4],
            corr: vec![0.0; 4],
            lambda: 1.0,
            active: vec![false; 4],
        };
        let (mu, sigma) = posterior_moments(&h, &p).unwrap();
        assert!(mu.iter().all(|v| *v == 0.0));
        assert!(sigma.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn wiener_identity() {
        let p = identity_problem();
        let h = BsblHyperparams {
            gamma: vec![1.0; 4],
            corr: vec![0.0; 4],
            lambda: 1.0,
            active: vec![true; 4],
        };
        let (mu, sigma) = posterior_moments(&h, &p).unwrap();
        assert!((&mu - p.y() * 0.5).amax() < 1e-14);
        assert!((&sigma - DMatrix::<f64>::identity(8, 8) * 0.5).amax() < 1e-14);
    }

    #[test]
    fn zero_second_moment_prunes_block() {
        let p = identity_problem();
        let h = BsblHyperparams::initial(&p, &SolverOptions::default());
        let mut mu = DVector::zeros(8);
        mu[2] = 1.0;
        mu[3] = 1.0;
        let mut sigma = DMatrix::zeros(8, 8);
        for i in 2..4 {
            sigma[(i, i)] = 0.1;
        }
        let next = em_update(&h, &mu, &sigma, &p, &SolverOptions::default()).unwrap();
        assert_eq!(next.gamma[0], 0.0);
        assert!(!next.active[0]);
        assert!(next.gamma[1] > 0.0);
    }

    #[test]
    fn rejects_inconsistent_hyperparameters() {
        let p = identity_problem();
        let mut h = BsblHyperparams::initial(&p, &SolverOptions::default());
        h.gamma[0] = 0.0;
        assert!(compute_cost(&h, &p).is_err());
        let mut h = BsblHyperparams::initial(&p, &SolverOptions::default());
        h.corr[1] = 1.0;
        assert!(compute_cost(&h, &p).is_err());
    }
}
