//! l1 and block-l1 baselines.
//!
//! Both solve a penalized least-squares problem
//! `min 0.5 ||y - Phi x||^2 + rho * P(x)` with accelerated proximal gradient
//! (FISTA with gradient-based restart), where `P` is `||x||_1` or
//! `sum_j ||x_j||_2`. The residual-constrained form
//! `min P(x) s.t. ||y - Phi x|| <= epsilon` is reached by bisecting on `rho`.

use nalgebra::{DMatrix, DVector};

use super::{BlockPartition, SensingProblem, SolverOptions, SolverResult};
use crate::error::Result;

/// Penalty weight used for `epsilon = 0`, relative to the null threshold.
pub const EQUALITY_RHO_FRACTION: f64 = 1e-6;
const BISECTION_STEPS: usize = 20;
const KKT_CHECK_EVERY: usize = 10;
const CONTINUATION_RATIO: f64 = 0.1;
const CONTINUATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
enum Penalty<'a> {
    L1,
    Group(&'a BlockPartition),
}

impl Penalty<'_> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            Penalty::L1 => x.lp_norm(1),
            Penalty::Group(p) => p.ranges().map(|r| x.rows(r.start, r.len()).norm()).sum(),
        }
    }

    /// Proximal operator of `t * P`, applied in place.
    fn prox(&self, x: &mut DVector<f64>, t: f64) {
        match self {
            Penalty::L1 => {
                for v in x.iter_mut() {
                    *v = v.signum() * (v.abs() - t).max(0.0);
                }
            }
            Penalty::Group(p) => {
                for r in p.ranges() {
                    let mut block = x.rows_mut(r.start, r.len());
                    let norm = block.norm();
                    if norm <= t {
                        block.fill(0.0);
                    } else {
                        block *= 1.0 - t / norm;
                    }
                }
            }
        }
    }

    /// Smallest `rho` for which `x = 0` is optimal.
    fn null_threshold(&self, correlation: &DVector<f64>) -> f64 {
        match self {
            Penalty::L1 => correlation.amax(),
            Penalty::Group(p) => p
                .ranges()
                .map(|r| correlation.rows(r.start, r.len()).norm())
                .fold(0.0, f64::max),
        }
    }

    /// Largest violation of the optimality conditions, given the gradient `g` of the smooth part.
    fn kkt_violation(&self, x: &DVector<f64>, g: &DVector<f64>, rho: f64) -> f64 {
        match self {
            Penalty::L1 => x
                .iter()
                .zip(g.iter())
                .map(|(&xi, &gi)| {
                    if xi != 0.0 {
                        (gi + rho * xi.signum()).abs()
                    } else {
                        (gi.abs() - rho).max(0.0)
                    }
                })
                .fold(0.0, f64::max),
            Penalty::Group(p) => p
                .ranges()
                .map(|r| {
                    let xb = x.rows(r.start, r.len());
                    let gb = g.rows(r.start, r.len());
                    let norm = xb.norm();
                    if norm > 0.0 {
                        (gb + xb * (rho / norm)).norm()
                    } else {
                        (gb.norm() - rho).max(0.0)
                    }
                })
                .fold(0.0, f64::max),
        }
    }
}

/// Precomputed quantities shared across penalty values on one problem.
struct Smooth {
    gram: DMatrix<f64>,
    correlation: DVector<f64>,
    lipschitz: f64,
    y_sq: f64,
}

impl Smooth {
    fn new(problem: &SensingProblem) -> Self {
        let phi = problem.phi();
        let gram = phi.tr_mul(phi);
        let correlation = phi.tr_mul(problem.y());
        let small = if phi.nrows() < phi.ncols() {
            phi * phi.transpose()
        } else {
            gram.clone()
        };
        let lipschitz = small.symmetric_eigenvalues().max().max(f64::MIN_POSITIVE);
        Self {
            gram,
            correlation,
            lipschitz,
            y_sq: problem.y().norm_squared(),
        }
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.gram * x - &self.correlation
    }

    /// `||y - Phi x||^2` without touching `Phi`.
    fn residual_sq(&self, x: &DVector<f64>) -> f64 {
        (self.y_sq - 2.0 * self.correlation.dot(x) + x.dot(&(&self.gram * x))).max(0.0)
    }
}

struct PenalizedOutcome {
    x: DVector<f64>,
    iterations: usize,
    converged: bool,
    kkt: f64,
    trace: Vec<f64>,
}

/// Solves at `rho` by continuation: geometric steps down from the null threshold, each stage
/// warm-started and solved loosely, then the target solved to full tolerance.
fn solve_penalized(
    smooth: &Smooth,
    penalty: Penalty<'_>,
    rho: f64,
    start: DVector<f64>,
    opts: &SolverOptions,
) -> PenalizedOutcome {
    let rho_max = penalty.null_threshold(&smooth.correlation);
    let mut x = start;
    let mut used = 0;
    if rho > 0.0 && rho < CONTINUATION_RATIO * rho_max && x.iter().all(|v| *v == 0.0) {
        let mut stage = CONTINUATION_RATIO * rho_max;
        while stage > rho && used < opts.baseline_max_iters {
            let out = fista(smooth, penalty, stage, x, CONTINUATION_TOL, opts.baseline_max_iters - used);
            used += out.iterations;
            x = out.x;
            stage *= CONTINUATION_RATIO;
        }
    }
    let budget = opts.baseline_max_iters.saturating_sub(used).max(1);
    let mut out = fista(smooth, penalty, rho, x, opts.kkt_tol, budget);
    out.iterations += used;
    out
}

/// KKT violation relative to the penalty weight (absolute when `rho = 0`).
fn kkt_measure(smooth: &Smooth, penalty: Penalty<'_>, x: &DVector<f64>, rho: f64) -> f64 {
    let v = penalty.kkt_violation(x, &smooth.gradient(x), rho);
    if rho > 0.0 {
        v / rho
    } else {
        v
    }
}

fn fista(
    smooth: &Smooth,
    penalty: Penalty<'_>,
    rho: f64,
    start: DVector<f64>,
    tol: f64,
    max_iters: usize,
) -> PenalizedOutcome {
    let step = 1.0 / smooth.lipschitz;
    let objective = |x: &DVector<f64>| 0.5 * smooth.residual_sq(x) + rho * penalty.value(x);

    let mut x = start;
    let mut z = x.clone();
    let mut t = 1.0_f64;
    let mut trace = Vec::new();
    let mut kkt = kkt_measure(smooth, penalty, &x, rho);
    if kkt <= tol {
        return PenalizedOutcome {
            trace: vec![objective(&x)],
            x,
            iterations: 0,
            converged: true,
            kkt,
        };
    }

    for iter in 1..=max_iters {
        let mut next = &z - smooth.gradient(&z) * step;
        penalty.prox(&mut next, rho * step);

        let restart = (&z - &next).dot(&(&next - &x)) > 0.0;
        let t_next = if restart {
            1.0
        } else {
            0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
        };
        z = if restart {
            next.clone()
        } else {
            &next + (&next - &x) * ((t - 1.0) / t_next)
        };
        t = t_next;
        x = next;

        if iter % KKT_CHECK_EVERY == 0 || iter == max_iters {
            trace.push(objective(&x));
            kkt = kkt_measure(smooth, penalty, &x, rho);
            if kkt <= tol {
                return PenalizedOutcome {
                    x,
                    iterations: iter,
                    converged: true,
                    kkt,
                    trace,
                };
            }
        }
    }
    PenalizedOutcome {
        x,
        iterations: max_iters,
        converged: false,
        kkt,
        trace,
    }
}

/// `min_x ||y - Phi x||`, from the left singular vectors of `Phi`.
fn least_squares_residual(problem: &SensingProblem) -> f64 {
    let svd = problem.phi().clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.max();
    let tol = top * f64::EPSILON * problem.m().max(problem.n()) as f64;
    let y = problem.y();
    let explained: f64 = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol)
        .map(|(i, _)| u.column(i).dot(y).powi(2))
        .sum();
    (y.norm_squared() - explained).max(0.0).sqrt()
}

fn solve_constrained(problem: &SensingProblem, opts: &SolverOptions, penalty: Penalty<'_>) -> Result<SolverResult> {
    opts.validate()?;
    let smooth = Smooth::new(problem);
    let n = problem.n();
    let rho_max = penalty.null_threshold(&smooth.correlation);
    let finish = |out: PenalizedOutcome, rho: f64, iterations: usize| -> SolverResult {
        let cost = 0.5 * smooth.residual_sq(&out.x) + rho * penalty.value(&out.x);
        SolverResult {
            gamma: problem
                .partition()
                .ranges()
                .map(|r| out.x.rows(r.start, r.len()).norm())
                .collect(),
            x_hat: out.x,
            iterations,
            final_cost: cost,
            converged: out.converged,
            cost_trace: out.trace,
            hyper: None,
            rho: Some(rho),
            kkt_residual: Some(out.kkt),
        }
    };

    if rho_max == 0.0 {
        let out = solve_penalized(&smooth, penalty, 0.0, DVector::zeros(n), opts);
        return Ok(finish(out, 0.0, 0));
    }

    let eps = opts.epsilon;
    if eps == 0.0 {
        let rho = EQUALITY_RHO_FRACTION * rho_max;
        let out = solve_penalized(&smooth, penalty, rho, DVector::zeros(n), opts);
        let iters = out.iterations;
        return Ok(finish(out, rho, iters));
    }

    if smooth.y_sq.sqrt() <= eps {
        // x = 0 already meets the residual bound.
        let out = solve_penalized(&smooth, penalty, rho_max, DVector::zeros(n), opts);
        return Ok(finish(out, rho_max, 0));
    }

    // Residual norm grows monotonically with rho; bisect in log scale.
    let (mut lo, mut hi) = (EQUALITY_RHO_FRACTION * rho_max, rho_max);
    if least_squares_residual(problem) > 1.1 * eps {
        // No x reaches the bound; take the smallest penalty, which comes closest.
        let out = solve_penalized(&smooth, penalty, lo, DVector::zeros(n), opts);
        let iters = out.iterations;
        return Ok(finish(out, lo, iters));
    }
    let loose = SolverOptions {
        kkt_tol: opts.kkt_tol.max(CONTINUATION_TOL),
        ..opts.clone()
    };
    let mut warm = DVector::zeros(n);
    let mut total_iters = 0;
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for _ in 0..BISECTION_STEPS {
        let rho = (lo * hi).sqrt();
        let out = solve_penalized(&smooth, penalty, rho, warm.clone(), &loose);
        total_iters += out.iterations;
        let resid = smooth.residual_sq(&out.x).sqrt();
        warm = out.x.clone();
        let in_band = (0.9 * eps..=1.1 * eps).contains(&resid);
        if resid <= 1.1 * eps {
            let better = best
                .as_ref()
                .map_or(true, |(_, r, _)| (resid - eps).abs() < (*r - eps).abs());
            if better {
                best = Some((rho, resid, out.x));
            }
        }
        if in_band {
            break;
        }
        if resid > 1.1 * eps {
            hi = rho;
        } else {
            lo = rho;
        }
    }
    let (rho, start) = match best {
        Some((rho, _, x)) => (rho, x),
        None => (lo, warm),
    };
    let out = solve_penalized(&smooth, penalty, rho, start, opts);
    total_iters += out.iterations;
    Ok(finish(out, rho, total_iters))
}

/// Noise-tolerant l1 minimization, `min ||x||_1 s.t. ||y - Phi x|| <= epsilon`.
pub fn l1_solve(problem: &SensingProblem, opts: &SolverOptions) -> Result<SolverResult> {
    solve_constrained(problem, opts, Penalty::L1)
}

/// Mixed l2/l1 minimization over the problem's blocks,
/// `min sum_j ||x_j||_2 s.t. ||y - Phi x|| <= epsilon`.
pub fn block_l1_solve(problem: &SensingProblem, opts: &SolverOptions) -> Result<SolverResult> {
    solve_constrained(problem, opts, Penalty::Group(problem.partition()))
}

/// Penalized lasso at a fixed `rho`.
pub fn l1_penalized(problem: &SensingProblem, rho: f64, opts: &SolverOptions) -> Result<SolverResult> {
    penalized(problem, rho, opts, Penalty::L1)
}

/// Penalized group lasso at a fixed `rho`.
pub fn block_l1_penalized(problem: &SensingProblem, rho: f64, opts: &SolverOptions) -> Result<SolverResult> {
    penalized(problem, rho, opts, Penalty::Group(problem.partition()))
}

fn penalized(problem: &SensingProblem, rho: f64, opts: &SolverOptions, penalty: Penalty<'_>) -> Result<SolverResult> {
    opts.validate()?;
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(crate::Error::InvalidInput(format!("penalty weight {rho} must be >= 0")));
    }
    let smooth = Smooth::new(problem);
    let out = solve_penalized(&smooth, penalty, rho, DVector::zeros(problem.n()), opts);
    let cost = 0.5 * smooth.residual_sq(&out.x) + rho * penalty.value(&out.x);
    Ok(SolverResult {
        gamma: problem
            .partition()
            .ranges()
            .map(|r| out.x.rows(r.start, r.len()).norm())
            .collect(),
        x_hat: out.x,
        iterations: out.iterations,
        final_cost: cost,
        converged: out.converged,
        cost_trace: out.trace,
        hyper: None,
        rho: Some(rho),
        kkt_residual: Some(out.kkt),
    })
}
