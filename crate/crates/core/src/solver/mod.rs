//! Sparse and block-sparse recovery solvers.

mod bsbl;
mod options;
mod oracle;
mod partition;
mod problem;
mod prox;

pub use bsbl::{bsbl_solve, compute_cost, em_update, posterior_moments, BsblHyperparams, COST_SLACK, MAX_CORRELATION, STALL_SLACK};
pub use options::{LambdaMode, SolverOptions, SolverResult};
pub use oracle::{brute_force_oracle, OracleSolution, MAX_CANDIDATES};
pub use partition::BlockPartition;
pub use problem::SensingProblem;
pub use prox::{block_l1_penalized, block_l1_solve, l1_penalized, l1_solve, EQUALITY_RHO_FRACTION};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Which recovery algorithm backs a classifier or CLI run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Bsbl,
    L1,
    BlockL1,
}

impl SolverKind {
    pub fn solve(self, problem: &SensingProblem, opts: &SolverOptions) -> Result<SolverResult> {
        match self {
            SolverKind::Bsbl => bsbl_solve(problem, opts),
            SolverKind::L1 => l1_solve(problem, opts),
            SolverKind::BlockL1 => block_l1_solve(problem, opts),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Bsbl => "bsbl",
            SolverKind::L1 => "l1",
            SolverKind::BlockL1 => "block_l1",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bsbl" => Ok(SolverKind::Bsbl),
            "l1" | "src" => Ok(SolverKind::L1),
            "block_l1" | "bsco" => Ok(SolverKind::BlockL1),
            other => Err(crate::Error::InvalidInput(format!("unknown solver '{other}'"))),
        }
    }
}
