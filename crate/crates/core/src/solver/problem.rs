use nalgebra::{DMatrix, DVector};

use super::BlockPartition;
use crate::error::{Error, Result};
use crate::linalg::all_finite;

/// `y = phi * x + noise` with `x` block-structured according to `partition`.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct SensingProblem {
    phi: DMatrix<f64>,
    y: DVector<f64>,
    partition: BlockPartition,
}

impl SensingProblem {
    pub fn new(phi: DMatrix<f64>, y: DVector<f64>, partition: BlockPartition) -> Result<Self> {
        if phi.nrows() == 0 || phi.ncols() == 0 {
            return Err(Error::Dimension("empty sensing matrix".into()));
        }
        if phi.ncols() != partition.total() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns but partition covers {}",
                phi.ncols(),
                partition.total()
            )));
        }
        if y.len() != phi.nrows() {
            return Err(Error::Dimension(format!(
                "measurement length {} does not match {} matrix rows",
                y.len(),
                phi.nrows()
            )));
        }
        if !all_finite(phi.iter()) || !all_finite(y.iter()) {
            return Err(Error::InvalidInput("non-finite value in problem data".into()));
        }
        Ok(Self { phi, y, partition })
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        self.phi.nrows()
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.phi.ncols()
    }

    /// Same matrix and partition with a different measurement vector.
    pub fn with_y(&self, y: DVector<f64>) -> Result<Self> {
        Self::new(self.phi.clone(), y, self.partition.clone())
    }
}
