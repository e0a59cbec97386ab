//! Block-sparse recovery and sparse-representation classification.
//!
//! * [`solver`]: block sparse Bayesian learning, l1 / block-l1 baselines and an exhaustive oracle.
//! * [`classifier`]: residual-rule classification over a class-blocked dictionary.
//! * [`features`]: downsampling, Eigenfaces and Laplacianfaces extractors.
//! * [`data_io`]: image datasets, synthetic generators, corruption and splitting.
//! * [`bench`]: configuration-driven experiment grids and report output.

pub mod error;
pub mod linalg;
pub mod rng;
pub mod bench;
pub mod classifier;
pub mod data_io;
pub mod features;
pub mod solver;

pub use error::{Error, Result};
