//! Sparse-representation classification and classical baselines.

mod baselines;
mod dictionary;
mod src;

pub use baselines::{nn_classify, ns_classify, NearestSubspace, NsPrediction};
pub use dictionary::{build_dictionary, class_restrict, AugmentedDictionary, ClassLabel, Dictionary};
pub use src::{classify, classify_augmented, classify_robust, ClassificationResult};
