//! Image feature extraction: area-average downsampling, Eigenfaces (PCA) and
//! Laplacianfaces (LPP).

mod downsample;
mod extractor;
mod image;
mod lpp;

pub use downsample::{downsample, resample};
pub use extractor::{eigenfaces_fit, ExtractorKind, FeatureExtractor, LinearModel};
pub use image::ImageMatrix;
pub use lpp::{lpp_fit, LppDiagnostics, LppParams};
