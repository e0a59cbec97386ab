use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lpp::{LppDiagnostics, LppParams};
use super::{downsample, ImageMatrix};
use crate::error::{Error, Result};
use crate::linalg::fix_column_signs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractorKind {
    Downsample { height: usize, width: usize },
    Eigenfaces { dim: usize },
    Laplacianfaces(LppParams),
}

impl ExtractorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExtractorKind::Downsample { .. } => "downsample",
            ExtractorKind::Eigenfaces { .. } => "eigenfaces",
            ExtractorKind::Laplacianfaces(_) => "laplacianfaces",
        }
    }

    /// Output dimension as `(h, w)`; projections report `(d, 1)`.
    pub fn output_dims(&self) -> (usize, usize) {
        match self {
            ExtractorKind::Downsample { height, width } => (*height, *width),
            ExtractorKind::Eigenfaces { dim } => (*dim, 1),
            ExtractorKind::Laplacianfaces(p) => (p.dim, 1),
        }
    }
}

/// Learned centering and projection, `features = projection * (x - mean)`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub mean: DVector<f64>,
    /// `d x D`.
    pub projection: DMatrix<f64>,
    /// Sample covariance eigenvalues of the PCA stage, descending.
    pub pca_eigenvalues: Vec<f64>,
    pub lpp: Option<LppDiagnostics>,
}

impl LinearModel {
    /// Fraction of total sample variance captured by the leading `d` PCA components.
    pub fn explained_variance_ratio(&self, d: usize) -> f64 {
        let total: f64 = self.pca_eigenvalues.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        self.pca_eigenvalues.iter().take(d).sum::<f64>() / total
    }
}

#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    kind: ExtractorKind,
    source_dims: Option<(usize, usize)>,
    model: Option<LinearModel>,
}

impl FeatureExtractor {
    /// An extractor awaiting `fit`. Downsampling needs no training but must know
    /// the source image size before it can accept flat vectors.
    pub fn new(kind: ExtractorKind) -> Self {
        Self { kind, source_dims: None, model: None }
    }

    pub fn downsample(source: (usize, usize), height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 || height > source.0 || width > source.1 {
            return Err(Error::Dimension(format!(
                "cannot downsample {}x{} to {height}x{width}",
                source.0, source.1
            )));
        }
        Ok(Self {
            kind: ExtractorKind::Downsample { height, width },
            source_dims: Some(source),
            model: None,
        })
    }

    /// Fits on training images of a common size.
    pub fn fit_images(kind: ExtractorKind, images: &[ImageMatrix]) -> Result<Self> {
        let dims = images
            .first()
            .map(|i| i.dims())
            .ok_or_else(|| Error::InvalidInput("no training images".into()))?;
        if let Some(bad) = images.iter().position(|i| i.dims() != dims) {
            return Err(Error::Dimension(format!(
                "training image {bad} is {:?}, expected {:?}",
                images[bad].dims(),
                dims
            )));
        }
        let mut fitted = match &kind {
            ExtractorKind::Downsample { height, width } => return Self::downsample(dims, *height, *width),
            ExtractorKind::Eigenfaces { dim } => {
                let vectors: Vec<_> = images.iter().map(|i| i.as_vector()).collect();
                eigenfaces_fit(&vectors, *dim)?
            }
            ExtractorKind::Laplacianfaces(params) => {
                let vectors: Vec<_> = images.iter().map(|i| i.as_vector()).collect();
                super::lpp_fit(&vectors, params)?
            }
        };
        fitted.source_dims = Some(dims);
        Ok(fitted)
    }

    pub(crate) fn from_model(kind: ExtractorKind, model: LinearModel) -> Self {
        Self { kind, source_dims: None, model: Some(model) }
    }

    pub fn kind(&self) -> &ExtractorKind {
        &self.kind
    }

    pub fn model(&self) -> Option<&LinearModel> {
        self.model.as_ref()
    }

    pub fn is_fitted(&self) -> bool {
        match self.kind {
            ExtractorKind::Downsample { .. } => true,
            _ => self.model.is_some(),
        }
    }

    pub fn output_len(&self) -> usize {
        let (h, w) = self.kind.output_dims();
        h * w
    }

    pub fn transform(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.kind {
            ExtractorKind::Downsample { height, width } => {
                let (h, w) = self.source_dims.ok_or_else(|| {
                    Error::InvalidInput("downsample of a flat vector needs the source image size".into())
                })?;
                if x.len() != h * w {
                    return Err(Error::Dimension(format!("input length {} != {h}x{w}", x.len())));
                }
                downsample(&ImageMatrix::new(h, w, x.as_slice().to_vec())?, *height, *width)
            }
            _ => {
                let model = self.model.as_ref().ok_or(Error::NotFitted)?;
                if x.len() != model.mean.len() {
                    return Err(Error::Dimension(format!(
                        "input length {} != fitted dimension {}",
                        x.len(),
                        model.mean.len()
                    )));
                }
                Ok(&model.projection * (x - &model.mean))
            }
        }
    }

    pub fn transform_image(&self, img: &ImageMatrix) -> Result<DVector<f64>> {
        if let Some(dims) = self.source_dims {
            if img.dims() != dims {
                return Err(Error::Dimension(format!("image is {:?}, extractor expects {:?}", img.dims(), dims)));
            }
        }
        match &self.kind {
            ExtractorKind::Downsample { height, width } => downsample(img, *height, *width),
            _ => self.transform(&img.as_vector()),
        }
    }
}

pub(crate) fn stack_columns(train: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let dim = train
        .first()
        .map(|v| v.len())
        .ok_or_else(|| Error::InvalidInput("no training vectors".into()))?;
    if dim == 0 {
        return Err(Error::Dimension("training vectors are empty".into()));
    }
    if let Some(bad) = train.iter().position(|v| v.len() != dim) {
        return Err(Error::Dimension(format!(
            "training vector {bad} has length {}, expected {dim}",
            train[bad].len()
        )));
    }
    if !train.iter().all(|v| crate::linalg::all_finite(v.iter())) {
        return Err(Error::InvalidInput("training vectors contain non-finite values".into()));
    }
    Ok(DMatrix::from_columns(train))
}

/// Principal components of the training set: mean, `D x d` basis (sign-fixed)
/// and all sample covariance eigenvalues, descending.
pub(crate) fn principal_components(
    train: &[DVector<f64>],
    d: usize,
) -> Result<(DVector<f64>, DMatrix<f64>, Vec<f64>)> {
    let x = stack_columns(train)?;
    let (dim, n) = x.shape();
    let max = dim.min(n.saturating_sub(1));
    if d == 0 || d > max {
        return Err(Error::Dimension(format!(
            "{d} components requested, at most min(D={dim}, N-1={}) = {max} available",
            n.saturating_sub(1)
        )));
    }
    let mean = x.column_mean();
    let mut centered = x;
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }
    let svd = centered.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut basis = u.columns(0, d).into_owned();
    fix_column_signs(&mut basis);
    let eigenvalues = svd.singular_values.iter().map(|s| s * s / (n - 1) as f64).collect();
    Ok((mean, basis, eigenvalues))
}

/// Eigenfaces: projection onto the top `d` principal components.
pub fn eigenfaces_fit(train: &[DVector<f64>], d: usize) -> Result<FeatureExtractor> {
    let (mean, basis, eigenvalues) = principal_components(train, d)?;
    Ok(FeatureExtractor::from_model(
        ExtractorKind::Eigenfaces { dim: d },
        LinearModel { mean, projection: basis.transpose(), pca_eigenvalues: eigenvalues, lpp: None },
    ))
}
