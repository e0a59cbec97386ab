use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::dataset::{DatasetSource, FaceDataset};
use crate::error::{Error, Result};
use crate::features::ImageMatrix;
use crate::rng::SeededRng;

/// Number of cosine modes per axis in the generated smooth fields.
const MODES: usize = 6;
/// Scale of the in-class directions relative to the class origins.
const SPREAD: f64 = 0.35;
/// Noise-free images fill `[MARGIN, 255 - MARGIN]`, leaving headroom for noise.
const MARGIN: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub classes: usize,
    pub per_class: usize,
    pub height: usize,
    pub width: usize,
    pub subspace_dim: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 || self.per_class == 0 {
            return Err(Error::InvalidInput("classes and per_class must be positive".into()));
        }
        if self.height == 0 || self.width == 0 {
            return Err(Error::InvalidInput("image dimensions must be positive".into()));
        }
        if self.subspace_dim == 0 || self.subspace_dim > self.height * self.width {
            return Err(Error::InvalidInput(format!(
                "subspace_dim {} must be in [1, {}]",
                self.subspace_dim,
                self.height * self.width
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("noise_sigma {} must be >= 0", self.noise_sigma)));
        }
        Ok(())
    }
}

/// Random low-frequency image: a sum of separable cosines with decaying amplitudes.
fn smooth_field(rng: &mut SeededRng, h: usize, w: usize) -> DVector<f64> {
    let mut field = DVector::zeros(h * w);
    for a in 0..MODES {
        for b in 0..MODES {
            let g = rng.normal() / (1.0 + (a + b) as f64);
            for r in 0..h {
                let cr = (PI * a as f64 * (r as f64 + 0.5) / h as f64).cos();
                for c in 0..w {
                    field[r * w + c] += g * cr * (PI * b as f64 * (c as f64 + 0.5) / w as f64).cos();
                }
            }
        }
    }
    field
}

/// Classes drawn from random smooth affine subspaces, rescaled to grey levels,
/// plus isotropic Gaussian pixel noise of `noise_sigma` grey levels.
pub fn synth_dataset(spec: &SynthSpec) -> Result<FaceDataset> {
    spec.validate()?;
    let (h, w) = (spec.height, spec.width);
    let mut rng = SeededRng::new(spec.seed);
    let mut raw = Vec::with_capacity(spec.classes * spec.per_class);
    for _ in 0..spec.classes {
        let origin = smooth_field(&mut rng, h, w);
        let basis: Vec<_> = (0..spec.subspace_dim).map(|_| smooth_field(&mut rng, h, w) * SPREAD).collect();
        for _ in 0..spec.per_class {
            let mut x = origin.clone();
            for b in &basis {
                x.axpy(rng.normal(), b, 1.0);
            }
            raw.push(x);
        }
    }
    let lo = raw.iter().flat_map(|x| x.iter()).cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().flat_map(|x| x.iter()).cloned().fold(f64::NEG_INFINITY, f64::max);
    let (scale, shift) = if hi > lo {
        let s = (255.0 - 2.0 * MARGIN) / (hi - lo);
        (s, MARGIN - lo * s)
    } else {
        (0.0, 127.5)
    };

    let mut images = Vec::with_capacity(raw.len());
    let mut labels = Vec::with_capacity(raw.len());
    let mut ids = Vec::with_capacity(raw.len());
    for (i, x) in raw.iter().enumerate() {
        let pixels = x.iter().map(|v| v * scale + shift + spec.noise_sigma * rng.normal()).collect();
        let class = i / spec.per_class;
        images.push(ImageMatrix::new(h, w, pixels)?);
        labels.push(class);
        ids.push(format!("{}/img_{:03}", class_name(class), i % spec.per_class));
    }
    let names = (0..spec.classes).map(class_name).collect();
    FaceDataset::new(images, labels, names, ids, DatasetSource::Synthetic(spec.clone()))
}

fn class_name(class: usize) -> String {
    format!("class_{class:03}")
}
