use nalgebra::DVector;

use crate::error::{Error, Result};

/// Grayscale image with values clamped to `[0, 255]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMatrix {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl ImageMatrix {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Dimension(format!("image dimensions {height}x{width} must be positive")));
        }
        if pixels.len() != height * width {
            return Err(Error::Dimension(format!(
                "{} pixels given for a {height}x{width} image",
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite pixel value {bad}")));
        }
        Ok(Self {
            height,
            width,
            pixels: pixels.into_iter().map(|v| v.clamp(0.0, 255.0)).collect(),
        })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(height, width, pixels)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Sets a pixel, clamping into `[0, 255]`.
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.pixels[row * self.width + col] = value.clamp(0.0, 255.0);
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Row-major flattening.
    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.pixels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_and_flattens_row_major() {
        let img = ImageMatrix::new(2, 2, vec![-5.0, 10.0, 300.0, 1.0]).unwrap();
        assert_eq!(img.pixels(), &[0.0, 10.0, 255.0, 1.0]);
        assert_eq!(img.get(1, 0), 255.0);
        assert_eq!(img.as_vector().as_slice(), &[0.0, 10.0, 255.0, 1.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ImageMatrix::new(0, 2, vec![]).is_err());
        assert!(ImageMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(ImageMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }
}
