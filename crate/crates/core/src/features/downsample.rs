//! Area-average resampling.

use nalgebra::{DMatrix, DVector};

use super::ImageMatrix;
use crate::error::{Error, Result};

/// Resampling weights along one axis, `dst x src`, rows summing to 1.
///
/// Shrinking averages over each destination cell's footprint with fractional
/// coverage of partially covered source cells. Growing picks the nearest
/// source cell to each destination cell centre.
fn axis_weights(src: usize, dst: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(dst, src);
    if dst <= src {
        let ratio = src as f64 / dst as f64;
        for i in 0..dst {
            let lo = i as f64 * ratio;
            let hi = (i + 1) as f64 * ratio;
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(src);
            for p in first..last {
                let overlap = (hi.min(p as f64 + 1.0) - lo.max(p as f64)).max(0.0);
                w[(i, p)] = overlap / ratio;
            }
        }
    } else {
        let ratio = src as f64 / dst as f64;
        for i in 0..dst {
            let p = (((i as f64 + 0.5) * ratio).floor() as usize).min(src - 1);
            w[(i, p)] = 1.0;
        }
    }
    w
}

/// Resizes `img` to `height x width`: area averaging per shrunk axis, nearest neighbour per grown axis.
pub fn resample(img: &ImageMatrix, height: usize, width: usize) -> Result<ImageMatrix> {
    if height == 0 || width == 0 {
        return Err(Error::Dimension(format!("target size {height}x{width} must be positive")));
    }
    let (h, w) = img.dims();
    let src = DMatrix::from_row_slice(h, w, img.pixels());
    let out = axis_weights(h, height) * src * axis_weights(w, width).transpose();
    ImageMatrix::from_fn(height, width, |r, c| out[(r, c)])
}

/// Area-average downsampling to `height x width`, flattened row-major.
pub fn downsample(img: &ImageMatrix, height: usize, width: usize) -> Result<DVector<f64>> {
    let (h, w) = img.dims();
    if height == 0 || width == 0 || height > h || width > w {
        return Err(Error::Dimension(format!(
            "cannot downsample {h}x{w} to {height}x{width}"
        )));
    }
    Ok(resample(img, height, width)?.as_vector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_stays_constant() {
        let img = ImageMatrix::filled(13, 7, 7.0).unwrap();
        for (h, w) in [(1, 1), (5, 3), (13, 7), (4, 6)] {
            let out = downsample(&img, h, w).unwrap();
            assert!(out.iter().all(|v| (v - 7.0).abs() < 1e-12), "{h}x{w}");
        }
    }

    #[test]
    fn full_size_is_identity() {
        let img = ImageMatrix::from_fn(5, 4, |r, c| (r * 4 + c) as f64 * 3.0).unwrap();
        assert_eq!(downsample(&img, 5, 4).unwrap(), img.as_vector());
    }

    #[test]
    fn checkerboard_pools_to_mid_gray() {
        let img = ImageMatrix::from_fn(4, 4, |r, c| if (r + c) % 2 == 0 { 0.0 } else { 255.0 }).unwrap();
        let out = downsample(&img, 2, 2).unwrap();
        assert!(out.iter().all(|v| *v == 127.5));
    }

    #[test]
    fn fractional_coverage() {
        // 3 source columns into 2: [a + b/2, b/2 + c] / 1.5
        let img = ImageMatrix::new(1, 3, vec![0.0, 30.0, 90.0]).unwrap();
        let out = downsample(&img, 1, 2).unwrap();
        assert!((out[0] - 10.0).abs() < 1e-12);
        assert!((out[1] - 70.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_targets() {
        let img = ImageMatrix::filled(4, 4, 1.0).unwrap();
        assert!(downsample(&img, 0, 2).is_err());
        assert!(downsample(&img, 5, 2).is_err());
    }

    #[test]
    fn nearest_neighbour_upsampling() {
        let img = ImageMatrix::new(1, 2, vec![10.0, 20.0]).unwrap();
        let up = resample(&img, 2, 4).unwrap();
        assert_eq!(up.pixels(), &[10.0, 10.0, 20.0, 20.0, 10.0, 10.0, 20.0, 20.0]);
    }

    proptest! {
        #[test]
        fn output_within_input_range(
            h in 1usize..12, w in 1usize..12, th in 1usize..12, tw in 1usize..12, seed in any::<u64>()
        ) {
            prop_assume!(th <= h && tw <= w);
            let mut rng = crate::rng::SeededRng::new(seed);
            let img = ImageMatrix::from_fn(h, w, |_, _| rng.uniform() * 255.0).unwrap();
            let lo = img.pixels().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = img.pixels().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let out = downsample(&img, th, tw).unwrap();
            prop_assert!(out.iter().all(|v| *v >= lo - 1e-9 && *v <= hi + 1e-9));
        }
    }
}
