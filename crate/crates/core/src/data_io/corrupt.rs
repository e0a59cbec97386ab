use crate::error::{Error, Result};
use crate::features::{resample, ImageMatrix};
use crate::rng::SeededRng;

/// Upper bound on the corrupted fraction accepted by [`Corruption`].
pub const MAX_FRACTION: f64 = 0.9;

/// A corrupted image together with the flat (row-major) positions that were overwritten.
#[derive(Debug, Clone, PartialEq)]
pub struct Corrupted {
    pub image: ImageMatrix,
    pub positions: Vec<usize>,
    /// `(top, left, side)` of the occluded square, for block occlusion.
    pub block: Option<(usize, usize, usize)>,
}

fn round_half_up(x: f64) -> usize {
    // tolerance keeps products like 0.35 * 20 from landing just under .5
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

fn check_fraction(fraction: f64, max: f64) -> Result<()> {
    if (0.0..=max).contains(&fraction) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("corruption fraction {fraction} outside [0, {max}]")))
    }
}

/// Replaces `round(fraction * h * w)` distinct pixels, chosen uniformly, with
/// independent uniform grey levels `0..=255`.
pub fn corrupt_pixels(img: &ImageMatrix, fraction: f64, seed: u64) -> Result<Corrupted> {
    check_fraction(fraction, 1.0)?;
    let (h, w) = img.dims();
    let count = round_half_up(fraction * (h * w) as f64).min(h * w);
    let mut rng = SeededRng::new(seed);
    let positions = rng.sample_indices(h * w, count);
    let mut image = img.clone();
    for &p in &positions {
        image.set(p / w, p % w, rng.below(256) as f64);
    }
    Ok(Corrupted { image, positions, block: None })
}

/// Pastes `occluder`, resized to `s x s` with `s = round(sqrt(fraction * h * w))`
/// clamped to `min(h, w)`, at a uniformly random position.
pub fn occlude_block(img: &ImageMatrix, fraction: f64, occluder: &ImageMatrix, seed: u64) -> Result<Corrupted> {
    check_fraction(fraction, 1.0)?;
    let (h, w) = img.dims();
    let side = round_half_up((fraction * (h * w) as f64).sqrt()).min(h.min(w));
    if side == 0 {
        return Ok(Corrupted { image: img.clone(), positions: Vec::new(), block: None });
    }
    let mut rng = SeededRng::new(seed);
    let top = rng.below((h - side + 1) as u64) as usize;
    let left = rng.below((w - side + 1) as u64) as usize;
    let patch = resample(occluder, side, side)?;
    let mut image = img.clone();
    let mut positions = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            image.set(top + r, left + c, patch.get(r, c));
            positions.push((top + r) * w + left + c);
        }
    }
    Ok(Corrupted { image, positions, block: Some((top, left, side)) })
}

/// Deterministic stand-in occluder: a 64x64 checkerboard of 4-pixel cells over a diagonal ramp.
pub fn default_occluder() -> ImageMatrix {
    ImageMatrix::from_fn(64, 64, |r, c| {
        let check = if (r / 4 + c / 4) % 2 == 0 { 0.0 } else { 128.0 };
        check + (r + c) as f64 * 127.0 / 126.0
    })
    .expect("fixed dimensions")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Corruption {
    None,
    Pixel { fraction: f64 },
    Block { fraction: f64, occluder: ImageMatrix },
}

impl Corruption {
    pub fn validate(&self) -> Result<()> {
        match self {
            Corruption::None => Ok(()),
            Corruption::Pixel { fraction } | Corruption::Block { fraction, .. } => check_fraction(*fraction, MAX_FRACTION),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Corruption::None => "none",
            Corruption::Pixel { .. } => "pixel",
            Corruption::Block { .. } => "block",
        }
    }

    pub fn fraction(&self) -> f64 {
        match self {
            Corruption::None => 0.0,
            Corruption::Pixel { fraction } | Corruption::Block { fraction, .. } => *fraction,
        }
    }

    pub fn apply(&self, img: &ImageMatrix, seed: u64) -> Result<ImageMatrix> {
        self.validate()?;
        Ok(match self {
            Corruption::None => img.clone(),
            Corruption::Pixel { fraction } => corrupt_pixels(img, *fraction, seed)?.image,
            Corruption::Block { fraction, occluder } => occlude_block(img, *fraction, occluder, seed)?.image,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(h: usize, w: usize) -> ImageMatrix {
        ImageMatrix::from_fn(h, w, |r, c| ((r * w + c) % 256) as f64).unwrap()
    }

    #[test]
    fn zero_fraction_is_identity() {
        let img = ramp(10, 10);
        assert_eq!(corrupt_pixels(&img, 0.0, 1).unwrap().image, img);
        assert_eq!(occlude_block(&img, 0.0, &default_occluder(), 1).unwrap().image, img);
    }

    #[test]
    fn pixel_count_and_locality() {
        let img = ramp(10, 10);
        let out = corrupt_pixels(&img, 0.5, 3).unwrap();
        assert_eq!(out.positions.len(), 50);
        let mut unique = out.positions.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 50);
        for p in 0..100 {
            if !out.positions.contains(&p) {
                assert_eq!(out.image.pixels()[p], img.pixels()[p]);
            }
        }
        assert!(out.image.pixels().iter().all(|v| v.fract() == 0.0));
        let other = corrupt_pixels(&img, 0.5, 4).unwrap();
        assert_ne!(out.positions, other.positions);
    }

    #[test]
    fn rounding_half_up() {
        let img = ramp(1, 10);
        assert_eq!(corrupt_pixels(&img, 0.25, 0).unwrap().positions.len(), 3);
        assert_eq!(corrupt_pixels(&img, 0.24, 0).unwrap().positions.len(), 2);
        assert_eq!(round_half_up(0.35 * 20.0), 7);
    }

    #[test]
    fn block_geometry() {
        let img = ImageMatrix::filled(20, 20, 255.0).unwrap();
        let out = occlude_block(&img, 0.25, &default_occluder(), 9).unwrap();
        let (top, left, side) = out.block.unwrap();
        assert_eq!(side, 10);
        assert_eq!(out.positions.len(), 100);
        for r in 0..20 {
            for c in 0..20 {
                let inside = (top..top + side).contains(&r) && (left..left + side).contains(&c);
                if !inside {
                    assert_eq!(out.image.get(r, c), 255.0);
                }
            }
        }
    }

    #[test]
    fn full_block_is_whole_resample() {
        let img = ImageMatrix::filled(16, 16, 3.0).unwrap();
        let occ = default_occluder();
        let out = occlude_block(&img, 1.0, &occ, 2).unwrap();
        assert_eq!(out.block, Some((0, 0, 16)));
        assert_eq!(out.image, resample(&occ, 16, 16).unwrap());
        let wide = ImageMatrix::filled(8, 20, 3.0).unwrap();
        assert_eq!(occlude_block(&wide, 1.0, &occ, 2).unwrap().block.unwrap().2, 8);
    }

    #[test]
    fn spec_range() {
        assert!(Corruption::Pixel { fraction: 0.95 }.validate().is_err());
        assert!(Corruption::Pixel { fraction: 0.9 }.validate().is_ok());
        assert!(corrupt_pixels(&ramp(2, 2), -0.1, 0).is_err());
    }
}
