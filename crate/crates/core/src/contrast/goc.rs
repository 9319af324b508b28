//! Gain-offset correction: gray-world mean alignment followed by a pooled
//! full-range stretch (GOC2), optionally followed by a gamma (GOC3).

use serde::{Deserialize, Serialize};

use super::stretch::DEGENERATE_RANGE;
use crate::analysis::{channel_means, min_max};
use crate::error::{Error, Result};
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GocVariant {
    Goc2,
    Goc3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GocParams {
    pub variant: GocVariant,
    /// Exponent applied by [`GocVariant::Goc3`]; ignored by `Goc2`.
    pub gamma: f64,
}

impl GocParams {
    pub const DEFAULT_GAMMA: f64 = 0.8;

    pub fn goc2() -> Self {
        Self {
            variant: GocVariant::Goc2,
            gamma: 1.0,
        }
    }

    pub fn goc3(gamma: f64) -> Self {
        Self {
            variant: GocVariant::Goc3,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.is_finite() && self.gamma > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "GOC gamma must be positive, got {}",
                self.gamma
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GocOutput<T> {
    pub image: ImageBuffer<T>,
    /// Set when the input was not a colour image and the mean alignment was
    /// skipped.
    pub passthrough: bool,
}

/// Shifts each channel so every channel mean equals the mean of the channel
/// means. The result is not clamped.
pub fn gray_world_align<T: Scalar>(buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    buf.ensure_colour()?;
    let means = channel_means(buf);
    let target = means.iter().copied().sum::<T>() / T::from_count(means.len());
    Ok(buf.map_planes(|c, plane| {
        let shift = target - means[c];
        plane.iter().map(|&v| v + shift).collect()
    }))
}

pub fn goc<T: Scalar>(buf: &ImageBuffer<T>, p: &GocParams) -> Result<GocOutput<T>> {
    p.validate()?;
    let (aligned, passthrough) = match gray_world_align(buf) {
        Ok(a) => (a, false),
        Err(Error::NotColourImage(_)) => (buf.clone(), true),
        Err(e) => return Err(e),
    };
    let (lo, hi) = min_max(aligned.samples());
    let span = hi - lo;
    let mut image = if span < T::lit(DEGENERATE_RANGE) {
        aligned.map(clamp_unit)
    } else {
        aligned.map(|v| clamp_unit((v - lo) / span))
    };
    if p.variant == GocVariant::Goc3 && p.gamma != 1.0 {
        let g = T::lit(p.gamma);
        image = image.map(|v| v.powf(g));
    }
    Ok(GocOutput { image, passthrough })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::channel_means;

    fn tinted() -> ImageBuffer<f64> {
        let means = [0.4, 0.5, 0.6];
        ImageBuffer::from_fn(8, 8, 3, |x, y, c| {
            means[c] + 0.02 * ((x + 3 * y) % 5) as f64 - 0.04
        })
        .unwrap()
    }

    #[test]
    fn alignment_equalizes_means() {
        let aligned = gray_world_align(&tinted()).unwrap();
        let m = channel_means(&aligned);
        assert!((m[0] - m[1]).abs() < 1e-12 && (m[1] - m[2]).abs() < 1e-12);
    }

    #[test]
    fn gray_input_only_stretches() {
        let g = ImageBuffer::<f64>::from_fn(5, 5, 3, |x, _, _| 0.2 + 0.1 * x as f64).unwrap();
        assert!(gray_world_align(&g).unwrap().max_abs_diff(&g) < 1e-15);
        let out = goc(&g, &GocParams::goc2()).unwrap();
        assert!(!out.passthrough);
        assert_eq!(out.image.get(0, 0, 0), 0.0);
        assert_eq!(out.image.get(4, 0, 2), 1.0);
    }

    #[test]
    fn goc3_unit_gamma_is_goc2() {
        let a = goc(&tinted(), &GocParams::goc2()).unwrap().image;
        let b = goc(&tinted(), &GocParams::goc3(1.0)).unwrap().image;
        assert_eq!(a.max_abs_diff(&b), 0.0);
    }

    #[test]
    fn grayscale_takes_passthrough_path() {
        let g = ImageBuffer::<f64>::from_fn(4, 1, 1, |x, _, _| 0.25 + 0.1 * x as f64).unwrap();
        let out = goc(&g, &GocParams::goc2()).unwrap();
        assert!(out.passthrough);
        assert_eq!(out.image.get(0, 0, 0), 0.0);
        assert_eq!(out.image.get(3, 0, 0), 1.0);
    }
}
