//! Percentile range stretching: per channel (HS) or with pooled bounds (CS).

use serde::{Deserialize, Serialize};

use crate::analysis::{check_fractions, min_max, percentile, Histogram, DEFAULT_BINS};
use crate::error::Result;
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

/// Ranges narrower than this are left untouched.
pub const DEGENERATE_RANGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StretchParams {
    pub p_low_frac: f64,
    pub p_high_frac: f64,
    /// `true`: independent bounds per channel (HS). `false`: bounds pooled
    /// over every channel (CS).
    pub per_channel: bool,
}

impl Default for StretchParams {
    fn default() -> Self {
        Self {
            p_low_frac: 0.01,
            p_high_frac: 0.99,
            per_channel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stretched<T> {
    pub image: ImageBuffer<T>,
    /// Channels left unchanged because their range was degenerate.
    pub degenerate: Vec<usize>,
}

/// Affine `v → (v − lo)/(hi − lo)`, clamped.
pub fn stretch<T: Scalar>(buf: &ImageBuffer<T>, p: &StretchParams) -> Result<Stretched<T>> {
    check_fractions(p.p_low_frac, p.p_high_frac)?;
    let bounds = |samples: &[T]| {
        let (min, max) = min_max(samples);
        let hist = Histogram::from_samples(samples, DEFAULT_BINS);
        (
            percentile(&hist, p.p_low_frac, min, max),
            percentile(&hist, p.p_high_frac, min, max),
        )
    };
    let pooled = (!p.per_channel).then(|| bounds(buf.samples()));
    let mut degenerate = Vec::new();
    let image = buf.map_planes(|c, plane| {
        let (lo, hi) = pooled.unwrap_or_else(|| bounds(plane));
        if hi - lo < T::lit(DEGENERATE_RANGE) {
            degenerate.push(c);
            plane.to_vec()
        } else {
            let span = hi - lo;
            plane.iter().map(|&v| clamp_unit((v - lo) / span)).collect()
        }
    });
    Ok(Stretched { image, degenerate })
}
