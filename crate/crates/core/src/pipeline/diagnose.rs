use serde::Serialize;

use crate::analysis::{cast_score, channel_histogram, Histogram, DEFAULT_BINS};
use crate::error::Result;
use crate::image::ImageBuffer;
use crate::scalar::Scalar;

/// Cast scores strictly above this suggest the colour-cast pipelines.
pub const CAST_THRESHOLD: f64 = 0.15;

/// Non-binding processing suggestion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Hint {
    /// Channels are misaligned: try `pa-1` or `pa-2`.
    ColourCast,
    /// Channels are aligned: an operator-order preset is enough.
    ContrastPreset,
}

impl Hint {
    pub fn suggestions(&self) -> &'static [&'static str] {
        match self {
            Hint::ColourCast => &["pa-1", "pa-2"],
            Hint::ContrastPreset => &["pde-pwl-clahe", "pde-clahe-goc2"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnosis<T> {
    pub cast_score: T,
    /// 256-bin histogram of each channel.
    pub histograms: Vec<Histogram>,
    pub hint: Hint,
}

pub fn diagnose<T: Scalar>(buf: &ImageBuffer<T>) -> Result<Diagnosis<T>> {
    let score = cast_score(buf)?;
    let histograms = (0..3)
        .map(|c| channel_histogram(buf, c, DEFAULT_BINS))
        .collect::<Result<_>>()?;
    let hint = if score.as_f64() > CAST_THRESHOLD {
        Hint::ColourCast
    } else {
        Hint::ContrastPreset
    };
    Ok(Diagnosis {
        cast_score: score,
        histograms,
        hint,
    })
}
