//! Contrast operators usable standalone or as forcing terms of the PDE.

mod clahe;
mod goc;
mod pwl;
mod stretch;

pub use clahe::{clahe, ClaheParams};
pub use goc::{goc, gray_world_align, GocOutput, GocParams, GocVariant};
pub use pwl::{pwl_apply, pwl_from_stats, PwlMap};
pub use stretch::{stretch, StretchParams, Stretched, DEGENERATE_RANGE};

use serde::{Deserialize, Serialize};

use crate::analysis::check_fractions;
use crate::error::Result;
use crate::image::ImageBuffer;
use crate::scalar::Scalar;

/// Parameters of the piecewise-linear operator: explicit control points, or
/// (when absent) the percentile stretch derived from the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PwlParams {
    pub p_low_frac: f64,
    pub p_high_frac: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<PwlMap>,
}

impl Default for PwlParams {
    fn default() -> Self {
        Self {
            p_low_frac: 0.01,
            p_high_frac: 0.99,
            points: None,
        }
    }
}

impl PwlParams {
    pub fn fixed(map: PwlMap) -> Self {
        Self {
            points: Some(map),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PercentileParams {
    pub p_low_frac: f64,
    pub p_high_frac: f64,
}

impl Default for PercentileParams {
    fn default() -> Self {
        Self {
            p_low_frac: 0.01,
            p_high_frac: 0.99,
        }
    }
}

fn default_gamma() -> f64 {
    GocParams::DEFAULT_GAMMA
}

/// One contrast operator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum OperatorSpec {
    Clahe(ClaheParams),
    Pwl(PwlParams),
    /// Per-channel histogram stretch.
    Hs(PercentileParams),
    /// Contrast stretch with bounds pooled over all channels.
    Cs(PercentileParams),
    Goc2,
    Goc3 {
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
}

impl OperatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorSpec::Clahe(_) => "clahe",
            OperatorSpec::Pwl(_) => "pwl",
            OperatorSpec::Hs(_) => "hs",
            OperatorSpec::Cs(_) => "cs",
            OperatorSpec::Goc2 => "goc2",
            OperatorSpec::Goc3 { .. } => "goc3",
        }
    }

    /// Operator with default parameters, by name.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "clahe" => OperatorSpec::Clahe(ClaheParams::default()),
            "pwl" => OperatorSpec::Pwl(PwlParams::default()),
            "hs" => OperatorSpec::Hs(PercentileParams::default()),
            "cs" => OperatorSpec::Cs(PercentileParams::default()),
            "goc2" => OperatorSpec::Goc2,
            "goc3" => OperatorSpec::Goc3 {
                gamma: GocParams::DEFAULT_GAMMA,
            },
            _ => return None,
        })
    }

    pub fn identity() -> Self {
        OperatorSpec::Pwl(PwlParams::fixed(PwlMap::identity()))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::Clahe(p) => p.validate(),
            OperatorSpec::Pwl(p) => match &p.points {
                Some(_) => Ok(()),
                None => check_fractions(p.p_low_frac, p.p_high_frac),
            },
            OperatorSpec::Hs(p) | OperatorSpec::Cs(p) => {
                check_fractions(p.p_low_frac, p.p_high_frac)
            }
            OperatorSpec::Goc2 => Ok(()),
            OperatorSpec::Goc3 { gamma } => GocParams::goc3(*gamma).validate(),
        }
    }

    pub fn apply<T: Scalar>(&self, buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
        match self {
            OperatorSpec::Clahe(p) => clahe(buf, p),
            OperatorSpec::Pwl(p) => {
                let map = match &p.points {
                    Some(map) => map.clone(),
                    None => pwl_from_stats(buf, p.p_low_frac, p.p_high_frac)?,
                };
                Ok(pwl_apply(buf, &map))
            }
            OperatorSpec::Hs(p) | OperatorSpec::Cs(p) => {
                let params = StretchParams {
                    p_low_frac: p.p_low_frac,
                    p_high_frac: p.p_high_frac,
                    per_channel: matches!(self, OperatorSpec::Hs(_)),
                };
                Ok(stretch(buf, &params)?.image)
            }
            OperatorSpec::Goc2 => Ok(goc(buf, &GocParams::goc2())?.image),
            OperatorSpec::Goc3 { gamma } => Ok(goc(buf, &GocParams::goc3(*gamma))?.image),
        }
    }
}

/// Applies `stages` left to right; `[PWL, CLAHE]` computes `CLAHE(PWL(buf))`.
pub fn cascade<T: Scalar>(buf: &ImageBuffer<T>, stages: &[OperatorSpec]) -> Result<ImageBuffer<T>> {
    let mut cur = buf.clone();
    for stage in stages {
        cur = stage.apply(&cur)?;
    }
    Ok(cur)
}
