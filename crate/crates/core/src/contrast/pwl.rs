//! Piecewise-linear intensity maps.

use serde::{Deserialize, Serialize};

use crate::analysis::{check_fractions, min_max, percentile, Histogram, DEFAULT_BINS};
use crate::error::{Error, Result};
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

/// Monotone map through `(input, output)` control points. The first input is
/// 0, the last is 1, inputs strictly increase and outputs never decrease.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PwlMap {
    points: Vec<[f64; 2]>,
}

impl PwlMap {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidMap(
                "at least two control points required".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("control points must be finite".into()));
        }
        if points[0][0] != 0.0 || points[points.len() - 1][0] != 1.0 {
            return Err(Error::InvalidMap(
                "inputs must start at 0 and end at 1".into(),
            ));
        }
        for pair in points.windows(2) {
            if pair[1][0] <= pair[0][0] {
                return Err(Error::InvalidMap(
                    "inputs must be strictly increasing".into(),
                ));
            }
            if pair[1][1] < pair[0][1] {
                return Err(Error::InvalidMap("outputs must be non-decreasing".into()));
            }
        }
        if points.iter().any(|p| !(0.0..=1.0).contains(&p[1])) {
            return Err(Error::InvalidMap("outputs must lie in [0, 1]".into()));
        }
        Ok(Self { points })
    }

    pub fn identity() -> Self {
        Self {
            points: vec![[0.0, 0.0], [1.0, 1.0]],
        }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn is_identity(&self) -> bool {
        self.points.iter().all(|p| p[0] == p[1])
    }

    /// Evaluates the map; inputs outside `[0, 1]` are clamped first.
    pub fn eval<T: Scalar>(&self, v: T) -> T {
        let v = clamp_unit(v);
        let k = self.points.partition_point(|p| T::lit(p[0]) <= v);
        let last = self.points.len() - 1;
        if k > last {
            return T::lit(self.points[last][1]);
        }
        let [x0, y0] = self.points[k - 1].map(T::lit);
        let [x1, y1] = self.points[k].map(T::lit);
        if v == x0 {
            return y0;
        }
        (y0 + (y1 - y0) * ((v - x0) / (x1 - x0))).max(y0).min(y1)
    }
}

impl TryFrom<Vec<[f64; 2]>> for PwlMap {
    type Error = Error;

    fn try_from(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PwlMap> for Vec<[f64; 2]> {
    fn from(map: PwlMap) -> Self {
        map.points
    }
}

pub fn pwl_apply<T: Scalar>(buf: &ImageBuffer<T>, map: &PwlMap) -> ImageBuffer<T> {
    buf.map(|v| map.eval(v))
}

/// Percentile stretch `{(0,0), (p_low,0), (p_high,1), (1,1)}` built from the
/// pooled luminance. Collapses to the identity when `p_high − p_low < 1e-6`.
pub fn pwl_from_stats<T: Scalar>(
    buf: &ImageBuffer<T>,
    p_low_frac: f64,
    p_high_frac: f64,
) -> Result<PwlMap> {
    check_fractions(p_low_frac, p_high_frac)?;
    let lum = buf.luminance();
    let (min, max) = min_max(&lum);
    let hist = Histogram::from_samples(&lum, DEFAULT_BINS);
    let lo = clamp_unit(percentile(&hist, p_low_frac, min, max)).as_f64();
    let hi = clamp_unit(percentile(&hist, p_high_frac, min, max)).as_f64();
    Ok(stretch_map(lo, hi))
}

pub(crate) fn stretch_map(lo: f64, hi: f64) -> PwlMap {
    if hi - lo < 1e-6 {
        return PwlMap::identity();
    }
    let mut points = vec![[0.0, 0.0]];
    if lo > 0.0 {
        points.push([lo, 0.0]);
    }
    if hi < 1.0 {
        points.push([hi, 1.0]);
    }
    points.push([1.0, 1.0]);
    PwlMap { points }
}
