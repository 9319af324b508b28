//! Contrast-limited adaptive histogram equalization.
//!
//! Per tile: histogram, clip at `clip_factor · tile_pixels / bins`, spread the
//! clipped excess evenly over all bins (remainder one count per bin starting
//! at bin 0), then map through the normalized CDF. Pixels blend the four
//! nearest tile mappings bilinearly; outside the outermost tile centers the
//! nearest mapping is used.

use serde::{Deserialize, Serialize};

use crate::analysis::bin_index;
use crate::error::{Error, Result};
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClaheParams {
    pub tiles_x: usize,
    pub tiles_y: usize,
    pub bins: usize,
    /// Clip limit as a multiple of the mean bin occupancy; `inf` disables
    /// clipping (plain adaptive equalization).
    pub clip_factor: f64,
    /// Equalize every channel independently; otherwise only the luminance is
    /// equalized and the change is added back to each channel.
    pub per_channel: bool,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self {
            tiles_x: 4,
            tiles_y: 4,
            bins: 256,
            clip_factor: 3.0,
            per_channel: true,
        }
    }
}

impl ClaheParams {
    /// Single tile, no clipping: global histogram equalization.
    pub fn global_equalization(bins: usize) -> Self {
        Self {
            tiles_x: 1,
            tiles_y: 1,
            bins,
            clip_factor: f64::INFINITY,
            per_channel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiles_x == 0 || self.tiles_y == 0 {
            return Err(Error::InvalidParameter(
                "CLAHE tile counts must be >= 1".into(),
            ));
        }
        if self.bins < 2 {
            return Err(Error::InvalidParameter(
                "CLAHE needs at least 2 bins".into(),
            ));
        }
        if self.clip_factor.is_nan() || self.clip_factor < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "CLAHE clip_factor must be >= 1, got {}",
                self.clip_factor
            )));
        }
        Ok(())
    }
}

pub fn clahe<T: Scalar>(buf: &ImageBuffer<T>, p: &ClaheParams) -> Result<ImageBuffer<T>> {
    p.validate()?;
    let (w, h) = (buf.width(), buf.height());
    if w < p.tiles_x || h < p.tiles_y {
        return Err(Error::ImageTooSmallForTiling {
            width: w,
            height: h,
            tiles_x: p.tiles_x,
            tiles_y: p.tiles_y,
        });
    }
    let grid = TileGrid::new(w, h, p.tiles_x, p.tiles_y);
    if p.per_channel || buf.channels() == 1 {
        return Ok(buf.map_planes(|_, plane| grid.equalize(plane, p)));
    }
    let lum = buf.luminance();
    let eq = grid.equalize(&lum, p);
    Ok(buf.map_planes(|_, plane| {
        plane
            .iter()
            .zip(lum.iter().zip(&eq))
            .map(|(&v, (&l, &e))| clamp_unit(v + (e - l)))
            .collect()
    }))
}

/// Interpolation weights along one axis: `(lower tile, upper tile, t)`.
type AxisWeight<T> = (usize, usize, T);

struct TileGrid {
    width: usize,
    height: usize,
    x_bounds: Vec<usize>,
    y_bounds: Vec<usize>,
}

impl TileGrid {
    fn new(width: usize, height: usize, tiles_x: usize, tiles_y: usize) -> Self {
        let bounds = |len: usize, n: usize| (0..=n).map(|i| i * len / n).collect::<Vec<_>>();
        Self {
            width,
            height,
            x_bounds: bounds(width, tiles_x),
            y_bounds: bounds(height, tiles_y),
        }
    }

    fn equalize<T: Scalar>(&self, plane: &[T], p: &ClaheParams) -> Vec<T> {
        let (tx, ty) = (self.x_bounds.len() - 1, self.y_bounds.len() - 1);
        let bins: Vec<usize> = plane.iter().map(|&v| bin_index(v, p.bins)).collect();

        let mut maps: Vec<Vec<T>> = Vec::with_capacity(tx * ty);
        for j in 0..ty {
            for i in 0..tx {
                let mut hist = vec![0u64; p.bins];
                for y in self.y_bounds[j]..self.y_bounds[j + 1] {
                    for x in self.x_bounds[i]..self.x_bounds[i + 1] {
                        hist[bins[y * self.width + x]] += 1;
                    }
                }
                maps.push(tile_mapping(&mut hist, p.clip_factor));
            }
        }

        let xw = axis_weights::<T>(&self.x_bounds, self.width);
        let yw = axis_weights::<T>(&self.y_bounds, self.height);
        let mut out = Vec::with_capacity(plane.len());
        for (y, &(j0, j1, ty_)) in yw.iter().enumerate() {
            for (x, &(i0, i1, tx_)) in xw.iter().enumerate() {
                let b = bins[y * self.width + x];
                let m = |i: usize, j: usize| maps[j * tx + i][b];
                let top = (T::one() - tx_) * m(i0, j0) + tx_ * m(i1, j0);
                let bottom = (T::one() - tx_) * m(i0, j1) + tx_ * m(i1, j1);
                out.push(clamp_unit((T::one() - ty_) * top + ty_ * bottom));
            }
        }
        out
    }
}

/// Clip, redistribute and integrate one tile histogram into a `[0, 1]` map.
fn tile_mapping<T: Scalar>(hist: &mut [u64], clip_factor: f64) -> Vec<T> {
    let bins = hist.len();
    let n: u64 = hist.iter().sum();
    if clip_factor.is_finite() {
        let limit = ((clip_factor * n as f64 / bins as f64).floor() as u64).max(1);
        let mut excess = 0u64;
        for c in hist.iter_mut() {
            if *c > limit {
                excess += *c - limit;
                *c = limit;
            }
        }
        let (share, residual) = (excess / bins as u64, (excess % bins as u64) as usize);
        for (i, c) in hist.iter_mut().enumerate() {
            *c += share + u64::from(i < residual);
        }
    }
    let total = T::lit(n as f64);
    let mut acc = 0u64;
    hist.iter()
        .map(|&c| {
            acc += c;
            T::lit(acc as f64) / total
        })
        .collect()
}

fn axis_weights<T: Scalar>(bounds: &[usize], len: usize) -> Vec<AxisWeight<T>> {
    let centers: Vec<f64> = bounds
        .windows(2)
        .map(|b| (b[0] + b[1] - 1) as f64 / 2.0)
        .collect();
    let last = centers.len() - 1;
    (0..len)
        .map(|pos| {
            let pos = pos as f64;
            if pos <= centers[0] {
                (0, 0, T::zero())
            } else if pos >= centers[last] {
                (last, last, T::zero())
            } else {
                let i = centers.partition_point(|&c| c <= pos) - 1;
                let t = (pos - centers[i]) / (centers[i + 1] - centers[i]);
                (i, i + 1, T::lit(t))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_ramp_is_near_identity() {
        let ramp = ImageBuffer::<f64>::from_fn(256, 1, 1, |x, _, _| x as f64 / 255.0).unwrap();
        let out = clahe(&ramp, &ClaheParams::global_equalization(256)).unwrap();
        assert!(out.max_abs_diff(&ramp) <= 1.0 / 256.0);
    }

    #[test]
    fn constant_stays_constant() {
        let c = ImageBuffer::<f64>::filled(20, 17, 3, 0.3).unwrap();
        for p in [ClaheParams::default(), ClaheParams::global_equalization(64)] {
            let out = clahe(&c, &p).unwrap();
            let v = out.samples()[0];
            assert!(out.samples().iter().all(|&s| s == v));
        }
    }

    #[test]
    fn four_level_oracle() {
        let levels = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        let img = ImageBuffer::<f64>::from_fn(4, 4, 1, |x, _, _| levels[x]).unwrap();
        let out = clahe(&img, &ClaheParams::global_equalization(4)).unwrap();
        // each level holds a quarter of the pixels: CDF = 1/4, 2/4, 3/4, 1
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(out.get(x, y, 0), (x + 1) as f64 / 4.0);
            }
        }
    }

    #[test]
    fn too_small_for_tiling() {
        let img = ImageBuffer::<f64>::filled(3, 10, 1, 0.5).unwrap();
        let p = ClaheParams {
            tiles_x: 4,
            ..ClaheParams::default()
        };
        assert!(matches!(
            clahe(&img, &p),
            Err(Error::ImageTooSmallForTiling { .. })
        ));
    }

    #[test]
    fn clipping_redistributes_everything() {
        let mut hist = vec![10u64, 0, 0, 2];
        let map: Vec<f64> = tile_mapping(&mut hist, 1.0);
        // limit 3, excess 7 → +1 each, residual 3 spread from bin 0
        assert_eq!(hist, vec![5, 2, 2, 3]);
        assert_eq!(map.last().copied(), Some(1.0));
    }

    #[test]
    fn weights_clamp_outside_centers() {
        let w: Vec<AxisWeight<f64>> = axis_weights(&[0, 4, 8], 8);
        assert_eq!(w[0], (0, 0, 0.0));
        assert_eq!(w[7], (1, 1, 0.0));
        let (i0, i1, t) = w[3];
        assert_eq!((i0, i1), (0, 1));
        assert!((t - 0.375).abs() < 1e-15);
    }

    #[test]
    fn luminance_mode_keeps_gray_gray() {
        let img =
            ImageBuffer::<f64>::from_fn(16, 16, 3, |x, y, _| ((x * 3 + y) % 16) as f64 / 20.0)
                .unwrap();
        let p = ClaheParams {
            per_channel: false,
            ..ClaheParams::default()
        };
        let out = clahe(&img, &p).unwrap();
        assert_eq!(out.plane(0), out.plane(1));
        assert_eq!(out.plane(1), out.plane(2));
    }
}
