//! Homomorphic high-emphasis filtering followed by a sigmoid ("fuzzy
//! membership") contrast remap.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analysis::min_max;
use crate::error::{Error, Result};
use crate::image::{at_clamped, clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomomorphicParams {
    /// Gain at DC (illumination).
    pub gamma_low: f64,
    /// Gain at high frequencies (reflectance).
    pub gamma_high: f64,
    pub sharpness_c: f64,
    /// Cutoff `D0` in cycles per pixel.
    pub cutoff_frac: f64,
    /// Offset added before the logarithm and removed after exponentiation.
    pub log_floor: f64,
    pub fuzzy: bool,
    pub fuzzy_slope: f64,
    /// Sigmoid center; the channel mean when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuzzy_center: Option<f64>,
}

impl Default for HomomorphicParams {
    fn default() -> Self {
        Self {
            gamma_low: 0.5,
            gamma_high: 2.0,
            sharpness_c: 1.0,
            cutoff_frac: 0.05,
            log_floor: 1e-3,
            fuzzy: true,
            fuzzy_slope: 8.0,
            fuzzy_center: None,
        }
    }
}

impl HomomorphicParams {
    /// Unit transfer function and no sigmoid stage.
    pub fn all_pass() -> Self {
        Self {
            gamma_low: 1.0,
            gamma_high: 1.0,
            fuzzy: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma_low > 0.0
            && self.gamma_high >= self.gamma_low
            && self.gamma_high.is_finite()
            && self.log_floor > 0.0
            && self.log_floor.is_finite()
            && self.cutoff_frac > 0.0
            && self.cutoff_frac.is_finite()
            && self.sharpness_c > 0.0
            && self.sharpness_c.is_finite()
            && self.fuzzy_slope > 0.0
            && self.fuzzy_slope.is_finite()
            && self.fuzzy_center.is_none_or(|b| (0.0..=1.0).contains(&b));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid homomorphic parameters: {self:?}"
            )))
        }
    }

    /// `H(D) = γ_L + (γ_H − γ_L)·(1 − exp(−c·D²/D0²))`, `D` in cycles per pixel.
    pub fn transfer(&self, d2: f64) -> f64 {
        let d0 = self.cutoff_frac;
        self.gamma_low
            + (self.gamma_high - self.gamma_low)
                * (1.0 - (-self.sharpness_c * d2 / (d0 * d0)).exp())
    }
}

pub fn fuzzy_homomorphic<T: Scalar>(
    buf: &ImageBuffer<T>,
    p: &HomomorphicParams,
) -> Result<ImageBuffer<T>> {
    p.validate()?;
    buf.ensure_finite()?;
    let (w, h) = (buf.width(), buf.height());
    let mut planner = FftPlanner::<T>::new();
    Ok(buf.map_planes(|_, plane| {
        let filtered = filter_plane(plane, w, h, p, &mut planner);
        if p.fuzzy {
            fuzzy_remap(&filtered, p)
        } else {
            filtered.into_iter().map(clamp_unit).collect()
        }
    }))
}

fn filter_plane<T: Scalar>(
    plane: &[T],
    w: usize,
    h: usize,
    p: &HomomorphicParams,
    planner: &mut FftPlanner<T>,
) -> Vec<T> {
    let floor = T::lit(p.log_floor);
    // pad to even dimensions by edge replication
    let (pw, ph) = (w + w % 2, h + h % 2);
    let mut spec: Vec<Complex<T>> = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        for x in 0..pw {
            let v = at_clamped(plane, w, h, x as isize, y as isize);
            spec.push(Complex::new((v.max(T::zero()) + floor).ln(), T::zero()));
        }
    }

    fft_2d(&mut spec, pw, ph, planner, false);
    let freq = |i: usize, n: usize| {
        let k = if i < n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        k / n as f64
    };
    for v in 0..ph {
        let fv = freq(v, ph);
        for u in 0..pw {
            let fu = freq(u, pw);
            spec[v * pw + u] = spec[v * pw + u] * T::lit(p.transfer(fu * fu + fv * fv));
        }
    }
    fft_2d(&mut spec, pw, ph, planner, true);

    let norm = T::from_count(pw * ph);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            out.push((spec[y * pw + x].re / norm).exp() - floor);
        }
    }
    out
}

/// In-place unnormalized 2-D transform (rows, then columns).
fn fft_2d<T: Scalar>(
    data: &mut [Complex<T>],
    w: usize,
    h: usize,
    planner: &mut FftPlanner<T>,
    inverse: bool,
) {
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    row_fft.process(data);
    let mut column = vec![Complex::new(T::zero(), T::zero()); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = data[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            data[y * w + x] = column[y];
        }
    }
}

/// Sigmoid membership rescaled so the channel minimum maps to 0 and the
/// maximum to 1. A flat channel passes through.
fn fuzzy_remap<T: Scalar>(plane: &[T], p: &HomomorphicParams) -> Vec<T> {
    let center = match p.fuzzy_center {
        Some(b) => T::lit(b),
        None => plane.iter().copied().sum::<T>() / T::from_count(plane.len()),
    };
    let slope = T::lit(p.fuzzy_slope);
    let sig: Vec<T> = plane
        .iter()
        .map(|&v| T::one() / (T::one() + (-slope * (v - center)).exp()))
        .collect();
    let (lo, hi) = min_max(&sig);
    if hi - lo < T::lit(1e-12) {
        return plane.iter().map(|&v| clamp_unit(v)).collect();
    }
    sig.iter()
        .map(|&s| clamp_unit((s - lo) / (hi - lo)))
        .collect()
}
