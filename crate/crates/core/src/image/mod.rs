//! Raster data model and file I/O.

mod io;

pub use io::{load_image, save_image, BitDepth};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense real-valued raster with 1 or 3 channels.
///
/// Samples are stored planar (one contiguous row-major plane per channel).
/// Operations never mutate their input; they return a new buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer<T> {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> ImageBuffer<T> {
    /// Builds a buffer from planar data (`channels` consecutive planes).
    pub fn from_planar(width: usize, height: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidBufferState(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidBufferState(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidBufferState(format!(
                "expected {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds a buffer from channel-interleaved data (`RGBRGB...`).
    pub fn from_interleaved(
        width: usize,
        height: usize,
        channels: usize,
        data: &[T],
    ) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::InvalidBufferState(format!(
                "expected {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        let n = width * height;
        let mut planar = vec![T::zero(); data.len()];
        for (i, px) in data.chunks_exact(channels.max(1)).enumerate() {
            for (c, &v) in px.iter().enumerate() {
                planar[c * n + i] = v;
            }
        }
        Self::from_planar(width, height, channels, planar)
    }

    pub fn from_planes(width: usize, height: usize, planes: Vec<Vec<T>>) -> Result<Self> {
        let channels = planes.len();
        let data = planes.into_iter().flatten().collect();
        Self::from_planar(width, height, channels, data)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: T) -> Result<Self> {
        Self::from_planar(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    /// Builds a buffer by evaluating `f(x, y, c)` at every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::from_planar(width, height, channels, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Pixels per channel.
    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Sample at `(x, y, c)`.
    ///
    /// Panics when any coordinate is outside the declared dimensions.
    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> T {
        assert!(
            x < self.width && y < self.height && c < self.channels,
            "sample ({x}, {y}, {c}) outside {}x{}x{}",
            self.width,
            self.height,
            self.channels
        );
        self.data[c * self.pixel_count() + y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: T) {
        assert!(
            x < self.width && y < self.height && c < self.channels,
            "sample ({x}, {y}, {c}) outside {}x{}x{}",
            self.width,
            self.height,
            self.channels
        );
        let n = self.pixel_count();
        self.data[c * n + y * self.width + x] = v;
    }

    /// Row-major plane of channel `c`.
    pub fn plane(&self, c: usize) -> &[T] {
        let n = self.pixel_count();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [T] {
        let n = self.pixel_count();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn planes(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.pixel_count())
    }

    /// All samples, planar order.
    pub fn samples(&self) -> &[T] {
        &self.data
    }

    pub fn into_samples(self) -> Vec<T> {
        self.data
    }

    /// Samples in interleaved order (`RGBRGB...`).
    pub fn to_interleaved(&self) -> Vec<T> {
        let n = self.pixel_count();
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..n {
            for c in 0..self.channels {
                out.push(self.data[c * n + i]);
            }
        }
        out
    }

    /// Same shape, every sample mapped through `f`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    /// Same shape, each plane replaced by `f(channel, plane)`.
    pub fn map_planes(&self, mut f: impl FnMut(usize, &[T]) -> Vec<T>) -> Self {
        let n = self.pixel_count();
        let mut data = Vec::with_capacity(self.data.len());
        for (c, plane) in self.planes().enumerate() {
            let out = f(c, plane);
            assert_eq!(out.len(), n, "plane transform changed the sample count");
            data.extend(out);
        }
        Self { data, ..*self }
    }

    /// Replaces the sample storage, keeping the shape.
    pub fn with_samples(&self, data: Vec<T>) -> Result<Self> {
        Self::from_planar(self.width, self.height, self.channels, data)
    }

    /// Per-pixel luminance proxy: the mean of the channels.
    pub fn luminance(&self) -> Vec<T> {
        if self.channels == 1 {
            return self.plane(0).to_vec();
        }
        let third = T::one() / T::from_count(self.channels);
        (0..self.pixel_count())
            .map(|i| self.planes().map(|p| p[i]).fold(T::zero(), |a, b| a + b) * third)
            .collect()
    }

    /// Replicates a grayscale buffer into three identical channels.
    pub fn to_rgb(&self) -> Self {
        if self.channels == 3 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.data.len() * 3);
        for _ in 0..3 {
            data.extend_from_slice(&self.data);
        }
        Self {
            channels: 3,
            data,
            ..*self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidBufferState(format!(
                "non-finite sample {} at planar index {i}",
                self.data[i]
            ))),
        }
    }

    pub fn ensure_colour(&self) -> Result<()> {
        if self.channels == 3 {
            Ok(())
        } else {
            Err(Error::NotColourImage(self.channels))
        }
    }

    /// True when every sample lies in `[0, 1]`.
    pub fn in_unit_range(&self) -> bool {
        self.data.iter().all(|&v| v >= T::zero() && v <= T::one())
    }

    /// Largest absolute sample difference against a buffer of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(
            (self.width, self.height, self.channels),
            (other.width, other.height, other.channels),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> ImageBuffer<U> {
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Clamps every sample into `[0, 1]`.
pub fn clamp01<T: Scalar>(buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    buf.ensure_finite()?;
    Ok(buf.map(clamp_unit))
}

#[inline]
pub(crate) fn clamp_unit<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Replicate-edge (Neumann) sample lookup on a row-major plane.
#[inline]
pub(crate) fn at_clamped<T: Copy>(
    plane: &[T],
    width: usize,
    height: usize,
    x: isize,
    y: isize,
) -> T {
    let xi = x.clamp(0, width as isize - 1) as usize;
    let yi = y.clamp(0, height as isize - 1) as usize;
    plane[yi * width + xi]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp01_examples() {
        let buf = ImageBuffer::from_planar(3, 1, 1, vec![1.2, -0.3, 0.5]).unwrap();
        let out = clamp01(&buf).unwrap();
        assert_eq!(out.samples(), &[1.0, 0.0, 0.5]);
        assert_eq!(clamp01(&out).unwrap(), out);
    }

    #[test]
    fn clamp01_rejects_nan() {
        let buf = ImageBuffer::from_planar(2, 1, 1, vec![0.1, f64::NAN]).unwrap();
        assert!(matches!(clamp01(&buf), Err(Error::InvalidBufferState(_))));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ImageBuffer::<f64>::filled(0, 3, 1, 0.0).is_err());
        assert!(ImageBuffer::<f64>::filled(2, 2, 2, 0.0).is_err());
        assert!(ImageBuffer::<f64>::from_planar(2, 2, 1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn interleaved_round_trip() {
        let data: Vec<f32> = (0..12).map(|i| i as f32 / 12.0).collect();
        let buf = ImageBuffer::from_interleaved(2, 2, 3, &data).unwrap();
        assert_eq!(buf.get(1, 0, 2), data[5]);
        assert_eq!(buf.to_interleaved(), data);
    }

    #[test]
    #[should_panic]
    fn out_of_bounds_access_panics() {
        let buf = ImageBuffer::<f64>::filled(2, 2, 1, 0.0).unwrap();
        buf.get(2, 0, 0);
    }

    #[test]
    fn edge_replication() {
        let plane = [1, 2, 3, 4];
        assert_eq!(at_clamped(&plane, 2, 2, -1, -5), 1);
        assert_eq!(at_clamped(&plane, 2, 2, 7, 1), 4);
    }
}
