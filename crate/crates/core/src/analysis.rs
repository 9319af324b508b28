//! Per-channel statistics, histogram diagnostics and no-reference quality
//! metrics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::scalar::Scalar;

/// Bin count used for mode estimation and the entropy metric.
pub const DEFAULT_BINS: usize = 256;

/// Fixed-range `[0, 1]` histogram; bin `i` covers `[i/B, (i+1)/B)`, the last
/// bin is closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    /// Histogram of an arbitrary slice of samples. Samples outside `[0, 1]`
    /// land in the first or last bin.
    pub fn from_samples<T: Scalar>(samples: &[T], bins: usize) -> Self {
        assert!(bins >= 2, "histogram needs at least two bins");
        let mut counts = vec![0u64; bins];
        for &v in samples {
            counts[bin_index(v, bins)] += 1;
        }
        Self { counts }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Index of the fullest bin, ties resolved toward the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }

    pub fn bin_center<T: Scalar>(&self, index: usize) -> T {
        (T::from_count(index) + T::lit(0.5)) / T::from_count(self.bins())
    }

    /// First bin whose cumulative count reaches `frac · total`.
    pub fn cdf_bin(&self, frac: f64) -> usize {
        let target = frac * self.total() as f64;
        let mut acc = 0u64;
        for (i, &c) in self.counts.iter().enumerate() {
            acc += c;
            if acc as f64 >= target {
                return i;
            }
        }
        self.bins() - 1
    }

    /// Normalized mean bin index, in `[0, 1]`.
    pub fn mean_bin(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| i as f64 * c as f64)
            .sum();
        s / total as f64 / (self.bins() - 1) as f64
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        let total = self.total() as f64;
        if total == 0.0 {
            return 0.0;
        }
        self.counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.log2()
            })
            .sum()
    }
}

/// `min(B − 1, floor(v · B))`, with negative samples in bin 0.
#[inline]
pub fn bin_index<T: Scalar>(v: T, bins: usize) -> usize {
    let scaled = (v.max(T::zero()) * T::from_count(bins)).floor();
    scaled.to_usize().unwrap_or(bins - 1).min(bins - 1)
}

/// Histogram of one channel.
pub fn channel_histogram<T: Scalar>(
    buf: &ImageBuffer<T>,
    channel: usize,
    bins: usize,
) -> Result<Histogram> {
    check_channel(buf, channel)?;
    check_bins(bins)?;
    Ok(Histogram::from_samples(buf.plane(channel), bins))
}

fn check_channel<T: Scalar>(buf: &ImageBuffer<T>, channel: usize) -> Result<()> {
    if channel >= buf.channels() {
        Err(Error::ChannelOutOfRange {
            channel,
            channels: buf.channels(),
        })
    } else {
        Ok(())
    }
}

fn check_bins(bins: usize) -> Result<()> {
    if bins < 2 {
        Err(Error::InvalidParameter(format!(
            "histogram needs at least 2 bins, got {bins}"
        )))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelStats<T> {
    pub mean: T,
    /// Population standard deviation.
    pub std: T,
    /// Center of the fullest histogram bin, clamped to `[min, max]`.
    pub mode: T,
    pub min: T,
    pub max: T,
    pub p_low: T,
    pub p_high: T,
}

/// Statistics of one channel; percentiles follow the histogram CDF.
pub fn channel_stats<T: Scalar>(
    buf: &ImageBuffer<T>,
    channel: usize,
    bins: usize,
    p_low_frac: f64,
    p_high_frac: f64,
) -> Result<ChannelStats<T>> {
    check_channel(buf, channel)?;
    check_bins(bins)?;
    check_fractions(p_low_frac, p_high_frac)?;
    Ok(stats_of(buf.plane(channel), bins, p_low_frac, p_high_frac))
}

pub(crate) fn check_fractions(lo: f64, hi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "percentile fractions must satisfy 0 <= low < high <= 1, got ({lo}, {hi})"
        )))
    }
}

/// Statistics of an arbitrary sample slice.
pub fn stats_of<T: Scalar>(
    samples: &[T],
    bins: usize,
    p_low_frac: f64,
    p_high_frac: f64,
) -> ChannelStats<T> {
    let (min, max) = min_max(samples);
    let hist = Histogram::from_samples(samples, bins);
    let (mean, std) = if min == max {
        (min, T::zero())
    } else {
        mean_std(samples)
    };
    ChannelStats {
        mean,
        std,
        mode: hist.bin_center::<T>(hist.argmax()).max(min).min(max),
        min,
        max,
        p_low: percentile(&hist, p_low_frac, min, max),
        p_high: percentile(&hist, p_high_frac, min, max),
    }
}

/// Fraction `0` is the exact minimum, `1` the exact maximum; anything in
/// between is the center of the first bin reaching the fraction, clamped to
/// `[min, max]`.
pub(crate) fn percentile<T: Scalar>(hist: &Histogram, frac: f64, min: T, max: T) -> T {
    if frac <= 0.0 {
        min
    } else if frac >= 1.0 {
        max
    } else {
        hist.bin_center::<T>(hist.cdf_bin(frac)).max(min).min(max)
    }
}

pub(crate) fn min_max<T: Scalar>(samples: &[T]) -> (T, T) {
    samples
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Arithmetic mean, clamped into the sample range so constant inputs are exact.
pub fn mean<T: Scalar>(samples: &[T]) -> T {
    let n = T::from_count(samples.len());
    let (lo, hi) = min_max(samples);
    (samples.iter().copied().sum::<T>() / n).max(lo).min(hi)
}

/// Two-pass mean and population standard deviation.
pub fn mean_std<T: Scalar>(samples: &[T]) -> (T, T) {
    let n = T::from_count(samples.len());
    let mean = mean(samples);
    let var = samples.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (mean, var.sqrt())
}

pub fn channel_means<T: Scalar>(buf: &ImageBuffer<T>) -> Vec<T> {
    buf.planes().map(mean).collect()
}

/// Largest pairwise difference between the three channel means.
pub fn cast_score<T: Scalar>(buf: &ImageBuffer<T>) -> Result<T> {
    buf.ensure_colour()?;
    let m = channel_means(buf);
    Ok((m[0] - m[1])
        .abs()
        .max((m[0] - m[2]).abs())
        .max((m[1] - m[2]).abs()))
}

/// No-reference quality metrics of one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport<T> {
    /// Shannon entropy of the 256-bin histogram, averaged over channels.
    pub entropy: T,
    /// Standard deviation of luminance.
    pub rms_contrast: T,
    /// Hasler–Süsstrunk colourfulness.
    pub colourfulness: T,
    /// Mean central-difference gradient magnitude of luminance.
    pub mean_gradient: T,
    pub cast_score: T,
}

impl<T: Scalar> QualityReport<T> {
    pub const CSV_FIELDS: [&'static str; 5] = [
        "entropy",
        "rms_contrast",
        "colourfulness",
        "mean_gradient",
        "cast_score",
    ];

    pub fn values(&self) -> [T; 5] {
        [
            self.entropy,
            self.rms_contrast,
            self.colourfulness,
            self.mean_gradient,
            self.cast_score,
        ]
    }
}

pub fn quality_report<T: Scalar>(buf: &ImageBuffer<T>) -> QualityReport<T> {
    let entropy = buf
        .planes()
        .map(|p| Histogram::from_samples(p, DEFAULT_BINS).entropy())
        .sum::<f64>()
        / buf.channels() as f64;
    let lum = buf.luminance();
    let (_, rms_contrast) = mean_std(&lum);
    let (colourfulness, cast) = if buf.channels() == 3 {
        (
            colourfulness(buf),
            cast_score(buf).unwrap_or_else(|_| T::zero()),
        )
    } else {
        (T::zero(), T::zero())
    };
    QualityReport {
        entropy: T::lit(entropy),
        rms_contrast,
        colourfulness,
        mean_gradient: mean_gradient(&lum, buf.width(), buf.height()),
        cast_score: cast,
    }
}

fn colourfulness<T: Scalar>(buf: &ImageBuffer<T>) -> T {
    let (r, g, b) = (buf.plane(0), buf.plane(1), buf.plane(2));
    let half = T::lit(0.5);
    let rg: Vec<T> = r.iter().zip(g).map(|(&r, &g)| r - g).collect();
    let yb: Vec<T> = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| half * (r + g) - b)
        .collect();
    let (mu_rg, sd_rg) = mean_std(&rg);
    let (mu_yb, sd_yb) = mean_std(&yb);
    (sd_rg * sd_rg + sd_yb * sd_yb).sqrt() + T::lit(0.3) * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt()
}

/// Central-difference gradient with replicate-edge padding.
pub(crate) fn central_gradient<T: Scalar>(
    plane: &[T],
    width: usize,
    height: usize,
    x: usize,
    y: usize,
) -> (T, T) {
    use crate::image::at_clamped;
    let (xi, yi) = (x as isize, y as isize);
    let half = T::lit(0.5);
    let gx = (at_clamped(plane, width, height, xi + 1, yi)
        - at_clamped(plane, width, height, xi - 1, yi))
        * half;
    let gy = (at_clamped(plane, width, height, xi, yi + 1)
        - at_clamped(plane, width, height, xi, yi - 1))
        * half;
    (gx, gy)
}

pub fn mean_gradient<T: Scalar>(plane: &[T], width: usize, height: usize) -> T {
    let mut acc = T::zero();
    for y in 0..height {
        for x in 0..width {
            let (gx, gy) = central_gradient(plane, width, height, x, y);
            acc = acc + (gx * gx + gy * gy).sqrt();
        }
    }
    acc / T::from_count(width * height)
}

/// Isotropic total variation with forward differences (zero past the last
/// row and column).
pub fn total_variation<T: Scalar>(plane: &[T], width: usize, height: usize) -> T {
    let mut acc = T::zero();
    for y in 0..height {
        for x in 0..width {
            let v = plane[y * width + x];
            let dx = if x + 1 < width {
                plane[y * width + x + 1] - v
            } else {
                T::zero()
            };
            let dy = if y + 1 < height {
                plane[(y + 1) * width + x] - v
            } else {
                T::zero()
            };
            acc = acc + (dx * dx + dy * dy).sqrt();
        }
    }
    acc
}
