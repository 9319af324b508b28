//! Linear RGB ↔ CIE XYZ (sRGB primaries, D65 white) and the XYZ based
//! colour-cast remover.

use crate::analysis::min_max;
use crate::error::Result;
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

type Mat3 = [[f64; 3]; 3];

/// sRGB primaries, D65 reference white.
pub const RGB_TO_XYZ: Mat3 = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

/// Exact inverse of [`RGB_TO_XYZ`], computed by cofactors.
pub fn xyz_to_rgb_matrix() -> Mat3 {
    let m = RGB_TO_XYZ;
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    adj.map(|row| row.map(|v| v / det))
}

/// XYZ of linear RGB white `(1, 1, 1)`: the row sums of [`RGB_TO_XYZ`].
pub fn white_point() -> [f64; 3] {
    RGB_TO_XYZ.map(|row| row.iter().sum())
}

fn apply_matrix<T: Scalar>(buf: &ImageBuffer<T>, m: &Mat3) -> Result<ImageBuffer<T>> {
    buf.ensure_colour()?;
    let m = m.map(|row| row.map(T::lit));
    let (p0, p1, p2) = (buf.plane(0), buf.plane(1), buf.plane(2));
    let planes = m
        .iter()
        .map(|row| {
            (0..buf.pixel_count())
                .map(|i| row[0] * p0[i] + row[1] * p1[i] + row[2] * p2[i])
                .collect()
        })
        .collect();
    ImageBuffer::from_planes(buf.width(), buf.height(), planes)
}

/// Linear RGB to XYZ. The output is not clamped (white has `Z ≈ 1.089`).
pub fn rgb_to_xyz<T: Scalar>(buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    apply_matrix(buf, &RGB_TO_XYZ)
}

/// XYZ to linear RGB, clamped to `[0, 1]`.
pub fn xyz_to_rgb<T: Scalar>(buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    Ok(xyz_to_rgb_unclamped(buf)?.map(clamp_unit))
}

pub fn xyz_to_rgb_unclamped<T: Scalar>(buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    apply_matrix(buf, &xyz_to_rgb_matrix())
}

/// sRGB transfer function decode (display-encoded to linear).
pub fn srgb_to_linear<T: Scalar>(v: T) -> T {
    if v <= T::lit(0.04045) {
        v / T::lit(12.92)
    } else {
        ((v + T::lit(0.055)) / T::lit(1.055)).powf(T::lit(2.4))
    }
}

pub fn linear_to_srgb<T: Scalar>(v: T) -> T {
    if v <= T::lit(0.003_130_8) {
        v * T::lit(12.92)
    } else {
        T::lit(1.055) * v.powf(T::lit(1.0 / 2.4)) - T::lit(0.055)
    }
}

/// Plane spans below this are treated as constant.
const FLAT_PLANE: f64 = 1e-12;

/// Colour-cast removal in XYZ: each of X, Y and Z is stretched independently
/// so its minimum maps to 0 and its maximum to the white-point component of
/// that plane, then the result is converted back to RGB and clamped.
///
/// A neutral image already spanning black to white is left unchanged, and a
/// cast that shifts one channel by a constant is mapped back to gray.
pub fn xyz_cast_removal<T: Scalar>(buf: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    xyz_cast_removal_with(buf, false)
}

/// As [`xyz_cast_removal`]; with `srgb_encoded` the input is decoded to linear
/// light first and the output re-encoded.
pub fn xyz_cast_removal_with<T: Scalar>(
    buf: &ImageBuffer<T>,
    srgb_encoded: bool,
) -> Result<ImageBuffer<T>> {
    buf.ensure_colour()?;
    let linear = if srgb_encoded {
        buf.map(srgb_to_linear)
    } else {
        buf.clone()
    };
    let xyz = rgb_to_xyz(&linear)?;
    let white = white_point();
    let stretched = xyz.map_planes(|c, plane| {
        let (lo, hi) = min_max(plane);
        let span = hi - lo;
        if span < T::lit(FLAT_PLANE) {
            plane.to_vec()
        } else {
            let scale = T::lit(white[c]) / span;
            plane.iter().map(|&v| (v - lo) * scale).collect()
        }
    });
    let rgb = xyz_to_rgb(&stretched)?;
    Ok(if srgb_encoded {
        rgb.map(linear_to_srgb).map(clamp_unit)
    } else {
        rgb
    })
}
