use crate::image::{at_clamped, ImageBuffer};
use crate::scalar::Scalar;

/// Level-set curvature `div(∇I/|∇I|)` of every channel:
///
/// ```text
/// κ = (Ixx·Iy² − 2·Ix·Iy·Ixy + Iyy·Ix²) / (Ix² + Iy² + ε²)^(3/2)
/// ```
///
/// Central differences with replicate-edge padding. The result is a raw
/// field, not clamped.
pub fn curvature<T: Scalar>(buf: &ImageBuffer<T>, eps: f64) -> ImageBuffer<T> {
    let (w, h) = (buf.width(), buf.height());
    buf.map_planes(|_, plane| curvature_plane(plane, w, h, eps))
}

pub(crate) fn curvature_plane<T: Scalar>(plane: &[T], w: usize, h: usize, eps: f64) -> Vec<T> {
    let eps2 = T::lit(eps * eps);
    let (half, quarter, two) = (T::lit(0.5), T::lit(0.25), T::lit(2.0));
    let mut out = Vec::with_capacity(plane.len());
    for y in 0..h as isize {
        for x in 0..w as isize {
            let at = |dx: isize, dy: isize| at_clamped(plane, w, h, x + dx, y + dy);
            let c = at(0, 0);
            let ix = (at(1, 0) - at(-1, 0)) * half;
            let iy = (at(0, 1) - at(0, -1)) * half;
            let ixx = at(1, 0) - two * c + at(-1, 0);
            let iyy = at(0, 1) - two * c + at(0, -1);
            let ixy = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) * quarter;
            let num = ixx * iy * iy - two * ix * iy * ixy + iyy * ix * ix;
            let g2 = ix * ix + iy * iy + eps2;
            let den = g2 * g2.sqrt();
            out.push(num / den);
        }
    }
    out
}

/// Perona–Malik edge-stopping function `D(s) = 1 / (1 + (s/K)²)`.
#[inline]
pub fn diffusivity<T: Scalar>(grad_mag: T, pm_k: T) -> T {
    let r = grad_mag / pm_k;
    T::one() / (T::one() + r * r)
}
