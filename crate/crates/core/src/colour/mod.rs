//! Colour-space conversion, XYZ cast removal and fuzzy homomorphic
//! enhancement.

mod homomorphic;
mod xyz;

pub use homomorphic::{fuzzy_homomorphic, HomomorphicParams};
pub use xyz::{
    linear_to_srgb, rgb_to_xyz, srgb_to_linear, white_point, xyz_cast_removal,
    xyz_cast_removal_with, xyz_to_rgb, xyz_to_rgb_matrix, xyz_to_rgb_unclamped, RGB_TO_XYZ,
};
