//! PDE-driven enhancement for underwater images.
//!
//! The core evolution is an explicit Euler scheme for
//!
//! ```text
//! dI/dt = λ·D(|∇I|)·|∇I|·div(∇I/|∇I|) + λ_l·(f_l(I) − I) + λ_g·(f_g(I) − I) + λ_c·C(I)
//! ```
//!
//! where `D` is a Perona–Malik edge-stopping diffusivity (so level sets move
//! by their curvature, slowed across edges), `f_l`/`f_g` are
//! contrast operators (CLAHE, piecewise-linear stretch, histogram/contrast
//! stretch, gain-offset correction) and `C = (I − m)/σ` is a statistics driven
//! colour-correction term anchored at either the channel mode or mean.
//!
//! Around the solver sit the contrast operators ([`contrast`]), an XYZ based
//! colour-cast remover and a fuzzy homomorphic filter ([`colour`]), named
//! pipelines ([`pipeline`]) and no-reference quality metrics ([`analysis`]).
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common case.

pub mod analysis;
pub mod colour;
pub mod contrast;
pub mod corpus;
pub mod error;
pub mod image;
pub mod pde;
pub mod pipeline;
pub mod report;
mod scalar;

pub use error::{Error, Result};
pub use image::{BitDepth, ImageBuffer};
pub use scalar::Scalar;

/// Double precision image, the default working type.
pub type Image = ImageBuffer<f64>;
/// Single precision image.
pub type ImageF32 = ImageBuffer<f32>;
/// Per-channel statistics at double precision.
pub type ChannelStats = analysis::ChannelStats<f64>;
/// Quality report at double precision.
pub type QualityReport = analysis::QualityReport<f64>;
/// Evolution trace at double precision.
pub type EvolutionTrace = pde::EvolutionTrace<f64>;
/// Pipeline run report at double precision.
pub type RunReport = pipeline::RunReport<f64>;
