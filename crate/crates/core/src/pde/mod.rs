//! Explicit-time evolution of the curvature-diffusion PDE with contrast and
//! colour forcing.

mod config;
mod curvature;
mod evolve;

pub use config::{DiffusionForm, PdeConfig, PdeModel, TermMode, DIFFUSION_BUDGET, FORCING_BUDGET};
pub use curvature::{curvature, diffusivity};
pub use evolve::{
    check_stability, colour_peak, colour_term, evolve, pde_step, ChannelSnapshot, ColourAnchor,
    EvolutionTrace, TraceRecord,
};

pub(crate) use evolve::csv_err;
