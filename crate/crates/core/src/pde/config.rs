use serde::{Deserialize, Serialize};

use crate::contrast::OperatorSpec;
use crate::error::{Error, Result};

/// Which colour-correction anchor the evolution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PdeModel {
    /// `C = (I − m)/σ` with the channel mode: slow, no fidelity term.
    ModeAnchored,
    /// `C = (I − μ)/σ` with the channel mean, alongside the local fidelity
    /// and global forcing terms.
    MeanAnchored,
}

/// How the global and raw forcing terms enter the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermMode {
    /// `+ f(I)`: literal transcription, unbounded under iteration.
    Faithful,
    /// `+ (f(I) − I)`: every forcing term acts as a fidelity pull.
    Residual,
}

/// How the curvature term drives the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionForm {
    /// `λ·D·|∇I|·κ`: level sets move with normal speed `D·κ`. The stencil is
    /// bounded, so `dt·λ ≤ 0.25` keeps the explicit scheme stable.
    LevelSet,
    /// `λ·D·κ` as written. `κ` grows like `1/|∇I|` in flat regions, so this
    /// form is stiff and can roughen noisy images.
    Raw,
}

/// Largest admissible `dt · lambda_diff`.
pub const DIFFUSION_BUDGET: f64 = 0.25;
/// Largest admissible `dt · (λ_l + λ_g + λ_f + λ_c·max|C|)`.
pub const FORCING_BUDGET: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeConfig {
    pub model: PdeModel,
    /// Weight of the curvature diffusion term (λ).
    pub lambda_diff: f64,
    pub diffusion_form: DiffusionForm,
    /// Weight of the local fidelity term `f_l(I) − I`.
    pub lambda_local: f64,
    /// Weight of the global forcing term.
    pub lambda_global: f64,
    /// Weight of the colour-correction term `C`.
    pub lambda_colour: f64,
    /// Weight of the raw contrast term `f(I)`; `f` is the local operator.
    pub lambda_f: f64,
    pub dt: f64,
    pub max_iters: usize,
    /// Stop once the mean absolute update drops below this.
    pub tol: f64,
    /// Perona–Malik contrast scale K.
    pub pm_k: f64,
    /// Gradient regularization inside the curvature denominator.
    pub eps: f64,
    /// Floor on σ in the colour term.
    pub sigma_min: f64,
    pub term_mode: TermMode,
    /// Local operator cascade `f_l`, applied left to right.
    pub local_op: Vec<OperatorSpec>,
    /// Global operator cascade `f_g`.
    pub global_op: Vec<OperatorSpec>,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            model: PdeModel::MeanAnchored,
            lambda_diff: 0.5,
            diffusion_form: DiffusionForm::LevelSet,
            lambda_local: 1.0,
            lambda_global: 0.5,
            lambda_colour: 0.05,
            lambda_f: 0.0,
            dt: 0.1,
            max_iters: 20,
            tol: 1e-4,
            pm_k: 0.1,
            eps: 1e-4,
            sigma_min: 1e-3,
            term_mode: TermMode::Residual,
            local_op: vec![OperatorSpec::by_name("clahe").expect("builtin operator")],
            global_op: vec![OperatorSpec::Goc2],
        }
    }
}

impl PdeConfig {
    /// Mode-anchored evolution driven by a single raw contrast term.
    pub fn mode_anchored() -> Self {
        Self {
            model: PdeModel::ModeAnchored,
            lambda_local: 0.0,
            lambda_global: 0.0,
            lambda_colour: 0.02,
            lambda_f: 1.0,
            global_op: Vec::new(),
            ..Self::default()
        }
    }

    /// Every gain set to zero.
    pub fn inert() -> Self {
        Self {
            lambda_diff: 0.0,
            lambda_local: 0.0,
            lambda_global: 0.0,
            lambda_colour: 0.0,
            lambda_f: 0.0,
            ..Self::default()
        }
    }

    /// Image-independent checks: parameter domains, operator parameters and
    /// the diffusion and fidelity parts of the stability budget.
    pub fn validate(&self) -> Result<()> {
        let gains = [
            ("lambda_diff", self.lambda_diff),
            ("lambda_local", self.lambda_local),
            ("lambda_global", self.lambda_global),
            ("lambda_colour", self.lambda_colour),
            ("lambda_f", self.lambda_f),
        ];
        for (name, g) in gains {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {g}"
                )));
            }
        }
        let positive = [
            ("dt", self.dt),
            ("pm_k", self.pm_k),
            ("eps", self.eps),
            ("sigma_min", self.sigma_min),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be >= 0, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        for op in self.local_op.iter().chain(&self.global_op) {
            op.validate()?;
        }
        let diffusion = self.dt * self.lambda_diff;
        if diffusion > DIFFUSION_BUDGET {
            return Err(Error::StabilityBudgetExceeded(format!(
                "dt * lambda_diff = {diffusion} > {DIFFUSION_BUDGET}"
            )));
        }
        let forcing = self.forcing_budget(0.0);
        if forcing > FORCING_BUDGET {
            return Err(Error::StabilityBudgetExceeded(format!(
                "dt * (lambda_local + lambda_global + lambda_f) = {forcing} > {FORCING_BUDGET}"
            )));
        }
        Ok(())
    }

    /// `dt · (λ_l + λ_g + λ_f + λ_c · colour_peak)`.
    pub fn forcing_budget(&self, colour_peak: f64) -> f64 {
        self.dt
            * (self.lambda_local
                + self.lambda_global
                + self.lambda_f
                + self.lambda_colour * colour_peak)
    }
}
