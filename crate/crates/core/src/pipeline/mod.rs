//! Declarative pipelines: the named PDE operator-order presets and the two
//! colour-cast pipelines, plus the executor that runs them.

mod diagnose;
mod overrides;
mod presets;

pub use diagnose::{diagnose, Diagnosis, Hint, CAST_THRESHOLD};
pub use overrides::apply_override;
pub use presets::{preset_names, resolve_named, PRESET_NAMES};

use serde::{Deserialize, Serialize};

use crate::analysis::{quality_report, QualityReport};
use crate::colour::{fuzzy_homomorphic, xyz_cast_removal, HomomorphicParams};
use crate::contrast::{pwl_apply, pwl_from_stats, OperatorSpec};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::pde::{check_stability, evolve, EvolutionTrace, PdeConfig};
use crate::scalar::Scalar;

/// Trigger for the optional finishing stages: the image is dark or faded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinisherParams {
    /// Trigger when mean luminance is below this.
    pub mean_threshold: f64,
    /// Trigger when the luminance range (max − min) is below this.
    pub range_threshold: f64,
    pub p_low_frac: f64,
    pub p_high_frac: f64,
}

impl Default for FinisherParams {
    fn default() -> Self {
        Self {
            mean_threshold: 0.35,
            range_threshold: 0.5,
            p_low_frac: 0.01,
            p_high_frac: 0.99,
        }
    }
}

impl FinisherParams {
    pub fn triggered<T: Scalar>(&self, buf: &ImageBuffer<T>) -> bool {
        let lum = buf.luminance();
        let (mean, _) = crate::analysis::mean_std(&lum);
        let (lo, hi) = crate::analysis::min_max(&lum);
        mean.as_f64() < self.mean_threshold || (hi - lo).as_f64() < self.range_threshold
    }
}

/// One pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Stage {
    PdeEvolve(PdeConfig),
    Operator {
        operator: OperatorSpec,
    },
    XyzCastRemoval,
    FuzzyHomomorphic {
        #[serde(default)]
        params: HomomorphicParams,
        /// Run only when the image is dark or faded.
        #[serde(default)]
        conditional: bool,
        #[serde(default)]
        trigger: FinisherParams,
    },
    /// Percentile PWL stretch applied only when the image is dark or faded.
    PwlFinisher(FinisherParams),
}

impl Stage {
    pub fn label(&self) -> String {
        match self {
            Stage::PdeEvolve(_) => "pde-evolve".into(),
            Stage::Operator { operator } => format!("operator:{}", operator.name()),
            Stage::XyzCastRemoval => "xyz-cast-removal".into(),
            Stage::FuzzyHomomorphic { .. } => "fuzzy-homomorphic".into(),
            Stage::PwlFinisher(_) => "pwl-finisher".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Stage::PdeEvolve(cfg) => cfg.validate(),
            Stage::Operator { operator } => operator.validate(),
            Stage::XyzCastRemoval => Ok(()),
            Stage::FuzzyHomomorphic {
                params, trigger, ..
            } => {
                params.validate()?;
                crate::analysis::check_fractions(trigger.p_low_frac, trigger.p_high_frac)
            }
            Stage::PwlFinisher(p) => crate::analysis::check_fractions(p.p_low_frac, p.p_high_frac),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSpec {
    pub name: String,
    pub stages: Vec<Stage>,
}

impl PipelineSpec {
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Config(format!(
                "pipeline `{}` has no stages",
                self.name
            )));
        }
        self.stages.iter().try_for_each(Stage::validate)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn pde_configs_mut(&mut self) -> impl Iterator<Item = &mut PdeConfig> {
        self.stages.iter_mut().filter_map(|s| match s {
            Stage::PdeEvolve(cfg) => Some(cfg),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport<T> {
    pub label: String,
    /// Condition of an optional stage was false; the image passed through.
    pub skipped: bool,
    /// Quality of the image after this stage.
    pub quality: QualityReport<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<EvolutionTrace<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport<T> {
    pub pipeline: String,
    pub input: QualityReport<T>,
    pub stages: Vec<StageReport<T>>,
}

impl<T: Scalar> RunReport<T> {
    /// Trace of the first PDE stage, if any.
    pub fn pde_trace(&self) -> Option<&EvolutionTrace<T>> {
        self.stages.iter().find_map(|s| s.trace.as_ref())
    }

    /// One row per stage (plus the input): `stage, skipped, <metrics>`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["stage", "skipped"];
        header.extend(QualityReport::<T>::CSV_FIELDS);
        wtr.write_record(&header).map_err(crate::pde::csv_err)?;
        let rows = std::iter::once(("input".to_string(), false, &self.input)).chain(
            self.stages
                .iter()
                .map(|s| (s.label.clone(), s.skipped, &s.quality)),
        );
        for (label, skipped, q) in rows {
            let mut row = vec![label, skipped.to_string()];
            row.extend(q.values().iter().map(|v| v.to_string()));
            wtr.write_record(&row).map_err(crate::pde::csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Applies the stages of `spec` in order.
pub fn run_pipeline<T: Scalar>(
    buf: &ImageBuffer<T>,
    spec: &PipelineSpec,
) -> Result<(ImageBuffer<T>, RunReport<T>)> {
    spec.validate()?;
    buf.ensure_finite()?;
    let mut cur = buf.clone();
    let mut stages = Vec::with_capacity(spec.stages.len());
    for stage in &spec.stages {
        let mut trace = None;
        let mut skipped = false;
        cur = match stage {
            Stage::PdeEvolve(cfg) => {
                check_stability(&cur, cfg)?;
                let (out, t) = evolve(&cur, cfg)?;
                trace = Some(t);
                out
            }
            Stage::Operator { operator } => operator.apply(&cur)?,
            Stage::XyzCastRemoval => xyz_cast_removal(&cur)?,
            Stage::FuzzyHomomorphic {
                params,
                conditional,
                trigger,
            } => {
                if *conditional && !trigger.triggered(&cur) {
                    skipped = true;
                    cur
                } else {
                    fuzzy_homomorphic(&cur, params)?
                }
            }
            Stage::PwlFinisher(p) => {
                if p.triggered(&cur) {
                    pwl_apply(&cur, &pwl_from_stats(&cur, p.p_low_frac, p.p_high_frac)?)
                } else {
                    skipped = true;
                    cur
                }
            }
        };
        stages.push(StageReport {
            label: stage.label(),
            skipped,
            quality: quality_report(&cur),
            trace,
        });
    }
    let report = RunReport {
        pipeline: spec.name.clone(),
        input: quality_report(buf),
        stages,
    };
    Ok((cur, report))
}

/// PA-1: XYZ cast removal, PDE PWL-CLAHE enhancement, fuzzy homomorphic
/// filtering, then a PWL finisher if the result is dark or faded.
pub fn run_pa1<T: Scalar>(buf: &ImageBuffer<T>) -> Result<(ImageBuffer<T>, RunReport<T>)> {
    buf.ensure_colour()?;
    run_pipeline(buf, &resolve_named("pa-1")?)
}

/// PA-2: XYZ cast removal, PDE PWL-CLAHE enhancement, then a PWL finisher if
/// the result is dark or faded.
///
/// The cast is removed before enhancement: the percentile PWL saturates every
/// channel to the full range, after which a min/max XYZ stretch is a no-op.
pub fn run_pa2<T: Scalar>(buf: &ImageBuffer<T>) -> Result<(ImageBuffer<T>, RunReport<T>)> {
    buf.ensure_colour()?;
    run_pipeline(buf, &resolve_named("pa-2")?)
}
