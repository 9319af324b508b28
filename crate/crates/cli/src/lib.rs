//! Batch front end for the enhancement library: `enhance`, `analyze`,
//! `compare` and `presets`, each callable as a plain function.

mod analyze;
mod compare;
mod enhance;
mod render;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use uwpde::pipeline::{apply_override, preset_names, resolve_named, PipelineSpec};
use uwpde::BitDepth;

pub use analyze::{cmd_analyze, AnalyzeSummary};
pub use compare::{cmd_compare, CompareRequest, CompareSummary, COMPARE_CSV};
pub use enhance::{cmd_enhance, EnhanceSummary, ImageOutcome, BATCH_REPORT};
pub use render::{draw_label, histogram_plot, montage, MONTAGE_SEPARATOR};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] uwpde::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineSource {
    Named(String),
    Config(PathBuf),
}

/// Everything one `enhance` batch needs, checked up front by [`RunManifest::prepare`].
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub pipeline: PipelineSource,
    /// `KEY=VALUE` overrides with dotted keys, applied in order.
    pub overrides: Vec<String>,
    pub bit_depth: BitDepth,
    /// Worker count; `None` uses every core.
    pub jobs: Option<usize>,
    /// Write the per-image run report and trace CSVs.
    pub write_reports: bool,
}

impl RunManifest {
    pub fn new(
        inputs: Vec<PathBuf>,
        out_dir: impl Into<PathBuf>,
        pipeline: PipelineSource,
    ) -> Self {
        Self {
            inputs,
            out_dir: out_dir.into(),
            pipeline,
            overrides: Vec::new(),
            bit_depth: BitDepth::Eight,
            jobs: None,
            write_reports: true,
        }
    }

    /// Resolves the pipeline, applies and validates overrides, checks the
    /// inputs and makes sure the output directory is writable. Nothing is
    /// processed if this fails.
    pub fn prepare(&self) -> CliResult<PipelineSpec> {
        if self.inputs.is_empty() {
            return Err(CliError::Usage("no input images given".into()));
        }
        let mut seen = HashSet::new();
        let mut stems = HashSet::new();
        for p in &self.inputs {
            let key = fs::canonicalize(p).unwrap_or_else(|_| p.clone());
            if !seen.insert(key) {
                return Err(CliError::Usage(format!(
                    "input {} given twice",
                    p.display()
                )));
            }
            if !stems.insert(file_stem(p)) {
                return Err(CliError::Usage(format!(
                    "inputs share the file stem `{}`; outputs would collide",
                    file_stem(p)
                )));
            }
        }
        let spec = self.resolve_spec()?;
        ensure_writable_dir(&self.out_dir)?;
        Ok(spec)
    }

    fn resolve_spec(&self) -> CliResult<PipelineSpec> {
        let mut spec = match &self.pipeline {
            PipelineSource::Named(name) => resolve_named(name)?,
            PipelineSource::Config(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                PipelineSpec::from_toml(&text)?
            }
        };
        for raw in &self.overrides {
            let (key, value) = raw
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("override `{raw}` is not KEY=VALUE")))?;
            spec = apply_override(&spec, key.trim(), value.trim())?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

pub(crate) fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

/// Keeps pipeline names usable inside file names.
pub(crate) fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub(crate) fn ensure_writable_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let probe = dir.join(".uwpde-write-probe");
    fs::write(&probe, b"").map_err(io_err(dir))?;
    fs::remove_file(&probe).map_err(io_err(&probe))
}

pub(crate) fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

/// Lists presets, or returns the TOML of one preset.
pub fn cmd_presets(dump: Option<&str>) -> CliResult<String> {
    match dump {
        Some(name) => Ok(resolve_named(name)?.to_toml()?),
        None => Ok(preset_names().iter().map(|n| format!("{n}\n")).collect()),
    }
}

/// Writes the bundled synthetic corpus as 8-bit PNGs named `NN-<name>.png`.
pub fn cmd_seed_corpus(out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    ensure_writable_dir(out_dir)?;
    uwpde::corpus::bundled()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let path = out_dir.join(format!("{i:02}-{}.png", c.name));
            uwpde::image::save_image(&c.image, &path, BitDepth::Eight)?;
            Ok(path)
        })
        .collect()
}
