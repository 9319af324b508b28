use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use uwpde::analysis::QualityReport;
use uwpde::image::{load_image, save_image};
use uwpde::pipeline::{run_pipeline, PipelineSpec};

use crate::{file_safe, file_stem, io_err, thread_pool, CliError, CliResult, RunManifest};

/// Batch summary written next to the outputs.
pub const BATCH_REPORT: &str = "report.csv";

#[derive(Debug, Clone)]
pub struct ImageOutcome {
    pub input: PathBuf,
    pub result: Result<(PathBuf, QualityReport<f64>), String>,
}

#[derive(Debug, Clone)]
pub struct EnhanceSummary {
    pub pipeline: String,
    /// One entry per input, sorted by input path.
    pub outcomes: Vec<ImageOutcome>,
    pub report: PathBuf,
}

impl EnhanceSummary {
    pub fn failures(&self) -> impl Iterator<Item = (&Path, &str)> {
        self.outcomes.iter().filter_map(|o| {
            o.result
                .as_ref()
                .err()
                .map(|e| (o.input.as_path(), e.as_str()))
        })
    }

    pub fn success(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Enhances every input with the manifest's pipeline. Per-image failures are
/// collected; only manifest problems return `Err`.
pub fn cmd_enhance(manifest: &RunManifest) -> CliResult<EnhanceSummary> {
    let spec = manifest.prepare()?;
    let pool = thread_pool(manifest.jobs)?;
    let mut outcomes: Vec<ImageOutcome> = pool.install(|| {
        manifest
            .inputs
            .par_iter()
            .map(|input| ImageOutcome {
                input: input.clone(),
                result: enhance_one(input, &spec, manifest).map_err(|e| e.to_string()),
            })
            .collect()
    });
    outcomes.sort_by(|a, b| a.input.cmp(&b.input));
    let report = manifest.out_dir.join(BATCH_REPORT);
    write_batch_report(&report, &outcomes)?;
    Ok(EnhanceSummary {
        pipeline: spec.name,
        outcomes,
        report,
    })
}

fn enhance_one(
    input: &Path,
    spec: &PipelineSpec,
    manifest: &RunManifest,
) -> CliResult<(PathBuf, QualityReport<f64>)> {
    let img = load_image::<f64>(input)?;
    let (out, report) = run_pipeline(&img, spec)?;
    let base = format!("{}.{}", file_stem(input), file_safe(&spec.name));
    let dir = &manifest.out_dir;
    let image_path = dir.join(format!("{base}.png"));
    save_image(&out, &image_path, manifest.bit_depth)?;
    if manifest.write_reports {
        let path = dir.join(format!("{base}.report.csv"));
        report.write_csv(BufWriter::new(File::create(&path).map_err(io_err(&path))?))?;
        if let Some(trace) = report.pde_trace() {
            let path = dir.join(format!("{base}.trace.csv"));
            trace.write_csv(BufWriter::new(File::create(&path).map_err(io_err(&path))?))?;
        }
    }
    let quality = report.stages.last().map_or(report.input, |s| s.quality);
    Ok((image_path, quality))
}

fn write_batch_report(path: &Path, outcomes: &[ImageOutcome]) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut wtr = csv::Writer::from_writer(BufWriter::new(file));
    let mut header = vec!["input", "output", "status", "error"];
    header.extend(QualityReport::<f64>::CSV_FIELDS);
    wtr.write_record(&header).map_err(csv_error(path))?;
    for o in outcomes {
        let mut row = vec![o.input.display().to_string()];
        match &o.result {
            Ok((output, q)) => {
                row.extend([output.display().to_string(), "ok".into(), String::new()]);
                row.extend(q.values().iter().map(|v| v.to_string()));
            }
            Err(e) => {
                row.extend([String::new(), "failed".into(), e.clone()]);
                row.extend(std::iter::repeat_n(
                    String::new(),
                    QualityReport::<f64>::CSV_FIELDS.len(),
                ));
            }
        }
        wtr.write_record(&row).map_err(csv_error(path))?;
    }
    wtr.flush().map_err(io_err(path))
}

pub(crate) fn csv_error(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}
