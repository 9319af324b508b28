use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use uwpde::analysis::{quality_report, QualityReport};
use uwpde::image::{load_image, save_image};
use uwpde::pipeline::{resolve_named, run_pipeline, PipelineSpec};
use uwpde::{BitDepth, Image};

use crate::enhance::csv_error;
use crate::render::montage;
use crate::{ensure_writable_dir, file_safe, file_stem, io_err, thread_pool, CliError, CliResult};

/// Name of the comparison matrix inside the output directory.
pub const COMPARE_CSV: &str = "compare.csv";
const BASELINE: &str = "original";

#[derive(Debug, Clone)]
pub struct CompareRequest {
    pub inputs: Vec<PathBuf>,
    pub pipelines: Vec<String>,
    pub out_dir: PathBuf,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub csv: PathBuf,
    pub montages: Vec<PathBuf>,
    /// `(input, pipeline, reason)` of every failed cell.
    pub failures: Vec<(PathBuf, String, String)>,
}

impl CompareSummary {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Cell {
    pipeline: String,
    result: Result<QualityReport<f64>, String>,
}

struct ImageResult {
    input: PathBuf,
    cells: Vec<Cell>,
    montage: Option<PathBuf>,
}

/// Quality matrix of every `(image, pipeline)` pair plus the unprocessed
/// baseline, and one labeled montage per image. Rows are ordered by input
/// path, then baseline first and pipelines in request order.
pub fn cmd_compare(req: &CompareRequest) -> CliResult<CompareSummary> {
    if req.inputs.is_empty() {
        return Err(CliError::Usage("compare needs at least one image".into()));
    }
    if req.pipelines.is_empty() {
        return Err(CliError::Usage(
            "compare needs at least one pipeline".into(),
        ));
    }
    let specs = req
        .pipelines
        .iter()
        .map(|n| resolve_named(n))
        .collect::<uwpde::Result<Vec<_>>>()?;
    ensure_writable_dir(&req.out_dir)?;
    let pool = thread_pool(req.jobs)?;
    let mut results: Vec<ImageResult> = pool.install(|| {
        req.inputs
            .par_iter()
            .enumerate()
            .map(|(i, input)| compare_one(i, input, &specs, &req.out_dir))
            .collect()
    });
    results.sort_by(|a, b| a.input.cmp(&b.input));

    let csv_path = req.out_dir.join(COMPARE_CSV);
    let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
    let mut wtr = csv::Writer::from_writer(BufWriter::new(file));
    let mut header = vec!["image", "pipeline"];
    header.extend(QualityReport::<f64>::CSV_FIELDS);
    header.push("reason");
    wtr.write_record(&header).map_err(csv_error(&csv_path))?;
    let mut failures = Vec::new();
    for r in &results {
        for cell in &r.cells {
            let mut row = vec![r.input.display().to_string(), cell.pipeline.clone()];
            match &cell.result {
                Ok(q) => {
                    row.extend(q.values().iter().map(|v| v.to_string()));
                    row.push(String::new());
                }
                Err(reason) => {
                    row.extend(std::iter::repeat_n(
                        String::new(),
                        QualityReport::<f64>::CSV_FIELDS.len(),
                    ));
                    row.push(reason.clone());
                    failures.push((r.input.clone(), cell.pipeline.clone(), reason.clone()));
                }
            }
            wtr.write_record(&row).map_err(csv_error(&csv_path))?;
        }
    }
    wtr.flush().map_err(io_err(&csv_path))?;
    Ok(CompareSummary {
        csv: csv_path,
        montages: results.into_iter().filter_map(|r| r.montage).collect(),
        failures,
    })
}

fn compare_one(index: usize, input: &Path, specs: &[PipelineSpec], out_dir: &Path) -> ImageResult {
    let original = match load_image::<f64>(input) {
        Ok(img) => img,
        Err(e) => {
            let reason = e.to_string();
            let cells = std::iter::once(BASELINE.to_string())
                .chain(specs.iter().map(|s| s.name.clone()))
                .map(|pipeline| Cell {
                    pipeline,
                    result: Err(reason.clone()),
                })
                .collect();
            return ImageResult {
                input: input.to_path_buf(),
                cells,
                montage: None,
            };
        }
    };
    let mut cells = vec![Cell {
        pipeline: BASELINE.into(),
        result: Ok(quality_report(&original)),
    }];
    let mut panels: Vec<(String, Option<Image>)> = vec![(BASELINE.into(), Some(original.clone()))];
    for spec in specs {
        match run_pipeline(&original, spec) {
            Ok((out, _)) => {
                cells.push(Cell {
                    pipeline: spec.name.clone(),
                    result: Ok(quality_report(&out)),
                });
                panels.push((spec.name.clone(), Some(out)));
            }
            Err(e) => {
                cells.push(Cell {
                    pipeline: spec.name.clone(),
                    result: Err(e.to_string()),
                });
                panels.push((spec.name.clone(), None));
            }
        }
    }
    // The index keeps montage names unique when inputs share a stem.
    let path = out_dir.join(format!(
        "{index:03}-{}.montage.png",
        file_safe(&file_stem(input))
    ));
    let montage = match montage(&panels).map(|m| save_image(&m, &path, BitDepth::Eight)) {
        Some(Ok(())) => Some(path),
        Some(Err(e)) => {
            cells.push(Cell {
                pipeline: "montage".into(),
                result: Err(e.to_string()),
            });
            None
        }
        None => None,
    };
    ImageResult {
        input: input.to_path_buf(),
        cells,
        montage,
    }
}
