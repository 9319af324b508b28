use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use uwpde::image::{load_image, save_image};
use uwpde::pipeline::{diagnose, Hint};
use uwpde::BitDepth;

use crate::enhance::csv_error;
use crate::render::histogram_plot;
use crate::{io_err, CliResult};

const PLOT_HEIGHT: usize = 160;

#[derive(Debug, Clone)]
pub struct AnalyzeSummary {
    pub cast_score: f64,
    pub hint: Hint,
    pub histogram_csv: PathBuf,
    pub plot: PathBuf,
}

impl AnalyzeSummary {
    /// Human readable lines printed by the `analyze` subcommand.
    pub fn describe(&self) -> String {
        let advice = match self.hint {
            Hint::ColourCast => "channels misaligned (colour cast)",
            Hint::ContrastPreset => "channels aligned",
        };
        format!(
            "cast_score: {:.6}\nhint: {advice}; try {}\n",
            self.cast_score,
            self.hint.suggestions().join(" or ")
        )
    }
}

/// Writes `bin,red,green,blue` histogram counts to `out` and an overlaid
/// histogram plot next to it (same path, `.png` extension).
pub fn cmd_analyze(input: &Path, out: &Path) -> CliResult<AnalyzeSummary> {
    let img = load_image::<f64>(input)?;
    let d = diagnose(&img)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = File::create(out).map_err(io_err(out))?;
    let mut wtr = csv::Writer::from_writer(BufWriter::new(file));
    wtr.write_record(["bin", "red", "green", "blue"])
        .map_err(csv_error(out))?;
    for bin in 0..d.histograms[0].bins() {
        let mut row = vec![bin.to_string()];
        row.extend(d.histograms.iter().map(|h| h.counts()[bin].to_string()));
        wtr.write_record(&row).map_err(csv_error(out))?;
    }
    wtr.flush().map_err(io_err(out))?;
    let plot = out.with_extension("png");
    save_image(
        &histogram_plot(&d.histograms, PLOT_HEIGHT),
        &plot,
        BitDepth::Eight,
    )?;
    Ok(AnalyzeSummary {
        cast_score: d.cast_score,
        hint: d.hint,
        histogram_csv: out.to_path_buf(),
        plot,
    })
}
