use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uwpde::BitDepth;
use uwpde_cli::{
    cmd_analyze, cmd_compare, cmd_enhance, cmd_presets, cmd_seed_corpus, CliError, CliResult,
    CompareRequest, PipelineSource, RunManifest,
};

#[derive(Parser)]
#[command(
    name = "uwpde",
    version,
    about = "PDE-based underwater image enhancement"
)]
struct Cli {
    /// Write the bundled 24-image synthetic corpus to --out and exit.
    #[arg(long)]
    seed_corpus: bool,
    /// Output directory (or CSV path for `analyze`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance images with a named or custom pipeline.
    Enhance {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Preset name (see `presets`).
        #[arg(long, conflicts_with = "config")]
        pipeline: Option<String>,
        /// Pipeline TOML file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Parameter override such as `pde.dt=0.05`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(8..=16))]
        bit_depth: u32,
    },
    /// Per-channel histograms, a histogram plot and a colour-cast diagnosis.
    Analyze { input: PathBuf },
    /// Quality matrix and montages for several pipelines.
    Compare {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Pipelines to compare; repeatable or comma separated.
        #[arg(long = "pipeline", value_delimiter = ',')]
        pipelines: Vec<String>,
    },
    /// List presets, or print one as an editable TOML config.
    Presets {
        #[arg(long)]
        pipeline: Option<String>,
    },
}

fn out_dir(out: Option<PathBuf>) -> CliResult<PathBuf> {
    out.ok_or_else(|| CliError::Usage("--out is required".into()))
}

fn run(cli: Cli) -> CliResult<bool> {
    if cli.seed_corpus {
        let paths = cmd_seed_corpus(&out_dir(cli.out)?)?;
        eprintln!("wrote {} corpus images", paths.len());
        return Ok(true);
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("no subcommand given; see --help".into()));
    };
    match command {
        Command::Enhance {
            inputs,
            pipeline,
            config,
            overrides,
            bit_depth,
        } => {
            let source = match (pipeline, config) {
                (_, Some(path)) => PipelineSource::Config(path),
                (Some(name), None) => PipelineSource::Named(name),
                (None, None) => return Err(CliError::Usage("give --pipeline or --config".into())),
            };
            let mut manifest = RunManifest::new(inputs, out_dir(cli.out)?, source);
            manifest.overrides = overrides;
            manifest.bit_depth = BitDepth::from_bits(bit_depth)?;
            manifest.jobs = cli.jobs;
            let summary = cmd_enhance(&manifest)?;
            let total = summary.outcomes.len();
            let failed: Vec<_> = summary.failures().collect();
            for (path, err) in &failed {
                eprintln!("failed: {}: {err}", path.display());
            }
            eprintln!(
                "{}: {} of {total} images enhanced; report at {}",
                summary.pipeline,
                total - failed.len(),
                summary.report.display()
            );
            Ok(failed.is_empty())
        }
        Command::Analyze { input } => {
            let out = cli.out.unwrap_or_else(|| input.with_extension("hist.csv"));
            let summary = cmd_analyze(&input, &out)?;
            print!("{}", summary.describe());
            Ok(true)
        }
        Command::Compare { inputs, pipelines } => {
            let summary = cmd_compare(&CompareRequest {
                inputs,
                pipelines,
                out_dir: out_dir(cli.out)?,
                jobs: cli.jobs,
            })?;
            for (input, pipeline, reason) in &summary.failures {
                eprintln!("failed: {} / {pipeline}: {reason}", input.display());
            }
            eprintln!("wrote {}", summary.csv.display());
            Ok(summary.success())
        }
        Command::Presets { pipeline } => {
            print!("{}", cmd_presets(pipeline.as_deref())?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
