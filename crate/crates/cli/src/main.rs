use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coword_map::config::{
    CellsSetting, CriterionSetting, FactorsSetting, FormatSetting, LayoutSetting, MapSetting, ModeSetting,
};
use coword_map::{with_threads, CliError, Overrides, Pipeline, PipelineConfig, RunOptions, Stage, StageStatus};

/// Co-word maps, factor maps and Pajek files from a set of documents.
#[derive(Parser)]
#[command(name = "coword-map", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage, reusing cached outputs, and write run-report.json.
    Run(Flags),
    /// Tokenize the corpus: matrix.csv, expected.csv.
    Ingest(Flags),
    /// Per-term statistics: terms.csv.
    Terms(Flags),
    /// Thresholded similarity map with a layout: map.net.
    Map(Flags),
    /// Factor analysis: loadings.csv, factors.net.
    Factors(Flags),
    /// Co-occurrence matrix of the selected terms: coocc.dat.
    Cooc(Flags),
    /// Colored drawing of the map: map.svg.
    Render(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Corpus directory (or file, with --format lines).
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatSetting>,
    /// Term selection criterion.
    #[arg(long, value_enum)]
    criterion: Option<CriterionSetting>,
    /// Keep the N best-scoring terms.
    #[arg(long, value_name = "N", conflicts_with = "min_score")]
    top: Option<usize>,
    /// Keep terms scoring at least X.
    #[arg(long, value_name = "X")]
    min_score: Option<f64>,
    /// Cell values fed to cosine and factor analysis.
    #[arg(long, value_enum)]
    cells: Option<CellsSetting>,
    #[arg(long, value_enum)]
    map: Option<MapSetting>,
    /// Keep cosine edges with similarity at least X.
    #[arg(long, value_name = "X")]
    cos_threshold: Option<f64>,
    /// Keep co-occurrence edges with count above X.
    #[arg(long, value_name = "X")]
    cooc_threshold: Option<f64>,
    /// Number of factors, or `kaiser`.
    #[arg(long, value_name = "N|kaiser")]
    factors: Option<FactorsSetting>,
    /// Skip the varimax rotation.
    #[arg(long)]
    no_rotate: bool,
    #[arg(long, value_enum)]
    mode: Option<ModeSetting>,
    #[arg(long, value_enum)]
    layout: Option<LayoutSetting>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Count presence per document instead of occurrences.
    #[arg(long)]
    binary: bool,
    /// Add per-stage wall-clock times to the run report.
    #[arg(long)]
    timings: bool,
}

impl Flags {
    fn config(&self) -> Result<PipelineConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        cfg.apply(&Overrides {
            input: self.input.clone(),
            format: self.format,
            criterion: self.criterion,
            top: self.top,
            min_score: self.min_score,
            cells: self.cells,
            map: self.map,
            cos_threshold: self.cos_threshold,
            cooc_threshold: self.cooc_threshold,
            factors: self.factors,
            no_rotate: self.no_rotate,
            mode: self.mode,
            layout: self.layout,
            seed: self.seed,
            out: self.out.clone(),
            binary: self.binary,
        });
        Ok(cfg)
    }
}

fn describe(status: StageStatus) -> &'static str {
    match status {
        StageStatus::Computed => "computed",
        StageStatus::Cached => "cached",
    }
}

fn execute(stage: Option<Stage>, flags: &Flags) -> Result<(), CliError> {
    let cfg = flags.config()?;
    let pipeline = Pipeline::new(&cfg)?;
    with_threads(flags.threads, || match stage {
        None => {
            let outcome = pipeline.run(&RunOptions { timings: flags.timings })?;
            for (stage, status) in &outcome.statuses {
                eprintln!("{}: {}", stage.name(), describe(*status));
            }
            for w in outcome.report["warnings"].as_array().into_iter().flatten() {
                eprintln!("warning: {}", w.as_str().unwrap_or_default());
            }
            Ok(())
        }
        Some(stage) => {
            let status = pipeline.run_stage(stage)?;
            eprintln!("{}: {}", stage.name(), describe(status));
            Ok(())
        }
    })?
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { coword_map::error::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (stage, flags) = match &cli.command {
        Command::Run(f) => (None, f),
        Command::Ingest(f) => (Some(Stage::Ingest), f),
        Command::Terms(f) => (Some(Stage::Terms), f),
        Command::Map(f) => (Some(Stage::Map), f),
        Command::Factors(f) => (Some(Stage::Factors), f),
        Command::Cooc(f) => (Some(Stage::Cooc), f),
        Command::Render(f) => (Some(Stage::Render), f),
    };
    match execute(stage, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
