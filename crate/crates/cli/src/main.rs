//! `mars` — rank-statistics analysis of method x dataset performance
//! matrices, with standard (Friedman / Nemenyi / Wilcoxon-Holm) and
//! magnitude-aware (MARS) pipelines, JSON reports, and SVG critical
//! difference diagrams.

use std::fs;
use std::io::Read;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mars_stats::diagram::{render_cd_diagram, CliqueSource, DiagramOptions};
use mars_stats::dist::Alpha;
use mars_stats::mars::SigmaMode;
use mars_stats::matrix::{parse_matrix, write_csv, Direction, MatrixFormat, PerformanceMatrix};
use mars_stats::report::{analyze, AnalysisReport, AnalyzeOptions, Mode};
use mars_stats::scenarios::{generate_scenario, ScenarioSpec};
use mars_stats::{Error, Result};

#[derive(Parser)]
#[command(name = "mars", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a performance matrix and write a JSON report
    Analyze(AnalyzeArgs),
    /// Write one of the built-in benchmark scenarios as CSV
    Scenario(ScenarioArgs),
    /// Render a critical difference diagram from a report
    Diagram(DiagramArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input matrix, .csv or .json (`-` reads CSV from stdin)
    #[arg(long)]
    input: PathBuf,
    /// Which pipelines to run
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Significance level; the critical-value table supports 0.05 and 0.10
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Metric direction for CSV input (JSON files carry their own)
    #[arg(long, value_enum, default_value_t = DirectionArg::Higher)]
    direction: DirectionArg,
    /// Permutation count for the MARS global test
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u32).range(1..))]
    permutations: u32,
    /// Seed for the permutation test
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Population for the sigma in the MARS critical difference
    #[arg(long, value_enum, default_value_t = SigmaArg::Pooled)]
    sigma: SigmaArg,
    /// Clique rule for the MARS diagram
    #[arg(long, value_enum, default_value_t = CliquesArg::Cd)]
    cliques: CliquesArg,
    /// Report output path (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Also render a CD diagram (MARS when it ran, standard otherwise)
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario id, 1..=6
    #[arg(long)]
    id: u32,
    /// Seed (used by scenario 6 only)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagramArgs {
    /// Report produced by `mars analyze`
    #[arg(long)]
    report: PathBuf,
    /// Which section of the report to draw
    #[arg(long, value_enum)]
    which: WhichArg,
    /// SVG output path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 360)]
    height: u32,
    /// Diagram title
    #[arg(long)]
    title: Option<String>,
    /// Hide the CD ruler
    #[arg(long)]
    no_cd_ruler: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Mars,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Higher,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    Pooled,
    Scores,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliquesArg {
    Cd,
    Holm,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Standard,
    Mars,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("error: internal invariant violated");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Scenario(args) => run_scenario(args),
        Command::Diagram(args) => run_diagram(args),
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let alpha = Alpha::new(args.alpha)?;
    if (args.alpha - 0.05).abs() >= 1e-9 && (args.alpha - 0.10).abs() >= 1e-9 {
        return Err(Error::UnsupportedAlpha(args.alpha));
    }

    let matrix = read_matrix(&args.input, args.direction)?;
    let mode = match args.mode {
        ModeArg::Standard => Mode::Standard,
        ModeArg::Mars => Mode::Mars,
        ModeArg::Both => Mode::Both,
    };
    let options = AnalyzeOptions {
        mode,
        alpha,
        rho: args.permutations,
        seed: args.seed,
        sigma_mode: match args.sigma {
            SigmaArg::Pooled => SigmaMode::Pooled,
            SigmaArg::Scores => SigmaMode::MethodScores,
        },
        clique_source: match args.cliques {
            CliquesArg::Cd => CliqueSource::CriticalDifference,
            CliquesArg::Holm => CliqueSource::Holm,
        },
        ..AnalyzeOptions::default()
    };

    let report = analyze(&matrix, &options)?;
    fs::write(&args.out, report.to_json())?;

    if let Some(svg_path) = &args.svg {
        let which = if mode.runs_mars() {
            WhichArg::Mars
        } else {
            WhichArg::Standard
        };
        let svg = render_report_section(&report, which, &DiagramOptions::default())?;
        fs::write(svg_path, svg)?;
    }
    Ok(())
}

fn run_scenario(args: ScenarioArgs) -> Result<()> {
    let matrix = generate_scenario(&ScenarioSpec {
        id: args.id,
        seed: args.seed,
    })?;
    let file = fs::File::create(&args.out)?;
    write_csv(&matrix, file)
}

fn run_diagram(args: DiagramArgs) -> Result<()> {
    let text = fs::read_to_string(&args.report)?;
    let report = AnalysisReport::from_json(&text)?;
    let options = DiagramOptions {
        width_px: args.width,
        height_px: args.height,
        title: args.title.unwrap_or_default(),
        show_cd_ruler: !args.no_cd_ruler,
        ..DiagramOptions::default()
    };
    let svg = render_report_section(&report, args.which, &options)?;
    fs::write(&args.out, svg)?;
    Ok(())
}

fn render_report_section(
    report: &AnalysisReport,
    which: WhichArg,
    options: &DiagramOptions,
) -> Result<String> {
    let mut options = options.clone();
    let (scores, cliques, cd) = match which {
        WhichArg::Standard => {
            options.score_label = "average rank".into();
            (
                report
                    .avg_ranks
                    .as_ref()
                    .ok_or_else(|| Error::MissingMode("standard".into()))?,
                report
                    .cliques_standard
                    .as_ref()
                    .ok_or_else(|| Error::MissingMode("standard".into()))?,
                report
                    .cd_standard
                    .ok_or_else(|| Error::MissingMode("standard".into()))?,
            )
        }
        WhichArg::Mars => {
            options.score_label = "MARS score".into();
            (
                report
                    .mars_scores
                    .as_ref()
                    .ok_or_else(|| Error::MissingMode("mars".into()))?,
                report
                    .cliques_mars
                    .as_ref()
                    .ok_or_else(|| Error::MissingMode("mars".into()))?,
                report
                    .cd_mars
                    .ok_or_else(|| Error::MissingMode("mars".into()))?,
            )
        }
    };
    render_cd_diagram(scores, &report.method_names, cliques, cd, &options)
}

fn read_matrix(path: &Path, direction: DirectionArg) -> Result<PerformanceMatrix> {
    let direction = match direction {
        DirectionArg::Higher => Direction::HigherBetter,
        DirectionArg::Lower => Direction::LowerBetter,
    };
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        return Ok(parse_matrix(&buf[..], sniff_format(&buf))?.with_direction(direction));
    }
    let bytes = fs::read(path)?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => MatrixFormat::Json,
        Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
        _ => sniff_format(&bytes),
    };
    let matrix = parse_matrix(&bytes[..], format)?;
    // A JSON file's embedded direction wins; the flag covers CSV.
    Ok(match format {
        MatrixFormat::Csv => matrix.with_direction(direction),
        MatrixFormat::Json => matrix,
    })
}

fn sniff_format(bytes: &[u8]) -> MatrixFormat {
    match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
        Some(b'{') => MatrixFormat::Json,
        _ => MatrixFormat::Csv,
    }
}
