//! `scover`: spectra, coverings and Betti checks from JSON inputs.
//!
//! Prints a JSON run report on stdout and a one-line summary on stderr.
//! Exit codes: 0 all verdicts hold, 1 a verdict failed, 2 unreadable or
//! malformed input, 3 a mathematical precondition was not met.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use simplicial_covers::complex::WeightScheme;
use simplicial_covers::operators::LaplacianKind;
use simplicial_covers::representation::Direction;

use commands::{CoverSource, Outcome, Settings};
use report::{CliError, CliResult, RunReport};

#[derive(Parser)]
#[command(
    name = "scover",
    version,
    about = "Spectral checks for coverings of simplicial complexes"
)]
struct Cli {
    /// Seed for the randomized representation decomposition.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for eigenvalue matching.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Eigenvalues at or below this count as kernel.
    #[arg(long = "kernel-tol", global = true, default_value_t = 1e-7)]
    kernel_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of an up, down or full Laplacian.
    Spectrum(SpectrumArgs),
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Block-decompose a lifted Laplacian by the voltage representation.
    Decompose(DecomposeArgs),
    #[command(subcommand)]
    Verify(VerifyCommand),
    #[command(subcommand)]
    Fixture(FixtureCommand),
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    dim: isize,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Overrides the weights stored in the complex file.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, conflicts_with = "weighting")]
    signing: Option<PathBuf>,
    #[arg(long)]
    weighting: Option<PathBuf>,
}

/// Build or check a covering.
#[derive(Subcommand)]
enum CoverCommand {
    /// Derived complex of a 1-skeleton voltage assignment.
    Build {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        voltage: PathBuf,
        #[arg(long)]
        out_cover: Option<PathBuf>,
        #[arg(long)]
        out_map: Option<PathBuf>,
    },
    /// Check the strong covering axioms for a vertex map.
    Verify {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    base: PathBuf,
    /// 1-skeleton voltages; the lift is built on the fly.
    #[arg(long, required_unless_present = "cover", conflicts_with_all = ["cover", "map"])]
    voltage: Option<PathBuf>,
    #[arg(long, requires = "map")]
    cover: Option<PathBuf>,
    #[arg(long, requires = "cover")]
    map: Option<PathBuf>,
}

impl CoverArgs {
    fn source(&self) -> CoverSource<'_> {
        match (&self.voltage, &self.cover, &self.map) {
            (Some(v), _, _) => CoverSource::Voltage {
                base: &self.base,
                voltage: v,
            },
            (None, Some(c), Some(m)) => CoverSource::Map {
                base: &self.base,
                cover: c,
                map: m,
            },
            _ => unreachable!("clap enforces a voltage or a cover with its map"),
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    cover: CoverArgs,
    #[arg(long, allow_hyphen_values = true)]
    dim: isize,
    #[arg(long, value_enum, default_value_t = DirectionArg::Up)]
    direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = SchemeArg::Combinatorial)]
    scheme: SchemeArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    cover: CoverArgs,
    /// Restrict to one dimension; all valid dimensions otherwise.
    #[arg(long, allow_hyphen_values = true)]
    dim: Option<isize>,
    /// Weight scheme; both standard schemes when omitted.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
}

impl VerifyArgs {
    fn schemes(&self) -> Vec<WeightScheme> {
        match self.scheme {
            Some(s) => vec![s.into()],
            None => vec![WeightScheme::Combinatorial, WeightScheme::Normalized],
        }
    }
}

/// Check one spectral or homological statement about a covering.
#[derive(Subcommand)]
enum VerifyCommand {
    /// Two-fold lifts: cover spectrum = base spectrum ∪ signed spectrum.
    Union(VerifyArgs),
    /// Base spectra are contained in cover spectra.
    Inclusion(VerifyArgs),
    /// Abelian transitive voltages: cover spectrum = union of weighted spectra.
    Abelian(VerifyArgs),
    /// Betti numbers never drop along a covering.
    Betti(VerifyArgs),
}

/// Reproduce stored fixtures.
#[derive(Subcommand)]
enum FixtureCommand {
    /// Search for the 12-edge base whose 2-fold lift has a single flipped incidence.
    SearchFig1 {
        /// Also write base, cover, map and voltage files here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Up,
    Down,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Up,
    Down,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Combinatorial,
    Normalized,
}

impl From<SchemeArg> for WeightScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Combinatorial => WeightScheme::Combinatorial,
            SchemeArg::Normalized => WeightScheme::Normalized,
        }
    }
}

impl From<KindArg> for LaplacianKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Up => LaplacianKind::Up,
            KindArg::Down => LaplacianKind::Down,
            KindArg::Full => LaplacianKind::Full,
        }
    }
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Up => Direction::Up,
            DirectionArg::Down => Direction::Down,
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum(_) => "spectrum",
        Command::Cover(CoverCommand::Build { .. }) => "cover build",
        Command::Cover(CoverCommand::Verify { .. }) => "cover verify",
        Command::Decompose(_) => "decompose",
        Command::Verify(VerifyCommand::Union(_)) => "verify union",
        Command::Verify(VerifyCommand::Inclusion(_)) => "verify inclusion",
        Command::Verify(VerifyCommand::Abelian(_)) => "verify abelian",
        Command::Verify(VerifyCommand::Betti(_)) => "verify betti",
        Command::Fixture(FixtureCommand::SearchFig1 { .. }) => "fixture search-fig1",
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    for (name, v) in [("--tol", cli.tol), ("--kernel-tol", cli.kernel_tol)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::parse(format!("{name} must be a positive number")));
        }
    }
    let settings = Settings {
        seed: cli.seed,
        tol: cli.tol,
        kernel_tol: cli.kernel_tol,
    };
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(
            &settings,
            &a.complex,
            a.dim,
            a.kind.into(),
            a.scheme.map(Into::into),
            a.signing.as_deref(),
            a.weighting.as_deref(),
        ),
        Command::Cover(CoverCommand::Build {
            base,
            voltage,
            out_cover,
            out_map,
        }) => commands::cover_build(base, voltage, out_cover.as_deref(), out_map.as_deref()),
        Command::Cover(CoverCommand::Verify { cover, base, map }) => {
            commands::cover_verify(cover, base, map)
        }
        Command::Decompose(a) => commands::decompose(
            &settings,
            &a.cover.source(),
            a.dim,
            a.direction.into(),
            &a.scheme.into(),
        ),
        Command::Verify(v) => {
            let (f, a): (fn(_, _, _, _) -> _, _) = match v {
                VerifyCommand::Union(a) => (commands::verify_union, a),
                VerifyCommand::Inclusion(a) => (commands::verify_inclusion, a),
                VerifyCommand::Abelian(a) => (commands::verify_abelian, a),
                VerifyCommand::Betti(a) => (commands::verify_betti, a),
            };
            f(&settings, &a.cover.source(), a.dim, &a.schemes())
        }
        Command::Fixture(FixtureCommand::SearchFig1 { out_dir }) => {
            commands::fixture_search(&settings, out_dir.as_ref())
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(out) => {
            let report = RunReport {
                command: name.to_string(),
                inputs: out.inputs,
                seed: cli.seed,
                results: out.results,
                verdicts: out.verdicts,
            };
            emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
            let held = report.verdicts.iter().filter(|v| v.holds).count();
            eprintln!("{name}: {held}/{} verdicts hold", report.verdicts.len());
            for v in report.verdicts.iter().filter(|v| !v.holds) {
                eprintln!("  FAILED {} (max error {:.3e})", v.claim, v.max_error);
            }
            if report.all_hold() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let kind = match e.kind {
                report::FailureKind::Parse => "parse",
                report::FailureKind::Precondition => "precondition",
            };
            let body = json!({"command": name, "error": {"kind": kind, "message": e.message}});
            emit(&serde_json::to_string_pretty(&body).expect("error serializes"));
            eprintln!("{name}: {kind} error: {}", e.message);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
