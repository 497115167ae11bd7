use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drg::config::{parse_ordering, parse_suites, Backend, ProbeSpec, RunConfig};
use drg::pipeline::info_text;
use drg::{cmd_dump, cmd_info, cmd_verify, CliError};
use splitdec::field::QSign;
use splitdec::graphs::GraphSpec;
use splitdec::report::Report;

#[derive(Parser)]
#[command(name = "drg", version, about = "Split decompositions of Q-polynomial distance-regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print graph parameters, spectrum, orderings and classical parameters.
    Info(Common),
    /// Run verification suites and write a JSON report.
    Verify(Common),
    /// Write matrix dumps and an index report into the --out directory.
    Dump(Common),
}

#[derive(Args)]
struct Common {
    /// `family:params` (hamming:3,2, bilinear:3,3,2, ...) or `file:PATH`.
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 0)]
    base_vertex: usize,
    /// exact or f64; defaults to exact up to 64 vertices.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// + or -: which square root of b the symbol q denotes.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    qsign: String,
    /// full or sample:N:SEED.
    #[arg(long, default_value = "sample:32:42")]
    probe: String,
    /// auto or a comma-separated permutation of 0..D fixing 0.
    #[arg(long, default_value = "auto")]
    ordering: String,
    /// Comma-separated subset of scheme,split,qtet,tmodule.
    #[arg(long, default_value = "scheme,split,qtet,tmodule")]
    suites: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache root; defaults to $DRG_CACHE_DIR when set.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let graph: GraphSpec = self.graph.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let mut c = RunConfig::new(graph);
        c.base_vertex = self.base_vertex;
        c.backend = self.backend.as_deref().map(str::parse::<Backend>).transpose()?;
        c.tol = self.tol;
        c.qsign = self
            .qsign
            .parse::<QSign>()
            .map_err(|_| CliError::Config(format!("bad qsign `{}`", self.qsign)))?;
        c.probe = self.probe.parse::<ProbeSpec>()?;
        c.ordering = parse_ordering(&self.ordering)?;
        c.suites = parse_suites(&self.suites)?;
        c.out = self.out.clone();
        c.cache_dir = self.cache_dir.clone();
        c.validate()?;
        Ok(c)
    }
}

fn emit(report: &Report, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Info(args) => {
            let config = args.config()?;
            let report = cmd_info(&config)?;
            print!("{}", info_text(&report));
            if let Some(path) = &config.out {
                emit(&report, Some(path))?;
            }
            Ok(0)
        }
        Command::Verify(args) => {
            let config = args.config()?;
            let report = cmd_verify(&config)?;
            for c in report.failures() {
                eprintln!("FAIL {}: {}", c.name, c.witness.as_deref().unwrap_or(""));
            }
            let passed = report.checks.iter().filter(|c| c.passed()).count();
            eprintln!("{passed}/{} checks passed", report.checks.len());
            emit(&report, config.out.as_ref())?;
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Dump(args) => {
            let config = args.config()?;
            let report = cmd_dump(&config)?;
            let files = report.tables["files"].as_object().map_or(0, |m| m.len());
            eprintln!("wrote {files} matrices to {}", config.out.as_ref().expect("checked").display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
