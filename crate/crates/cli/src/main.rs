//! `wri`: collect web indicators, build the reputation index, check it
//! against the published table.
//!
//! Exit codes: 0 success, 1 validation or configuration error (including a
//! failed `verify`), 2 I/O error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wri_core::ingestion::RateLimit;
use wri_core::{Method, Mode, Orientation};

#[derive(Parser)]
#[command(name = "wri", version, about = "Web reputation index pipeline")]
struct Cli {
    /// Run configuration file (TOML). Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collect every indicator for every company into a snapshot.
    Collect(CollectArgs),
    /// Normalize a snapshot, compute the index and write the reports.
    Index(IndexArgs),
    /// Check the published index table against its summary statistics.
    Verify(VerifyArgs),
    /// Print or re-export a finished report.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct CollectArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Fixture root; required for replay and record.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub universe: Option<PathBuf>,
    /// Source definitions (endpoints, field mappings, rate limits).
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stamp every observation with the Unix epoch instead of the clock.
    #[arg(long)]
    pub deterministic: bool,
    /// Keep MISSING markers instead of imputing.
    #[arg(long)]
    pub no_impute: bool,
    #[arg(long)]
    pub user_agent: Option<String>,
    /// Default per-source budget as MAX/SECS.
    #[arg(long, value_parser = config::parse_rate_limit)]
    pub rate_limit: Option<RateLimit>,
    /// In record mode, move older payloads aside instead of overwriting.
    #[arg(long)]
    pub keep_previous: bool,
}

#[derive(Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, value_parser = parse_orientation)]
    pub orientation: Option<Orientation>,
    /// Report the index before the final min-max rescale.
    #[arg(long)]
    pub no_rescale: bool,
    /// Rows in the printed ranking.
    #[arg(long)]
    pub top: Option<usize>,
    /// Leave the generation timestamp out of report.json.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Golden CSV (company_id,name,wri); defaults to the bundled table.
    #[arg(long)]
    pub golden: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// report.json written by `wri index`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub top: Option<usize>,
    /// Also write the ranking as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: wri_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: wri_core::Error| e.to_string())
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    s.parse().map_err(|e: wri_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let result =
        config::RunConfig::load_optional(cli.config.as_deref()).and_then(|config| {
            match cli.command {
                Command::Collect(args) => commands::collect(&args, &config),
                Command::Index(args) => commands::index(&args, &config),
                Command::Verify(args) => commands::verify(&args),
                Command::Report(args) => commands::report(&args, &config),
            }
        });

    match result {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let wri_core::Error::InvalidSnapshot(defects) = &e {
                for d in defects {
                    eprintln!("  {d}");
                }
            }
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
