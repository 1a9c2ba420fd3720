//! `affine-sieve`: run one experiment from a scenario file and emit a
//! replayable record.
//!
//! Exit codes: 0 success, 1 other failure (including inconclusive runs),
//! 2 invalid input, 3 resource budget exhausted.

mod commands;
mod record;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use affine_sieve::Error;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Resource(String),
    Other(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Resource { .. } => CliError::Resource(e.to_string()),
            Error::Inconclusive(_) | Error::ResidueSearch { .. } => CliError::Other(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Resource(m) | CliError::Other(m) => m,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "affine-sieve", version, about = "Desk-scale affine sieve experiments")]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory receiving `<scenario>.<command>.json`.
    #[arg(long, global = true, default_value = ".")]
    pub record_dir: PathBuf,
    /// Do not write a record file.
    #[arg(long, global = true)]
    pub no_record: bool,
    /// Print the record as JSON instead of the human table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the command's table as tab-separated text.
    #[arg(long, global = true)]
    pub tsv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: commands::Command,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
    }
    let scenario = match &cli.scenario {
        Some(p) => Some(scenario::Scenario::load(p)?),
        None => None,
    };
    let out = commands::execute(&cli.command, scenario.as_ref())?;
    let rec = record::Record::new(&cli.command, scenario.as_ref(), out.outputs, out.budgets_hit)?;
    let payload = rec.to_json()?;
    if cli.json {
        println!("{payload}");
    } else {
        print!("{}", out.human);
    }
    if let Some(path) = &cli.tsv {
        let table = out
            .tsv
            .ok_or_else(|| CliError::Invalid(format!("{} has no table to export", cli.command.name())))?;
        std::fs::write(path, table).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
    }
    if !cli.no_record {
        let name = scenario.as_ref().map(|s| s.file.name.as_str()).unwrap_or("no-scenario");
        let path = cli.record_dir.join(format!("{name}.{}.json", cli.command.name()));
        std::fs::write(&path, payload + "\n").map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
