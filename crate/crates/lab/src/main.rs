use std::path::PathBuf;
use std::process::ExitCode;

use ambient_lab::report::{suite_text, to_json, write_out};
use ambient_lab::{emit_report, run_scenario, run_suite, Format, LabError, ScenarioFile};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ambientlab", version, about = "Exact ambient-metric and tractor holonomy runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        scenario: PathBuf,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Override the scenario's derivative depth.
        #[arg(long = "kmax")]
        k_max: Option<usize>,
        /// Arithmetic mode; only exact rationals are supported.
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
    },
    /// Run every built-in scenario.
    Suite {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::Run { scenario, out, format, k_max, mode: Mode::Exact } => {
            let mut file = ScenarioFile::from_path(&scenario)?;
            if k_max.is_some() {
                file.k_max = k_max;
            }
            let cfg = file.resolve()?;
            let report = run_scenario(&cfg);
            let target = out.or_else(|| cfg.output.clone());
            print!("{}", emit_report(&report, format, target.as_deref())?);
            Ok(report.passed)
        }
        Command::Suite { out, format } => {
            let suite = run_suite()?;
            let text = match format {
                Format::Json => to_json(&suite),
                Format::Text => suite_text(&suite),
            };
            write_out(&text, out.as_deref())?;
            print!("{text}");
            Ok(suite.passed)
        }
    }
}
