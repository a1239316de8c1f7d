use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sseqbench::scenarios::file::ScenarioFile;
use sseqbench::scenarios::{emit_report, run_scenario, Format, Report, CATALOG};

#[derive(Parser)]
#[command(
    name = "sseqbench",
    version,
    about = "Run and check spectral sequence scenarios over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario, every scenario, or a scenario file.
    Run {
        #[arg(required_unless_present_any = ["all", "scenario_file"])]
        scenario: Option<String>,
        #[arg(long, conflicts_with_all = ["scenario", "scenario_file"])]
        all: bool,
        #[arg(long, value_name = "TOML", conflicts_with = "scenario")]
        scenario_file: Option<PathBuf>,
        /// Odd prime; named scenarios default to 3.
        #[arg(long)]
        prime: Option<u32>,
        /// Degree cap; defaults to 2p^2 + 4p.
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the named scenarios.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

fn default_cap(p: u32) -> u32 {
    2 * p * p + 4 * p
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    match cli.command {
        Command::List => {
            for s in CATALOG {
                println!("{:<18} {}", s.name, s.about);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            scenario,
            all,
            scenario_file,
            prime,
            cap,
            format,
            out,
        } => {
            let reports = match collect(scenario, all, scenario_file, prime, cap) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let format = match format {
                OutFormat::Text => Format::Text,
                OutFormat::Json => Format::Json,
            };
            let mut bytes = Vec::new();
            for r in &reports {
                bytes.extend(emit_report(r, format));
            }
            let written = match out {
                Some(path) => std::fs::write(&path, &bytes)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(&bytes)
                        .map_err(|e| e.to_string())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if reports.iter().any(Report::failed) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}

fn collect(
    scenario: Option<String>,
    all: bool,
    file: Option<PathBuf>,
    prime: Option<u32>,
    cap: Option<u32>,
) -> sseqbench::Result<Vec<Report>> {
    if let Some(path) = file {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| sseqbench::Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(vec![ScenarioFile::parse(&text)?.run(prime, cap)?]);
    }
    let p = prime.unwrap_or(3);
    let cap = cap.unwrap_or(default_cap(p));
    if all {
        CATALOG
            .iter()
            .map(|s| run_scenario(s.name, p, cap))
            .collect()
    } else {
        let name = scenario.expect("clap requires a scenario");
        Ok(vec![run_scenario(&name, p, cap)?])
    }
}
