use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use equivar::cli::{parse_scenario, run, Format};
use equivar::Error;

/// Run a scenario file and print its report.
#[derive(Parser)]
#[command(name = "equivar", version)]
struct Args {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// json or tsv.
    #[arg(long, default_value = "json")]
    format: Format,
    /// Overrides the scenario's truncation degree.
    #[arg(long)]
    degree_bound: Option<u32>,
    /// Output file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(args: &Args) -> Result<String, Error> {
    let text = std::fs::read_to_string(&args.scenario)?;
    let mut scenario = parse_scenario(&text)?;
    if let Some(bound) = args.degree_bound {
        scenario = scenario.with_degree_bound(bound)?;
    }
    Ok(run(&scenario)?.render(args.format))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = execute(&args).and_then(|report| match &args.out {
        Some(path) => std::fs::write(path, report).map_err(Error::from),
        None => {
            print!("{report}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
