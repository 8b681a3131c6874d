use clap::{Args, Parser, Subcommand};
use redukit_cli::commands::{run_command, ExitClass};
use redukit_cli::scenario::ScenarioFile;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "redukit",
    version,
    about = "Cartan structures, certified non-contraction constants, Mostow \
             factorization, and focusing tests for reductive matrix groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Seed override; defaults to the scenario's sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the report on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the scenario and run the structural invariant suite.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Compute the certified constant: coefficient space, subset
    /// reduction, LP optimum with dual certificate, effective bound.
    Constant {
        #[command(flatten)]
        common: Common,
    },
    /// Sample translate/vector pairs and verify the certified bound.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Factor group elements through k * exp(P) * exp(Z).
    Mostow {
        #[command(flatten)]
        common: Common,
        /// Row-major matrix entries as an inline JSON array; repeatable.
        #[arg(long)]
        element: Vec<String>,
        /// Also factor this many seeded random elements.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Run the boundedness tests on the scenario's parametric families.
    Focusing {
        #[command(flatten)]
        common: Common,
        /// Override the tested vector (inline JSON array).
        #[arg(long)]
        v: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let (name, common, elements, random, v_override): (
        &str,
        &Common,
        Vec<String>,
        usize,
        Option<Vec<f64>>,
    ) = match &cli.command {
        Command::Check { common } => ("check", common, vec![], 0, None),
        Command::Constant { common } => ("constant", common, vec![], 0, None),
        Command::Verify { common } => ("verify", common, vec![], 0, None),
        Command::Mostow {
            common,
            element,
            random,
        } => ("mostow", common, element.clone(), *random, None),
        Command::Focusing { common, v } => {
            let parsed = match v {
                Some(text) => match serde_json::from_str::<Vec<f64>>(text) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        eprintln!("cannot parse --v: {e}");
                        std::process::exit(ExitClass::ValidationFailed.code());
                    }
                },
                None => None,
            };
            ("focusing", common, vec![], 0, parsed)
        }
    };

    let file = match ScenarioFile::load(&common.scenario) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(ExitClass::ValidationFailed.code());
        }
    };

    let start = Instant::now();
    match run_command(&file, name, common.seed, &elements, random, v_override) {
        Ok((mut report, class)) => {
            report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            if let Some(path) = &common.out {
                if let Err(e) = report.write(path) {
                    eprintln!("cannot write report: {e}");
                    std::process::exit(ExitClass::ValidationFailed.code());
                }
            }
            if !common.quiet {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            }
            std::process::exit(class.code());
        }
        Err((message, class)) => {
            eprintln!("{message}");
            std::process::exit(class.code());
        }
    }
}
