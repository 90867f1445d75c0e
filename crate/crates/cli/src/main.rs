//! `outhyp`: train track analysis, stable-tree length functions and the
//! annulus-system complex, driven by a TOML config.
//!
//! Exit status: 0 when every assertion of the report holds, 1 on a failed
//! assertion, 2 on an input error, 3 on a convergence or degeneracy error.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Output;
use crate::error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "outhyp", version, about = "Free group automorphisms, stable trees and annulus-system crossratios")]
struct Cli {
    /// TOML config file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train track data of a configured map.
    Analyze {
        #[arg(long)]
        map: String,
    },
    /// Stable or unstable tree lengths of the test set.
    Limits(LimitsArgs),
    /// Build or verify the complex of triples.
    #[command(subcommand)]
    Complex(ComplexCommand),
    /// Run one experiment.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args, Debug)]
struct LimitsArgs {
    #[arg(long)]
    map: String,
    #[arg(long, value_enum, default_value = "+")]
    sign: SignArg,
    /// Translating element, a product of configured names such as `tau^-1.fib`.
    #[arg(long, default_value = "")]
    g: String,
    /// One class per line; `#` starts a comment line.
    #[arg(long)]
    testset: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    kmax: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    #[value(name = "+", alias = "plus")]
    Plus,
    #[value(name = "-", alias = "minus")]
    Minus,
}

#[derive(Subcommand, Debug)]
enum ComplexCommand {
    /// Sample, annuli, crossratio and ρ tables, the graph and its δ.
    Build {
        /// DOT file for the graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Re-read a build report, recompute it and re-run the scans.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Comparable lengths in two trees over primitive classes.
    T2(CsvArg),
    /// Crossratio finiteness and the disjoint-pair bound across radii.
    A1a2(CsvArg),
    /// Crossratio axioms, the ρ quasi-metric, connectivity and δ.
    Axioms(CsvArg),
    /// Growth of d(x, x·f^N).
    Translation(CsvArg),
    /// Orbit diameter of a free factor stabilizer.
    Orbit(CsvArg),
    /// Elements nearly fixing x and x·f^N.
    Wpd(CsvArg),
    /// Exact crossratios on a caterpillar tree against the oracle.
    Treemodel {
        #[arg(long)]
        leaves: usize,
        #[command(flatten)]
        csv: CsvArg,
    },
}

#[derive(Args, Debug)]
struct CsvArg {
    /// CSV file for the experiment table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<Output> {
    use commands::{analyze, complex, experiment, Ctx};
    let needs = || -> Result<Ctx> {
        let path = cli.config.as_deref().ok_or_else(|| CliError::input("--config FILE is required"))?;
        Ctx::load(path)
    };
    match &cli.command {
        Command::Analyze { map } => analyze::analyze(&needs()?, map),
        Command::Limits(a) => {
            let sign = match a.sign {
                SignArg::Plus => outhyp_core::limits::Sign::Plus,
                SignArg::Minus => outhyp_core::limits::Sign::Minus,
            };
            analyze::limits(
                &needs()?,
                &analyze::LimitsRequest {
                    map: &a.map,
                    sign,
                    g: &a.g,
                    testset: a.testset.as_deref(),
                    tol: a.tol,
                    kmax: a.kmax,
                },
            )
        }
        Command::Complex(ComplexCommand::Build { dot }) => complex::build(&needs()?, dot.as_deref()),
        Command::Complex(ComplexCommand::Check { input }) => complex::check(input),
        Command::Experiment(e) => match e {
            ExperimentCommand::T2(c) => experiment::t2(&needs()?, c.csv.as_deref()),
            ExperimentCommand::A1a2(c) => experiment::a1a2(&needs()?, c.csv.as_deref()),
            ExperimentCommand::Axioms(c) => experiment::axioms(&needs()?, c.csv.as_deref()),
            ExperimentCommand::Translation(c) => experiment::translation(&needs()?, c.csv.as_deref()),
            ExperimentCommand::Orbit(c) => experiment::orbit(&needs()?, c.csv.as_deref()),
            ExperimentCommand::Wpd(c) => experiment::wpd(&needs()?, c.csv.as_deref()),
            ExperimentCommand::Treemodel { leaves, csv } => experiment::treemodel(*leaves, csv.csv.as_deref()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli).and_then(|out| {
        for (path, text) in &out.files {
            report::emit(Some(path), text)?;
        }
        report::emit(cli.out.as_deref(), &out.report.to_json()?)?;
        Ok(out.report)
    });
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(r) if r.passed() => ExitCode::SUCCESS,
        Ok(r) => {
            for a in r.assertions.iter().filter(|a| !a.passed) {
                eprintln!("assertion failed: {}: {}", a.name, a.detail);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
