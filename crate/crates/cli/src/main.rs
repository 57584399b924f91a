mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::input::{parse_pair, Format};

const ABOUT: &str = "Exact market-clearing prices and maximum matchings for square matching markets.

All indices in files, flags and JSON output are 0-based; messages on stderr
number buyers and products from 1.

Exit codes: 0 ok, 2 parse error, 3 dimension/shape error, 4 matching is not
maximum, 5 enumeration or oracle cap exceeded, 6 a theorem check failed.";

#[derive(Debug, Parser)]
#[command(name = "matchmarket", version, about = ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Market file: CSV rows of valuations, or a JSON object with
    /// "valuations" and optionally "prices" and "matching".
    #[arg(long, short)]
    input: PathBuf,
    /// Input format; inferred from the extension or content by default.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the ascending auction: clearing prices, one maximum matching, welfare.
    Solve(InputArgs),
    /// Decide whether a price vector clears the market.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated prices; overrides "prices" in the file.
        #[arg(long, allow_hyphen_values = true)]
        prices: Option<String>,
    },
    /// Clearing prices that induce a given perfect matching, or a
    /// welfare-improving cycle if it is not maximum.
    Prices {
        #[command(flatten)]
        input: InputArgs,
        /// A matched pair BUYER:PRODUCT (0-based); repeat for every buyer.
        /// Overrides "matching" in the file.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(usize, usize)>,
    },
    /// List every matching induced by a price vector (the auction's when none
    /// is supplied), which is the full set of maximum matchings.
    Enumerate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_hyphen_values = true)]
        prices: Option<String>,
        #[arg(long, default_value_t = matchmarket::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Run every theorem checker and print one JSON report per instance.
    Check {
        /// Market file; omit when using --random.
        #[arg(long, short, required_unless_present = "random")]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random draws per closure transformation.
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Check this many seeded random instances instead of a file.
        #[arg(long, conflicts_with = "input")]
        random: Option<usize>,
        /// Largest market size for --random.
        #[arg(long, default_value_t = matchmarket::verify::DEFAULT_MAX_SIZE)]
        max_n: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Shape(String),
    Cap(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Shape(_) => 3,
            CliError::Cap(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) | CliError::Shape(m) | CliError::Cap(m) => f.write_str(m),
        }
    }
}

impl From<matchmarket::Error> for CliError {
    fn from(e: matchmarket::Error) -> Self {
        use matchmarket::Error as E;
        let message = e.to_string();
        match e {
            E::Parse(_) | E::NegativeValuation { .. } | E::AlphaOutOfRange(_) => CliError::Parse(message),
            E::OracleCapExceeded { .. } => CliError::Cap(message),
            E::NotSquare(_)
            | E::DimensionMismatch { .. }
            | E::IndexOutOfRange { .. }
            | E::InvalidMatching { .. }
            | E::NotPerfect { .. }
            | E::NotClearing(_) => CliError::Shape(message),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(input) => commands::solve(&input.input, input.format),
        Command::Verify { input, prices } => commands::verify(&input.input, input.format, prices.as_deref()),
        Command::Prices { input, pairs } => commands::prices(&input.input, input.format, &pairs),
        Command::Enumerate { input, prices, cap } => {
            commands::enumerate(&input.input, input.format, prices.as_deref(), cap)
        }
        Command::Check {
            input,
            format,
            seed,
            samples,
            random,
            max_n,
        } => match (input, random) {
            (Some(path), _) => commands::check_file(&path, format, seed, samples),
            (None, Some(count)) => commands::check_random(count, max_n, seed, samples),
            (None, None) => unreachable!("clap requires one of --input or --random"),
        },
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
