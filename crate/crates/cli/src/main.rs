use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod attribution;
mod commands;
mod fail;
mod format;
mod gamefile;
mod generator;

use coalition_var::analysis::significance::DEFAULT_Z_CRIT;

#[derive(Parser)]
#[command(
    name = "coalition-var",
    version,
    about = "Shapley values and their uncertainty for cooperative games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Shapley,
    Banzhaf,
}

#[derive(Args)]
pub struct GameSource {
    /// Game file (JSON).
    #[arg(conflicts_with = "generate", required_unless_present = "generate")]
    pub game: Option<PathBuf>,
    /// Build the game from a generator spec instead of a file.
    #[arg(long, value_name = "SPEC")]
    pub generate: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact values and uncertainties for every player.
    Eval {
        #[command(flatten)]
        source: GameSource,
        #[arg(long, value_enum, default_value = "shapley")]
        weighting: WeightingArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Monte Carlo estimates over random orderings.
    Sample {
        #[command(flatten)]
        source: GameSource,
        /// Player name; every player when omitted.
        #[arg(long)]
        player: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        chunks: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Expand a generator spec into a game file.
    Generate {
        /// additive:w1,w2,.. | majority:N | symmetric:g0,g1,.. | twotype:na,nb,sqrtkl
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Attribution table with significance tests.
    Attrib {
        /// CSV with one 0/1 column per factor (1 = absent) and a `value` column.
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_Z_CRIT)]
        z_crit: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Randomized checks of the value/uncertainty properties.
    Check {
        /// Property name, or `all`.
        property: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, hide = true)]
        inject_negated_variance: bool,
    },
    /// Exact sweep over game size for a family of games.
    Sweep {
        /// majority | production-worker | production-capitalist | market-trader
        family: String,
        #[arg(long, default_value_t = 0.5)]
        k: f64,
        /// Comma-separated sizes or ranges `a..b[:step]` (inclusive).
        #[arg(long)]
        sizes: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Smallest ratio R(G+H) / (R(G) + R(H)) over random superadditive pairs.
    Probe {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval {
            source,
            weighting,
            format,
        } => commands::eval(&source, weighting, format),
        Command::Sample {
            source,
            player,
            samples,
            seed,
            chunks,
            format,
        } => commands::sample(&source, player.as_deref(), samples, seed, chunks, format),
        Command::Generate { spec, output } => commands::generate(&spec, output.as_deref()),
        Command::Attrib {
            file,
            z_crit,
            format,
        } => commands::attrib(&file, z_crit, format),
        Command::Check {
            property,
            trials,
            seed,
            n,
            format,
            inject_negated_variance,
        } => commands::check(&property, trials, seed, n, format, inject_negated_variance),
        Command::Sweep {
            family,
            k,
            sizes,
            output,
            format,
        } => commands::sweep(&family, k, &sizes, output.as_deref(), format),
        Command::Probe {
            n,
            trials,
            seed,
            format,
        } => commands::probe(n, trials, seed, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
