//! Command-line front end.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

pub use config::{apply_config, parse_config};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "BETAHALTON_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "betahalton",
    version,
    about = "m-bonacci van der Corput and Halton sequences, Rauzy fractals and discrepancy"
)]
pub struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Plain `key=value` file supplying defaults for flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedy expansion of n in the m-bonacci basis.
    Expand {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// Emit sequence values as CSV.
    #[command(subcommand)]
    Seq(SeqCommand),
    /// Export a fractal cloud as CSV or a PPM image.
    Fractal {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long, default_value_t = 100_000)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
        format: ExportFormat,
        #[arg(long, default_value_t = 15)]
        digits: usize,
        /// Image side in pixels.
        #[arg(long, default_value_t = 512)]
        size: usize,
    },
    /// Star discrepancy of a point set, as JSON.
    Disc(DiscArgs),
    /// Box-counting dimension of the subtile boundaries, as JSON.
    Dim {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long, default_value_t = 1_000_000)]
        depth: usize,
        /// Grid levels, as `lo-hi` or a comma list.
        #[arg(long, default_value = "4-9")]
        levels: String,
        /// Report zero run time so output is byte-stable.
        #[arg(long)]
        no_timing: bool,
    },
    /// Decay exponent max(d_i - (m_i - 1)) / sum(m_i - 1).
    Exponent {
        #[arg(long, value_delimiter = ',', required = true)]
        ms: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        dims: Vec<f64>,
    },
    /// Largest subtile discrepancy at level k, as JSON.
    LocalDisc {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
    },
    /// Exponent and measured decay for the (2, 3) Halton example.
    ReproduceExample {
        /// Largest sample size is 2^max_power.
        #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u32).range(11..=16))]
        max_power: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum SeqCommand {
    /// `n,value` for the van der Corput sequence.
    Vdc {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 15)]
        digits: usize,
    },
    /// `n,x1,...,xs` for the Halton sequence.
    Halton {
        #[arg(long, value_delimiter = ',', required = true)]
        ms: Vec<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 15)]
        digits: usize,
    },
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    /// CSV file with header `x1,...,xs`.
    #[arg(long, conflicts_with = "ms")]
    pub input: Option<PathBuf>,
    /// Generate Halton points for these orders instead of reading a file.
    #[arg(long, value_delimiter = ',', requires = "count")]
    pub ms: Option<Vec<usize>>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: Option<u64>,
    /// Prefix sizes for a decay fit; the report gains `exponent` and `r2`.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    /// Exact enumeration budget, in units of (N + 1)^s.
    #[arg(long, default_value_t = crate::discrepancy::DEFAULT_CORNER_BUDGET)]
    pub budget: f64,
    /// Report zero run time so output is byte-stable.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
    Ppm,
}

/// Parses arguments (after folding in any config file) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match apply_config(&Cli::command(), argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
