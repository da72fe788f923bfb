mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use superpowers::factor::Budget;
use superpowers::sequence::DEFAULT_BIT_CAP;
use superpowers::Rational;

use output::Format;

/// Exact evaluation, omega classification and witness chains for sums of
/// superpowers `s_n = sum_i prod_j x_ij^(n^j)`.
#[derive(Debug, Parser)]
#[command(name = "superpowers", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; tables default to csv, documents to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Rho iterations allowed per factorization.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT.iterations,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,

    /// Seed for the factoring random walks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest exact value, in bits, any command may build.
    #[arg(long, global = true, default_value_t = DEFAULT_BIT_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    bit_cap: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print s_n, or its residues, over an index range.
    Eval {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        range: RangeArgs,
        /// Reduce modulo each of these moduli instead of printing s_n.
        #[arg(long = "mod", value_delimiter = ',')]
        moduli: Vec<BigUint>,
    },
    /// Decide whether omega(s_n) is bounded.
    Classify {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Build and check a witness chain.
    Witness {
        #[command(flatten)]
        instance: InstanceArg,
        /// Number of links after r_0.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=64))]
        kappa_max: u64,
        /// Write the certificate here and print only the check report.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Re-run every check of a stored certificate.
    Verify {
        certificate: PathBuf,
    },
    /// Tabulate omega(s_n) against slog_C(n) and sigma0(n).
    Scan {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        range: RangeArgs,
        /// Tower base C of the super-logarithm column.
        #[arg(long = "base", default_value = "2")]
        base: Rational,
    },
    /// Primitive divisors of a^n - b^n and omega versus sigma0(n) - 2.
    Zsigmondy {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = 2)]
        n_from: u64,
        #[arg(long)]
        n_to: u64,
    },
}

#[derive(Debug, Args)]
struct InstanceArg {
    /// Instance file: {"ell": L, "terms": [{"coeff": "c", "bases": ["x1", ...]}]}
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Debug, Args)]
struct RangeArgs {
    #[arg(long, default_value_t = 1)]
    n_from: u64,
    #[arg(long)]
    n_to: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget::new(cli.budget).with_seed(cli.seed);
    let ctx = commands::Context { format: cli.format, budget, bit_cap: cli.bit_cap };
    let result = match cli.command {
        Command::Eval { instance, range, moduli } => {
            commands::eval(&ctx, &instance.instance, range.n_from, range.n_to, &moduli)
        }
        Command::Classify { instance } => commands::classify(&ctx, &instance.instance),
        Command::Witness { instance, kappa_max, out } => {
            commands::witness(&ctx, &instance.instance, kappa_max as usize, out.as_deref())
        }
        Command::Verify { certificate } => commands::verify(&ctx, &certificate),
        Command::Scan { instance, range, base } => {
            commands::scan(&ctx, &instance.instance, range.n_from, range.n_to, &base)
        }
        Command::Zsigmondy { a, b, n_from, n_to } => commands::zsigmondy(&ctx, a, b, n_from, n_to),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
