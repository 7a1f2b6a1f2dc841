mod cache;
mod commands;
mod engine;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use operad_core::certify::PROBE_PRIME;
use operad_core::{is_prime_u63, BoundBasis};

use crate::cache::Cache;
use crate::engine::{CliError, Ranks};

/// Dimensions, quadratic duals and the Ginzburg–Kapranov test for binary
/// quadratic operads.
#[derive(Parser, Debug)]
#[command(name = "operad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for per-prime rank computations [default: all cores].
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    /// Run cache (JSON lines).
    #[arg(
        long,
        global = true,
        env = "OPERAD_CACHE",
        default_value = ".operad-cache.jsonl"
    )]
    cache: PathBuf,

    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Recompute cached ranks and fail if any disagrees with the cache.
    #[arg(long, global = true)]
    recompute: bool,

    /// Allow degrees above 6.
    #[arg(long, global = true)]
    i_know_this_is_huge: bool,

    /// Abort after this many fresh rank computations.
    #[arg(long, global = true, hide = true)]
    stop_after: Option<usize>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Built-in operad (see `operad presets`).
    #[arg(long)]
    preset: Option<String>,
    /// File of multilinear identities, one per line.
    #[arg(long, value_name = "FILE")]
    identities: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Bound {
    Dimension,
    Rank,
}

impl From<Bound> for BoundBasis {
    fn from(b: Bound) -> Self {
        match b {
            Bound::Dimension => BoundBasis::Dimension,
            Bound::Rank => BoundBasis::Rank,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of P(n) modulo one prime (an upper bound in characteristic 0).
    Dim {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(
            long,
            required_unless_present = "max_degree",
            conflicts_with = "max_degree"
        )]
        degree: Option<usize>,
        /// Tabulate degrees 1 through this one.
        #[arg(long)]
        max_degree: Option<usize>,
        /// `auto` for the largest prime below 2^63, or an explicit prime.
        #[arg(long, default_value = "auto", value_parser = parse_prime)]
        prime: u64,
        /// Write the consequence matrix in sparse text form.
        #[arg(long, value_name = "PATH", conflicts_with = "max_degree")]
        dump_matrix: Option<PathBuf>,
    },
    /// Characteristic-zero dimension certified by ranks modulo many primes.
    Certify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_name = "PATH")]
        dump_matrix: Option<PathBuf>,
        /// Size at which the bound s^(s/2) is evaluated: the quotient
        /// dimension, or the rank for the strict minor argument.
        #[arg(long, value_enum, default_value = "dimension")]
        bound: Bound,
    },
    /// Quadratic dual of a degree-3 presentation.
    Dual {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Compare g_P(g_P!(x)) with x through a given degree.
    Gk {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value = "auto", value_parser = parse_prime)]
        prime: u64,
        /// Certify every dimension instead of using one prime.
        #[arg(long)]
        certify: bool,
        #[arg(long, value_enum, default_value = "dimension", requires = "certify")]
        bound: Bound,
    },
    /// Full linearization of identities with repeated variables.
    Linearize {
        /// Identity text, e.g. "(x*y)*y = x*(y*y)".
        #[arg(required_unless_present = "identities", conflicts_with = "identities")]
        identity: Option<String>,
        #[arg(long, value_name = "FILE")]
        identities: Option<PathBuf>,
    },
    /// List the built-in operads.
    Presets,
}

fn parse_prime(s: &str) -> Result<u64, String> {
    if s == "auto" {
        return Ok(PROBE_PRIME);
    }
    let p: u64 = s
        .parse()
        .map_err(|_| format!("`{s}` is neither `auto` nor an integer"))?;
    if p >= 1 << 63 || !is_prime_u63(p) {
        return Err(format!("{p} is not a prime below 2^63"));
    }
    Ok(p)
}

fn check_degree(n: usize, huge: bool) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("degree must be at least 1".into()));
    }
    if n > 6 && !huge {
        return Err(CliError::Usage(format!(
            "degree {n} has {} multilinear monomials; pass --i-know-this-is-huge to go ahead",
            operad_core::dim_free(n).map_or_else(|_| "too many".to_string(), |d| d.to_string())
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let needs_ranks = matches!(
        cli.command,
        Command::Dim { .. } | Command::Certify { .. } | Command::Gk { .. }
    );
    let cache = if cli.no_cache || !needs_ranks {
        None
    } else {
        Some(Cache::open(&cli.cache)?)
    };
    let ranks = Ranks::new(cache, cli.recompute, cli.stop_after);
    let huge = cli.i_know_this_is_huge;
    let json = cli.json;
    let resolve =
        |s: &SourceArgs| engine::Source::resolve(s.preset.as_deref(), s.identities.as_deref());

    match cli.command {
        Command::Dim {
            source,
            degree,
            max_degree,
            prime,
            dump_matrix,
        } => {
            let degrees: Vec<usize> = match (degree, max_degree) {
                (Some(n), _) => vec![n],
                (None, Some(m)) => (1..=m).collect(),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let top = degrees.iter().copied().max().unwrap_or(0);
            check_degree(top, huge)?;
            commands::dim(
                &ranks,
                &resolve(&source)?,
                &degrees,
                prime,
                dump_matrix.as_deref(),
                json,
            )
        }
        Command::Certify {
            source,
            degree,
            dump_matrix,
            bound,
        } => {
            check_degree(degree, huge)?;
            commands::certify(
                &ranks,
                &resolve(&source)?,
                degree,
                bound.into(),
                dump_matrix.as_deref(),
                json,
            )
        }
        Command::Dual { source } => commands::dual(&resolve(&source)?, json),
        Command::Gk {
            source,
            max_degree,
            prime,
            certify,
            bound,
        } => {
            check_degree(max_degree, huge)?;
            let certify = certify.then_some(bound.into());
            commands::gk(&ranks, &resolve(&source)?, max_degree, prime, certify, json)
        }
        Command::Linearize {
            identity,
            identities,
        } => commands::linearize(identity.as_deref(), identities.as_deref(), json),
        Command::Presets => commands::presets(json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
