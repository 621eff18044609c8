//! Command-line parsing into a [`RunConfig`].
//!
//! Every global flag has an environment fallback:
//!
//! | flag                 | variable                     |
//! |----------------------|------------------------------|
//! | `--workers`          | `RDSQUARE_WORKERS`           |
//! | `--output`           | `RDSQUARE_OUTPUT`            |
//! | `--checkpoint`       | `RDSQUARE_CHECKPOINT`        |
//! | `--seed`             | `RDSQUARE_SEED`              |
//! | `--region-extension` | `RDSQUARE_REGION_EXTENSION`  |

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use rdsquare_core::descent::Family;
use rdsquare_core::heuristic::DEFAULT_SEED;
use rdsquare_core::lattice::{Filter, DEFAULT_POINT_BUDGET};

use crate::config::{Command, OutputFormat, RunConfig, SamplingMode, SearchParams};

#[derive(Debug, Parser)]
#[command(name = "rdsquare", version, about = "Exact search tools for the square rational-distance problem")]
pub struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Worker threads.
    #[arg(long, global = true, env = "RDSQUARE_WORKERS", default_value_t = 1,
          value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
    #[arg(long, global = true, env = "RDSQUARE_OUTPUT", value_enum, default_value_t = Format::Jsonl)]
    output: Format,
    /// Checkpoint file for resumable search sweeps.
    #[arg(long, global = true, env = "RDSQUARE_CHECKPOINT")]
    checkpoint: Option<PathBuf>,
    /// Seed for sampled measurements.
    #[arg(long, global = true, env = "RDSQUARE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Scan [-k·z, (k+1)·z]² instead of the closed square.
    #[arg(long, global = true, env = "RDSQUARE_REGION_EXTENSION", default_value_t = 0)]
    region_extension: u32,
    /// Re-parse every emitted JSONL line against its schema.
    #[arg(long, global = true)]
    self_check: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Edge,
    Midline,
    Ratio,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sampling {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Primitive Pythagorean triples up to a hypotenuse bound.
    Triples {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_hyp: u64,
    },
    /// Exhaustive lattice search over a range of square sides.
    Search {
        #[arg(long, default_value_t = 1)]
        z_min: i64,
        #[arg(long)]
        z_max: i64,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=4))]
        min_count: u8,
        /// edge, midline, diagonal, n-times or n-times:N
        #[arg(long, value_parser = parse_filter)]
        filter: Option<Filter>,
        /// Scan one eighth of the square and list canonical representatives.
        #[arg(long)]
        symmetry: bool,
        /// Precompute a table of square sums instead of testing per point.
        #[arg(long)]
        square_cache: bool,
        /// Refuse any single square with more points than this.
        #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
        budget: u64,
        #[arg(long, hide = true)]
        stop_after_z: Option<i64>,
    },
    /// Three-distance points built from primitive triples.
    ThreeDistance {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_hyp: u64,
    },
    /// Search (a²+b²)² + (c·ab)² = e² for coprime 1 <= a, b <= bound.
    Descent {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        family: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
    },
    /// Which common factors k the ratio equation realizes.
    ForcedK {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Multiplier for ratio mode.
        #[arg(long, required_if_eq("mode", "ratio"), value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
    },
    /// Primes n <= limit with n²+4 also prime.
    Primes {
        #[arg(long)]
        limit: u64,
    },
    /// Tail of the odds integral and measured square-sum hit rates.
    Heuristic {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        a0: u64,
        #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048,4096")]
        magnitudes: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Sampling::Exhaustive)]
        mode: Sampling,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
}

pub fn parse_filter(s: &str) -> Result<Filter, String> {
    let s = s.trim();
    let ratio =
        s.strip_prefix("n-times:").or_else(|| s.strip_prefix("n_times_distance(").and_then(|r| r.strip_suffix(')')));
    if let Some(n) = ratio {
        return n
            .parse::<u64>()
            .ok()
            .filter(|&n| n >= 2)
            .map(|n| Filter::NTimesDistance(Some(n)))
            .ok_or_else(|| format!("bad ratio in filter '{s}'"));
    }
    match s {
        "edge" | "on_edge" => Ok(Filter::OnEdge),
        "midline" | "on_midline" => Ok(Filter::OnMidline),
        "diagonal" | "on_diagonal" => Ok(Filter::OnDiagonal),
        "n-times" | "n_times_distance" => Ok(Filter::NTimesDistance(None)),
        _ => Err(format!("unknown filter '{s}'")),
    }
}

impl Cli {
    fn into_config(self) -> Result<RunConfig, clap::Error> {
        let g = self.global;
        let mut stop_after_z = None;
        let command = match self.command {
            Cmd::Triples { max_hyp } => Command::Triples { max_hyp },
            Cmd::Search { z_min, z_max, min_count, filter, symmetry, square_cache, budget, stop_after_z: stop } => {
                if z_min < 1 || z_max < z_min {
                    return Err(Cli::command().error(
                        ErrorKind::ValueValidation,
                        format!("--z-min/--z-max need 1 <= z_min <= z_max, got {z_min}..{z_max}"),
                    ));
                }
                stop_after_z = stop;
                Command::Search(SearchParams {
                    z_min,
                    z_max,
                    min_count,
                    filter,
                    symmetry,
                    square_cache,
                    point_budget: budget,
                })
            }
            Cmd::ThreeDistance { max_hyp } => Command::ThreeDistance { max_hyp },
            Cmd::Descent { family, bound } => Command::Descent { family, bound },
            Cmd::ForcedK { mode, n, bound } => {
                let family = match mode {
                    Mode::Edge => Family::Edge,
                    Mode::Midline => Family::Midline,
                    Mode::Ratio => Family::Ratio(n.unwrap_or(1)),
                };
                Command::ForcedK { family, bound }
            }
            Cmd::Primes { limit } => Command::Primes { limit },
            Cmd::Heuristic { a0, magnitudes, mode, trials } => {
                if magnitudes.is_empty() {
                    return Err(Cli::command().error(ErrorKind::ValueValidation, "--magnitudes must not be empty"));
                }
                let mode = match mode {
                    Sampling::Exhaustive => SamplingMode::Exhaustive,
                    Sampling::Sampled => SamplingMode::Sampled,
                };
                Command::Heuristic { a0, magnitudes, mode, trials }
            }
        };
        Ok(RunConfig {
            command,
            workers: usize::from(g.workers),
            output: match g.output {
                Format::Jsonl => OutputFormat::Jsonl,
                Format::Csv => OutputFormat::Csv,
            },
            checkpoint: g.checkpoint,
            seed: g.seed,
            region_extension: g.region_extension,
            self_check: g.self_check,
            stop_after_z,
        })
    }
}

/// Parses command-line arguments (including the program name) into a
/// validated configuration. Errors carry clap's usage exit code 2.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)?.into_config()
}
