//! Run configuration and its canonical string form.
//!
//! The canonical string names every setting that can change the report's
//! bytes and nothing else: worker count, checkpoint path and output format
//! are left out, so the same string identifies the same computation.

use std::fmt;
use std::path::PathBuf;

use rdsquare_core::descent::Family;
use rdsquare_core::lattice::{Filter, DEFAULT_POINT_BUDGET};

use crate::records::filter_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchParams {
    pub z_min: i64,
    pub z_max: i64,
    pub min_count: u8,
    pub filter: Option<Filter>,
    pub symmetry: bool,
    pub square_cache: bool,
    pub point_budget: u64,
}

impl SearchParams {
    pub fn new(z_min: i64, z_max: i64, min_count: u8) -> Self {
        SearchParams {
            z_min,
            z_max,
            min_count,
            filter: None,
            symmetry: false,
            square_cache: false,
            point_budget: DEFAULT_POINT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Triples { max_hyp: u64 },
    Search(SearchParams),
    ThreeDistance { max_hyp: u64 },
    Descent { family: u64, bound: u64 },
    ForcedK { family: Family, bound: u64 },
    Primes { limit: u64 },
    Heuristic { a0: u64, magnitudes: Vec<u64>, mode: SamplingMode, trials: u64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Triples { .. } => "triples",
            Command::Search(_) => "search",
            Command::ThreeDistance { .. } => "three-distance",
            Command::Descent { .. } => "descent",
            Command::ForcedK { .. } => "forced-k",
            Command::Primes { .. } => "primes",
            Command::Heuristic { .. } => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub workers: usize,
    pub output: OutputFormat,
    pub checkpoint: Option<PathBuf>,
    pub seed: u64,
    pub region_extension: u32,
    pub self_check: bool,
    /// Stop a search sweep once this z is done, as if interrupted.
    pub stop_after_z: Option<i64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            workers: 1,
            output: OutputFormat::Jsonl,
            checkpoint: None,
            seed: rdsquare_core::heuristic::DEFAULT_SEED,
            region_extension: 0,
            self_check: false,
            stop_after_z: None,
        }
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.command.name())?;
        match &self.command {
            Command::Triples { max_hyp } | Command::ThreeDistance { max_hyp } => write!(f, " max_hyp={max_hyp}"),
            Command::Search(p) => write!(
                f,
                " z_min={} z_max={} min_count={} filter={} region_extension={} symmetry={} square_cache={}",
                p.z_min,
                p.z_max,
                p.min_count,
                filter_label(p.filter),
                self.region_extension,
                on_off(p.symmetry),
                on_off(p.square_cache),
            ),
            Command::Descent { family, bound } => write!(f, " family={family} bound={bound}"),
            Command::ForcedK { family, bound } => write!(f, " mode={family} bound={bound}"),
            Command::Primes { limit } => write!(f, " limit={limit}"),
            Command::Heuristic { a0, magnitudes, mode, trials } => {
                let ms: Vec<String> = magnitudes.iter().map(u64::to_string).collect();
                write!(f, " a0={a0} magnitudes={}", ms.join(","))?;
                match mode {
                    SamplingMode::Exhaustive => write!(f, " mode=exhaustive"),
                    SamplingMode::Sampled => write!(f, " mode=sampled trials={trials} seed={}", self.seed),
                }
            }
        }
    }
}
