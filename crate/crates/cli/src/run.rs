//! Subcommand dispatch on a worker pool sized by `--workers`.
//!
//! Work is split into independent ranges, computed in parallel and merged in
//! range order, so output bytes are the same for every worker count.

use std::io::Write;
use std::ops::Range;
use std::sync::atomic::AtomicBool;

use rayon::prelude::*;
use thiserror::Error;

use rdsquare_core::descent::{
    assemble_probe, descent_step, forced_k_rows, is_multiplier_prime, multiplier_primes, search_equation_rows,
    DescentError,
};
use rdsquare_core::heuristic::{
    check_scale, count_square_sums, square_hit_rate, DensityEstimate, HeuristicError, HitRate, HitRateMode,
};
use rdsquare_core::kernel::isqrt_u64;
use rdsquare_core::lattice::{three_distance_family, LatticeError};
use rdsquare_core::triples::{primitive_triples_for_s, sort_canonical};

use crate::checkpoint::CheckpointError;
use crate::config::{Command, RunConfig, SamplingMode};
use crate::output::{Emitter, OutputError};
use crate::records::{
    CountSummary, DescentRecord, DescentSummary, EquationRecord, ForcedKRecord, HeaderRecord, HeuristicRecord,
    HeuristicSummary, HitRecord, KTupleRecord, SearchSummary, TripleRecord,
};
use crate::sweep;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Config(String),
    #[error("cannot resume: {0}")]
    Resume(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("cancelled")]
    Cancelled,
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Cancelled => Outcome::Interrupted.exit_code(),
            _ => 3,
        }
    }

    /// The reader went away (`rdsquare … | head`); not worth reporting.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, RunError::Output(OutputError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Finished, nothing contradicting the theorems.
    Clean,
    /// Finished and found a four-distance point, or a solution in a family
    /// the theorems rule out.
    Counterexample,
    /// Stopped early; a checkpointed search can be resumed.
    Interrupted,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Clean => 0,
            Outcome::Counterexample => 10,
            Outcome::Interrupted => 130,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Output(OutputError::Io(e))
    }
}

/// Splits `lo..hi` into consecutive chunks for the pool.
fn chunks(lo: u64, hi: u64, size: u64) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut start = lo;
    while start < hi {
        let end = hi.min(start.saturating_add(size));
        out.push(start..end);
        start = end;
    }
    out
}

fn par_concat<T, E, F>(ranges: Vec<Range<u64>>, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(Range<u64>) -> Result<Vec<T>, E> + Sync + Send,
{
    let parts: Vec<Result<Vec<T>, E>> = ranges.into_par_iter().map(f).collect();
    let mut out = Vec::new();
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

fn to_i128(r: Range<u64>) -> Range<i128> {
    i128::from(r.start)..i128::from(r.end)
}

/// Runs one configured command, writing the report to `out`.
pub fn run(cfg: &RunConfig, out: &mut (dyn Write + Send), cancel: &AtomicBool) -> Result<Outcome, RunError> {
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| RunError::Pool(e.to_string()))?;
    let mut em = Emitter::new(out, cfg.output, cfg.self_check);
    em.framing(&HeaderRecord::new(cfg.canonical()))?;
    let outcome = pool.install(|| dispatch(cfg, &mut em, cancel))?;
    em.flush()?;
    Ok(outcome)
}

fn dispatch(cfg: &RunConfig, em: &mut Emitter<'_>, cancel: &AtomicBool) -> Result<Outcome, RunError> {
    match &cfg.command {
        Command::Triples { max_hyp } => {
            let s_end = isqrt_u64(*max_hyp) + 1;
            let mut triples =
                par_concat(chunks(2, s_end, 16), |r| Ok::<_, RunError>(primitive_triples_for_s(r, *max_hyp)))?;
            sort_canonical(&mut triples);
            for t in &triples {
                em.record(&TripleRecord::from(t))?;
            }
            em.framing(&CountSummary { summary: "triples".into(), bound: *max_hyp, count: triples.len() as u64 })?;
            Ok(Outcome::Clean)
        }
        Command::Search(params) => {
            let result = sweep::sweep(params, cfg, em, cancel)?;
            if result.interrupted {
                eprintln!("search interrupted after z={}", result.report.z_hi);
                return Ok(Outcome::Interrupted);
            }
            let mut report = result.report;
            report.z_lo = params.z_min;
            report.z_hi = params.z_max;
            let summary = SearchSummary::new(&report, cfg.region_extension);
            em.framing(&summary)?;
            Ok(if summary.hits4 > 0 { Outcome::Counterexample } else { Outcome::Clean })
        }
        Command::ThreeDistance { max_hyp } => {
            let family = three_distance_family(*max_hyp)?;
            for (_, p) in &family {
                em.record(&HitRecord::from(p))?;
            }
            em.framing(&CountSummary {
                summary: "three_distance".into(),
                bound: *max_hyp,
                count: family.len() as u64,
            })?;
            Ok(Outcome::Clean)
        }
        Command::Descent { family, bound } => {
            let c = i128::from(*family);
            let b = i128::from(*bound);
            let solutions = par_concat(chunks(1, bound + 1, 8), |r| search_equation_rows(c, to_i128(r), b))?;
            for inst in &solutions {
                if let Some(rec) = EquationRecord::from_solution(inst) {
                    em.record(&rec)?;
                }
                em.record(&DescentRecord::new(inst, &descent_step(c, inst)?))?;
            }
            let theorem_family = *family == 1 || *family == 2 || is_multiplier_prime(*family);
            em.framing(&DescentSummary {
                summary: "descent".into(),
                family: c,
                bound: b,
                theorem_family,
                solutions: solutions.len() as u64,
            })?;
            Ok(if theorem_family && !solutions.is_empty() { Outcome::Counterexample } else { Outcome::Clean })
        }
        Command::ForcedK { family, bound } => {
            let b = i128::from(*bound);
            let tuples = par_concat(chunks(2, bound + 1, 8), |r| forced_k_rows(*family, to_i128(r), b))?;
            let probe = assemble_probe(*family, b, tuples);
            for t in &probe.tuples {
                em.record(&KTupleRecord::from(t))?;
            }
            let rec = ForcedKRecord::from(&probe);
            if !rec.deviations.is_empty() {
                eprintln!("forced-k: {} realizes k outside {{{}}}: {:?}", family, rec.expected, rec.deviations);
            }
            em.framing(&rec)?;
            Ok(Outcome::Clean)
        }
        Command::Primes { limit } => {
            let ns: Vec<u64> = multiplier_primes(*limit)?.into_iter().map(|p| p.n).collect();
            em.record(&ns)?;
            em.framing(&CountSummary { summary: "primes".into(), bound: *limit, count: ns.len() as u64 })?;
            Ok(Outcome::Clean)
        }
        Command::Heuristic { a0, magnitudes, mode, trials } => {
            let hr_mode = match mode {
                SamplingMode::Exhaustive => HitRateMode::Exhaustive,
                SamplingMode::Sampled => HitRateMode::Sampled { trials: *trials, seed: cfg.seed },
            };
            let mut rates = Vec::with_capacity(magnitudes.len());
            for &m in magnitudes {
                rates.push(match hr_mode {
                    HitRateMode::Exhaustive => {
                        check_scale(m, hr_mode)?;
                        let parts: Vec<u64> =
                            chunks(1, m + 1, 64).into_par_iter().map(|r| count_square_sums(m, r)).collect();
                        HitRate { m, hits: parts.iter().sum(), trials: m * m }
                    }
                    HitRateMode::Sampled { .. } => square_hit_rate(m, hr_mode)?,
                });
            }
            let est = DensityEstimate::from_rates(*a0, rates)?;
            em.framing(&HeuristicRecord::new(&est))?;
            em.framing(&HeuristicSummary {
                summary: "heuristic".into(),
                mode: match mode {
                    SamplingMode::Exhaustive => "exhaustive".into(),
                    SamplingMode::Sampled => "sampled".into(),
                },
                hits: est.rates.iter().map(|r| r.hits).collect(),
                trials: est.rates.iter().map(|r| r.trials).collect(),
                excluded: est
                    .fit
                    .as_ref()
                    .map(|f| f.excluded.iter().map(|&i| est.magnitudes[i]).collect())
                    .unwrap_or_default(),
            })?;
            Ok(Outcome::Clean)
        }
    }
}
