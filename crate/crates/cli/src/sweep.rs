//! Parallel, checkpointed sweep of `search` over a range of square sides.
//!
//! Squares are computed in batches on the worker pool and written strictly
//! in ascending z, so the report and the checkpoint never depend on the
//! worker count.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use rdsquare_core::lattice::{
    classify_point, search_square, SearchOptions, SearchReport, SquareInstance, SquareSumCache,
};

use crate::checkpoint::{self, CheckpointWriter};
use crate::config::{RunConfig, SearchParams};
use crate::output::Emitter;
use crate::records::{CheckpointRecord, HitRecord};
use crate::run::RunError;

/// Largest leg the shared square-sum table may cover (about 128 MiB).
pub const CACHE_MAX_LEG: u64 = 1 << 15;

pub struct SweepResult {
    pub report: SearchReport,
    /// Set when the sweep stopped before `z_max`.
    pub interrupted: bool,
}

/// Rebuilds the hits stored in a checkpoint record, re-classifying each one
/// so a tampered or stale file cannot leak wrong numbers into the report.
fn restore(rec: &CheckpointRecord, params: &SearchParams) -> Result<SearchReport, RunError> {
    let mut report = SearchReport::empty(rec.z_done, rec.z_done, params.filter, params.min_count, params.symmetry);
    for hit in &rec.hits {
        let profile = classify_point(hit.z, hit.x, hit.y)?;
        if HitRecord::from(&profile) != *hit || hit.z != rec.z_done {
            return Err(RunError::Resume(format!(
                "checkpoint hit ({}, {}) in z={} does not match its recomputation",
                hit.x, hit.y, hit.z
            )));
        }
        report.hits.push(profile);
    }
    report.points_scanned = rec.scanned;
    report.points_covered = rec.covered;
    Ok(report)
}

pub fn sweep(
    params: &SearchParams,
    cfg: &RunConfig,
    em: &mut Emitter<'_>,
    cancel: &AtomicBool,
) -> Result<SweepResult, RunError> {
    let ext = cfg.region_extension;
    let mut total = SearchReport::empty(params.z_min, params.z_min, params.filter, params.min_count, params.symmetry);
    let mut next_z = params.z_min;

    let mut writer = match &cfg.checkpoint {
        Some(path) => {
            let canonical = cfg.canonical();
            let resume = checkpoint::load(path, &canonical, params.z_min)?;
            if resume.dropped_partial_line {
                eprintln!("checkpoint: dropped a truncated final line");
            }
            if !resume.had_header && resume.valid_len == 0 {
                eprintln!("checkpoint: {} is new or empty, starting fresh", path.display());
            }
            for rec in &resume.records {
                let part = restore(rec, params)?;
                for p in &part.hits {
                    em.record(&HitRecord::from(p))?;
                }
                total.absorb(part);
                next_z = rec.z_done + 1;
            }
            if !resume.records.is_empty() {
                eprintln!("checkpoint: resuming at z={next_z}");
            }
            let complete = resume.complete;
            let mut w = CheckpointWriter::open(path, &resume, &canonical)?;
            if complete {
                total.z_hi = params.z_max;
                return Ok(SweepResult { report: total, interrupted: false });
            }
            if next_z > params.z_max {
                w.finish()?;
                total.z_hi = params.z_max;
                return Ok(SweepResult { report: total, interrupted: false });
            }
            Some(w)
        }
        None => None,
    };

    let cache = if params.square_cache {
        let leg = SquareSumCache::leg_needed(&SquareInstance::extended(params.z_max, ext)?);
        if leg > CACHE_MAX_LEG {
            return Err(RunError::Config(format!(
                "--square-cache needs legs up to {leg}, over the table limit of {CACHE_MAX_LEG}"
            )));
        }
        Some(SquareSumCache::new(leg))
    } else {
        None
    };
    let opts = SearchOptions {
        symmetry_reduction: params.symmetry,
        square_cache: cache.as_ref(),
        point_budget: params.point_budget,
    };

    let batch = (rayon::current_num_threads() * 4).max(1) as i64;
    let mut interrupted = false;
    'outer: while next_z <= params.z_max {
        let hi = params.z_max.min(next_z.saturating_add(batch - 1));
        let reports: Vec<Result<SearchReport, RunError>> = (next_z..=hi)
            .into_par_iter()
            .map(|z| {
                if cancel.load(Ordering::Relaxed) {
                    return Err(RunError::Cancelled);
                }
                let inst = SquareInstance::extended(z, ext)?;
                Ok(search_square(&inst, params.filter, params.min_count, &opts)?)
            })
            .collect();
        for (z, result) in (next_z..=hi).zip(reports) {
            let report = match result {
                Err(RunError::Cancelled) => {
                    interrupted = true;
                    break 'outer;
                }
                other => other?,
            };
            let hits: Vec<HitRecord> = report.hits.iter().map(HitRecord::from).collect();
            for h in &hits {
                em.record(h)?;
            }
            em.flush()?;
            if let Some(w) = writer.as_mut() {
                w.append(&CheckpointRecord {
                    z_done: z,
                    hits,
                    scanned: report.points_scanned,
                    covered: report.points_covered,
                })?;
            }
            total.absorb(report);
            next_z = z + 1;
            if cfg.stop_after_z == Some(z) || (cancel.load(Ordering::Relaxed) && z < params.z_max) {
                interrupted = z < params.z_max;
                break 'outer;
            }
        }
    }
    if !interrupted {
        if let Some(w) = writer.as_mut() {
            w.finish()?;
        }
    }
    Ok(SweepResult { report: total, interrupted })
}
