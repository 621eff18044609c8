//! Line schemas for everything the tool writes.
//!
//! Every record derives both directions so the tool can re-parse its own
//! output (`--self-check`) and read checkpoints back.

use serde::{Deserialize, Serialize};

use rdsquare_core::descent::{DescentOutcome, EquationInstance, ForcedKProbe, KTuple};
use rdsquare_core::heuristic::DensityEstimate;
use rdsquare_core::lattice::{Filter, PointProfile, SearchReport};
use rdsquare_core::triples::PythTriple;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaderRecord {
    pub config: String,
    pub version: String,
}

impl HeaderRecord {
    pub fn new(config: String) -> Self {
        HeaderRecord { config, version: crate::VERSION.to_string() }
    }
}

/// One scored lattice point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HitRecord {
    pub z: i64,
    pub x: i64,
    pub y: i64,
    pub sq_dists: [u64; 4],
    pub roots: [Option<u64>; 4],
    pub count: u8,
    pub tags: Vec<String>,
}

impl From<&PointProfile> for HitRecord {
    fn from(p: &PointProfile) -> Self {
        HitRecord {
            z: p.z,
            x: p.x,
            y: p.y,
            sq_dists: p.sq_dists,
            roots: p.roots,
            count: p.rational_count,
            tags: p.tags.iter().map(|t| t.to_string()).collect(),
        }
    }
}

pub fn filter_label(filter: Option<Filter>) -> String {
    filter.map_or_else(|| "none".to_string(), |f| f.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSummary {
    pub summary: String,
    pub z_range: [i64; 2],
    pub filter: String,
    pub min_count: u8,
    pub region_extension: u32,
    pub symmetry_reduced: bool,
    pub hits: u64,
    pub hits3: u64,
    pub hits4: u64,
    pub points_scanned: u64,
    pub points_covered: u64,
}

impl SearchSummary {
    pub fn new(report: &SearchReport, region_extension: u32) -> Self {
        SearchSummary {
            summary: "search".to_string(),
            z_range: [report.z_lo, report.z_hi],
            filter: filter_label(report.filter),
            min_count: report.min_count,
            region_extension,
            symmetry_reduced: report.symmetry_reduced,
            hits: report.hits.len() as u64,
            hits3: report.hits3().count() as u64,
            hits4: report.hits4().count() as u64,
            points_scanned: report.points_scanned,
            points_covered: report.points_covered,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleRecord {
    pub s: u64,
    pub t: u64,
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

impl From<&PythTriple> for TripleRecord {
    fn from(t: &PythTriple) -> Self {
        TripleRecord { s: t.s, t: t.t, p: t.even_leg, q: t.odd_leg, r: t.hyp }
    }
}

/// Closing line for the subcommands whose summary is just a tally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSummary {
    pub summary: String,
    pub bound: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationRecord {
    pub family: i128,
    pub a: i128,
    pub b: i128,
    pub e: i128,
}

impl EquationRecord {
    /// `None` for instances without a square root.
    pub fn from_solution(inst: &EquationInstance) -> Option<Self> {
        inst.e.map(|e| EquationRecord { family: inst.c, a: inst.a, b: inst.b, e })
    }
}

/// What one descent round made of a solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentRecord {
    pub descent: String,
    pub family: i128,
    pub a: i128,
    pub b: i128,
    /// The stage that failed, for violations.
    pub stage: Option<String>,
    /// `[a, b, e]` of the smaller solution, when one was produced.
    pub next: Option<[i128; 3]>,
}

impl DescentRecord {
    pub fn new(inst: &EquationInstance, outcome: &DescentOutcome) -> Self {
        let (descent, stage, next) = match outcome {
            DescentOutcome::Smaller(n) => ("smaller", None, n.e.map(|e| [n.a, n.b, e])),
            DescentOutcome::Violation(v) => ("violation", Some(v.stage.to_string()), None),
        };
        DescentRecord { descent: descent.to_string(), family: inst.c, a: inst.a, b: inst.b, stage, next }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentSummary {
    pub summary: String,
    pub family: i128,
    pub bound: i128,
    /// True when the family is one the theorems cover (c = 1, 2 or a
    /// multiplier prime), so a solution is a counterexample.
    pub theorem_family: bool,
    pub solutions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KTupleRecord {
    pub k: i128,
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl From<&KTuple> for KTupleRecord {
    fn from(t: &KTuple) -> Self {
        KTupleRecord { k: t.k, a: t.a, b: t.b, c: t.c, d: t.d }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcedKRecord {
    pub probe: String,
    pub mode: String,
    pub n: i128,
    pub bound: i128,
    pub expected: i128,
    pub realized: Vec<i128>,
    pub deviations: Vec<i128>,
    pub matches_claim: bool,
}

impl From<&ForcedKProbe> for ForcedKRecord {
    fn from(p: &ForcedKProbe) -> Self {
        ForcedKRecord {
            probe: "forced_k".to_string(),
            mode: p.family.to_string(),
            n: p.family.multiplier(),
            bound: p.bound,
            expected: p.expected_k,
            realized: p.realized.clone(),
            deviations: p.deviations().collect(),
            matches_claim: p.matches_claim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicRecord {
    pub a0: u64,
    pub tail: String,
    pub magnitudes: Vec<u64>,
    pub rates: Vec<String>,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicSummary {
    pub summary: String,
    pub mode: String,
    pub hits: Vec<u64>,
    pub trials: Vec<u64>,
    /// Magnitudes left out of the fit for a zero rate.
    pub excluded: Vec<u64>,
}

impl HeuristicRecord {
    pub fn new(est: &DensityEstimate) -> Self {
        HeuristicRecord {
            a0: est.a0,
            tail: est.tail.to_string(),
            magnitudes: est.magnitudes.clone(),
            rates: est.rates.iter().map(|r| r.rate().to_string()).collect(),
            slope: est.fit.as_ref().map(|f| f.slope),
        }
    }
}

/// A line of the checkpoint file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointRecord {
    pub z_done: i64,
    pub hits: Vec<HitRecord>,
    pub scanned: u64,
    pub covered: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompleteRecord {
    pub complete: bool,
}

/// Any line the tool may emit on its report stream.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportLine {
    Header(HeaderRecord),
    Hit(HitRecord),
    SearchSummary(SearchSummary),
    Triple(TripleRecord),
    CountSummary(CountSummary),
    Equation(EquationRecord),
    Descent(DescentRecord),
    DescentSummary(DescentSummary),
    KTuple(KTupleRecord),
    ForcedK(ForcedKRecord),
    Heuristic(HeuristicRecord),
    HeuristicSummary(HeuristicSummary),
    Multipliers(Vec<u64>),
}

/// Parses one JSONL line against the published schemas.
///
/// Tried one schema at a time rather than through an untagged enum, which
/// cannot carry the 128-bit fields.
pub fn validate_line(line: &str) -> Result<ReportLine, serde_json::Error> {
    macro_rules! attempt {
        ($($variant:ident: $ty:ty),* $(,)?) => {
            $(if let Ok(v) = serde_json::from_str::<$ty>(line) {
                return Ok(ReportLine::$variant(v));
            })*
        };
    }
    attempt!(
        Header: HeaderRecord,
        Hit: HitRecord,
        SearchSummary: SearchSummary,
        Triple: TripleRecord,
        CountSummary: CountSummary,
        Equation: EquationRecord,
        Descent: DescentRecord,
        DescentSummary: DescentSummary,
        KTuple: KTupleRecord,
        ForcedK: ForcedKRecord,
        Heuristic: HeuristicRecord,
        HeuristicSummary: HeuristicSummary,
    );
    serde_json::from_str::<Vec<u64>>(line).map(ReportLine::Multipliers)
}
