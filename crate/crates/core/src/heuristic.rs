//! The density heuristic: the closed-form tail of the odds integral and the
//! measured rate at which a sum of two squares is itself a square.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernel::{gcd_u128, perfect_sqrt_u64};

/// Largest scale the exhaustive hit-rate count accepts.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 12;

pub const DEFAULT_SEED: u64 = 0x5eed_2026;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("integration floor must be at least 1")]
    Floor,
    #[error("4*a0^4 overflows 128 bits for a0={0}")]
    FloorRange(u64),
    #[error("scale must be at least 10, got {0}")]
    Scale(u64),
    #[error("exhaustive count at M={m} costs {cost} pair tests, over the limit of M <= {limit}")]
    OverBudget { m: u64, cost: u128, limit: u64 },
    #[error("sampled mode needs at least one trial")]
    NoTrials,
    #[error("need at least 3 magnitudes with positive rates, got {0}")]
    TooFewPoints(usize),
    #[error("magnitudes and rates differ in length")]
    LengthMismatch,
}

/// A nonnegative fraction kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u128,
    den: u128,
}

impl Fraction {
    /// Panics on a zero denominator.
    pub fn new(num: u128, den: u128) -> Fraction {
        assert!(den != 0, "zero denominator");
        let g = gcd_u128(num, den).max(1);
        Fraction { num: num / g, den: den / g }
    }

    pub fn numer(&self) -> u128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `∫_{a0}^∞ a³·a⁻⁸ da = 1 / (4·a0⁴)`, exactly.
pub fn tail_integral(a0: u64) -> Result<Fraction, HeuristicError> {
    if a0 == 0 {
        return Err(HeuristicError::Floor);
    }
    let a = u128::from(a0);
    let den = a
        .checked_mul(a)
        .and_then(|v| v.checked_mul(a))
        .and_then(|v| v.checked_mul(a))
        .and_then(|v| v.checked_mul(4))
        .ok_or(HeuristicError::FloorRange(a0))?;
    Ok(Fraction::new(1, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitRateMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HitRate {
    pub m: u64,
    pub hits: u64,
    pub trials: u64,
}

impl HitRate {
    pub fn rate(&self) -> Fraction {
        Fraction::new(u128::from(self.hits), u128::from(self.trials))
    }
}

/// Pairs `(u, v)` with `u` in `u_range`, `1 ≤ v ≤ m` and `u² + v²` square.
pub fn count_square_sums(m: u64, u_range: Range<u64>) -> u64 {
    let mut hits = 0;
    for u in u_range.start.max(1)..u_range.end.min(m + 1) {
        for v in 1..=m {
            if perfect_sqrt_u64(u * u + v * v).is_some() {
                hits += 1;
            }
        }
    }
    hits
}

/// Refuses scales the measurement does not support, before any work.
pub fn check_scale(m: u64, mode: HitRateMode) -> Result<(), HeuristicError> {
    if m < 10 {
        return Err(HeuristicError::Scale(m));
    }
    match mode {
        HitRateMode::Exhaustive if m > EXHAUSTIVE_LIMIT => {
            Err(HeuristicError::OverBudget { m, cost: u128::from(m) * u128::from(m), limit: EXHAUSTIVE_LIMIT })
        }
        HitRateMode::Sampled { trials: 0, .. } => Err(HeuristicError::NoTrials),
        // Keep u² + v² inside u64.
        HitRateMode::Sampled { .. } if m > u64::from(u32::MAX) / 2 => Err(HeuristicError::Scale(m)),
        _ => Ok(()),
    }
}

/// Fraction of pairs `1 ≤ u, v ≤ m` whose squares sum to a square.
///
/// Scales below 10 are rejected for measurement, but the exhaustive count
/// itself is exact at any size; see [`count_square_sums`].
pub fn square_hit_rate(m: u64, mode: HitRateMode) -> Result<HitRate, HeuristicError> {
    check_scale(m, mode)?;
    Ok(match mode {
        HitRateMode::Exhaustive => HitRate { m, hits: count_square_sums(m, 1..m + 1), trials: m * m },
        HitRateMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0;
            for _ in 0..trials {
                let u = rng.gen_range(1..=m);
                let v = rng.gen_range(1..=m);
                if perfect_sqrt_u64(u * u + v * v).is_some() {
                    hits += 1;
                }
            }
            HitRate { m, hits, trials }
        }
    })
}

/// Least-squares slope of `ln(rate)` against `ln(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    /// Indices of input points left out for a zero rate.
    pub excluded: Vec<usize>,
}

pub fn fit_exponent(magnitudes: &[u64], rates: &[Fraction]) -> Result<ExponentFit, HeuristicError> {
    if magnitudes.len() != rates.len() {
        return Err(HeuristicError::LengthMismatch);
    }
    let mut excluded = Vec::new();
    let mut points = Vec::new();
    for (i, (&m, r)) in magnitudes.iter().zip(rates).enumerate() {
        if r.numer() == 0 || m == 0 {
            excluded.push(i);
        } else {
            points.push((libm::log(m as f64), libm::log(r.to_f64())));
        }
    }
    if points.len() < 3 {
        return Err(HeuristicError::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    Ok(ExponentFit { slope: sxy / sxx, excluded })
}

/// The heuristic's numbers gathered in one place.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub a0: u64,
    pub tail: Fraction,
    pub magnitudes: Vec<u64>,
    pub rates: Vec<HitRate>,
    pub fit: Option<ExponentFit>,
}

impl DensityEstimate {
    pub fn measure(a0: u64, magnitudes: &[u64], mode: HitRateMode) -> Result<Self, HeuristicError> {
        let rates = magnitudes.iter().map(|&m| square_hit_rate(m, mode)).collect::<Result<Vec<_>, _>>()?;
        Self::from_rates(a0, rates)
    }

    /// Assembles an estimate from rates measured elsewhere. The fit is left
    /// out when fewer than three usable points exist.
    pub fn from_rates(a0: u64, rates: Vec<HitRate>) -> Result<Self, HeuristicError> {
        let tail = tail_integral(a0)?;
        let magnitudes: Vec<u64> = rates.iter().map(|r| r.m).collect();
        let fractions: Vec<Fraction> = rates.iter().map(HitRate::rate).collect();
        let fit = match fit_exponent(&magnitudes, &fractions) {
            Ok(fit) => Some(fit),
            Err(HeuristicError::TooFewPoints(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(DensityEstimate { a0, tail, magnitudes, rates, fit })
    }
}
