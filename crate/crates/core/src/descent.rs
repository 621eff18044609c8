//! The equation family `E_c: (a² + b²)² + (c·ab)² = e²` and the machinery
//! of the infinite-descent argument built on it.
//!
//! `c = 1` is the edge case, `c = 2` the midline case and `c = n` the case
//! where the side is `n` times the point's distance to a side, with `n` and
//! `n² + 4` both prime. Everything here is exact: `i128` with checked
//! arithmetic where values are bounded, arbitrary precision for the
//! identity checks.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_bigint::BigInt;
use thiserror::Error;

use crate::kernel::{gcd, is_prime_u64, perfect_sqrt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error("value exceeds the 128-bit exact range while computing {0}")]
    Range(&'static str),
    #[error("multiplier must be at least 1, got {0}")]
    Multiplier(i128),
    #[error("bound must be at least 1, got {0}")]
    Bound(i128),
    #[error("substitution needs m > n >= 1, got m={m} n={n}")]
    Params { m: i128, n: i128 },
    #[error("not a nontrivial solution of E_{c}: {reason}")]
    NotASolution { c: i128, reason: &'static str },
    #[error("multiplier limit {0} puts limit^2 + 4 beyond 64-bit primality")]
    PrimeRange(u64),
}

fn checked_sq(v: i128, what: &'static str) -> Result<i128, DescentError> {
    v.checked_mul(v).ok_or(DescentError::Range(what))
}

/// Which theorem's variant of the argument applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Point on an edge: multiplier 1.
    Edge,
    /// Point on a midline: multiplier 2.
    Midline,
    /// Side is `n` times the distance to a side: multiplier `n`.
    Ratio(u64),
}

impl Family {
    pub fn from_multiplier(c: u64) -> Family {
        match c {
            1 => Family::Edge,
            2 => Family::Midline,
            n => Family::Ratio(n),
        }
    }

    pub fn multiplier(&self) -> i128 {
        match self {
            Family::Edge => 1,
            Family::Midline => 2,
            Family::Ratio(n) => i128::from(*n),
        }
    }

    /// The common factor the argument claims is forced: 5, 2 and `n² + 4`.
    pub fn forced_k(&self) -> i128 {
        match self {
            Family::Edge => 5,
            Family::Midline => 2,
            Family::Ratio(n) => i128::from(*n) * i128::from(*n) + 4,
        }
    }

    /// Numerator of the ratio `b²/a² = N(c, d) / (c² − d²)`.
    fn ratio_numerator(&self, c2: i128, d2: i128) -> Option<i128> {
        match self {
            Family::Midline => c2.checked_add(d2),
            _ => {
                let n = self.multiplier();
                c2.checked_mul(4)?.checked_add(n.checked_mul(n)?.checked_mul(d2)?)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Edge => f.write_str("edge"),
            Family::Midline => f.write_str("midline"),
            Family::Ratio(n) => write!(f, "ratio({n})"),
        }
    }
}

/// One evaluation of `E_c` at `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EquationInstance {
    pub c: i128,
    pub a: i128,
    pub b: i128,
    pub lhs: i128,
    /// Present iff `lhs` is a perfect square.
    pub e: Option<i128>,
}

impl EquationInstance {
    /// `a, b ≥ 1` and coprime.
    pub fn is_nontrivial(&self) -> bool {
        self.a >= 1 && self.b >= 1 && gcd(self.a, self.b) == 1
    }

    pub fn is_solution(&self) -> bool {
        self.e.is_some()
    }
}

fn lhs_of(c: i128, a: i128, b: i128) -> Result<i128, DescentError> {
    let sum = checked_sq(a, "a^2")?.checked_add(checked_sq(b, "b^2")?).ok_or(DescentError::Range("a^2 + b^2"))?;
    let cross = c.checked_mul(a).and_then(|v| v.checked_mul(b)).ok_or(DescentError::Range("c*a*b"))?;
    checked_sq(sum, "(a^2 + b^2)^2")?.checked_add(checked_sq(cross, "(c*a*b)^2")?).ok_or(DescentError::Range("lhs"))
}

/// Evaluates `(a² + b²)² + (c·ab)²` exactly and records its square root if
/// it has one.
pub fn equation_residual(c: i128, a: i128, b: i128) -> Result<EquationInstance, DescentError> {
    if c < 1 {
        return Err(DescentError::Multiplier(c));
    }
    let lhs = lhs_of(c, a, b)?;
    Ok(EquationInstance { c, a, b, lhs, e: perfect_sqrt(lhs) })
}

/// Nontrivial solutions of `E_c` with `a` in `a_range` and `1 ≤ b ≤ bound`.
/// Rows of the grid are independent, so callers may split `a` across
/// workers and concatenate the results in row order.
pub fn search_equation_rows(c: i128, a_range: Range<i128>, bound: i128) -> Result<Vec<EquationInstance>, DescentError> {
    if c < 1 {
        return Err(DescentError::Multiplier(c));
    }
    if bound < 1 {
        return Err(DescentError::Bound(bound));
    }
    // The grid maximum bounds every entry, so one check covers the scan.
    let a_max = a_range.end.saturating_sub(1).clamp(1, bound);
    lhs_of(c, a_max, bound)?;
    let mut out = Vec::new();
    for a in a_range.start.max(1)..a_range.end.min(bound + 1) {
        let a2 = a * a;
        for b in 1..=bound {
            let sum = a2 + b * b;
            let cross = c * a * b;
            let lhs = sum * sum + cross * cross;
            if let Some(e) = perfect_sqrt(lhs) {
                if gcd(a, b) == 1 {
                    out.push(EquationInstance { c, a, b, lhs, e: Some(e) });
                }
            }
        }
    }
    Ok(out)
}

/// Every nontrivial solution with `1 ≤ a, b ≤ bound`, in `(a, b)` order.
/// For `c = 1`, `c = 2` and multiplier primes the argument predicts none.
pub fn search_equation(c: i128, bound: i128) -> Result<Vec<EquationInstance>, DescentError> {
    search_equation_rows(c, 1..bound.saturating_add(1), bound)
}

/// `(u² − v²)² + (2uv)² = (u² + v²)²`, checked without overflow.
pub fn pythagorean_identity(u: i128, v: i128) -> bool {
    let (u, v) = (BigInt::from(u), BigInt::from(v));
    let (u2, v2) = (&u * &u, &v * &v);
    let diff = &u2 - &v2;
    let cross = BigInt::from(2) * &u * &v;
    let sum = &u2 + &v2;
    &diff * &diff + &cross * &cross == &sum * &sum
}

/// The implication between the two ratio systems, stated on squares:
/// if `k·a² = c² − d²` and `k·b² = 4c² + n²d²`, then
/// `(n² + 4)·c² = k·(n²a² + b²)` and `(n² + 4)·d² = k·(b² − 4a²)`.
///
/// Returns true when the antecedent fails (vacuous) or the consequent holds.
pub fn ratio_identities_squares(n: i128, k: i128, a2: i128, b2: i128, c2: i128, d2: i128) -> bool {
    let [n, k, a2, b2, c2, d2] = [n, k, a2, b2, c2, d2].map(BigInt::from);
    let n2 = &n * &n;
    let four = BigInt::from(4);
    let antecedent = &k * &a2 == &c2 - &d2 && &k * &b2 == &four * &c2 + &n2 * &d2;
    if !antecedent {
        return true;
    }
    let m = &n2 + &four;
    &m * &c2 == &k * (&n2 * &a2 + &b2) && &m * &d2 == &k * (&b2 - &four * &a2)
}

pub fn ratio_identities(n: i128, k: i128, a: i128, b: i128, c: i128, d: i128) -> bool {
    let sq = |v: i128| v.checked_mul(v);
    match (sq(a), sq(b), sq(c), sq(d)) {
        (Some(a2), Some(b2), Some(c2), Some(d2)) => ratio_identities_squares(n, k, a2, b2, c2, d2),
        _ => {
            // Squares beyond i128: fall back to the full-width check.
            let [n, k, a, b, c, d] = [n, k, a, b, c, d].map(BigInt::from);
            let (a2, b2, c2, d2) = (&a * &a, &b * &b, &c * &c, &d * &d);
            let n2 = &n * &n;
            let four = BigInt::from(4);
            let antecedent = &k * &a2 == &c2 - &d2 && &k * &b2 == &four * &c2 + &n2 * &d2;
            if !antecedent {
                return true;
            }
            let m = &n2 + &four;
            &m * &c2 == &k * (&n2 * &a2 + &b2) && &m * &d2 == &k * (&b2 - &four * &a2)
        }
    }
}

/// A realization of the ratio equation: `k·a² = c² − d²`, `k·b² = N(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KTuple {
    pub k: i128,
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

/// Which common factors `k` actually occur in the family's ratio equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedKProbe {
    pub family: Family,
    pub bound: i128,
    pub expected_k: i128,
    /// Sorted by `(a, b, c, d)`.
    pub tuples: Vec<KTuple>,
    /// Distinct realized `k`, ascending.
    pub realized: Vec<i128>,
}

impl ForcedKProbe {
    /// Realized values other than the one the argument says is forced.
    pub fn deviations(&self) -> impl Iterator<Item = i128> + '_ {
        self.realized.iter().copied().filter(move |&k| k != self.expected_k)
    }

    pub fn matches_claim(&self) -> bool {
        self.deviations().next().is_none()
    }
}

/// Ratio-equation tuples whose `c` lies in `c_range`, all of `a, b, c, d` in
/// `1..=bound`.
///
/// For coprime `(a, b)` the fraction `b²/a²` is in lowest terms, so it equals
/// `N/(c² − d²)` exactly when reducing that fraction leaves two perfect
/// squares. That turns the four-variable search into a scan over `(c, d)`.
pub fn forced_k_rows(family: Family, c_range: Range<i128>, bound: i128) -> Result<Vec<KTuple>, DescentError> {
    if bound < 1 {
        return Err(DescentError::Bound(bound));
    }
    let top = checked_sq(bound, "c^2")?;
    family.ratio_numerator(top, top).ok_or(DescentError::Range("ratio numerator"))?;
    let mut out = Vec::new();
    for c in c_range.start.max(2)..c_range.end.min(bound + 1) {
        for d in 1..c {
            if gcd(c, d) != 1 {
                continue;
            }
            let (c2, d2) = (c * c, d * d);
            let num = family.ratio_numerator(c2, d2).ok_or(DescentError::Range("ratio numerator"))?;
            let den = c2 - d2;
            let g = gcd(num, den) as i128;
            let (Some(b), Some(a)) = (perfect_sqrt(num / g), perfect_sqrt(den / g)) else {
                continue;
            };
            if a > bound || b > bound || den % (a * a) != 0 {
                continue;
            }
            out.push(KTuple { k: den / (a * a), a, b, c, d });
        }
    }
    Ok(out)
}

pub fn forced_k_probe(family: Family, bound: i128) -> Result<ForcedKProbe, DescentError> {
    let tuples = forced_k_rows(family, 1..bound.saturating_add(1), bound)?;
    Ok(assemble_probe(family, bound, tuples))
}

/// Sorts tuples and derives the realized set; used to merge partitioned work.
pub fn assemble_probe(family: Family, bound: i128, mut tuples: Vec<KTuple>) -> ForcedKProbe {
    tuples.sort_unstable_by_key(|t| (t.a, t.b, t.c, t.d));
    let mut realized: Vec<i128> = tuples.iter().map(|t| t.k).collect();
    realized.sort_unstable();
    realized.dedup();
    ForcedKProbe { family, bound, expected_k: family.forced_k(), tuples, realized }
}

/// Output of the substitution that closes the descent loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ascent {
    pub a: i128,
    pub b: i128,
    pub d: i128,
    /// The second equation of the reduced system holds: `d² + 4a² = b²`
    /// (`d² + a² = b²` for the midline family).
    pub witness: bool,
    /// Left side of the first equation, `a² + b²` (`n²a² + b²` for ratio
    /// families). Equal to `transfer.lhs`.
    pub first_value: i128,
    /// `E_c` evaluated at the generator pair.
    pub transfer: EquationInstance,
}

/// Builds `(a, b, d)` from a generator pair `m > n ≥ 1`.
pub fn ascend(family: Family, m: i128, n: i128) -> Result<Ascent, DescentError> {
    if n < 1 || m <= n {
        return Err(DescentError::Params { m, n });
    }
    let m2 = checked_sq(m, "m^2")?;
    let n2 = checked_sq(n, "n^2")?;
    let mn = m.checked_mul(n).ok_or(DescentError::Range("m*n"))?;
    let a = match family {
        Family::Midline => mn.checked_mul(2).ok_or(DescentError::Range("2mn"))?,
        _ => mn,
    };
    let b = m2.checked_add(n2).ok_or(DescentError::Range("m^2 + n^2"))?;
    let d = m2 - n2;
    let (a2, b2, d2) = (checked_sq(a, "a^2")?, checked_sq(b, "b^2")?, checked_sq(d, "d^2")?);
    let witness = match family {
        Family::Midline => d2.checked_add(a2) == Some(b2),
        _ => a2.checked_mul(4).and_then(|v| v.checked_add(d2)) == Some(b2),
    };
    let scale = match family {
        Family::Ratio(c) => i128::from(c) * i128::from(c),
        _ => 1,
    };
    let first_value =
        a2.checked_mul(scale).and_then(|v| v.checked_add(b2)).ok_or(DescentError::Range("first equation"))?;
    let transfer = equation_residual(family.multiplier(), m, n)?;
    Ok(Ascent { a, b, d, witness, first_value, transfer })
}

/// The step of the argument whose claimed shape failed on a concrete input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// `a` even and `b` odd (after swapping if needed).
    Parity,
    /// `(e − a² − b²)(e + a² + b²) = (c·ab)²`.
    SplitProduct,
    /// `e − a² − b² = 2·a1²·b1²` and `e + a² + b² = 2^(2k−1)·c²·a2²·b2²`.
    SplitShape,
    /// `e = u² + v²` and `a² + b² = u² − v²` with `u = a1·b1`, `v = 2^(k−1)·c·a2·b2`.
    Substitution,
    /// `a²·N(c, d) = b²·(c² − d²)` after renaming.
    RatioForm,
    /// The common factor equals the forced value.
    ForcedK,
    /// The reduced system's two equations.
    ReducedSystem,
    /// Recovering the generator pair from `(a, b, d)`.
    Parametrization,
    /// The new solution is smaller than the old one.
    Decrease,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Parity => "parity",
            Stage::SplitProduct => "split_product",
            Stage::SplitShape => "split_shape",
            Stage::Substitution => "substitution",
            Stage::RatioForm => "ratio_form",
            Stage::ForcedK => "forced_k",
            Stage::ReducedSystem => "reduced_system",
            Stage::Parametrization => "parametrization",
            Stage::Decrease => "decrease",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureViolation {
    pub stage: Stage,
    pub a: i128,
    pub b: i128,
    pub e: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentOutcome {
    /// A solution with strictly smaller `max(a, b)`.
    Smaller(EquationInstance),
    Violation(StructureViolation),
}

/// Recovers `(m, n)` from `(a, b, d)` of the reduced system, i.e. inverts
/// [`ascend`]. `m² = (b + d)/2`, `n² = (b − d)/2`.
pub fn parametrize(family: Family, a: i128, b: i128, d: i128) -> Option<(i128, i128)> {
    let plus = b.checked_add(d)?;
    let minus = b.checked_sub(d)?;
    if plus % 2 != 0 || minus % 2 != 0 {
        return None;
    }
    let m = perfect_sqrt(plus / 2)?;
    let n = perfect_sqrt(minus / 2)?;
    let mn = m.checked_mul(n)?;
    let want = match family {
        Family::Midline => mn.checked_mul(2)?,
        _ => mn,
    };
    (want == a && m > n && n >= 1).then_some((m, n))
}

/// Runs one round of the descent on a solution of `E_c`, following the
/// argument literally. Either produces a strictly smaller solution or names
/// the first step whose claimed shape does not hold for this input.
pub fn descent_step(c: i128, inst: &EquationInstance) -> Result<DescentOutcome, DescentError> {
    if c < 1 {
        return Err(DescentError::Multiplier(c));
    }
    let not_solution = |reason| DescentError::NotASolution { c, reason };
    if inst.c != c {
        return Err(not_solution("instance belongs to another family"));
    }
    let e = inst.e.ok_or(not_solution("lhs is not a perfect square"))?;
    if lhs_of(c, inst.a, inst.b)? != inst.lhs || e.checked_mul(e) != Some(inst.lhs) {
        return Err(not_solution("stored values are inconsistent"));
    }
    if !inst.is_nontrivial() {
        return Err(not_solution("needs a, b >= 1 and gcd(a, b) = 1"));
    }
    let family = Family::from_multiplier(c as u64);
    walk_descent(family, c, inst.a, inst.b, e)
}

fn walk_descent(family: Family, c: i128, a0: i128, b0: i128, e: i128) -> Result<DescentOutcome, DescentError> {
    let violation = |stage| Ok(DescentOutcome::Violation(StructureViolation { stage, a: a0, b: b0, e }));
    let range = DescentError::Range;

    // E_c is symmetric in a and b; the argument wants a even.
    let (a, b) = if a0 % 2 == 1 && b0 % 2 == 0 { (b0, a0) } else { (a0, b0) };
    if a % 2 != 0 || b % 2 == 0 {
        return violation(Stage::Parity);
    }

    let s = a * a + b * b;
    let low = e - s;
    let high = e + s;
    let cab = c.checked_mul(a).and_then(|v| v.checked_mul(b)).ok_or(range("c*a*b"))?;
    if low.checked_mul(high) != cab.checked_mul(cab) {
        return violation(Stage::SplitProduct);
    }

    // a = 2^k · (odd part), and the odd parts of a and b split between the
    // two factors.
    let k = a.trailing_zeros();
    let a_odd = a >> k;
    if low <= 0 || low % 2 != 0 {
        return violation(Stage::SplitShape);
    }
    let half = low / 2;
    let a1 = perfect_sqrt(gcd(half, a_odd * a_odd) as i128);
    let b1 = perfect_sqrt(gcd(half, b * b) as i128);
    let (Some(a1), Some(b1)) = (a1, b1) else {
        return violation(Stage::SplitShape);
    };
    if half != a1 * a1 * b1 * b1 || a_odd % a1 != 0 || b % b1 != 0 {
        return violation(Stage::SplitShape);
    }
    let (a2, b2) = (a_odd / a1, b / b1);
    let pow = 1i128.checked_shl(2 * k - 1).ok_or(range("2^(2k-1)"))?;
    let expected_high = [pow, c * c, a2 * a2, b2 * b2]
        .into_iter()
        .try_fold(1i128, |acc, v| acc.checked_mul(v))
        .ok_or(range("split high factor"))?;
    if high != expected_high {
        return violation(Stage::SplitShape);
    }

    let u = a1 * b1;
    let v = (1i128 << (k - 1)) * c * a2 * b2;
    if u * u + v * v != e || s != u * u - v * v {
        return violation(Stage::Substitution);
    }

    // Renaming: the new (a, b, c, d) are (2^(k-1)·a2, b1, a1, b2); the
    // midline variant keeps the extra factor 2 on a.
    let big_a = match family {
        Family::Midline => (1i128 << k) * a2,
        _ => (1i128 << (k - 1)) * a2,
    };
    let (big_b, big_c, big_d) = (b1, a1, b2);
    let (a2n, b2n, c2n, d2n) = (big_a * big_a, big_b * big_b, big_c * big_c, big_d * big_d);
    let num = family.ratio_numerator(c2n, d2n).ok_or(range("ratio numerator"))?;
    let den = c2n - d2n;
    if a2n.checked_mul(num) != b2n.checked_mul(den) {
        return violation(Stage::RatioForm);
    }

    if den % a2n != 0 || den / a2n != family.forced_k() || num % b2n != 0 || num / b2n != family.forced_k() {
        return violation(Stage::ForcedK);
    }

    let first_scale = match family {
        Family::Ratio(n) => i128::from(n) * i128::from(n),
        _ => 1,
    };
    let second_scale = match family {
        Family::Midline => 1,
        _ => 4,
    };
    if first_scale * a2n + b2n != c2n || b2n - second_scale * a2n != d2n {
        return violation(Stage::ReducedSystem);
    }

    let Some((m, n)) = parametrize(family, big_a, big_b, big_d) else {
        return violation(Stage::Parametrization);
    };
    let next = equation_residual(c, m, n)?;
    if next.e != Some(big_c) || m.max(n) >= a0.max(b0) {
        return violation(Stage::Decrease);
    }
    Ok(DescentOutcome::Smaller(next))
}

/// A prime `n` with `n² + 4` also prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiplierPair {
    pub n: u64,
    pub partner: u64,
}

/// All multiplier pairs with `n ≤ limit`, ascending.
pub fn multiplier_primes(limit: u64) -> Result<Vec<MultiplierPair>, DescentError> {
    limit.checked_mul(limit).and_then(|v| v.checked_add(4)).ok_or(DescentError::PrimeRange(limit))?;
    Ok((2..=limit)
        .filter(|&n| is_prime_u64(n))
        .map(|n| MultiplierPair { n, partner: n * n + 4 })
        .filter(|p| is_prime_u64(p.partner))
        .collect())
}

pub fn is_multiplier_prime(n: u64) -> bool {
    n.checked_mul(n).and_then(|v| v.checked_add(4)).is_some_and(|partner| is_prime_u64(n) && is_prime_u64(partner))
}
