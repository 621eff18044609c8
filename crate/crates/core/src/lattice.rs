//! Lattice points of an integer square and their distances to the vertices.
//!
//! A square of side `z` has vertices `(0,0)`, `(0,z)`, `(z,z)`, `(z,0)`. A
//! lattice point is scored by how many of its four vertex distances are
//! integers; after scaling, that is the number of rational distances in the
//! unit square.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::kernel::{gcd_u64, perfect_sqrt_u64};
use crate::triples::primitive_triples;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("side length must be at least 1, got {0}")]
    InvalidSide(i64),
    #[error("region bounds must satisfy min <= max on both axes")]
    InvalidRegion,
    #[error("square z={z} with this region overflows 64-bit squared distances")]
    Overflow { z: i64 },
    #[error("point ({x}, {y}) in square z={z} overflows 64-bit squared distances")]
    PointOverflow { z: i64, x: i64, y: i64 },
    #[error("min_count must be in 1..=4, got {0}")]
    MinCount(u8),
    #[error("symmetry reduction needs a region symmetric under the square's symmetries")]
    AsymmetricRegion,
    #[error("region holds {estimated} points, over the budget of {budget}")]
    BudgetExceeded { estimated: u128, budget: u64 },
    #[error("self-check failed: point ({x}, {y}) in square z={z} has only {count} rational distances")]
    SelfCheck { z: i64, x: i64, y: i64, count: u8 },
}

/// Scan region in units of the side length. The unit region `[0,1]²` is the
/// closed square; `[-k, k+1]²` extends it by `k` sides in every direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Region {
    pub const UNIT: Region = Region { x_min: 0, x_max: 1, y_min: 0, y_max: 1 };

    pub fn extended(k: u32) -> Region {
        let k = i64::from(k);
        Region { x_min: -k, x_max: k + 1, y_min: -k, y_max: k + 1 }
    }

    /// True when the region is mapped to itself by all eight symmetries of
    /// the square.
    pub fn is_d4_symmetric(&self) -> bool {
        self.x_min == self.y_min && self.x_max == self.y_max && self.x_min + self.x_max == 1
    }
}

impl Default for Region {
    fn default() -> Self {
        Region::UNIT
    }
}

/// A square of integer side together with the region to scan around it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareInstance {
    z: i64,
    region: Region,
    bounds: [i64; 4],
}

impl SquareInstance {
    pub fn new(z: i64, region: Region) -> Result<Self, LatticeError> {
        if z < 1 {
            return Err(LatticeError::InvalidSide(z));
        }
        if region.x_min > region.x_max || region.y_min > region.y_max {
            return Err(LatticeError::InvalidRegion);
        }
        let overflow = LatticeError::Overflow { z };
        let scale = |v: i64| v.checked_mul(z).ok_or(overflow.clone());
        let bounds = [scale(region.x_min)?, scale(region.x_max)?, scale(region.y_min)?, scale(region.y_max)?];
        // The largest squared distance any scanned point can have must fit.
        let reach = |lo: i64, hi: i64| -> u128 {
            [lo, hi, lo.saturating_sub(z), hi.saturating_sub(z)]
                .into_iter()
                .map(|v| u128::from(v.unsigned_abs()))
                .max()
                .unwrap_or(0)
        };
        let dx = reach(bounds[0], bounds[1]);
        let dy = reach(bounds[2], bounds[3]);
        if dx * dx + dy * dy > u128::from(u64::MAX) {
            return Err(overflow);
        }
        Ok(SquareInstance { z, region, bounds })
    }

    pub fn closed(z: i64) -> Result<Self, LatticeError> {
        Self::new(z, Region::UNIT)
    }

    pub fn extended(z: i64, k: u32) -> Result<Self, LatticeError> {
        Self::new(z, Region::extended(k))
    }

    pub fn z(&self) -> i64 {
        self.z
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Absolute `(x_lo, x_hi, y_lo, y_hi)`, inclusive.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        let [a, b, c, d] = self.bounds;
        (a, b, c, d)
    }

    pub fn point_count(&self) -> u128 {
        let (x0, x1, y0, y1) = self.bounds();
        let w = (i128::from(x1) - i128::from(x0) + 1) as u128;
        let h = (i128::from(y1) - i128::from(y0) + 1) as u128;
        w * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    OnEdge,
    OnMidline,
    OnDiagonal,
    NTimesDistance(u64),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::OnEdge => f.write_str("on_edge"),
            Tag::OnMidline => f.write_str("on_midline"),
            Tag::OnDiagonal => f.write_str("on_diagonal"),
            Tag::NTimesDistance(n) => write!(f, "n_times_distance({n})"),
        }
    }
}

/// Geometric predicates of a point relative to its square. The lines are
/// the full lines through the edges, midlines and diagonals, so the tags
/// also make sense outside the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Tags {
    pub on_edge: bool,
    pub on_midline: bool,
    pub on_diagonal: bool,
    /// `z = n·d` where `d > 0` is the distance to the nearest side line.
    pub n_times_distance: Option<u64>,
}

impl Tags {
    pub fn of(z: i64, x: i64, y: i64) -> Tags {
        let (x, y, z) = (i128::from(x), i128::from(y), i128::from(z));
        let nearest = [x.abs(), y.abs(), (z - x).abs(), (z - y).abs()].into_iter().min().unwrap_or(0);
        let n_times_distance = (nearest > 0 && z % nearest == 0 && z / nearest >= 2).then(|| (z / nearest) as u64);
        Tags {
            on_edge: x == 0 || y == 0 || x == z || y == z,
            on_midline: 2 * x == z || 2 * y == z,
            on_diagonal: x == y || x + y == z,
            n_times_distance,
        }
    }

    pub fn contains(&self, tag: Tag) -> bool {
        match tag {
            Tag::OnEdge => self.on_edge,
            Tag::OnMidline => self.on_midline,
            Tag::OnDiagonal => self.on_diagonal,
            Tag::NTimesDistance(n) => self.n_times_distance == Some(n),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Tag> + '_ {
        [
            self.on_edge.then_some(Tag::OnEdge),
            self.on_midline.then_some(Tag::OnMidline),
            self.on_diagonal.then_some(Tag::OnDiagonal),
            self.n_times_distance.map(Tag::NTimesDistance),
        ]
        .into_iter()
        .flatten()
    }
}

/// Restricts a search to one geometric family of points.
///
/// Filters never match the square's vertices: a vertex sits on every edge
/// and diagonal line and always has three rational distances, which would
/// swamp the filtered result with degenerate hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Filter {
    OnEdge,
    OnMidline,
    OnDiagonal,
    /// `None` accepts any ratio.
    NTimesDistance(Option<u64>),
}

impl Filter {
    pub fn matches(&self, z: i64, x: i64, y: i64) -> bool {
        if is_vertex(z, x, y) {
            return false;
        }
        match self {
            Filter::OnEdge => x == 0 || y == 0 || x == z || y == z,
            Filter::OnMidline => {
                let z2 = i128::from(z);
                2 * i128::from(x) == z2 || 2 * i128::from(y) == z2
            }
            Filter::OnDiagonal => x == y || i128::from(x) + i128::from(y) == i128::from(z),
            Filter::NTimesDistance(want) => match (Tags::of(z, x, y).n_times_distance, want) {
                (Some(_), None) => true,
                (Some(n), Some(w)) => n == *w,
                (None, _) => false,
            },
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::OnEdge => f.write_str("on_edge"),
            Filter::OnMidline => f.write_str("on_midline"),
            Filter::OnDiagonal => f.write_str("on_diagonal"),
            Filter::NTimesDistance(None) => f.write_str("n_times_distance"),
            Filter::NTimesDistance(Some(n)) => write!(f, "n_times_distance({n})"),
        }
    }
}

pub fn is_vertex(z: i64, x: i64, y: i64) -> bool {
    (x == 0 || x == z) && (y == 0 || y == z)
}

/// A point with its four squared vertex distances, ordered as the vertices
/// `(0,0)`, `(0,z)`, `(z,z)`, `(z,0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointProfile {
    pub z: i64,
    pub x: i64,
    pub y: i64,
    pub sq_dists: [u64; 4],
    pub roots: [Option<u64>; 4],
    pub rational_count: u8,
    pub primitive: bool,
    pub tags: Tags,
}

impl PointProfile {
    pub fn is_vertex(&self) -> bool {
        is_vertex(self.z, self.x, self.y)
    }

    pub fn sort_key(&self) -> (i64, i64, i64) {
        (self.z, self.x, self.y)
    }
}

/// Exact four-distance classification of `(x, y)` against the square of
/// side `z`. A zero distance (the point is a vertex) counts as rational.
pub fn classify_point(z: i64, x: i64, y: i64) -> Result<PointProfile, LatticeError> {
    if z < 1 {
        return Err(LatticeError::InvalidSide(z));
    }
    let (xw, yw, zw) = (i128::from(x), i128::from(y), i128::from(z));
    let near_x = xw.unsigned_abs();
    let far_x = (zw - xw).unsigned_abs();
    let near_y = yw.unsigned_abs();
    let far_y = (zw - yw).unsigned_abs();
    let overflow = || LatticeError::PointOverflow { z, x, y };
    let sq = |a: u128, b: u128| -> Result<u64, LatticeError> {
        a.checked_mul(a)
            .and_then(|a2| b.checked_mul(b).and_then(|b2| a2.checked_add(b2)))
            .and_then(|s| u64::try_from(s).ok())
            .ok_or_else(overflow)
    };
    let sq_dists = [sq(near_x, near_y)?, sq(near_x, far_y)?, sq(far_x, far_y)?, sq(far_x, near_y)?];
    let roots = sq_dists.map(perfect_sqrt_u64);
    let rational_count = roots.iter().filter(|r| r.is_some()).count() as u8;
    let g = gcd_u64(gcd_u64(near_x as u64, near_y as u64), z as u64);
    Ok(PointProfile { z, x, y, sq_dists, roots, rational_count, primitive: g == 1, tags: Tags::of(z, x, y) })
}

/// The eight images of `(x, y)` under the symmetries of the square of side `z`.
pub fn d4_images(z: i64, x: i64, y: i64) -> [(i64, i64); 8] {
    let (rx, ry) = (z - x, z - y);
    [(x, y), (rx, y), (x, ry), (rx, ry), (y, x), (ry, x), (y, rx), (ry, rx)]
}

/// The representative of `(x, y)`'s symmetry orbit inside the fundamental
/// domain `y ≤ x ≤ z/2`.
pub fn canonical_point(z: i64, x: i64, y: i64) -> (i64, i64) {
    let fx = x.min(z - x);
    let fy = y.min(z - y);
    if fy > fx {
        (fy, fx)
    } else {
        (fx, fy)
    }
}

/// Number of distinct images of `(x, y)` under the square's symmetries.
pub fn orbit_size(z: i64, x: i64, y: i64) -> u64 {
    let cx = 2 * i128::from(x) - i128::from(z);
    let cy = 2 * i128::from(y) - i128::from(z);
    if cx == 0 && cy == 0 {
        1
    } else if cx == 0 || cy == 0 || cx == cy || cx == -cy {
        4
    } else {
        8
    }
}

/// Bitset of leg pairs `(u, v)`, `0 ≤ u, v ≤ max_leg`, with `u² + v²` a
/// perfect square. A lookup table alternative to per-point square tests;
/// built from the kernel's exact test, so results are identical.
#[derive(Debug, Clone)]
pub struct SquareSumCache {
    max_leg: u64,
    bits: Vec<u64>,
}

impl SquareSumCache {
    pub fn new(max_leg: u64) -> Self {
        let side = max_leg + 1;
        let mut bits = vec![0u64; (side * side).div_ceil(64) as usize];
        for u in 0..=max_leg {
            for v in u..=max_leg {
                if perfect_sqrt_u64(u * u + v * v).is_some() {
                    for idx in [u * side + v, v * side + u] {
                        bits[(idx / 64) as usize] |= 1 << (idx % 64);
                    }
                }
            }
        }
        SquareSumCache { max_leg, bits }
    }

    pub fn max_leg(&self) -> u64 {
        self.max_leg
    }

    /// `None` when a leg is outside the table.
    #[inline]
    pub fn is_square_sum(&self, u: u64, v: u64) -> Option<bool> {
        if u > self.max_leg || v > self.max_leg {
            return None;
        }
        let idx = u * (self.max_leg + 1) + v;
        Some((self.bits[(idx / 64) as usize] >> (idx % 64)) & 1 == 1)
    }

    /// Largest leg a scan of `inst` can need.
    pub fn leg_needed(inst: &SquareInstance) -> u64 {
        let (x0, x1, y0, y1) = inst.bounds();
        let z = inst.z();
        [x0, x1, y0, y1, x0 - z, x1 - z, y0 - z, y1 - z].into_iter().map(i64::unsigned_abs).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions<'a> {
    /// Scan only the fundamental domain `y ≤ x ≤ z/2` and list canonical
    /// representatives.
    pub symmetry_reduction: bool,
    pub square_cache: Option<&'a SquareSumCache>,
    /// Refuse regions with more points than this.
    pub point_budget: u64,
}

pub const DEFAULT_POINT_BUDGET: u64 = 1 << 34;

impl Default for SearchOptions<'_> {
    fn default() -> Self {
        SearchOptions { symmetry_reduction: false, square_cache: None, point_budget: DEFAULT_POINT_BUDGET }
    }
}

/// Result of scanning one square or a range of squares.
///
/// `hits` holds every primitive point with at least `min_count` rational
/// distances, sorted by `(z, x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub z_lo: i64,
    pub z_hi: i64,
    pub filter: Option<Filter>,
    pub min_count: u8,
    pub symmetry_reduced: bool,
    pub hits: Vec<PointProfile>,
    /// Points actually classified.
    pub points_scanned: u64,
    /// Points represented, weighting each scanned point by its orbit size
    /// under symmetry reduction. Equals `points_scanned` for a full scan.
    pub points_covered: u64,
}

impl SearchReport {
    pub fn empty(z_lo: i64, z_hi: i64, filter: Option<Filter>, min_count: u8, symmetry_reduced: bool) -> Self {
        SearchReport {
            z_lo,
            z_hi,
            filter,
            min_count,
            symmetry_reduced,
            hits: Vec::new(),
            points_scanned: 0,
            points_covered: 0,
        }
    }

    pub fn hits3(&self) -> impl Iterator<Item = &PointProfile> {
        self.hits.iter().filter(|p| p.rational_count == 3)
    }

    pub fn hits4(&self) -> impl Iterator<Item = &PointProfile> {
        self.hits.iter().filter(|p| p.rational_count == 4)
    }

    /// Folds another report into this one. Hits are re-sorted, so merge
    /// order does not matter.
    pub fn absorb(&mut self, other: SearchReport) {
        self.z_lo = self.z_lo.min(other.z_lo);
        self.z_hi = self.z_hi.max(other.z_hi);
        let in_order = match (self.hits.last(), other.hits.first()) {
            (Some(a), Some(b)) => a.sort_key() <= b.sort_key(),
            _ => true,
        };
        self.hits.extend(other.hits);
        if !in_order {
            self.hits.sort_unstable_by_key(PointProfile::sort_key);
        }
        self.points_scanned += other.points_scanned;
        self.points_covered += other.points_covered;
    }
}

enum Row {
    All,
    Few([i64; 2], usize),
}

fn row_candidates(filter: Option<Filter>, z: i64, x: i64) -> Row {
    match filter {
        None | Some(Filter::NTimesDistance(_)) => Row::All,
        Some(Filter::OnEdge) if x == 0 || x == z => Row::All,
        Some(Filter::OnEdge) => Row::Few([0, z], 2),
        Some(Filter::OnMidline) if 2 * x == z => Row::All,
        Some(Filter::OnMidline) if z % 2 == 0 => Row::Few([z / 2, 0], 1),
        Some(Filter::OnMidline) => Row::Few([0, 0], 0),
        Some(Filter::OnDiagonal) if 2 * x == z => Row::Few([x, 0], 1),
        Some(Filter::OnDiagonal) => Row::Few([x.min(z - x), x.max(z - x)], 2),
    }
}

/// Cheap test for "at least `need` of the four distances are integers",
/// bailing out as soon as the answer is known.
#[inline]
fn reaches_count(z: i64, x: i64, y: i64, need: u8, cache: Option<&SquareSumCache>) -> bool {
    let nx = x.unsigned_abs();
    let fx = (z - x).unsigned_abs();
    let ny = y.unsigned_abs();
    let fy = (z - y).unsigned_abs();
    let pairs = [(nx, ny), (nx, fy), (fx, fy), (fx, ny)];
    let mut misses_left = 4 - need;
    let mut hits = 0u8;
    for (u, v) in pairs {
        let square = match cache.and_then(|c| c.is_square_sum(u, v)) {
            Some(b) => b,
            None => perfect_sqrt_u64(u * u + v * v).is_some(),
        };
        if square {
            hits += 1;
            if hits >= need {
                return true;
            }
        } else if misses_left == 0 {
            return false;
        } else {
            misses_left -= 1;
        }
    }
    hits >= need
}

/// Exhaustively scans the instance's region and reports every primitive
/// point with at least `min_count` rational distances that passes `filter`.
pub fn search_square(
    inst: &SquareInstance,
    filter: Option<Filter>,
    min_count: u8,
    opts: &SearchOptions<'_>,
) -> Result<SearchReport, LatticeError> {
    if !(1..=4).contains(&min_count) {
        return Err(LatticeError::MinCount(min_count));
    }
    if opts.symmetry_reduction && !inst.region().is_d4_symmetric() {
        return Err(LatticeError::AsymmetricRegion);
    }
    let estimated = inst.point_count();
    if estimated > u128::from(opts.point_budget) {
        return Err(LatticeError::BudgetExceeded { estimated, budget: opts.point_budget });
    }

    let z = inst.z();
    let (x_lo, mut x_hi, y_lo, y_hi) = inst.bounds();
    if opts.symmetry_reduction {
        x_hi = x_hi.min(z.div_euclid(2));
    }
    let mut report = SearchReport::empty(z, z, filter, min_count, opts.symmetry_reduction);

    let visit = |x: i64, y: i64, report: &mut SearchReport| -> Result<(), LatticeError> {
        if let Some(f) = filter {
            if !f.matches(z, x, y) {
                return Ok(());
            }
        }
        report.points_scanned += 1;
        report.points_covered += if opts.symmetry_reduction { orbit_size(z, x, y) } else { 1 };
        if reaches_count(z, x, y, min_count, opts.square_cache) {
            let profile = classify_point(z, x, y)?;
            if profile.primitive {
                report.hits.push(profile);
            }
        }
        Ok(())
    };

    for x in x_lo..=x_hi {
        let row_hi = if opts.symmetry_reduction { y_hi.min(x) } else { y_hi };
        match row_candidates(filter, z, x) {
            Row::All => {
                for y in y_lo..=row_hi {
                    visit(x, y, &mut report)?;
                }
            }
            Row::Few(ys, len) => {
                for &y in &ys[..len] {
                    if (y_lo..=row_hi).contains(&y) {
                        visit(x, y, &mut report)?;
                    }
                }
            }
        }
    }
    report.hits.sort_unstable_by_key(PointProfile::sort_key);
    Ok(report)
}

/// Points with three rational distances built from primitive triples: for
/// legs `u < v`, the point `(u, 0)` in the square of side `v` sees the
/// vertices at distances `u`, `hyp`, `√((v − u)² + v²)` and `v − u`.
///
/// Every emitted point is re-classified and must score at least three.
pub fn three_distance_family(max_hyp: u64) -> Result<Vec<(SquareInstance, PointProfile)>, LatticeError> {
    let mut out = Vec::new();
    for triple in primitive_triples(max_hyp) {
        let (short, long) = triple.legs_ascending();
        let z = i64::try_from(long).map_err(|_| LatticeError::Overflow { z: i64::MAX })?;
        let x = short as i64;
        let inst = SquareInstance::closed(z)?;
        let profile = classify_point(z, x, 0)?;
        if profile.rational_count < 3 {
            return Err(LatticeError::SelfCheck { z, x, y: 0, count: profile.rational_count });
        }
        out.push((inst, profile));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_scan(z: i64, filter: Option<Filter>, min_count: u8) -> SearchReport {
        search_square(&SquareInstance::closed(z).unwrap(), filter, min_count, &SearchOptions::default()).unwrap()
    }

    #[test]
    fn corner_of_unit_square() {
        let p = classify_point(1, 0, 0).unwrap();
        assert_eq!(p.sq_dists, [0, 1, 2, 1]);
        assert_eq!(p.roots, [Some(0), Some(1), None, Some(1)]);
        assert_eq!(p.rational_count, 3);
        assert!(p.is_vertex());
    }

    #[test]
    fn edge_point_from_three_four_five() {
        let p = classify_point(4, 3, 0).unwrap();
        assert_eq!(p.sq_dists, [9, 25, 17, 1]);
        assert_eq!(p.roots, [Some(3), Some(5), None, Some(1)]);
        assert_eq!(p.rational_count, 3);
        assert!(p.tags.on_edge);
        assert!(p.primitive);
    }

    #[test]
    fn diagonal_point_has_two() {
        let p = classify_point(7, 3, 3).unwrap();
        assert_eq!(p.sq_dists, [18, 25, 32, 25]);
        assert_eq!(p.roots, [None, Some(5), None, Some(5)]);
        assert_eq!(p.rational_count, 2);
        assert!(p.tags.on_diagonal);
        assert!(!p.tags.on_edge && !p.tags.on_midline);
        assert_eq!(p.tags.n_times_distance, None);
    }

    #[test]
    fn n_times_tag() {
        // Nearest side is at distance 2 and 10 = 5·2.
        assert_eq!(Tags::of(10, 2, 5).n_times_distance, Some(5));
        assert_eq!(Tags::of(10, 3, 5).n_times_distance, None);
        assert_eq!(Tags::of(10, 0, 5).n_times_distance, None);
        // Outside the square the nearest side line still counts.
        assert_eq!(Tags::of(9, -3, 4).n_times_distance, Some(3));
    }

    #[test]
    fn classify_rejects_bad_side_and_overflow() {
        assert_eq!(classify_point(0, 0, 0), Err(LatticeError::InvalidSide(0)));
        assert!(matches!(classify_point(i64::MAX, 0, 0), Err(LatticeError::PointOverflow { .. })));
        assert!(matches!(SquareInstance::closed(i64::MAX), Err(LatticeError::Overflow { .. })));
    }

    #[test]
    fn edge_filter_small_square() {
        let r = full_scan(4, Some(Filter::OnEdge), 3);
        let pts: Vec<_> = r.hits.iter().map(|p| (p.x, p.y)).collect();
        assert!(pts.contains(&(3, 0)));
        assert!(pts.contains(&(1, 0)));
        // Boundary of a 4×4 square minus its four vertices.
        assert_eq!(r.points_scanned, 12);
        let reduced = search_square(
            &SquareInstance::closed(4).unwrap(),
            Some(Filter::OnEdge),
            3,
            &SearchOptions { symmetry_reduction: true, ..Default::default() },
        )
        .unwrap();
        let canon: Vec<_> = reduced.hits.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(canon, [(1, 0)]);
        assert_eq!(canonical_point(4, 3, 0), (1, 0));
    }

    #[test]
    fn midline_of_smallest_even_square() {
        let r = full_scan(2, Some(Filter::OnMidline), 4);
        assert!(r.hits.is_empty());
    }

    #[test]
    fn unfiltered_scan_counts_every_point() {
        for z in 1..30 {
            let r = full_scan(z, None, 4);
            assert_eq!(u128::from(r.points_scanned), SquareInstance::closed(z).unwrap().point_count());
            assert!(r.hits.is_empty());
        }
    }

    #[test]
    fn unit_square_vertices_are_three_distance_hits() {
        let r = full_scan(1, None, 3);
        let pts: Vec<_> = r.hits.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(pts, [(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn filtered_searches_exclude_vertices() {
        for f in [Filter::OnEdge, Filter::OnDiagonal, Filter::OnMidline] {
            assert!(full_scan(1, Some(f), 3).hits.is_empty());
        }
    }

    #[test]
    fn symmetry_reduction_matches_full_scan() {
        for z in 1..=100 {
            for filter in [None, Some(Filter::OnEdge), Some(Filter::OnDiagonal), Some(Filter::NTimesDistance(None))] {
                let full = full_scan(z, filter, 3);
                let mut canon: Vec<_> = full.hits.iter().map(|p| canonical_point(z, p.x, p.y)).collect();
                canon.sort_unstable();
                canon.dedup();
                let inst = SquareInstance::closed(z).unwrap();
                let opts = SearchOptions { symmetry_reduction: true, ..Default::default() };
                let reduced = search_square(&inst, filter, 3, &opts).unwrap();
                let got: Vec<_> = reduced.hits.iter().map(|p| (p.x, p.y)).collect();
                assert_eq!(got, canon, "z={z} filter={filter:?}");
                assert_eq!(reduced.points_covered, full.points_scanned, "z={z} filter={filter:?}");
            }
        }
    }

    #[test]
    fn symmetry_reduction_in_extended_region() {
        let inst = SquareInstance::extended(13, 1).unwrap();
        let full = search_square(&inst, None, 3, &SearchOptions::default()).unwrap();
        let reduced =
            search_square(&inst, None, 3, &SearchOptions { symmetry_reduction: true, ..Default::default() }).unwrap();
        let mut canon: Vec<_> = full.hits.iter().map(|p| canonical_point(13, p.x, p.y)).collect();
        canon.sort_unstable();
        canon.dedup();
        let got: Vec<_> = reduced.hits.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(got, canon);
        assert_eq!(u128::from(reduced.points_covered), inst.point_count());
    }

    #[test]
    fn symmetry_reduction_needs_symmetric_region() {
        let inst = SquareInstance::new(5, Region { x_min: 0, x_max: 2, y_min: 0, y_max: 1 }).unwrap();
        let opts = SearchOptions { symmetry_reduction: true, ..Default::default() };
        assert_eq!(search_square(&inst, None, 3, &opts), Err(LatticeError::AsymmetricRegion));
    }

    #[test]
    fn cache_is_behaviourally_identical() {
        let cache = SquareSumCache::new(3 * 60);
        for z in 1..=60 {
            let inst = SquareInstance::extended(z, 1).unwrap();
            assert!(SquareSumCache::leg_needed(&inst) <= cache.max_leg());
            for min_count in 1..=4 {
                let plain = search_square(&inst, None, min_count, &SearchOptions::default()).unwrap();
                let cached = search_square(
                    &inst,
                    None,
                    min_count,
                    &SearchOptions { square_cache: Some(&cache), ..Default::default() },
                )
                .unwrap();
                assert_eq!(plain, cached);
            }
        }
    }

    #[test]
    fn budget_refusal_reports_cost() {
        let inst = SquareInstance::closed(99).unwrap();
        let opts = SearchOptions { point_budget: 100, ..Default::default() };
        assert_eq!(
            search_square(&inst, None, 4, &opts),
            Err(LatticeError::BudgetExceeded { estimated: 10_000, budget: 100 })
        );
        assert_eq!(search_square(&inst, None, 0, &SearchOptions::default()), Err(LatticeError::MinCount(0)));
    }

    #[test]
    fn three_distance_examples() {
        let fam = three_distance_family(30).unwrap();
        let find = |z: i64| fam.iter().find(|(inst, _)| inst.z() == z).map(|(_, p)| p.clone()).unwrap();
        let p = find(4);
        assert_eq!((p.x, p.y), (3, 0));
        assert_eq!(p.roots, [Some(3), Some(5), None, Some(1)]);
        assert_eq!(p.sq_dists[2], 17);
        let p = find(12);
        assert_eq!((p.x, p.y), (5, 0));
        assert_eq!(p.roots, [Some(5), Some(13), None, Some(7)]);
        assert_eq!(p.sq_dists[2], 193);
        let p = find(21);
        assert_eq!((p.x, p.y), (20, 0));
        assert_eq!(p.roots, [Some(20), Some(29), None, Some(1)]);
        assert_eq!(p.sq_dists[2], 442);
        assert_eq!(p.rational_count, 3);
    }

    #[test]
    fn open_diagonal_never_exceeds_two() {
        for z in 2..=500 {
            for x in 1..z {
                assert!(classify_point(z, x, x).unwrap().rational_count <= 2, "z={z} x={x}");
            }
        }
    }

    #[test]
    fn all_odd_points_miss_a_distance() {
        for z in (1..=200).step_by(2) {
            for x in (1..=z).step_by(2) {
                for y in (1..=z).step_by(2) {
                    let p = classify_point(z, x, y).unwrap();
                    assert!(p.roots.iter().any(Option::is_none), "z={z} x={x} y={y}");
                }
            }
        }
    }
}
