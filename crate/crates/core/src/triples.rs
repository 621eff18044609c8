//! Pythagorean triples from generator pairs `(s, t)`.

use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

use crate::kernel::gcd_u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("generator pair needs s > t >= 1, got s={s} t={t}")]
    InvalidParams { s: u64, t: u64 },
    #[error("generator pair s={s} t={t} overflows 64-bit legs")]
    Overflow { s: u64, t: u64 },
}

/// A triple `(2st, s² − t², s² + t²)` together with its generator pair.
///
/// Legs are kept as even/odd rather than smaller/larger; for a primitive
/// triple exactly one leg is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PythTriple {
    pub s: u64,
    pub t: u64,
    pub even_leg: u64,
    pub odd_leg: u64,
    pub hyp: u64,
    pub primitive: bool,
}

impl PythTriple {
    pub fn legs_ascending(&self) -> (u64, u64) {
        if self.even_leg < self.odd_leg {
            (self.even_leg, self.odd_leg)
        } else {
            (self.odd_leg, self.even_leg)
        }
    }

    /// `p² + q² = r²`, checked in 128-bit arithmetic.
    pub fn is_pythagorean(&self) -> bool {
        let (p, q, r) = (u128::from(self.even_leg), u128::from(self.odd_leg), u128::from(self.hyp));
        p * p + q * q == r * r
    }
}

/// Builds the triple generated by `(s, t)`. Primitive iff `gcd(s, t) = 1`
/// and `s`, `t` have opposite parity.
pub fn triple_from_params(s: u64, t: u64) -> Result<PythTriple, TripleError> {
    if t < 1 || s <= t {
        return Err(TripleError::InvalidParams { s, t });
    }
    let overflow = TripleError::Overflow { s, t };
    let ss = s.checked_mul(s).ok_or(overflow)?;
    let tt = t * t;
    Ok(PythTriple {
        s,
        t,
        even_leg: s.checked_mul(t).and_then(|st| st.checked_mul(2)).ok_or(overflow)?,
        odd_leg: ss - tt,
        hyp: ss.checked_add(tt).ok_or(overflow)?,
        primitive: gcd_u64(s, t) == 1 && (s + t) % 2 == 1,
    })
}

/// Primitive triples whose generator `s` lies in `s_range`, hypotenuse at
/// most `max_hyp`, in generation order. Used to partition work by `s`.
pub fn primitive_triples_for_s(s_range: Range<u64>, max_hyp: u64) -> Vec<PythTriple> {
    let mut out = Vec::new();
    for s in s_range.start.max(2)..s_range.end {
        if s.saturating_mul(s) >= max_hyp {
            break;
        }
        // t alternates parity with s.
        let mut t = if s % 2 == 0 { 1 } else { 2 };
        while t < s {
            if s * s + t * t > max_hyp {
                break;
            }
            if gcd_u64(s, t) == 1 {
                // s, t bounded by √max_hyp, so this cannot overflow.
                if let Ok(tr) = triple_from_params(s, t) {
                    out.push(tr);
                }
            }
            t += 2;
        }
    }
    out
}

/// Sorts triples into the canonical order `(hyp, odd_leg)`.
pub fn sort_canonical(triples: &mut [PythTriple]) {
    triples.sort_unstable_by_key(|t| (t.hyp, t.odd_leg));
}

/// All primitive triples with `r ≤ max_hyp`, each once, sorted by `(r, q)`.
pub fn primitive_triples(max_hyp: u64) -> Vec<PythTriple> {
    if max_hyp < 5 {
        return Vec::new();
    }
    let s_end = crate::kernel::isqrt_u64(max_hyp) + 1;
    let mut out = primitive_triples_for_s(2..s_end, max_hyp);
    sort_canonical(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn legs(t: &PythTriple) -> (u64, u64, u64) {
        (t.even_leg, t.odd_leg, t.hyp)
    }

    #[test]
    fn from_params_examples() {
        let t = triple_from_params(2, 1).unwrap();
        assert_eq!(legs(&t), (4, 3, 5));
        assert!(t.primitive);
        let t = triple_from_params(3, 2).unwrap();
        assert_eq!(legs(&t), (12, 5, 13));
        assert!(t.primitive);
        let t = triple_from_params(3, 1).unwrap();
        assert_eq!(legs(&t), (6, 8, 10));
        assert!(!t.primitive);
    }

    #[test]
    fn from_params_rejects_bad_generators() {
        assert_eq!(triple_from_params(2, 2), Err(TripleError::InvalidParams { s: 2, t: 2 }));
        assert_eq!(triple_from_params(1, 2), Err(TripleError::InvalidParams { s: 1, t: 2 }));
        assert_eq!(triple_from_params(5, 0), Err(TripleError::InvalidParams { s: 5, t: 0 }));
        assert!(matches!(triple_from_params(u64::MAX, 1), Err(TripleError::Overflow { .. })));
    }

    #[test]
    fn enumeration_examples() {
        assert!(primitive_triples(4).is_empty());
        let five: Vec<_> = primitive_triples(5).iter().map(legs).collect();
        assert_eq!(five, [(4, 3, 5)]);
        let thirteen: Vec<_> = primitive_triples(13).iter().map(legs).collect();
        assert_eq!(thirteen, [(4, 3, 5), (12, 5, 13)]);
        assert_eq!(primitive_triples(100).len(), 16);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let n = 500u64;
        let mut brute = BTreeSet::new();
        for w in 1..=n {
            for u in 1..w {
                for v in u..w {
                    if u * u + v * v == w * w && gcd_u64(u, v) == 1 {
                        brute.insert((u, v, w));
                    }
                }
            }
        }
        let generated = primitive_triples(n);
        let as_set: BTreeSet<_> = generated
            .iter()
            .map(|t| {
                let (u, v) = t.legs_ascending();
                (u, v, t.hyp)
            })
            .collect();
        assert_eq!(as_set.len(), generated.len(), "duplicates emitted");
        assert_eq!(as_set, brute);
        for t in &generated {
            assert!(t.is_pythagorean() && t.primitive);
            assert_eq!(gcd_u64(t.even_leg, t.odd_leg), 1);
            assert_eq!(t.even_leg % 2, 0);
        }
        assert!(generated.windows(2).all(|w| (w[0].hyp, w[0].odd_leg) < (w[1].hyp, w[1].odd_leg)));
    }

    #[test]
    fn partitioned_generation_merges_to_the_same_sequence() {
        let whole = primitive_triples(10_000);
        let mut parts = Vec::new();
        for chunk in [2..10u64, 10..40, 40..101] {
            parts.extend(primitive_triples_for_s(chunk, 10_000));
        }
        sort_canonical(&mut parts);
        assert_eq!(parts, whole);
    }
}
