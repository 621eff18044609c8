use proptest::prelude::*;

use rdsquare_core::descent::{ascend, parametrize, pythagorean_identity, ratio_identities_squares, Family};
use rdsquare_core::kernel::{gcd_u64, isqrt_u128, perfect_sqrt_u128};
use rdsquare_core::lattice::{canonical_point, classify_point, d4_images};
use rdsquare_core::triples::triple_from_params;

proptest! {
    #[test]
    fn isqrt_brackets_its_input(n in any::<u128>()) {
        let r = isqrt_u128(n);
        prop_assert!(r * r <= n);
        prop_assert!((r + 1).checked_mul(r + 1).is_none_or(|sq| sq > n));
    }

    #[test]
    fn perfect_sqrt_on_120_bit_values(n in 0u128..(1 << 120), square in any::<bool>()) {
        let n = if square { let r = isqrt_u128(n); r * r } else { n };
        let r = isqrt_u128(n);
        prop_assert_eq!(perfect_sqrt_u128(n), (r * r == n).then_some(r));
    }

    #[test]
    fn pythagorean_identity_holds(u in -(1i128 << 60)..(1i128 << 60), v in -(1i128 << 60)..(1i128 << 60)) {
        prop_assert!(pythagorean_identity(u, v));
    }

    #[test]
    fn triples_satisfy_their_formulas(s in 2u64..100_000, t_frac in 0.0f64..1.0) {
        let t = 1 + ((s - 1) as f64 * t_frac) as u64;
        prop_assume!(t < s);
        let tr = triple_from_params(s, t).unwrap();
        prop_assert_eq!(tr.even_leg, 2 * s * t);
        prop_assert_eq!(tr.odd_leg, s * s - t * t);
        prop_assert_eq!(tr.hyp, s * s + t * t);
        prop_assert!(tr.is_pythagorean());
        if tr.primitive {
            prop_assert_eq!(gcd_u64(tr.even_leg, tr.odd_leg), 1);
        }
    }

    #[test]
    fn rational_count_is_symmetric(z in 1i64..5000, xf in -1.0f64..2.0, yf in -1.0f64..2.0) {
        let x = (z as f64 * xf) as i64;
        let y = (z as f64 * yf) as i64;
        let base = classify_point(z, x, y).unwrap();
        for (ix, iy) in d4_images(z, x, y) {
            let img = classify_point(z, ix, iy).unwrap();
            prop_assert_eq!(img.rational_count, base.rational_count);
            let mut a = img.sq_dists;
            let mut b = base.sq_dists;
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
        let (cx, cy) = canonical_point(z, x, y);
        prop_assert!(d4_images(z, x, y).contains(&(cx, cy)));
    }

    #[test]
    fn scaling_keeps_integer_distances(z in 1i64..2000, xf in 0.0f64..1.0, yf in 0.0f64..1.0, lambda in 1i64..=10) {
        let x = (z as f64 * xf) as i64;
        let y = (z as f64 * yf) as i64;
        let base = classify_point(z, x, y).unwrap();
        let scaled = classify_point(lambda * z, lambda * x, lambda * y).unwrap();
        prop_assert!(scaled.rational_count >= base.rational_count);
        for (r, s) in base.roots.iter().zip(scaled.roots.iter()) {
            if let Some(r) = r {
                prop_assert_eq!(*s, Some(r * lambda as u64));
            }
        }
        // Squared distances scale by λ², so a non-square stays a non-square.
        prop_assert_eq!(scaled.rational_count, base.rational_count);
    }

    #[test]
    fn ratio_consequent_follows(n in 1i128..50, a in 1i128..10_000, b in 1i128..10_000, j in 1i128..1000) {
        // k = (n² + 4)·j makes both solved squares integral.
        let k = (n * n + 4) * j;
        let c2 = j * (n * n * a * a + b * b);
        let d2 = j * (b * b - 4 * a * a);
        prop_assert_eq!(k * a * a, c2 - d2);
        prop_assert!(ratio_identities_squares(n, k, a * a, b * b, c2, d2));
    }

    #[test]
    fn ascent_witness_and_inverse(m in 2i128..100_000, nf in 0.0f64..1.0, c in 3u64..40) {
        let n = 1 + ((m - 1) as f64 * nf) as i128;
        prop_assume!(n < m);
        for family in [Family::Edge, Family::Midline, Family::Ratio(c)] {
            let up = ascend(family, m, n).unwrap();
            prop_assert!(up.witness);
            prop_assert_eq!(up.first_value, up.transfer.lhs);
            prop_assert_eq!(parametrize(family, up.a, up.b, up.d), Some((m, n)));
        }
    }
}
