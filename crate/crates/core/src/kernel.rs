//! Exact integer primitives: square roots, perfect-square tests, gcd and
//! deterministic 64-bit primality.
//!
//! Nothing in here touches floating point for a decision. `f64` is only used
//! to seed the square-root iteration, and every root is verified with exact
//! integer arithmetic before it is returned.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("negative input {0} has no real square root")]
    Negative(i128),
    #[error("{value} is outside the supported range (limit {limit})")]
    OutOfRange { value: u128, limit: u128 },
}

/// Bit `r` is set iff `r` is a quadratic residue modulo 64.
const SQUARE_RESIDUES_MOD_64: u64 = {
    let mut mask = 0u64;
    let mut i = 0u64;
    while i < 64 {
        mask |= 1 << ((i * i) % 64);
        i += 1;
    }
    mask
};

/// Bit `r` is set iff `r` is a quadratic residue modulo 63.
const SQUARE_RESIDUES_MOD_63: u64 = {
    let mut mask = 0u64;
    let mut i = 0u64;
    while i < 63 {
        mask |= 1 << ((i * i) % 63);
        i += 1;
    }
    mask
};

#[inline]
fn passes_residue_filter(low: u64, mod63: u64) -> bool {
    (SQUARE_RESIDUES_MOD_64 >> (low & 63)) & 1 == 1 && (SQUARE_RESIDUES_MOD_63 >> mod63) & 1 == 1
}

/// `⌊√n⌋` for 64-bit input.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    // The float guess is within one or two of the answer; fix it up exactly.
    let mut r = libm::sqrt(n as f64) as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// `⌊√n⌋` for 128-bit input.
///
/// Seeds Newton's iteration from a float estimate, iterates until the
/// sequence stops decreasing and then verifies `r² ≤ n < (r+1)²` exactly.
pub fn isqrt_u128(n: u128) -> u128 {
    if let Ok(small) = u64::try_from(n) {
        return u128::from(isqrt_u64(small));
    }
    // One Newton step from any positive seed lands at or above the root;
    // from there the iteration decreases monotonically onto it.
    let seed = (libm::sqrt(n as f64) as u128).max(1);
    let mut r = (seed + n / seed) / 2;
    loop {
        let next = (r + n / r) / 2;
        if next >= r {
            break;
        }
        r = next;
    }
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    assert!(r * r <= n && (r + 1).checked_mul(r + 1).is_none_or(|sq| sq > n), "isqrt post-condition failed for {n}");
    r
}

/// Signed entry point: `⌊√n⌋`, or a domain error for negative input.
pub fn isqrt(n: i128) -> Result<i128, KernelError> {
    if n < 0 {
        return Err(KernelError::Negative(n));
    }
    // The root of an i128 is below 2^64, so the cast back is lossless.
    Ok(isqrt_u128(n as u128) as i128)
}

/// The root of `n` when `n` is a perfect square.
#[inline]
pub fn perfect_sqrt_u64(n: u64) -> Option<u64> {
    if !passes_residue_filter(n, n % 63) {
        return None;
    }
    let r = isqrt_u64(n);
    (r * r == n).then_some(r)
}

pub fn perfect_sqrt_u128(n: u128) -> Option<u128> {
    if let Ok(small) = u64::try_from(n) {
        return perfect_sqrt_u64(small).map(u128::from);
    }
    if !passes_residue_filter(n as u64, (n % 63) as u64) {
        return None;
    }
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

/// The nonnegative root of `n` when `n` is a perfect square; negative
/// numbers are never squares.
pub fn perfect_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    perfect_sqrt_u128(n as u128).map(|r| r as i128)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Greatest common divisor of two signed integers; `gcd(0, 0) = 0`.
///
/// Returned unsigned since `gcd(i128::MIN, 0) = 2^127` does not fit in `i128`.
pub fn gcd(a: i128, b: i128) -> u128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs())
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp != 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The first twelve primes form a deterministic Miller-Rabin witness set for
/// every n < 3.3·10²⁴, which covers all of u64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for every 64-bit integer.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality with an explicit range contract: exact below 2⁶⁴, an error above.
pub fn is_prime(n: u128) -> Result<bool, KernelError> {
    u64::try_from(n).map(is_prime_u64).map_err(|_| KernelError::OutOfRange { value: n, limit: u128::from(u64::MAX) })
}
