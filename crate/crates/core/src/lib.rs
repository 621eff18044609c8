//! Exact search and verification kernels for the square rational-distance
//! problem: is there a point whose distances to all four vertices of a unit
//! square are rational?
//!
//! After clearing denominators the question lives on the integer lattice.
//! This crate holds the pure parts: integer primitives, Pythagorean triples,
//! lattice classification, the `(a² + b²)² + (c·ab)² = e²` equation family
//! with its descent machinery, and the density heuristic. It is `no_std`
//! and only needs `alloc`; IO, parallelism and file formats live in the
//! `rdsquare` crate.
#![no_std]

extern crate alloc;

pub mod descent;
pub mod heuristic;
pub mod kernel;
pub mod lattice;
pub mod triples;

pub use descent::{
    ascend, descent_step, equation_residual, forced_k_probe, multiplier_primes, pythagorean_identity, ratio_identities,
    search_equation, DescentError, DescentOutcome, EquationInstance, Family, ForcedKProbe, MultiplierPair,
};
pub use heuristic::{fit_exponent, square_hit_rate, tail_integral, DensityEstimate, Fraction, HitRateMode};
pub use kernel::{gcd, is_prime, isqrt, perfect_sqrt, KernelError};
pub use lattice::{
    classify_point, search_square, three_distance_family, Filter, PointProfile, SearchOptions, SearchReport,
    SquareInstance, Tag,
};
pub use triples::{primitive_triples, triple_from_params, PythTriple};
