//! Prime sieving and residue-class tallies of Chebyshev sums.

pub mod cache;
pub mod sieve;
pub mod tally;

pub use cache::TallyCache;
pub use sieve::{for_each_prime_power, higher_prime_powers, small_primes, SegmentedSieve};
pub use tally::{
    character_sum, imprimitive_correction, psi_from_primitive, sieve_tallies, sieve_tally,
    CharacterSum, PrimeTally, SieveConfig, DEFAULT_SIEVE_CEILING, SIEVE_VERSION,
};
