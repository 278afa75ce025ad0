use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sieve::{higher_prime_powers, SegmentedSieve};
use crate::arith::{gcd, CompensatedSum};
use crate::characters::{CharacterLabel, DirichletCharacter};
use crate::error::{Error, Result};

/// Bumped whenever the sieve or the tally layout changes; part of the cache key.
pub const SIEVE_VERSION: u32 = 1;

pub const DEFAULT_SIEVE_CEILING: u64 = 1_000_000_000;

#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub ceiling: u64,
    pub segment_odds: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            ceiling: DEFAULT_SIEVE_CEILING,
            segment_odds: 1 << 20,
        }
    }
}

impl SieveConfig {
    pub fn sieve(&self) -> SegmentedSieve {
        SegmentedSieve::new(self.segment_odds)
    }

    pub fn check(&self, x: f64) -> Result<u64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!("x must be finite and >= 0, got {x}")));
        }
        if x > self.ceiling as f64 {
            return Err(Error::CapacityExceeded {
                x,
                ceiling: self.ceiling,
            });
        }
        Ok(x.floor() as u64)
    }
}

/// Residue-class tallies of `log p` (primes) and `log p` over prime powers
/// `p^k`, `k >= 2`, for all `n <= floor(x)`. Vectors are indexed by residue
/// `0..q`; entries at non-units hold the contributions of primes dividing `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeTally {
    pub x: f64,
    pub x_floor: u64,
    pub q: u64,
    pub theta: Vec<f64>,
    pub higher: Vec<f64>,
    pub prime_counts: Vec<u64>,
    /// `sum_{p^k <= x, k >= 2} log p` over all primes, including `p | q`.
    pub higher_total: f64,
    pub sieve_version: u32,
}

impl PrimeTally {
    /// Residues coprime to `q`.
    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        let q = self.q;
        (0..q).filter(move |&a| gcd(a, q) == 1)
    }

    /// `(a, theta(x; q, a))` over residues coprime to `q`.
    pub fn theta_by_residue(&self) -> Vec<(u64, f64)> {
        self.units().map(|a| (a, self.theta[a as usize])).collect()
    }

    /// `(a, psi(x; q, a))` over residues coprime to `q`.
    pub fn psi_by_residue(&self) -> Vec<(u64, f64)> {
        self.units()
            .map(|a| (a, self.theta[a as usize] + self.higher[a as usize]))
            .collect()
    }

    pub fn theta_total(&self) -> f64 {
        let mut s = CompensatedSum::new();
        self.theta.iter().for_each(|&v| s.add(v));
        s.value()
    }

    pub fn phi(&self) -> u64 {
        self.units().count() as u64
    }
}

/// Exact residue tallies for several moduli from one sieve pass.
pub fn sieve_tallies(x: f64, moduli: &[u64], config: &SieveConfig) -> Result<Vec<PrimeTally>> {
    let x_floor = config.check(x)?;
    if let Some(&q) = moduli.iter().find(|&&q| q == 0) {
        return Err(Error::InvalidModulus(q));
    }
    let sieve = config.sieve();
    let per_segment = sieve.map_segments(2, x_floor, |primes| {
        moduli
            .iter()
            .map(|&q| {
                let mut sums = vec![CompensatedSum::new(); q as usize];
                let mut counts = vec![0u64; q as usize];
                for &p in primes {
                    let r = (p % q) as usize;
                    sums[r].add((p as f64).ln());
                    counts[r] += 1;
                }
                (sums, counts)
            })
            .collect::<Vec<_>>()
    });
    let powers = higher_prime_powers(x_floor);
    let mut higher_total = CompensatedSum::new();
    for &(_, p) in &powers {
        higher_total.add((p as f64).ln());
    }
    let higher_total = higher_total.value();

    Ok(moduli
        .iter()
        .enumerate()
        .map(|(mi, &q)| {
            let qs = q as usize;
            let mut sums = vec![CompensatedSum::new(); qs];
            let mut counts = vec![0u64; qs];
            for seg in &per_segment {
                let (s, c) = &seg[mi];
                for r in 0..qs {
                    sums[r].merge(&s[r]);
                    counts[r] += c[r];
                }
            }
            let mut higher = vec![CompensatedSum::new(); qs];
            for &(n, p) in &powers {
                higher[(n % q) as usize].add((p as f64).ln());
            }
            PrimeTally {
                x,
                x_floor,
                q,
                theta: sums.iter().map(|s| s.value()).collect(),
                higher: higher.iter().map(|s| s.value()).collect(),
                prime_counts: counts,
                higher_total,
                sieve_version: SIEVE_VERSION,
            }
        })
        .collect())
}

pub fn sieve_tally(x: f64, q: u64, config: &SieveConfig) -> Result<PrimeTally> {
    Ok(sieve_tallies(x, &[q], config)?.pop().expect("one modulus"))
}

/// `theta(x, chi)` and `psi(x, chi)` for one character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterSum {
    pub label: CharacterLabel,
    pub x: f64,
    pub theta: Complex64,
    pub psi: Complex64,
    /// `sum_{p^k <= x, k >= 2} chi(p^k) log p`.
    pub higher: Complex64,
}

pub fn character_sum(chi: &DirichletCharacter, tally: &PrimeTally) -> Result<CharacterSum> {
    if chi.modulus() != tally.q {
        return Err(Error::ModulusMismatch {
            expected: chi.modulus(),
            found: tally.q,
        });
    }
    let mut theta = Complex64::new(0.0, 0.0);
    let mut higher = Complex64::new(0.0, 0.0);
    for a in tally.units() {
        let v = chi.eval_u64(a);
        theta += v * tally.theta[a as usize];
        higher += v * tally.higher[a as usize];
    }
    Ok(CharacterSum {
        label: chi.label(),
        x: tally.x,
        theta,
        psi: theta + higher,
        higher,
    })
}

/// `psi(x, chi)` from the sum of the primitive character inducing `chi`:
/// `psi(x, chi) = psi(x, chi*) - sum_{p | q} sum_{p^k <= x} chi*(p^k) log p`.
pub fn psi_from_primitive(chi: &DirichletCharacter, primitive_sum: &CharacterSum) -> Result<Complex64> {
    let star = chi.primitive_inducing();
    if primitive_sum.label != star.label() {
        return Err(Error::InvalidArgument(format!(
            "sum belongs to {}, expected the inducing character {}",
            primitive_sum.label,
            star.label()
        )));
    }
    Ok(primitive_sum.psi - imprimitive_correction(chi, primitive_sum.x))
}

/// `sum_{p | q} sum_{p^k <= x} chi*(p^k) log p`, the gap between the sums of
/// `chi*` and `chi`. Zero for primitive characters.
pub fn imprimitive_correction(chi: &DirichletCharacter, x: f64) -> Complex64 {
    let star = chi.primitive_inducing();
    let x_floor = x.max(0.0).floor() as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(p, _) in chi.context().factorization() {
        let lp = (p as f64).ln();
        let mut pk = p;
        while pk <= x_floor {
            acc += star.eval_u64(pk) * lp;
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    acc
}
