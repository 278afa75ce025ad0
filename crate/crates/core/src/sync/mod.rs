//! Simultaneous Diophantine approximation: integers `n <= N` with
//! `||n lambda_j|| <= tol` for every frequency.

mod phase;

use std::collections::HashMap;

use log::debug;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use phase::{decimal_digits, phase_reduce, PHASE_GUARD_DIGITS};

/// Frequencies closer than this (mod 1) are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-12;
pub const BRUTE_LIMIT: u64 = 100_000_000;
pub const DEFAULT_CELL_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone)]
pub struct SyncProblem {
    pub lambdas: Vec<Float>,
    /// Cubes per axis.
    pub m: u64,
    pub n_max: Integer,
    /// Acceptance threshold on `max_j ||n lambda_j||`; `1/m` by default.
    pub tolerance: f64,
}

impl SyncProblem {
    pub fn new(lambdas: Vec<Float>, m: u64, n_max: Integer) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("need M >= 2, got {m}")));
        }
        if n_max < 1 {
            return Err(Error::InvalidArgument("need N >= 1".into()));
        }
        let mut fracs: Vec<(f64, Float)> = lambdas
            .into_iter()
            .map(|l| {
                let f = Float::with_val(l.prec(), l.clone() - l.clone().floor());
                (f.to_f64(), l)
            })
            .collect();
        fracs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut kept: Vec<(f64, Float)> = Vec::new();
        for (f, l) in fracs {
            let dup = kept.iter().any(|(g, _)| {
                let d = (f - g).abs();
                d.min(1.0 - d) < DEDUP_TOLERANCE
            });
            if !dup {
                kept.push((f, l));
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidArgument("no frequencies".into()));
        }
        Ok(SyncProblem {
            lambdas: kept.into_iter().map(|(_, l)| l).collect(),
            m,
            n_max,
            tolerance: 1.0 / m as f64,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    /// `N / M^k - 1`.
    pub fn count_lower_bound(&self) -> f64 {
        let log = self.n_max.to_f64().ln() - self.k() as f64 * (self.m as f64).ln();
        log.exp() - 1.0
    }

    fn cells(&self) -> Option<u128> {
        (self.m as u128).checked_pow(self.k() as u32)
    }

    fn n_u64(&self) -> Result<u64> {
        self.n_max.to_u64().ok_or_else(|| Error::SearchTooLarge {
            n: self.n_max.to_string(),
            limit: u64::MAX,
        })
    }

    /// `max_j ||n lambda_j||` in multiprecision.
    pub fn fractional_error(&self, n: &Integer) -> f64 {
        let nbits = n.significant_bits();
        self.lambdas
            .iter()
            .map(|l| {
                let prec = l.prec() + nbits + 32;
                let v = Float::with_val(prec, l * n);
                let f = Float::with_val(prec, &v - v.clone().floor());
                let g = Float::with_val(prec, 1 - &f);
                f.min(&g).to_f64()
            })
            .fold(0.0, f64::max)
    }

    fn steps(&self) -> Vec<u64> {
        self.lambdas
            .iter()
            .map(|l| {
                let prec = l.prec().max(64) + 64;
                let f = Float::with_val(prec, l - l.clone().floor()) << 64u32;
                f.floor().to_integer().and_then(|i| i.to_u64()).unwrap_or(0)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    pub hits: Vec<u64>,
    pub count_lower_bound: f64,
    pub method: String,
    pub max_fractional_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketMode {
    /// One pass over `0..=N`; refuses when the occupied cells could exceed the budget.
    InMemory { cell_budget: u128 },
    /// Independent windows of `window` consecutive integers.
    Streaming { window: u64 },
}

impl Default for BucketMode {
    fn default() -> Self {
        BucketMode::InMemory {
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

struct Walker {
    steps: Vec<u64>,
    pos: Vec<u64>,
    m: u128,
}

impl Walker {
    fn new(problem: &SyncProblem, start: u64) -> Self {
        let steps = problem.steps();
        let pos = steps.iter().map(|s| s.wrapping_mul(start)).collect();
        Walker {
            steps,
            pos,
            m: problem.m as u128,
        }
    }

    fn cell(&self) -> u128 {
        self.pos
            .iter()
            .fold(0u128, |acc, &x| acc * self.m + ((x as u128 * self.m) >> 64))
    }

    fn advance(&mut self) {
        for (p, s) in self.pos.iter_mut().zip(&self.steps) {
            *p = p.wrapping_add(*s);
        }
    }

    fn distance(&self) -> f64 {
        self.pos
            .iter()
            .map(|&x| {
                let d = x.min(x.wrapping_neg());
                d as f64 / 18_446_744_073_709_551_616.0
            })
            .fold(0.0, f64::max)
    }
}

/// Fullest cube of the points `lo..=hi`, returned as its sorted members.
fn fullest_cube(problem: &SyncProblem, lo: u64, hi: u64) -> Vec<u64> {
    let mut counts: HashMap<u128, u64> = HashMap::new();
    let mut w = Walker::new(problem, lo);
    for _ in lo..=hi {
        *counts.entry(w.cell()).or_default() += 1;
        w.advance();
    }
    let (&best, _) = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .expect("nonempty range");
    drop(counts);
    let mut members = Vec::new();
    let mut w = Walker::new(problem, lo);
    for n in lo..=hi {
        if w.cell() == best {
            members.push(n);
        }
        w.advance();
    }
    members
}

fn verified(problem: &SyncProblem, candidates: impl IntoIterator<Item = u64>) -> (Vec<u64>, f64) {
    let mut hits = Vec::new();
    let mut worst: f64 = 0.0;
    for n in candidates {
        let e = problem.fractional_error(&Integer::from(n));
        if e <= problem.tolerance {
            worst = worst.max(e);
            hits.push(n);
        }
    }
    hits.sort_unstable();
    hits.dedup();
    (hits, worst)
}

/// Pigeonhole search: bucket `n lambda mod 1` into half-open cubes of side
/// `1/M` and take differences from the fullest cube.
pub fn sync_bucket(problem: &SyncProblem, mode: BucketMode) -> Result<SyncResult> {
    let n = problem.n_u64()?;
    let cells = problem.cells().ok_or(Error::MemoryBudget {
        cells: u128::MAX,
        budget: 0,
    })?;
    let (hits, worst, method, bound) = match mode {
        BucketMode::InMemory { cell_budget } => {
            let used = cells.min(n as u128 + 1);
            if used > cell_budget {
                return Err(Error::MemoryBudget {
                    cells: used,
                    budget: cell_budget,
                });
            }
            let members = fullest_cube(problem, 0, n);
            let base = members[0];
            let (hits, worst) = verified(problem, members[1..].iter().map(|m| m - base));
            (hits, worst, "bucket".to_string(), problem.count_lower_bound())
        }
        BucketMode::Streaming { window } => {
            if window < 2 {
                return Err(Error::InvalidArgument("window must be >= 2".into()));
            }
            let mut all = Vec::new();
            let mut bound = 0.0;
            let mut lo = 0u64;
            while lo <= n {
                let hi = lo.saturating_add(window - 1).min(n);
                let members = fullest_cube(problem, lo, hi);
                all.extend(members[1..].iter().map(|m| m - members[0]));
                bound += ((hi - lo + 1) as f64 / cells as f64 - 1.0).max(0.0);
                debug!("window {lo}..={hi}: {} in fullest cube", members.len());
                if hi == n {
                    break;
                }
                lo = hi + 1;
            }
            let (hits, worst) = verified(problem, all);
            (hits, worst, format!("bucket-streaming({window})"), bound)
        }
    };
    Ok(SyncResult {
        hits,
        count_lower_bound: bound,
        method,
        max_fractional_error: worst,
    })
}

/// Every `n` in `1..=N` with `max_j ||n lambda_j|| <= tol`.
pub fn sync_brute(problem: &SyncProblem) -> Result<SyncResult> {
    let k = problem.k() as u64;
    let limit = BRUTE_LIMIT / k;
    let n = problem.n_u64()?;
    if n > limit {
        return Err(Error::SearchTooLarge {
            n: problem.n_max.to_string(),
            limit,
        });
    }
    // fixed-point prefilter with slack; the multiprecision check decides
    let slack = problem.tolerance + 1e-9;
    let mut w = Walker::new(problem, 1);
    let mut candidates = Vec::new();
    for i in 1..=n {
        if w.distance() <= slack {
            candidates.push(i);
        }
        w.advance();
    }
    let (hits, worst) = verified(problem, candidates);
    Ok(SyncResult {
        hits,
        count_lower_bound: problem.count_lower_bound(),
        method: "brute".into(),
        max_fractional_error: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowestHit {
    pub n: u64,
    pub floor: u64,
    pub fractional_error: f64,
    pub candidates_checked: usize,
}

/// `ceil(N^(1/3))`.
pub fn default_floor(n_max: &Integer) -> Integer {
    let (mut r, _) = n_max.clone().root_rem(Integer::new(), 3);
    if Integer::from(&r * &r) * &r < *n_max {
        r += 1;
    }
    r
}

/// Smallest `n` in `[floor, N]` with `max_j ||n lambda_j|| <= tol`, found by a
/// forward fixed-point walk from `floor` with each candidate checked in
/// multiprecision. Existence is certified when `N/M^k - 1 >= 2`.
pub fn sync_lowest_in_range(problem: &SyncProblem, floor: Option<&Integer>) -> Result<LowestHit> {
    let floor = floor.cloned().unwrap_or_else(|| default_floor(&problem.n_max));
    let n = problem.n_u64()?;
    let miss = |checked: usize| Error::SyncMiss {
        floor: floor.to_string(),
        n: problem.n_max.to_string(),
        hits: checked,
        bound: problem.count_lower_bound(),
    };
    let fl = match floor.to_u64() {
        Some(f) if f <= n => f.max(1),
        _ => return Err(miss(0)),
    };
    if problem.count_lower_bound() < 2.0 {
        debug!("N/M^k - 1 = {} < 2, a hit above the floor is not guaranteed", problem.count_lower_bound());
    }
    let slack = problem.tolerance + 1e-9;
    let mut w = Walker::new(problem, fl);
    let mut checked = 0;
    for i in fl..=n {
        if w.distance() <= slack {
            checked += 1;
            let e = problem.fractional_error(&Integer::from(i));
            if e <= problem.tolerance {
                return Ok(LowestHit {
                    n: i,
                    floor: fl,
                    fractional_error: e,
                    candidates_checked: checked,
                });
            }
        }
        w.advance();
    }
    Err(miss(checked))
}
