use rayon::prelude::*;

/// Odd-only segmented sieve of Eratosthenes.
///
/// Segments hold `segment_odds` odd numbers. Multiples of 3, 5 and 7 are
/// pre-marked by copying a periodic pattern, so only primes >= 11 are crossed
/// off explicitly. Segment boundaries depend only on `segment_odds`, never on
/// the number of worker threads.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    segment_odds: usize,
    pattern: Vec<bool>,
}

/// Period of the 3*5*7 pre-sieve pattern in odd-index space.
const WHEEL_PERIOD: usize = 105;

impl Default for SegmentedSieve {
    fn default() -> Self {
        Self::new(1 << 20)
    }
}

impl SegmentedSieve {
    pub fn new(segment_odds: usize) -> Self {
        let segment_odds = segment_odds.max(WHEEL_PERIOD);
        // pattern[j] flags n = 2j + 1 divisible by 3, 5 or 7
        let pattern = (0..WHEEL_PERIOD)
            .map(|j| {
                let n = 2 * j + 1;
                n % 3 == 0 || n % 5 == 0 || n % 7 == 0
            })
            .collect();
        Self {
            segment_odds,
            pattern,
        }
    }

    pub fn segment_odds(&self) -> usize {
        self.segment_odds
    }

    /// Calls `map` on the primes of each segment of `[lo, hi]` and returns the
    /// results in segment order. Segments are processed in parallel.
    pub fn map_segments<R, F>(&self, lo: u64, hi: u64, map: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[u64]) -> R + Sync,
    {
        if hi < 2 || hi < lo {
            return Vec::new();
        }
        let base = small_primes(isqrt(hi));
        let span = 2 * self.segment_odds as u64;
        // segments start at odd numbers aligned to the segment grid
        let first = (lo.max(1) - 1) / span;
        let last = (hi - 1) / span;
        (first..=last)
            .into_par_iter()
            .map(|k| {
                let seg_lo = 1 + k * span;
                let seg_hi = (seg_lo + span - 2).min(if hi.is_multiple_of(2) { hi - 1 } else { hi });
                let mut primes = self.sieve_segment(seg_lo, seg_hi, &base);
                if k == 0 && lo <= 2 && hi >= 2 {
                    primes.insert(0, 2);
                }
                primes.retain(|&p| p >= lo && p <= hi);
                map(&primes)
            })
            .collect()
    }

    /// Primes in the odd range `[seg_lo, seg_hi]` (`seg_lo` odd).
    fn sieve_segment(&self, seg_lo: u64, seg_hi: u64, base: &[u64]) -> Vec<u64> {
        if seg_hi < seg_lo {
            return Vec::new();
        }
        let len = ((seg_hi - seg_lo) / 2 + 1) as usize;
        let i0 = ((seg_lo - 1) / 2) as usize;
        let mut composite: Vec<bool> = (0..len)
            .map(|t| self.pattern[(i0 + t) % WHEEL_PERIOD])
            .collect();
        for &p in base.iter().filter(|&&p| p >= 11) {
            let p2 = p * p;
            if p2 > seg_hi {
                break;
            }
            let mut start = if p2 >= seg_lo {
                p2
            } else {
                let r = seg_lo % p;
                if r == 0 {
                    seg_lo
                } else {
                    seg_lo + (p - r)
                }
            };
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - seg_lo) / 2) as usize;
            while idx < len {
                composite[idx] = true;
                idx += p as usize;
            }
        }
        let mut primes = Vec::with_capacity(len / 8);
        for (t, &c) in composite.iter().enumerate() {
            let n = seg_lo + 2 * t as u64;
            if n == 1 {
                continue;
            }
            if !c || n == 3 || n == 5 || n == 7 {
                primes.push(n);
            }
        }
        primes
    }

    /// All primes `p <= x` in increasing order.
    pub fn primes_up_to(&self, x: u64) -> Vec<u64> {
        self.primes_in(2, x)
    }

    pub fn primes_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        self.map_segments(lo, hi, |ps| ps.to_vec())
            .into_iter()
            .flatten()
            .collect()
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Plain sieve of Eratosthenes up to `n`.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_prime[i] {
            let mut j = i * i;
            while j <= n {
                is_prime[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| is_prime[k]).map(|k| k as u64).collect()
}

/// Prime powers `p^k <= x` with `k >= 2`, as `(p^k, p)` sorted by `p^k`.
pub fn higher_prime_powers(x: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in small_primes(isqrt(x)) {
        let mut pk = p * p;
        while pk <= x {
            out.push((pk, p));
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    out.sort_unstable();
    out
}

/// Visits every prime power `n = p^k <= x` in increasing order as `(n, p)`.
/// Sequential; memory is bounded by one segment.
pub fn for_each_prime_power<F: FnMut(u64, u64)>(sieve: &SegmentedSieve, x: u64, mut f: F) {
    let powers = higher_prime_powers(x);
    let mut next_power = 0usize;
    let span = 2 * sieve.segment_odds() as u64;
    let mut lo = 2u64;
    while lo <= x {
        let hi = if lo == 2 { span.min(x) } else { (lo + span - 1).min(x) };
        let primes = sieve.primes_in(lo, hi);
        let mut it = primes.iter().peekable();
        loop {
            let pp = powers.get(next_power).filter(|&&(n, _)| n <= hi);
            match (it.peek(), pp) {
                (Some(&&p), Some(&(n, b))) => {
                    if p < n {
                        f(p, p);
                        it.next();
                    } else {
                        f(n, b);
                        next_power += 1;
                    }
                }
                (Some(&&p), None) => {
                    f(p, p);
                    it.next();
                }
                (None, Some(&(n, b))) => {
                    f(n, b);
                    next_power += 1;
                }
                (None, None) => break,
            }
        }
        lo = hi + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(n: u64) -> Vec<u64> {
        (2..=n)
            .filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0))
            .collect()
    }

    #[test]
    fn matches_trial_division_small_segments() {
        let sieve = SegmentedSieve::new(128);
        for x in [2u64, 3, 10, 100, 1000, 5000] {
            assert_eq!(sieve.primes_up_to(x), trial_division_primes(x), "x={x}");
        }
    }

    #[test]
    fn default_segments() {
        let s = SegmentedSieve::default();
        assert_eq!(s.primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(s.primes_up_to(1_000_000).len(), 78498);
        assert!(s.primes_up_to(1).is_empty());
    }

    #[test]
    fn ranges() {
        let sieve = SegmentedSieve::new(200);
        assert_eq!(sieve.primes_in(90, 110), vec![97, 101, 103, 107, 109]);
        assert_eq!(sieve.primes_in(2, 2), vec![2]);
        assert_eq!(sieve.primes_in(24, 28), Vec::<u64>::new());
        let all = trial_division_primes(20_000);
        let part: Vec<u64> = all.iter().copied().filter(|&p| (1234..=17_001).contains(&p)).collect();
        assert_eq!(sieve.primes_in(1234, 17_001), part);
    }

    #[test]
    fn prime_power_walk_is_ordered() {
        let sieve = SegmentedSieve::new(150);
        let mut seen = Vec::new();
        for_each_prime_power(&sieve, 2000, |n, p| seen.push((n, p)));
        let mut expect = Vec::new();
        for n in 2..=2000u64 {
            let f = crate::arith::factorize(n);
            if f.len() == 1 {
                expect.push((n, f[0].0));
            }
        }
        assert_eq!(seen, expect);
    }
}
