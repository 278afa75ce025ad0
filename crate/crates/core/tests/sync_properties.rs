use proptest::prelude::*;
use rug::{Float, Integer, Rational};

use hooley_core::sync::{phase_reduce, sync_brute, sync_bucket, sync_lowest_in_range, BucketMode, SyncProblem};
use hooley_core::zeros::{find_zero_pair, ZeroConfig};
use hooley_core::characters::character_group;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

// (n * delta * gamma) mod 2 pi in double-double arithmetic
fn dd_phase(n: u64, delta: f64, gamma: (f64, f64)) -> f64 {
    const TWO_PI: (f64, f64) = (std::f64::consts::TAU, 2.4492935982947064e-16);
    let (h, l) = two_prod(n as f64, delta);
    let (p, e) = two_prod(h, gamma.0);
    let v = (p, e + h * gamma.1 + l * gamma.0);
    let k = (v.0 / TWO_PI.0).floor();
    let (a, ae) = two_prod(k, TWO_PI.0);
    let (r, re) = two_sum(v.0, -a);
    let mut out = r + (re + v.1 - ae - k * TWO_PI.1);
    if out < 0.0 {
        out += TWO_PI.0;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bucket_hits_are_brute_hits(k in 1usize..=3, m in 2u64..=6, seeds in prop::collection::vec(1u64..(1 << 60), 3)) {
        let lambdas: Vec<Float> = seeds[..k].iter().map(|&s| Float::with_val(128, s) >> 60u32).collect();
        let p = SyncProblem::new(lambdas, m, Integer::from(20 * m.pow(k as u32))).unwrap();
        let brute = sync_brute(&p).unwrap();
        let bucket = sync_bucket(&p, BucketMode::default()).unwrap();
        prop_assert!(bucket.hits.iter().all(|h| brute.hits.contains(h)));
        prop_assert!(brute.hits.len() as f64 >= p.count_lower_bound());
        for h in &brute.hits {
            prop_assert!(p.fractional_error(&Integer::from(*h)) <= p.tolerance);
        }
    }

    #[test]
    fn phase_matches_double_double(n in 1u64..=1_000_000, num in 1u32..20, den in 1u32..40, g in 1.0f64..500.0) {
        let delta = Rational::from((num, den));
        let gamma = Float::with_val(53, g);
        let p = phase_reduce(&Integer::from(n), &gamma, 40, &delta).unwrap();
        // delta as a double-double is exact enough only when it is a dyadic-free ratio;
        // fold its rounding error into the gamma tail instead
        let d = num as f64 / den as f64;
        let derr = (Rational::from((num, den)) - Rational::from_f64(d).unwrap()).to_f64();
        let q = dd_phase(n, d, (g, g * derr / d));
        let diff = (p - q).abs();
        prop_assert!(diff.min(std::f64::consts::TAU - diff) < 1e-9, "{p} vs {q}");
    }
}

#[test]
fn first_zeros_mod_4() {
    let chi = &character_group(4).unwrap()[1];
    let (set, _) = find_zero_pair(chi, 11.0, 30, &ZeroConfig::default()).unwrap();
    let half = Rational::from((1, 2));
    let two_pi = Float::with_val(256, rug::float::Constant::Pi) * 2u32;
    let lambdas: Vec<Float> = set.zeros[..2]
        .iter()
        .map(|z| Float::with_val(256, z.gamma_float() * &half) / &two_pi)
        .collect();
    let p = SyncProblem::new(lambdas, 6, Integer::from(36 * 40)).unwrap();
    let bucket = sync_bucket(&p, BucketMode::default()).unwrap();
    let brute = sync_brute(&p).unwrap();
    assert!(!bucket.hits.is_empty());
    assert!(bucket.hits.iter().all(|h| brute.hits.contains(h)));
    let low = sync_lowest_in_range(&p, None).unwrap();
    assert!(low.n >= 12);
    assert_eq!(low.n, *brute.hits.iter().find(|&&h| h >= 12).unwrap());
}
