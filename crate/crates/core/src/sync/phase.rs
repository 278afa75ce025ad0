use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Decimal digits of `|n|`.
pub fn decimal_digits(n: &Integer) -> u32 {
    if *n == 0 {
        1
    } else {
        n.to_string_radix(10).trim_start_matches('-').len() as u32
    }
}

/// Guard digits required on top of the digit count of `n`.
pub const PHASE_GUARD_DIGITS: u32 = 15;

/// `(n * delta * gamma) mod 2 pi` in `[0, 2 pi)`.
///
/// `gamma_digits` is the number of correct decimal places carried by `gamma`;
/// it must be at least `digits(n) + 15` so that the error `n delta 10^-digits`
/// stays far below the target `1e-10`.
pub fn phase_reduce(n: &Integer, gamma: &Float, gamma_digits: u32, delta: &Rational) -> Result<f64> {
    let required = decimal_digits(n) + PHASE_GUARD_DIGITS;
    if gamma_digits < required {
        return Err(Error::InsufficientPrecision {
            available: gamma_digits,
            required,
        });
    }
    Ok(phase_reduce_unchecked(n, gamma, delta))
}

fn phase_reduce_unchecked(n: &Integer, gamma: &Float, delta: &Rational) -> f64 {
    let nd = Rational::from(delta * n);
    // bits for the integer part of n delta gamma, plus 64 for the fraction
    let mag = nd.clone().abs().to_f64().max(1.0).log2() + gamma.to_f64().abs().max(1.0).log2();
    let prec = (mag.ceil() as u32 + 96).max(gamma.prec() + 32);
    let g = Float::with_val(prec, gamma);
    let v = Float::with_val(prec, &nd * &g);
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let k = Float::with_val(prec, &v / &two_pi).floor();
    let mut r = v - k * &two_pi;
    if r < 0 {
        r += &two_pi;
    }
    if r >= two_pi {
        r -= &two_pi;
    }
    let out = r.to_f64();
    if out >= std::f64::consts::TAU {
        0.0
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use std::f64::consts::TAU;

    #[test]
    fn one_matches_double() {
        let g = Float::with_val(200, Float::parse("6.020948904697596654902511521612").unwrap());
        let d = Rational::from((1, 10));
        let p = phase_reduce(&Integer::from(1), &g, 30, &d).unwrap();
        assert!((p - (0.1 * 6.020_948_904_697_597_f64) % TAU).abs() < 1e-12);
    }

    #[test]
    fn precision_contract() {
        let g = Float::with_val(200, 14.1347);
        let n = Integer::from(10).pow(20);
        let d = Rational::from(1);
        match phase_reduce(&n, &g, 30, &d) {
            Err(Error::InsufficientPrecision { available, required }) => {
                assert_eq!((available, required), (30, 36));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_gamma_closed_form() {
        // gamma = 22/7, delta = 7/11: n delta gamma = 2n exactly
        let prec = 256;
        let g = Float::with_val(prec, 22) / 7u32;
        let d = Rational::from((7, 11));
        for n in [1u64, 3, 1000, 99_991] {
            let p = phase_reduce_unchecked(&Integer::from(n), &g, &d);
            let expect = (2.0 * n as f64) % TAU;
            assert!((p - expect).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn stable_under_more_digits() {
        let g40 = Float::with_val(300, Float::parse("6.020948904697596654902511521612085868864").unwrap());
        let g60 = Float::with_val(
            400,
            Float::parse("6.02094890469759665490251152161208586886400000000000000000001").unwrap(),
        );
        let n = Integer::from(10).pow(20);
        let d = Rational::from((1, 2));
        let a = phase_reduce(&n, &g40, 39, &d).unwrap();
        let b = phase_reduce(&n, &g60, 60, &d).unwrap();
        assert!((a - b).abs() <= 1e-10);
        assert!((0.0..TAU).contains(&a));
    }
}
