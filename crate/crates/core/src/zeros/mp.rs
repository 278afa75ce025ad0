//! Multiprecision `L(s, chi)` via the Hurwitz decomposition and Euler-Maclaurin.

use std::sync::{Mutex, OnceLock};

use log::debug;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_BITS: u32 = 8192;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// `B_{2j} / (2j)!` for `j = 1..`, grown on demand.
fn em_coefficients(m: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut c = cache.lock().expect("bernoulli cache poisoned");
    if c.len() < m {
        let b = bernoulli(2 * m);
        let mut fact = Integer::from(1);
        let mut out = Vec::with_capacity(m);
        for k in 1..=2 * m {
            fact *= k as u32;
            if k % 2 == 0 {
                out.push(&b[k] / Rational::from(fact.clone()));
            }
        }
        *c = out;
    }
    c[..m].to_vec()
}

/// `B_0..=B_n` from `sum_{k=0}^{n} C(n+1, k) B_k = 0`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for k in 1..=n {
        if k > 1 && k % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from(bj * &binom);
            binom *= (k + 1 - j) as u32;
            binom /= (j + 1) as u32;
        }
        b.push(-acc / Rational::from(k as u32 + 1));
    }
    b
}

/// Euler-Maclaurin shift `N` and number of correction terms `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmParams {
    pub shift: u64,
    pub terms: usize,
}

fn ln_pochhammer_abs(sigma: f64, t: f64, n: usize) -> f64 {
    (0..n)
        .map(|k| ((sigma + k as f64).powi(2) + t * t).sqrt().ln())
        .sum()
}

/// Cheapest `(N, m)` whose remainder bound
/// `4 |(s)_{2m}| / ((2 pi)^{2m} (sigma + 2m - 1)) (N + 1/q)^{1 - sigma - 2m}`,
/// summed over residues, stays below `target`.
pub fn choose_params(q: u64, sigma: f64, t: f64, target: f64) -> EmParams {
    let qf = q as f64;
    let log_target = target.ln() + sigma * qf.ln() - qf.ln();
    let mut best: Option<(f64, EmParams)> = None;
    let mut m = 2usize;
    while m <= 600 {
        let two_m = 2 * m;
        let denom = sigma + two_m as f64 - 1.0;
        let log_num = 4f64.ln() + ln_pochhammer_abs(sigma, t, two_m)
            - two_m as f64 * std::f64::consts::TAU.ln()
            - denom.ln();
        let need = ((log_num - log_target) / denom).exp();
        let shift = (need - 1.0 / qf).ceil().max(1.0) as u64 + 1;
        let cost = qf * shift as f64 + 4.0 * qf * m as f64;
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, EmParams { shift, terms: m }));
        }
        m += 2;
    }
    best.expect("at least one candidate").1
}

/// A primitive character with exact roots of unity at a fixed precision.
struct MpCharacter {
    q: u64,
    exponent: u64,
    index: Vec<Option<u64>>,
}

impl MpCharacter {
    fn new(chi: &DirichletCharacter) -> Self {
        let q = chi.modulus();
        Self {
            q,
            exponent: chi.context().exponent(),
            index: (0..q).map(|a| chi.root_index(a)).collect(),
        }
    }

    fn roots(&self, prec: u32) -> Vec<Complex> {
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        (0..self.exponent)
            .map(|k| {
                let angle = Float::with_val(prec, &two_pi * k) / self.exponent;
                let (s, c) = angle.sin_cos(Float::new(prec));
                Complex::with_val(prec, (c, s))
            })
            .collect()
    }
}

fn eval_with(chi: &MpCharacter, s: &Complex, prec: u32, params: EmParams) -> Complex {
    let q = chi.q;
    let roots = chi.roots(prec);
    let value = |n: u64| chi.index[(n % q) as usize].map(|k| &roots[k as usize]);
    let mut head = Complex::new(prec);
    for n in 1..=q * params.shift {
        if let Some(c) = value(n) {
            let ln_n = Float::with_val(prec, n).ln();
            let mut term = Complex::with_val(prec, s * &ln_n);
            term = -term;
            term.exp_mut();
            head += term * c;
        }
    }
    let coeffs = em_coefficients(params.terms);
    let s_minus_1 = Complex::with_val(prec, s - 1u32);
    let mut tail = Complex::new(prec);
    for a in 1..=q {
        let Some(c) = value(a) else { continue };
        let x = Float::with_val(prec, q * params.shift + a);
        let ln_x = Float::with_val(prec, x.ln_ref());
        let mut x_pow = Complex::with_val(prec, s * &ln_x);
        x_pow = -x_pow;
        x_pow.exp_mut();
        let mut t = Complex::with_val(prec, &x_pow * &x);
        t /= Complex::with_val(prec, &s_minus_1 * q);
        t += Complex::with_val(prec, &x_pow / 2u32);
        let ratio = Float::with_val(prec, q) / &x;
        let ratio2 = Float::with_val(prec, ratio.square_ref());
        let mut rising = s.clone();
        let mut pow = Complex::with_val(prec, &x_pow * &ratio);
        for (j, coeff) in coeffs.iter().enumerate() {
            let cf = Float::with_val(prec, coeff);
            t += Complex::with_val(prec, &rising * &pow) * cf;
            let k = (2 * j + 1) as u32;
            rising *= Complex::with_val(prec, s + k);
            rising *= Complex::with_val(prec, s + (k + 1));
            pow *= &ratio2;
        }
        tail += t * c;
    }
    head + tail
}

fn working_bits(digits: u32, q: u64, params: EmParams, t: f64) -> u32 {
    let base = (digits as f64 * BITS_PER_DIGIT).ceil() as u32;
    let guard = 24.0 + ((q * params.shift) as f64).log2() + (t.abs() + 2.0).log2() * 2.0;
    base + guard.ceil() as u32
}

/// `L(s, chi)` to `digits` digits: absolute error below `10^-digits * max(1, |L|)`.
///
/// The result is accepted only when a second evaluation at double the working
/// precision agrees to that tolerance.
pub fn evaluate_l(chi: &DirichletCharacter, s: &Complex, digits: u32) -> Result<Complex> {
    evaluate_l_limited(chi, s, digits, DEFAULT_MAX_BITS)
}

pub fn evaluate_l_limited(chi: &DirichletCharacter, s: &Complex, digits: u32, max_bits: u32) -> Result<Complex> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            q: chi.modulus(),
            conductor: chi.conductor(),
        });
    }
    let mc = MpCharacter::new(chi);
    let sigma = s.real().to_f64();
    let t = s.imag().to_f64();
    if chi.modulus() == 1 && (sigma - 1.0).abs() < 1e-30 && t.abs() < 1e-30 {
        return Err(Error::InvalidArgument("zeta has a pole at s = 1".into()));
    }
    let target = 10f64.powi(-(digits as i32 + 2));
    let params = choose_params(chi.modulus(), sigma, t, target);
    let mut bits = working_bits(digits, chi.modulus(), params, t);
    let tol = Float::with_val(64, 10f64.powi(-(digits as i32)));
    while bits <= max_bits {
        let s_lo = Complex::with_val(bits, s);
        let v = eval_with(&mc, &s_lo, bits, params);
        let hi = 2 * bits;
        let s_hi = Complex::with_val(hi, s);
        let w = eval_with(&mc, &s_hi, hi, params);
        let diff = Float::with_val(hi, Complex::with_val(hi, &w - &v).abs_ref());
        let scale = Float::with_val(hi, w.abs_ref()).max(&Float::with_val(hi, 1));
        debug!(
            "L({}, {:.6}+{:.6}i): N={} m={} bits={} diff={:.3e}",
            chi.label(),
            sigma,
            t,
            params.shift,
            params.terms,
            bits,
            diff.to_f64()
        );
        if diff <= Float::with_val(hi, &tol * &scale) {
            return Ok(Complex::with_val(bits, w));
        }
        bits *= 2;
    }
    Err(Error::PrecisionUnattainable { digits, max_bits })
}

/// `L(s, chi)` at a fixed working precision without validation; used inside
/// root refinement where convergence itself is the check.
pub(crate) struct MpLFunction {
    chi: MpCharacter,
}

impl MpLFunction {
    pub fn new(chi: &DirichletCharacter) -> Self {
        Self {
            chi: MpCharacter::new(chi),
        }
    }

    pub fn eval_critical(&self, t: &Float, digits: u32) -> (Complex, u32) {
        let tf = t.to_f64();
        let params = choose_params(self.chi.q, 0.5, tf, 10f64.powi(-(digits as i32 + 2)));
        let bits = working_bits(digits, self.chi.q, params, tf).max(t.prec());
        let s = Complex::with_val(bits, (Float::with_val(bits, 0.5), t));
        (eval_with(&self.chi, &s, bits, params), bits)
    }
}

/// `x` rounded to `decimals` places after the point, in plain decimal notation.
pub fn format_fixed(x: &Float, decimals: u32) -> String {
    let scale = Integer::from(10).pow(decimals);
    let scaled = Float::with_val(x.prec() + 64, x * &scale);
    let n = scaled.round().to_integer().expect("finite value");
    let neg = n < 0;
    let digits = n.abs().to_string();
    let d = decimals as usize;
    let padded = if digits.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int, frac) = padded.split_at(padded.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Bits needed to hold a decimal string with `decimals` places and magnitude `x`.
pub fn bits_for_decimals(decimals: u32, magnitude: f64) -> u32 {
    ((decimals as f64 + magnitude.abs().max(1.0).log10() + 2.0) * BITS_PER_DIGIT).ceil() as u32 + 16
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{character_group, CharacterLabel, DirichletCharacter};

    fn parse(s: &str, prec: u32) -> Float {
        Float::with_val(prec, Float::parse(s).unwrap())
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[3], Rational::new());
        assert_eq!(b[12], Rational::from((-691, 2730)));
        let c = em_coefficients(2);
        assert_eq!(c[1], Rational::from((-1, 720)));
    }

    #[test]
    fn catalan_and_zeta() {
        let chi4 = &character_group(4).unwrap()[1];
        let s = Complex::with_val(200, (2, 0));
        let v = evaluate_l(chi4, &s, 40).unwrap();
        let catalan = parse("0.9159655941772190150546035149323841107742", 200);
        let err = Float::with_val(200, v.real() - &catalan).abs();
        assert!(err < 1e-39, "{err}");

        let zeta = &character_group(1).unwrap()[0];
        let v = evaluate_l(zeta, &s, 30).unwrap();
        let pi2_6 = Float::with_val(200, Constant::Pi).square() / 6u32;
        assert!(Float::with_val(200, v.real() - &pi2_6).abs() < 1e-29);
    }

    #[test]
    fn critical_line_value() {
        let chi = DirichletCharacter::from_label(&CharacterLabel::parse(5, "1").unwrap()).unwrap();
        let s = Complex::with_val(128, (0.5, 10));
        let v = evaluate_l(&chi, &s, 30).unwrap();
        let re = parse("2.124996823450796319814988610993154485858", 200);
        let im = parse("2.163859185370420529681810798536337773976", 200);
        assert!(Float::with_val(200, v.real() - &re).abs() < 1e-29);
        assert!(Float::with_val(200, v.imag() - &im).abs() < 1e-29);
    }

    #[test]
    fn first_zero_of_mod_4() {
        let chi4 = &character_group(4).unwrap()[1];
        let g = parse("6.020948904697596654902511521612085868864", 200);
        let s = Complex::with_val(200, (Float::with_val(200, 0.5), &g));
        let v = evaluate_l(chi4, &s, 35).unwrap();
        assert!(Float::with_val(200, v.abs_ref()) < 1e-34);
    }

    #[test]
    fn precision_limit_reported() {
        let chi4 = &character_group(4).unwrap()[1];
        let s = Complex::with_val(64, (2, 0));
        assert!(matches!(
            evaluate_l_limited(chi4, &s, 60, 100),
            Err(Error::PrecisionUnattainable { .. })
        ));
    }

    #[test]
    fn fixed_formatting() {
        let x = parse("6.0209489046975966549", 128);
        assert_eq!(format_fixed(&x, 5), "6.02095");
        assert_eq!(format_fixed(&parse("0.00012", 64), 3), "0.000");
        assert_eq!(format_fixed(&parse("-1.25", 64), 1), "-1.3");
        assert_eq!(format_fixed(&parse("42", 64), 0), "42");
    }
}
