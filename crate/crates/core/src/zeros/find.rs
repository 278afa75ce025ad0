use std::fmt;

use log::{info, warn};
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use super::count::contour_count;
use super::lfunc::LFunction;
use super::mp::{bits_for_decimals, format_fixed, MpLFunction};
use crate::characters::{CharacterLabel, DirichletCharacter};
use crate::error::{Error, Result};

/// One critical-line ordinate `gamma >= 0`.
///
/// `gamma` is a decimal string with `digits` places after the point; `value`
/// is its nearest double.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalZero {
    pub label: CharacterLabel,
    pub gamma: String,
    pub value: f64,
    pub digits: u32,
}

impl CriticalZero {
    pub fn new(label: CharacterLabel, gamma: String, digits: u32) -> Result<Self> {
        let parsed = Float::parse(&gamma)
            .map_err(|e| Error::InvalidArgument(format!("bad ordinate {gamma:?}: {e}")))?;
        let value = Float::with_val(bits_for_decimals(digits, 1e6), parsed).to_f64();
        Ok(Self {
            label,
            gamma,
            value,
            digits,
        })
    }

    /// The ordinate as a multiprecision float carrying all stored digits.
    pub fn gamma_float(&self) -> Float {
        let prec = bits_for_decimals(self.digits, self.value);
        Float::with_val(prec, Float::parse(&self.gamma).expect("validated at construction"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroStatus {
    Verified,
    Unverified,
    Ingested,
}

impl fmt::Display for ZeroStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroStatus::Verified => "verified",
            ZeroStatus::Unverified => "unverified",
            ZeroStatus::Ingested => "ingested",
        })
    }
}

/// Zeros `0 <= gamma <= height` of one primitive `L(s, chi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub label: CharacterLabel,
    pub zeros: Vec<CriticalZero>,
    pub height: f64,
    /// Contour count of zeros with `|gamma| <= height` (both signs).
    pub verified_count: Option<u64>,
    pub status: ZeroStatus,
    pub diagnostic: Option<String>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.value).collect()
    }

    pub fn min_digits(&self) -> u32 {
        self.zeros.iter().map(|z| z.digits).min().unwrap_or(u32::MAX)
    }

    /// Copy restricted to `gamma <= height`.
    pub fn truncated(&self, height: f64) -> ZeroSet {
        let mut out = self.clone();
        out.zeros.retain(|z| z.value <= height);
        out.height = height.min(self.height);
        out
    }

    pub fn require_verified(&self, allow_unverified: bool) -> Result<()> {
        if self.status == ZeroStatus::Verified || allow_unverified {
            Ok(())
        } else {
            Err(Error::UnverifiedZeros {
                label: self.label.to_string(),
                status: self.status.to_string(),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroConfig {
    pub modulus_ceiling: u64,
    pub height_ceiling: f64,
    pub initial_step: f64,
    pub retries: u32,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        Self {
            modulus_ceiling: 100,
            height_ceiling: 200.0,
            initial_step: 0.05,
            retries: 4,
        }
    }
}

/// Sign changes of Hardy's function on the grid `-t..=t` with spacing `step`,
/// each refined in double precision. A grid point hitting zero exactly is
/// reported as its own root.
fn scan(l: &LFunction, t: f64, step: f64) -> Vec<f64> {
    let n = (2.0 * t / step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| (-t + k as f64 * step).min(t)).collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| l.hardy_z(x)).collect();
    let brackets: Vec<(f64, f64, f64, f64)> = (0..n)
        .filter(|&k| values[k] * values[k + 1] < 0.0)
        .map(|k| (grid[k], grid[k + 1], values[k], values[k + 1]))
        .collect();
    let mut roots: Vec<f64> = brackets
        .par_iter()
        .map(|&(a, b, fa, fb)| illinois(|x| l.hardy_z(x), a, b, fa, fb))
        .collect();
    roots.extend(grid.iter().zip(&values).filter(|(_, v)| **v == 0.0).map(|(x, _)| *x));
    roots.sort_by(f64::total_cmp);
    roots
}

fn illinois<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() < 4.0 * f64::EPSILON * c.abs().max(1.0) {
            return c;
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        }
        b = c;
        fb = fc;
    }
    0.5 * (a + b)
}

/// Secant iteration on `L(1/2 + it)` in multiprecision, starting at a double
/// root. Returns the ordinate rounded to `digits` places.
pub(crate) fn refine(mpl: &MpLFunction, t0: f64, digits: u32) -> Result<Float> {
    let work = digits + 10;
    let prec = bits_for_decimals(work + 10, t0);
    let mut t_prev = Float::with_val(prec, t0);
    let mut t_cur = Float::with_val(prec, t0 + 1e-9 * t0.abs().max(1.0));
    let (mut l_prev, _) = mpl.eval_critical(&t_prev, work);
    let tol = Float::with_val(prec, 10f64.powi(-(work as i32 - 2)));
    for _ in 0..100 {
        let (l_cur, _) = mpl.eval_critical(&t_cur, work);
        let denom = Complex::with_val(prec, &l_cur - &l_prev);
        if denom.is_zero() {
            break;
        }
        let dt = Float::with_val(prec, &t_cur - &t_prev);
        let step = Complex::with_val(prec, &l_cur * &dt) / denom;
        let t_next = Float::with_val(prec, &t_cur - step.real());
        let moved = Float::with_val(prec, &t_next - &t_cur).abs();
        t_prev = t_cur;
        l_prev = l_cur;
        t_cur = t_next;
        if moved < tol {
            let drift = (t_cur.to_f64() - t0).abs();
            if drift > 1e-6 * t0.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "refinement of the zero near {t0} drifted by {drift:.3e}"
                )));
            }
            return Ok(t_cur);
        }
    }
    Err(Error::PrecisionUnattainable {
        digits,
        max_bits: prec,
    })
}

fn make_zero(label: &CharacterLabel, gamma: &Float, digits: u32) -> CriticalZero {
    let s = format_fixed(gamma, digits);
    CriticalZero::new(label.clone(), s, digits).expect("formatted ordinate parses")
}

/// Zero sets for `chi` and, when `chi` is complex, for its conjugate, from a
/// single scan of Hardy's function on `[-T, T]`: ordinates below zero belong
/// to the conjugate character.
pub fn find_zero_pair(
    chi: &DirichletCharacter,
    height: f64,
    digits: u32,
    config: &ZeroConfig,
) -> Result<(ZeroSet, Option<ZeroSet>)> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            q: chi.modulus(),
            conductor: chi.conductor(),
        });
    }
    if chi.modulus() > config.modulus_ceiling {
        return Err(Error::InvalidArgument(format!(
            "modulus {} exceeds the zero-finding ceiling {}; ingest a zero table instead",
            chi.modulus(),
            config.modulus_ceiling
        )));
    }
    if !(height >= 0.0) || height > config.height_ceiling {
        return Err(Error::InvalidArgument(format!(
            "height {height} outside [0, {}]",
            config.height_ceiling
        )));
    }
    if chi.is_principal() {
        return Err(Error::InvalidArgument(
            "the trivial character is not handled by the contour count".into(),
        ));
    }
    let l = LFunction::new(chi)?;
    let count = contour_count(&l, height);
    if count.defect() > 0.1 {
        warn!("contour count for {} at T={height} is {:.4}", chi.label(), count.raw);
    }
    let mut step = config.initial_step;
    let mut roots = scan(&l, height, step);
    let mut attempt = 0;
    while roots.len() as u64 != count.count && attempt < config.retries {
        attempt += 1;
        step /= 2.0;
        info!(
            "{}: {} sign changes vs contour count {}; retrying with step {step}",
            chi.label(),
            roots.len(),
            count.count
        );
        roots = scan(&l, height, step);
    }
    let matched = roots.len() as u64 == count.count && count.defect() <= 0.1;
    let status = if matched {
        ZeroStatus::Verified
    } else {
        ZeroStatus::Unverified
    };
    let diagnostic = (!matched).then(|| {
        format!(
            "{} sign changes on [-{height}, {height}] at step {step}, contour count {:.4}; \
             a close pair may have been missed",
            roots.len(),
            count.raw
        )
    });

    let mpl = MpLFunction::new(chi);
    let refined: Vec<(f64, Float)> = roots
        .par_iter()
        .map(|&r| refine(&mpl, r, digits).map(|g| (r, g)))
        .collect::<Result<_>>()?;

    let label = chi.label();
    let conj = chi.conj();
    let conj_label = conj.label();
    let real = conj_label == label;
    let mut own = Vec::new();
    let mut other = Vec::new();
    for (r, g) in &refined {
        if *r >= 0.0 {
            own.push(make_zero(&label, g, digits));
        } else if !real {
            other.push(make_zero(&conj_label, &Float::with_val(g.prec(), -g), digits));
        }
    }
    other.reverse();
    let set = |label: CharacterLabel, zeros: Vec<CriticalZero>| ZeroSet {
        label,
        zeros,
        height,
        verified_count: Some(count.count),
        status,
        diagnostic: diagnostic.clone(),
    };
    let first = set(label, own);
    let second = (!real).then(|| set(conj_label, other));
    Ok((first, second))
}

/// Zeros `0 <= gamma <= T` of `L(s, chi)`, verified against the contour count.
pub fn find_zeros(chi: &DirichletCharacter, height: f64, digits: u32, config: &ZeroConfig) -> Result<ZeroSet> {
    Ok(find_zero_pair(chi, height, digits, config)?.0)
}

/// `|L(1/2 + i gamma)|` in double precision for each stored ordinate.
pub fn residuals(chi: &DirichletCharacter, set: &ZeroSet) -> Result<Vec<f64>> {
    let l = LFunction::new(chi)?;
    Ok(set.zeros.par_iter().map(|z| l.eval_critical(z.value).norm()).collect())
}
