//! Zero counting by the argument principle.

use std::f64::consts::{E, PI, TAU};

use num_complex::Complex64;

use super::lfunc::LFunction;

/// Result of the contour count `N(T) = #{rho : |Im rho| <= T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourCount {
    pub raw: f64,
    pub count: u64,
    pub evaluations: usize,
}

impl ContourCount {
    /// Distance of the raw value from the nearest integer.
    pub fn defect(&self) -> f64 {
        (self.raw - self.raw.round()).abs()
    }
}

/// Continuous change of `arg L` along the segment `from -> to`.
fn track_arg(l: &LFunction, from: Complex64, to: Complex64, evals: &mut usize) -> f64 {
    let mut total = 0.0;
    let mut a = 0.0f64;
    let mut va = l.eval(from);
    *evals += 1;
    let mut h = 1.0 / 64.0;
    while a < 1.0 {
        let b = (a + h).min(1.0);
        let vb = l.eval(from + (to - from) * b);
        let mid = l.eval(from + (to - from) * (0.5 * (a + b)));
        *evals += 2;
        let d_full = (vb / va).arg();
        let d_split = (mid / va).arg() + (vb / mid).arg();
        if d_full.abs() > PI / 8.0 || (d_full - d_split).abs() > 1e-9 {
            h /= 2.0;
            if h < 1e-12 {
                // a zero sits on the contour; take the split value
                total += d_split;
                a = b;
                va = vb;
            }
            continue;
        }
        total += d_full;
        a = b;
        va = vb;
        h = (h * 1.5).min(1.0 / 16.0);
    }
    total
}

/// `N(T)` for a nontrivial primitive character.
///
/// By the functional equation the count is `(1/pi)` times the change of
/// `arg Lambda` along `1/2 - iT -> 2 - iT -> 2 + iT -> 1/2 + iT`. On `Re s = 2`
/// the value of `L` lies in the right half plane, so only the horizontal legs
/// need tracking.
pub fn contour_count(l: &LFunction, t: f64) -> ContourCount {
    let mut evals = 0usize;
    let bottom = track_arg(l, Complex64::new(0.5, -t), Complex64::new(2.0, -t), &mut evals);
    let lo = l.eval(Complex64::new(2.0, -t));
    let hi = l.eval(Complex64::new(2.0, t));
    evals += 2;
    let right = hi.arg() - lo.arg();
    let top = track_arg(l, Complex64::new(2.0, t), Complex64::new(0.5, t), &mut evals);
    let raw = (2.0 * l.gamma_phase(t) + bottom + right + top) / PI;
    ContourCount {
        raw,
        count: raw.round().max(0.0) as u64,
        evaluations: evals,
    }
}

/// `(T/pi) log(q T / (2 pi e))`, the main term for zeros with `|gamma| <= T`.
pub fn rvm_main_term(q: u64, t: f64) -> f64 {
    (t / PI) * (q as f64 * t / (TAU * E)).ln()
}

/// Effective error allowance `5 log(q (T + 2))`.
pub fn rvm_allowance(q: u64, t: f64) -> f64 {
    5.0 * (q as f64 * (t + 2.0)).ln()
}
