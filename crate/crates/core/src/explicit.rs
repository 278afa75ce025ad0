//! Truncated explicit formulae and the smoothed sum `R_delta(y)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::CompensatedSum;
use crate::characters::{CharacterLabel, DirichletCharacter};
use crate::error::{Error, Result};
use crate::family::CharacterFamily;
use crate::primes::{imprimitive_correction, SieveConfig};
use crate::sync::{decimal_digits, phase_reduce, PHASE_GUARD_DIGITS};
use crate::zeros::{find_zero_pair, CriticalZero, ZeroConfig, ZeroSet, ZeroStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetItem {
    pub name: String,
    pub value: f64,
}

impl BudgetItem {
    fn new(name: &str, value: f64) -> Self {
        BudgetItem {
            name: name.to_string(),
            value,
        }
    }
}

pub fn budget_total(items: &[BudgetItem]) -> f64 {
    items.iter().map(|b| b.value).sum()
}

/// Zeros of one family member: `upper` holds the nonnegative ordinates of the
/// inducing primitive character, `lower` those of its conjugate (negated on use).
#[derive(Debug, Clone)]
pub struct MemberZeros {
    pub character: DirichletCharacter,
    pub upper: ZeroSet,
    pub lower: ZeroSet,
}

impl MemberZeros {
    pub fn height(&self) -> f64 {
        self.upper.height.min(self.lower.height)
    }

    /// `(signed ordinate, zero)` for every zero with `|gamma| <= height`.
    /// A zero at the central point is listed once.
    pub fn signed(&self, height: f64) -> impl Iterator<Item = (f64, &CriticalZero)> {
        let up = self
            .upper
            .zeros
            .iter()
            .filter(move |z| z.value <= height)
            .map(|z| (z.value, z));
        let down = self
            .lower
            .zeros
            .iter()
            .filter(move |z| z.value > 0.0 && z.value <= height)
            .map(|z| (-z.value, z));
        up.chain(down)
    }

    pub fn require_verified(&self, allow_unverified: bool) -> Result<()> {
        self.upper.require_verified(allow_unverified)?;
        self.lower.require_verified(allow_unverified)
    }

    pub fn min_digits(&self) -> u32 {
        self.upper.min_digits().min(self.lower.min_digits())
    }
}

#[derive(Debug, Clone)]
pub struct FamilyZeros {
    pub q: u64,
    pub members: Vec<MemberZeros>,
}

impl FamilyZeros {
    /// Assembles member zeros from sets keyed by primitive label.
    pub fn from_sets(
        q: u64,
        members: &[DirichletCharacter],
        sets: &BTreeMap<CharacterLabel, ZeroSet>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for chi in members {
            let star = chi.primitive_inducing();
            let get = |l: CharacterLabel| {
                sets.get(&l)
                    .cloned()
                    .ok_or_else(|| Error::MissingZeros(l.to_string()))
            };
            let upper = get(star.label())?;
            let lower = if star.is_real() {
                upper.clone()
            } else {
                get(star.conj().label())?
            };
            out.push(MemberZeros {
                character: chi.clone(),
                upper,
                lower,
            });
        }
        Ok(FamilyZeros { q, members: out })
    }

    /// Zeros for every member up to `height`, from `store` when given.
    pub fn compute(
        q: u64,
        members: &[DirichletCharacter],
        height: f64,
        digits: u32,
        config: &ZeroConfig,
        store: Option<&ZeroStore>,
    ) -> Result<Self> {
        let mut sets: BTreeMap<CharacterLabel, ZeroSet> = BTreeMap::new();
        for chi in members {
            let star = chi.primitive_inducing();
            if sets.contains_key(&star.label()) {
                continue;
            }
            let (own, conj) = match store {
                Some(s) => s.get_pair(&star, height, digits, config)?,
                None => find_zero_pair(&star, height, digits, config)?,
            };
            if let Some(c) = conj {
                sets.insert(c.label.clone(), c);
            }
            sets.insert(own.label.clone(), own);
        }
        Self::from_sets(q, members, &sets)
    }

    pub fn for_family(
        family: &CharacterFamily,
        height: f64,
        digits: u32,
        config: &ZeroConfig,
        store: Option<&ZeroStore>,
    ) -> Result<Self> {
        Self::compute(family.q, &family.characters()?, height, digits, config, store)
    }

    pub fn height(&self) -> f64 {
        self.members.iter().map(|m| m.height()).fold(f64::INFINITY, f64::min)
    }

    pub fn require_verified(&self, allow_unverified: bool) -> Result<()> {
        self.members
            .iter()
            .try_for_each(|m| m.require_verified(allow_unverified))
    }

    fn check_height(&self, height: f64) -> Result<()> {
        if self.height() < height {
            return Err(Error::MissingZeros(format!(
                "zeros cover T = {}, need {height}",
                self.height()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPsi {
    pub label: CharacterLabel,
    pub x: f64,
    pub height: f64,
    /// `-sum_{|gamma| <= T} x^rho / rho` minus the imprimitive correction.
    pub value: Complex64,
    pub zeros_used: usize,
    /// `x (log(q x T))^2 / T`.
    pub budget: f64,
}

pub fn truncated_explicit_psi(
    member: &MemberZeros,
    x: f64,
    height: f64,
    allow_unverified: bool,
) -> Result<TruncatedPsi> {
    member.require_verified(allow_unverified)?;
    if member.height() < height {
        return Err(Error::MissingZeros(format!("{} only covers T = {}", member.upper.label, member.height())));
    }
    if x < 2.0 {
        return Err(Error::InvalidArgument(format!("x = {x} below 2")));
    }
    let lx = x.ln();
    let sx = x.sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut used = 0;
    for (g, _) in member.signed(height) {
        let rho = Complex64::new(0.5, g);
        sum += Complex64::from_polar(sx, g * lx) / rho;
        used += 1;
    }
    let chi = &member.character;
    let q = chi.modulus() as f64;
    Ok(TruncatedPsi {
        label: chi.label(),
        x,
        height,
        value: -sum - imprimitive_correction(chi, x),
        zeros_used: used,
        budget: x * (q * x * height).ln().powi(2) / height,
    })
}

/// Parameters of the smoothed explicit formula.
#[derive(Debug, Clone)]
pub struct EFParams {
    pub delta: Rational,
    pub height: f64,
    pub m: f64,
    pub c: f64,
    pub epsilon: f64,
    pub family: CharacterFamily,
}

impl EFParams {
    pub fn delta_f64(&self) -> f64 {
        self.delta.to_f64()
    }

    /// `T = C / delta`, `M = C log T`.
    pub fn from_c(family: CharacterFamily, delta: Rational, c: f64, epsilon: f64) -> Result<Self> {
        let d = delta.to_f64();
        if !(d > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("need delta, C > 0 (got {d}, {c})")));
        }
        let height = (Rational::from_f64(c).expect("finite") / &delta).to_f64();
        Ok(EFParams {
            delta,
            height,
            m: c * height.ln(),
            c,
            epsilon,
            family,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EFValue {
    /// `y = (n + 1) delta` as an exact fraction.
    pub y: String,
    pub y_f64: f64,
    pub n_plus_one: String,
    pub delta: String,
    pub height: f64,
    pub r_normalized: f64,
    pub imag_residual: f64,
    pub s_normalized: Option<f64>,
    /// `-Phi log(q^2 / delta) / 2`.
    pub main_term_prediction: f64,
    pub error_budget: Vec<BudgetItem>,
    pub central_zero: bool,
    pub zeros_used: usize,
}

fn exact_y(n_plus_one: &Integer, delta: &Rational) -> Rational {
    Rational::from(delta * n_plus_one)
}

/// `-sum_{chi} sum_{|gamma| <= T} e^{i y gamma} / rho^2 (i sin(delta gamma) / delta + cos(delta gamma) / 2)`
/// at `y = (n + 1) delta`, the normalized smoothed zero sum. Phases are reduced
/// exactly, so `y` may be arbitrarily large.
pub fn r_delta(params: &EFParams, zeros: &FamilyZeros, n_plus_one: &Integer, allow_unverified: bool) -> Result<EFValue> {
    zeros.require_verified(allow_unverified)?;
    zeros.check_height(params.height)?;
    if *n_plus_one < 0 {
        return Err(Error::InvalidArgument("y must be nonnegative".into()));
    }
    let d = params.delta_f64();
    let height = params.height;
    let need = decimal_digits(n_plus_one) + PHASE_GUARD_DIGITS;
    let small = n_plus_one.to_u64().filter(|&v| v < 1 << 20);
    let y_exact = exact_y(n_plus_one, &params.delta);
    let y = y_exact.to_f64();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut used = 0;
    let mut central = false;
    for m in &zeros.members {
        for (g, z) in m.signed(height) {
            if z.value.abs() < 10f64.powi(-(z.digits as i32)) {
                central = true;
            }
            let phase = match small {
                // y gamma below 2^20 * 1e3: a double product loses < 1e-9
                Some(_) if y * z.value < 1e6 => y * g,
                _ => {
                    if z.digits < need {
                        return Err(Error::InsufficientPrecision {
                            available: z.digits,
                            required: need,
                        });
                    }
                    let p = phase_reduce(n_plus_one, &z.gamma_float(), z.digits, &params.delta)?;
                    if g < 0.0 {
                        -p
                    } else {
                        p
                    }
                }
            };
            let rho = Complex64::new(0.5, g);
            let dg = d * g;
            let kernel = Complex64::new((dg).cos() / 2.0, (dg).sin() / d);
            let t = Complex64::from_polar(1.0, phase) * kernel / (rho * rho);
            re.add(t.re);
            im.add(t.im);
            used += 1;
        }
    }
    let phi = zeros.members.len() as f64;
    let q = zeros.q as f64;
    Ok(EFValue {
        y: y_exact.to_string(),
        y_f64: y,
        n_plus_one: n_plus_one.to_string(),
        delta: params.delta.to_string(),
        height,
        r_normalized: -re.value(),
        imag_residual: im.value().abs(),
        s_normalized: None,
        main_term_prediction: -phi * (q * q / d).ln() / 2.0,
        error_budget: vec![BudgetItem::new("tail log(qT)/(delta T)", phi * (q * height).ln() / (d * height))],
        central_zero: central,
        zeros_used: used,
    })
}

/// `|R(T) - R(2T)|` against `5 Phi log(qT) / (delta T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationShift {
    pub shift: f64,
    pub bound: f64,
}

pub fn truncation_shift(params: &EFParams, zeros: &FamilyZeros, n_plus_one: &Integer) -> Result<TruncationShift> {
    let a = r_delta(params, zeros, n_plus_one, false)?;
    let mut doubled = params.clone();
    doubled.height *= 2.0;
    let b = r_delta(&doubled, zeros, n_plus_one, false)?;
    let q = zeros.q as f64;
    let t = params.height;
    Ok(TruncationShift {
        shift: (a.r_normalized - b.r_normalized).abs(),
        bound: 5.0 * zeros.members.len() as f64 * (q * t).ln() / (params.delta_f64() * t),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeSide {
    pub y: String,
    pub s_normalized: f64,
    pub imag_residual: f64,
    pub x_max: f64,
}

/// `(1 / 2 delta) int_{y - delta}^{y + delta} sum_chi (theta(e^t, chi) - 1_{chi_0} e^t) dt / e^{y/2}`,
/// integrated exactly prime by prime: a prime `p <= e^{y+delta}` contributes
/// `chi(p) log p (y + delta - max(y - delta, log p))`.
pub fn s_delta_prime_side(
    members: &[DirichletCharacter],
    delta: &Rational,
    n_plus_one: &Integer,
    config: &SieveConfig,
) -> Result<PrimeSide> {
    let q = members
        .first()
        .map(|c| c.modulus())
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    if members.iter().any(|c| c.modulus() != q) {
        return Err(Error::InvalidArgument("members must share a modulus".into()));
    }
    let y_exact = exact_y(n_plus_one, delta);
    let y = y_exact.to_f64();
    let d = delta.to_f64();
    let (lo, hi) = (y - d, y + d);
    let x_max = hi.exp();
    let top = config.check(x_max)?;
    let qu = q as usize;
    let partial: Vec<Vec<CompensatedSum>> = config.sieve().map_segments(2, top, |primes| {
        let mut acc = vec![CompensatedSum::new(); qu];
        for &p in primes {
            let lp = (p as f64).ln();
            if lp > hi {
                continue;
            }
            acc[(p % q) as usize].add(lp * (hi - lp.max(lo)));
        }
        acc
    });
    let mut by_residue = vec![CompensatedSum::new(); qu];
    for seg in partial {
        for (a, s) in by_residue.iter_mut().zip(seg) {
            a.merge(&s);
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for chi in members {
        for (a, s) in by_residue.iter().enumerate() {
            let v = s.value();
            if v != 0.0 {
                total += chi.eval_u64(a as u64) * v;
            }
        }
        if chi.is_principal() {
            total -= hi.exp() - lo.exp();
        }
    }
    let scale = 1.0 / (2.0 * d * (y / 2.0).exp());
    Ok(PrimeSide {
        y: y_exact.to_string(),
        s_normalized: total.re * scale,
        imag_residual: (total.im * scale).abs(),
        x_max,
    })
}

/// `|S - R|` against a budget for the terms the zero sum leaves out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub value: EFValue,
    pub difference: f64,
    pub budget: Vec<BudgetItem>,
    pub pass: bool,
}

/// Budget for `|S_normalized - R_normalized|` per character: prime powers
/// (`psi - theta <= 1.43 sqrt(x)`), the zeros above `T`, and the trivial-zero
/// and constant terms of the explicit formula.
pub fn agreement_budget(q: u64, phi: usize, delta: f64, height: f64, y: f64) -> Vec<BudgetItem> {
    let phi = phi as f64;
    let lq = (q as f64).ln();
    vec![
        BudgetItem::new("prime powers", phi * 1.43 * (delta / 2.0).exp()),
        BudgetItem::new("tail", phi * 2.0 * ((q as f64 * height).ln() + 1.0) / (delta * height)),
        BudgetItem::new("trivial zeros", phi * (y + 2.0) * (lq + 1.0) * (-y / 2.0).exp()),
    ]
}

pub fn agreement(
    params: &EFParams,
    zeros: &FamilyZeros,
    n_plus_one: &Integer,
    config: &SieveConfig,
) -> Result<Agreement> {
    let mut value = r_delta(params, zeros, n_plus_one, false)?;
    let members: Vec<DirichletCharacter> = zeros.members.iter().map(|m| m.character.clone()).collect();
    let s = s_delta_prime_side(&members, &params.delta, n_plus_one, config)?;
    value.s_normalized = Some(s.s_normalized);
    let budget = agreement_budget(zeros.q, members.len(), params.delta_f64(), params.height, value.y_f64);
    let difference = (s.s_normalized - value.r_normalized).abs();
    let pass = difference <= budget_total(&budget);
    Ok(Agreement {
        value,
        difference,
        budget,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTermCheck {
    pub q: u64,
    pub delta: f64,
    pub height: f64,
    pub lhs: f64,
    /// `(Phi / 2) log(q / delta)`.
    pub prediction: f64,
    pub ratio: f64,
    pub error_terms: Vec<BudgetItem>,
}

/// `delta sum_chi sum_{0 <= gamma <= T} (2 gamma^4 / |rho|^4) (sin(delta gamma) / (delta gamma))^2`.
pub fn zero_sum_main_term(zeros: &FamilyZeros, delta: f64, height: f64, e_q: f64) -> Result<MainTermCheck> {
    zeros.check_height(height)?;
    let mut acc = CompensatedSum::new();
    for m in &zeros.members {
        for z in m.upper.zeros.iter().filter(|z| z.value <= height) {
            let g = z.value;
            if g == 0.0 {
                continue;
            }
            let r2 = 0.25 + g * g;
            let s = (delta * g).sin() / (delta * g);
            acc.add(2.0 * g.powi(4) / (r2 * r2) * s * s);
        }
    }
    let phi = zeros.members.len() as f64;
    let q = zeros.q as f64;
    let lhs = delta * acc.value();
    let prediction = phi / 2.0 * (q / delta).ln();
    let lt = height.ln();
    let lqt = (q * height).ln();
    Ok(MainTermCheck {
        q: zeros.q,
        delta,
        height,
        lhs,
        prediction,
        ratio: lhs / prediction,
        error_terms: vec![
            BudgetItem::new("delta log(qT) log T", phi * delta * lqt * lt),
            BudgetItem::new("delta^(1/2) log(q/delta)", phi * delta.sqrt() * (q / delta).ln()),
            BudgetItem::new("(E_q + Phi) log(T delta)", (e_q + phi) * (height * delta).ln().abs()),
            BudgetItem::new("log(qT)/(delta T)", phi * lqt / (delta * height)),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    pub budget: Vec<BudgetItem>,
    pub budget_total: f64,
    /// Budget below half of `|value|`.
    pub dominated: bool,
}

/// `-Phi log(q^2/delta) / 2` with its error terms, all constants taken as 1.
pub fn final_r_prediction(q: u64, phi: usize, e_q: f64, delta: f64, height: f64, m: f64, y: f64) -> Prediction {
    let phi_f = phi as f64;
    let qf = q as f64;
    let lq = qf.ln();
    let lqt = (qf * height).ln();
    let y_term = if y.is_finite() {
        (y.ln() + lq.ln() - y / 2.0).exp()
    } else {
        0.0
    };
    let budget = vec![
        BudgetItem::new("log(qT)/(delta T)", phi_f * lqt / (delta * height)),
        BudgetItem::new("(E_q/Phi + 1) log(T delta)", phi_f * (e_q / phi_f + 1.0) * (height * delta).ln().abs()),
        BudgetItem::new("y log q / e^(y/2)", phi_f * y_term),
        BudgetItem::new("log(qT) log T / M", phi_f * lqt * height.ln() / m),
        BudgetItem::new("delta^(1/2) log(qT)", phi_f * delta.sqrt() * lqt),
        BudgetItem::new("log q / log log q", phi_f * lq / lq.ln().max(f64::MIN_POSITIVE)),
    ];
    let value = -phi_f * (qf * qf / delta).ln() / 2.0;
    let total = budget_total(&budget);
    Prediction {
        value,
        dominated: total < value.abs() / 2.0,
        budget,
        budget_total: total,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CSearch {
    /// Smallest `C` on the grid with the budget below half the main term.
    pub c0: Option<f64>,
    pub best_c: f64,
    pub best_ratio: f64,
    pub grid: Vec<(f64, f64)>,
}

/// Scans `C` over `10..=1000` (`T = C/delta`, `M = C log T`) and records the
/// budget-to-main-term ratio at each step.
pub fn search_c(q: u64, phi: usize, e_q: f64, delta: f64, y: f64) -> CSearch {
    let mut grid = Vec::new();
    let mut c0 = None;
    let mut best = (10.0, f64::INFINITY);
    let mut c: f64 = 10.0;
    while c <= 1000.0 + 1e-9 {
        let t = c / delta;
        let p = final_r_prediction(q, phi, e_q, delta, t, c * t.ln(), y);
        let ratio = p.budget_total / p.value.abs();
        if ratio < 0.5 && c0.is_none() {
            c0 = Some(c);
        }
        if ratio < best.1 {
            best = (c, ratio);
        }
        grid.push((c, ratio));
        c = (c * 1.25 * 1e6).round() / 1e6;
    }
    CSearch {
        c0,
        best_c: best.0,
        best_ratio: best.1,
        grid,
    }
}

/// `R` with every `n delta gamma` at `0 mod 2 pi`, so `e^{i y gamma} = e^{i delta gamma}`:
/// the value a perfectly synchronized `y = (n + 1) delta` would give.
pub fn perfect_sync_r(zeros: &FamilyZeros, delta: f64, height: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for m in &zeros.members {
        for (g, _) in m.signed(height) {
            let rho = Complex64::new(0.5, g);
            let kernel = Complex64::new((delta * g).cos() / 2.0, (delta * g).sin() / delta);
            acc.add((Complex64::from_polar(1.0, delta * g) * kernel / (rho * rho)).re);
        }
    }
    -acc.value()
}

/// Ordinates of the zeros in the family up to `height`, deduplicated across
/// conjugates, with the weight `sin^2(delta gamma) / (delta |rho|^2)` each carries
/// in a synchronized `R`, heaviest first.
pub fn weighted_frequencies(zeros: &FamilyZeros, delta: f64, height: f64) -> Vec<(Float, f64)> {
    let mut out: Vec<(f64, Float, f64)> = Vec::new();
    for m in &zeros.members {
        for z in m.upper.zeros.iter().filter(|z| z.value > 0.0 && z.value <= height) {
            let g = z.value;
            let w = (delta * g).sin().powi(2) / (delta * (0.25 + g * g));
            if !out.iter().any(|(h, _, _)| (h - g).abs() < 1e-12) {
                out.push((g, z.gamma_float(), w));
            }
        }
    }
    out.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.total_cmp(&b.0)));
    out.into_iter().map(|(_, f, w)| (f, w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character_group;
    use crate::primes::{character_sum, sieve_tally};

    fn nonprincipal(q: u64, height: f64) -> FamilyZeros {
        let chars: Vec<_> = character_group(q).unwrap().into_iter().filter(|c| !c.is_principal()).collect();
        FamilyZeros::compute(q, &chars, height, 20, &ZeroConfig::default(), None).unwrap()
    }

    #[test]
    fn psi_against_sieve() {
        let z = nonprincipal(4, 100.0);
        let m = &z.members[0];
        for x in [1000.0, 5000.0] {
            let t = truncated_explicit_psi(m, x, 100.0, false).unwrap();
            let tally = sieve_tally(x, 4, &SieveConfig::default()).unwrap();
            let s = character_sum(&m.character, &tally).unwrap();
            assert!((t.value - s.psi).norm() < 3.0 * x.sqrt(), "x={x}: {} vs {}", t.value, s.psi);
            assert!(t.value.im.abs() < 1e-9);
        }
    }

    #[test]
    fn r_is_real_and_matches_prime_side() {
        let z = nonprincipal(5, 150.0);
        let fam = CharacterFamily::nonprincipal(5).unwrap();
        let p = EFParams {
            delta: Rational::from((1, 4)),
            height: 150.0,
            m: 10.0,
            c: 37.5,
            epsilon: 0.1,
            family: fam,
        };
        for np1 in [16u32, 32, 48] {
            let a = agreement(&p, &z, &Integer::from(np1), &SieveConfig::default()).unwrap();
            assert!(a.value.imag_residual < 1e-10);
            assert!(a.pass, "y={} S={:?} R={} budget={:?}", a.value.y, a.value.s_normalized, a.value.r_normalized, a.budget);
        }
    }

    #[test]
    fn prime_side_by_quadrature() {
        // Simpson on the step function, refined until the jumps are resolved
        let q = 5u64;
        let chars: Vec<_> = character_group(q).unwrap().into_iter().skip(1).collect();
        let delta = Rational::from((1, 2));
        let np1 = Integer::from(7);
        let s = s_delta_prime_side(&chars, &delta, &np1, &SieveConfig::default()).unwrap();
        let primes = SieveConfig::default().sieve().primes_up_to(100);
        let f = |t: f64| -> f64 {
            let x = t.exp();
            chars
                .iter()
                .map(|c| {
                    primes
                        .iter()
                        .filter(|&&p| (p as f64) <= x)
                        .map(|&p| c.eval_u64(p).re * (p as f64).ln())
                        .sum::<f64>()
                })
                .sum()
        };
        #[allow(clippy::too_many_arguments)]
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = (a + b) / 2.0;
            let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || ((left + right - whole).abs() <= 15.0 * tol && b - a < 1e-3) {
                return left + right;
            }
            simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (a, b) = (3.0, 4.0);
        let (fa, fm, fb) = (f(a), f(3.5), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let integral = simpson(&f, a, b, fa, fm, fb, whole, 1e-12, 48);
        let expect = integral / (2.0 * 0.5 * (3.5f64 / 2.0).exp());
        assert!((s.s_normalized - expect).abs() < 1e-8, "{} vs {expect}", s.s_normalized);
    }

    #[test]
    fn capacity() {
        let chars: Vec<_> = character_group(5).unwrap().into_iter().skip(1).collect();
        let cfg = SieveConfig {
            ceiling: 1000,
            ..SieveConfig::default()
        };
        let e = s_delta_prime_side(&chars, &Rational::from(1), &Integer::from(10), &cfg);
        assert!(matches!(e, Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn large_y_needs_digits() {
        let z = nonprincipal(5, 30.0);
        let p = EFParams::from_c(CharacterFamily::nonprincipal(5).unwrap(), Rational::from((1, 10)), 3.0, 0.1).unwrap();
        let big = Integer::from(10u64.pow(12));
        let e = r_delta(&p, &z, &big, false);
        assert!(matches!(e, Err(Error::InsufficientPrecision { .. })), "{e:?}");
        let v = r_delta(&p, &z, &Integer::from(1000), false).unwrap();
        assert!(v.imag_residual < 1e-10);
        assert!(!v.central_zero);
    }

    #[test]
    fn prediction_budget() {
        let p = final_r_prediction(5, 2, 0.0, 0.1, 300.0, 171.0, f64::INFINITY);
        assert!((p.value + (250f64).ln()).abs() < 1e-12);
        assert_eq!(p.budget.len(), 6);
        let s = search_c(5, 2, 0.0, 0.1, f64::INFINITY);
        assert!(s.grid.len() > 10);
        assert_eq!(s.grid[0].0, 10.0);
    }
}
