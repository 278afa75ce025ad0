//! Variances of primes in progressions and the Hooley ratio.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, CompensatedSum};
use crate::characters::{character_group, CharacterLabel};
use crate::error::{Error, Result};
use crate::primes::{character_sum, sieve_tallies, CharacterSum, PrimeTally, SieveConfig};

pub const CSV_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub q: u64,
    pub x: f64,
    pub g: f64,
    pub v: f64,
    pub hooley_ratio: f64,
    pub parseval_residual_g: Option<f64>,
    pub parseval_residual_v: Option<f64>,
    /// `|theta(x, chi) - 1_{chi = chi_0} x|^2 / phi(q)`, in character order.
    pub per_character_contributions: Vec<(CharacterLabel, f64)>,
    /// Set when `x < q`, outside the range where the variance is usually studied.
    pub x_below_q: bool,
}

fn check_q(q: u64) -> Result<()> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("variance needs q >= 3, got {q}")));
    }
    Ok(())
}

fn squared_deviations<I: Iterator<Item = f64>>(values: I, mean: f64) -> f64 {
    let mut s = CompensatedSum::new();
    for v in values {
        let d = v - mean;
        s.add(d * d);
    }
    s.value()
}

/// `G` and `V` straight from the residue tallies.
pub fn variance_direct(tally: &PrimeTally) -> Result<VarianceReport> {
    let q = tally.q;
    check_q(q)?;
    let phi = euler_phi(q) as f64;
    let x = tally.x;
    let g = squared_deviations(tally.theta_by_residue().into_iter().map(|(_, t)| t), x / phi);
    let psi = tally.psi_by_residue();
    let mut total = CompensatedSum::new();
    psi.iter().for_each(|&(_, v)| total.add(v));
    let v = squared_deviations(psi.into_iter().map(|(_, p)| p), total.value() / phi);
    Ok(VarianceReport {
        q,
        x,
        g,
        v,
        hooley_ratio: g / (x * (q as f64).ln()),
        parseval_residual_g: None,
        parseval_residual_v: None,
        per_character_contributions: Vec::new(),
        x_below_q: x < q as f64,
    })
}

/// `G` and `V` from the character sums, via orthogonality.
pub fn variance_parseval(sums: &[CharacterSum]) -> Result<VarianceReport> {
    let first = sums
        .first()
        .ok_or_else(|| Error::InvalidArgument("no character sums supplied".into()))?;
    let q = first.label.q;
    check_q(q)?;
    let x = first.x;
    let phi = euler_phi(q);
    if sums.iter().any(|s| s.label.q != q) {
        return Err(Error::InvalidArgument("character sums mix moduli".into()));
    }
    if sums.iter().any(|s| s.x != x) {
        return Err(Error::InvalidArgument("character sums taken at different x".into()));
    }
    let mut labels: Vec<&CharacterLabel> = sums.iter().map(|s| &s.label).collect();
    labels.sort();
    labels.dedup();
    if labels.len() as u64 != phi || sums.len() as u64 != phi {
        return Err(Error::IncompleteCharacters {
            q,
            got: labels.len(),
            expected: phi,
        });
    }
    let principal = |l: &CharacterLabel| l.exponents.iter().all(|&e| e == 0);

    let mut g = CompensatedSum::new();
    let mut v = CompensatedSum::new();
    let mut contributions = Vec::with_capacity(sums.len());
    for s in sums {
        let c = if principal(&s.label) {
            (s.theta.re - x).powi(2) + s.theta.im.powi(2)
        } else {
            v.add(s.psi.norm_sqr());
            s.theta.norm_sqr()
        } / phi as f64;
        g.add(c);
        contributions.push((s.label.clone(), c));
    }
    let g = g.value();
    Ok(VarianceReport {
        q,
        x,
        g,
        v: v.value() / phi as f64,
        hooley_ratio: g / (x * (q as f64).ln()),
        parseval_residual_g: None,
        parseval_residual_v: None,
        per_character_contributions: contributions,
        x_below_q: x < q as f64,
    })
}

/// Both routes, with the character-side report carrying the residuals.
pub fn variance_checked(tally: &PrimeTally) -> Result<VarianceReport> {
    let direct = variance_direct(tally)?;
    let sums = character_group(tally.q)?
        .iter()
        .map(|chi| character_sum(chi, tally))
        .collect::<Result<Vec<_>>>()?;
    let mut report = variance_parseval(&sums)?;
    report.parseval_residual_g = Some((direct.g - report.g).abs());
    report.parseval_residual_v = Some((direct.v - report.v).abs());
    report.g = direct.g;
    report.v = direct.v;
    report.hooley_ratio = direct.hooley_ratio;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub q: u64,
    pub x: f64,
    pub g: f64,
    pub v: f64,
    pub hooley_ratio: f64,
    pub x_below_q: bool,
}

/// `(1/Q) sum_{Q < q <= 2Q} G(x;q) / (x (log log log x)^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub big_q: u64,
    pub x: f64,
    pub average: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HooleyScan {
    pub rows: Vec<ScanRow>,
    pub windows: Vec<ScanWindow>,
}

fn log3(x: f64) -> Option<f64> {
    let l = x.ln().ln().ln();
    (l.is_finite() && l > 0.0).then_some(l)
}

/// Variance over every `(q, x)` cell with `q` in `q_min..=q_max`, plus the
/// windowed averages for each `Q` whose window `(Q, 2Q]` lies inside the range.
pub fn hooley_scan(q_min: u64, q_max: u64, x_grid: &[f64], config: &SieveConfig) -> Result<HooleyScan> {
    let q_min = q_min.max(3);
    if q_max < q_min || x_grid.is_empty() {
        return Ok(HooleyScan::default());
    }
    let moduli: Vec<u64> = (q_min..=q_max).collect();
    let mut rows = Vec::new();
    for &x in x_grid {
        let tallies = sieve_tallies(x, &moduli, config)?;
        let cells = tallies
            .par_iter()
            .map(|t| {
                variance_direct(t).map(|r| ScanRow {
                    q: r.q,
                    x: r.x,
                    g: r.g,
                    v: r.v,
                    hooley_ratio: r.hooley_ratio,
                    x_below_q: r.x_below_q,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(cells);
    }
    let mut windows = Vec::new();
    for big_q in q_min - 1..=q_max / 2 {
        for &x in x_grid {
            let average = log3(x).map(|l| {
                let mut s = CompensatedSum::new();
                rows.iter()
                    .filter(|r| r.x == x && r.q > big_q && r.q <= 2 * big_q)
                    .for_each(|r| s.add(r.g / (x * l * l)));
                s.value() / big_q as f64
            });
            windows.push(ScanWindow { big_q, x, average });
        }
    }
    Ok(HooleyScan { rows, windows })
}

pub fn write_rows_csv<W: Write>(scan: &HooleyScan, mut w: W) -> Result<()> {
    writeln!(w, "# hooley-scan rows v{CSV_VERSION}")?;
    writeln!(w, "q,x,G,V,hooley_ratio,x_below_q")?;
    for r in &scan.rows {
        writeln!(w, "{},{},{},{},{},{}", r.q, r.x, r.g, r.v, r.hooley_ratio, r.x_below_q)?;
    }
    Ok(())
}

pub fn write_windows_csv<W: Write>(scan: &HooleyScan, mut w: W) -> Result<()> {
    writeln!(w, "# hooley-scan windows v{CSV_VERSION}")?;
    writeln!(w, "Q,x,average")?;
    for r in &scan.windows {
        let avg = r.average.map(|a| a.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{}", r.big_q, r.x, avg)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_tally;

    fn cfg() -> SieveConfig {
        SieveConfig::default()
    }

    #[test]
    fn hand_examples() {
        let t = sieve_tally(10.0, 3, &cfg()).unwrap();
        let r = variance_direct(&t).unwrap();
        let expect = (7f64.ln() - 5.0).powi(2) + (10f64.ln() - 5.0).powi(2);
        assert!((r.g - expect).abs() < 1e-12);
        assert!((r.g - 16.60).abs() < 0.01);

        let t = sieve_tally(2.0, 3, &cfg()).unwrap();
        let r = variance_direct(&t).unwrap();
        assert!((r.g - (1.0 + (2f64.ln() - 1.0).powi(2))).abs() < 1e-14);
        assert!(variance_direct(&sieve_tally(10.0, 2, &cfg()).unwrap()).is_err());
    }

    #[test]
    fn no_primes_below_two() {
        for q in [3u64, 7, 10] {
            let t = sieve_tally(1.5, q, &cfg()).unwrap();
            let phi = euler_phi(q) as f64;
            let d = variance_direct(&t).unwrap();
            let p = variance_checked(&t).unwrap();
            assert!((d.g - 1.5 * 1.5 / phi).abs() < 1e-14);
            assert!((p.g - d.g).abs() < 1e-14 && p.v == 0.0);
        }
    }

    #[test]
    fn mod_4_two_characters() {
        let t = sieve_tally(10.0, 4, &cfg()).unwrap();
        let sums: Vec<_> = character_group(4)
            .unwrap()
            .iter()
            .map(|c| character_sum(c, &t).unwrap())
            .collect();
        let r = variance_parseval(&sums).unwrap();
        let expect = ((sums[0].theta.re - 10.0).powi(2) + sums[1].theta.norm_sqr()) / 2.0;
        assert!((r.g - expect).abs() < 1e-12);
        let total: f64 = r.per_character_contributions.iter().map(|(_, c)| c).sum();
        assert!((total - r.g).abs() <= 1e-9 * r.g);
        assert!(matches!(variance_parseval(&sums[..1]), Err(Error::IncompleteCharacters { .. })));
    }

    #[test]
    fn parseval_small_grid() {
        for q in 3..=20u64 {
            let t = sieve_tally(10_000.0, q, &cfg()).unwrap();
            let r = variance_checked(&t).unwrap();
            assert!(r.parseval_residual_g.unwrap() <= 1e-9 * r.g, "q={q}");
            assert!(r.parseval_residual_v.unwrap() <= 1e-9 * r.v, "q={q}");
        }
    }

    #[test]
    fn jumps_only_at_primes() {
        let g = |x: f64| variance_direct(&sieve_tally(x, 7, &cfg()).unwrap()).unwrap().g;
        // theta is flat on [90, 97), so G moves only through the x/phi term
        let (a, b) = (g(96.9), g(97.0));
        let (c, d) = (g(96.8), g(96.9));
        assert!((a - b).abs() > 10.0 * (c - d).abs());
    }

    #[test]
    fn scan_layout() {
        let scan = hooley_scan(3, 8, &[10.0, 1e4], &cfg()).unwrap();
        assert_eq!(scan.rows.len(), 12);
        let single = hooley_scan(4, 4, &[10.0], &cfg()).unwrap();
        let direct = variance_direct(&sieve_tally(10.0, 4, &cfg()).unwrap()).unwrap();
        assert_eq!(single.rows[0].g, direct.g);
        assert!(hooley_scan(5, 4, &[10.0], &cfg()).unwrap().rows.is_empty());
        let w = scan.windows.iter().find(|w| w.big_q == 3 && w.x == 1e4).unwrap();
        let l = log3(1e4).unwrap();
        let expect: f64 = scan
            .rows
            .iter()
            .filter(|r| r.x == 1e4 && (4..=6).contains(&r.q))
            .map(|r| r.g / (1e4 * l * l))
            .sum::<f64>()
            / 3.0;
        assert!((w.average.unwrap() - expect).abs() < 1e-12);
        assert!(scan.windows.iter().any(|w| w.x == 10.0 && w.average.is_none()));
        let mut buf = Vec::new();
        write_rows_csv(&scan, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 14);
    }
}
