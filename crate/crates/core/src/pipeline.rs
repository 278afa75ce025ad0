//! End-to-end experiments and their JSON reports.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;

use log::info;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::euler_phi;
use crate::characters::{character_group, CharacterLabel, DirichletCharacter};
use crate::error::{Error, Result};
use crate::explicit::{
    agreement, final_r_prediction, perfect_sync_r, r_delta, search_c, weighted_frequencies, Agreement,
    BudgetItem, CSearch, EFParams, FamilyZeros, Prediction,
};
use crate::family::{pipeline_family, select_family, CharacterFamily, FamilySize, PipelineFamilyConfig};
use crate::primes::{higher_prime_powers, SieveConfig, SIEVE_VERSION};
use crate::sync::{default_floor, sync_brute, sync_lowest_in_range, SyncProblem};
use crate::zeros::{write_zeros, ZeroConfig, ZeroSet, ZeroStore};

pub const REPORT_SCHEMA: &str = "hooley-report/1";

/// Parses `"1/10"`, `"0.1"` or `"3"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: Integer = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        return Ok(Rational::from((digits, den)));
    }
    s.parse::<Rational>().map_err(|_| bad())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    MechanismDemo,
    LittlewoodDemo,
    HooleyScan,
    CrossCheck,
}

/// Experiment settings, read from TOML; every key is optional.
///
/// ```toml
/// mode = "mechanism-demo"
/// q = 5
/// epsilon = 0.1
/// c = 30.0
/// delta = "1/10"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub q: u64,
    pub q_min: u64,
    pub q_max: u64,
    pub epsilon: f64,
    pub c: f64,
    pub delta: String,
    pub sieve_ceiling: u64,
    pub zero_store: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    /// Zero digits; raised automatically to cover the phase-reduction contract.
    pub digits: u32,
    /// Synchronized frequencies in the desk-scale run, heaviest first.
    pub sync_frequencies: usize,
    /// Cubes per axis in the desk-scale run.
    pub sync_cubes: u64,
    /// Largest `y` for the prime-side variant of the mechanism demo.
    pub small_y_max: f64,
    pub small_y_min: f64,
    pub label: Option<String>,
    pub x_ceiling: f64,
    pub x_grid: Vec<f64>,
    /// `y` values for cross-check; each must be a multiple of delta.
    pub y_grid: Vec<String>,
    pub height: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::MechanismDemo,
            q: 5,
            q_min: 3,
            q_max: 50,
            epsilon: 0.1,
            c: 30.0,
            delta: "1/10".into(),
            sieve_ceiling: crate::primes::DEFAULT_SIEVE_CEILING,
            zero_store: None,
            output: None,
            trajectory: None,
            digits: 25,
            sync_frequencies: 4,
            sync_cubes: 8,
            small_y_max: 18.0,
            small_y_min: 8.0,
            label: None,
            x_ceiling: 1e7,
            x_grid: vec![1e3, 1e4, 1e5, 1e6],
            y_grid: Vec::new(),
            height: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn delta(&self) -> Result<Rational> {
        let d = parse_rational(&self.delta)?;
        if d <= 0 || d >= 1 {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {d}")));
        }
        Ok(d)
    }

    pub fn sieve(&self) -> SieveConfig {
        SieveConfig {
            ceiling: self.sieve_ceiling,
            ..SieveConfig::default()
        }
    }

    pub fn store(&self) -> Option<ZeroStore> {
        self.zero_store.clone().map(ZeroStore::new).or_else(ZeroStore::from_env)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetDigest {
    pub label: String,
    pub zeros: usize,
    pub height: f64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sieve_version: u32,
    pub zero_sets: Vec<ZeroSetDigest>,
}

pub fn digest(set: &ZeroSet) -> Result<ZeroSetDigest> {
    let mut buf = Vec::new();
    write_zeros(&[set], &mut buf)?;
    Ok(ZeroSetDigest {
        label: set.label.to_string(),
        zeros: set.len(),
        height: set.height,
        sha256: format!("{:x}", Sha256::digest(&buf)),
    })
}

fn provenance(zeros: Option<&FamilyZeros>) -> Result<Provenance> {
    let mut sets: Vec<&ZeroSet> = Vec::new();
    if let Some(z) = zeros {
        for m in &z.members {
            for s in [&m.upper, &m.lower] {
                if !sets.iter().any(|t| t.label == s.label) {
                    sets.push(s);
                }
            }
        }
    }
    sets.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(Provenance {
        sieve_version: SIEVE_VERSION,
        zero_sets: sets.into_iter().map(digest).collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncSummary {
    pub method: String,
    pub frequencies: usize,
    pub cubes: u64,
    pub tolerance: f64,
    pub n_max: String,
    pub floor: String,
    pub n: String,
    pub fractional_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeSideCheck {
    pub sync: SyncSummary,
    pub agreement: Agreement,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismReport {
    pub schema: String,
    pub q: u64,
    pub phi_q: u64,
    pub family: CharacterFamily,
    pub delta: String,
    pub epsilon: f64,
    pub c: f64,
    pub height: f64,
    pub m: f64,
    /// Frequencies `delta gamma / 2 pi` with `0 < gamma <= T`.
    pub frequencies: usize,
    /// `log10` of `N = (2 pi M)^k` needed to synchronize them all at tolerance `(2 pi M)^-1`.
    pub full_sync_log10_n: f64,
    pub sync: SyncSummary,
    pub y: String,
    pub r_normalized: f64,
    pub imag_residual: f64,
    /// `R_normalized / (Phi log(q^2/delta))`.
    pub ratio: f64,
    /// `-((1 - 3 epsilon)/4)^(1/2)`.
    pub target: f64,
    pub threshold: f64,
    /// Ratio at perfect synchronization of every zero up to `T`.
    pub perfect_sync_ratio: f64,
    pub prediction: Prediction,
    pub c_search: CSearch,
    /// `(Phi/phi(q)) (log(q^2/delta))^2 (1 - 2 epsilon) / 4`.
    pub predicted_variance_lower_bound: f64,
    pub prime_side: Option<PrimeSideCheck>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

pub const MECHANISM_THRESHOLD: f64 = -0.4;

fn demo_family(q: u64, epsilon: f64) -> Result<(CharacterFamily, Vec<String>)> {
    let cfg = PipelineFamilyConfig {
        epsilon,
        ..PipelineFamilyConfig::default()
    };
    match pipeline_family(q, &cfg) {
        Ok(f) => Ok((f, Vec::new())),
        Err(Error::Family(msg)) => {
            let fam = select_family(q, 1.0, FamilySize::Max)?;
            if fam.phi_f == 0 {
                return Err(Error::Family(format!(
                    "no complex characters mod {q}; the demo needs a conjugate pair (try q = 5)"
                )));
            }
            Ok((fam, vec![format!("pipeline family unavailable ({msg}); using all complex characters")]))
        }
        Err(e) => Err(e),
    }
}

fn sync_frequencies(
    zeros: &FamilyZeros,
    delta: &Rational,
    height: f64,
    count: usize,
) -> Vec<Float> {
    let d = delta.to_f64();
    weighted_frequencies(zeros, d, height)
        .into_iter()
        .take(count)
        .map(|(g, _)| {
            let prec = g.prec() + 64;
            let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
            Float::with_val(prec, &g * delta) / two_pi
        })
        .collect()
}

/// Synchronizes the heaviest zeros, evaluates `R` at `y = (n + 1) delta`
/// over every zero up to `T`, and compares against the predicted main term.
pub fn mechanism_demo(config: &ExperimentConfig) -> Result<MechanismReport> {
    let q = config.q;
    let delta = config.delta()?;
    let d = delta.to_f64();
    let (family, mut notes) = demo_family(q, config.epsilon)?;
    notes.extend(family.notes.iter().cloned());
    let params = EFParams::from_c(family.clone(), delta.clone(), config.c, config.epsilon)?;
    let height = params.height;
    let zcfg = ZeroConfig {
        height_ceiling: height.max(ZeroConfig::default().height_ceiling),
        ..ZeroConfig::default()
    };
    let store = config.store();
    info!("zeros for {} characters mod {q} to T = {height}", family.phi_f);
    let zeros = FamilyZeros::for_family(&family, height, config.digits, &zcfg, store.as_ref())?;

    let all = weighted_frequencies(&zeros, d, height).len();
    let full_cubes = (TAU * params.m).ceil();
    let full_sync_log10_n = all as f64 * full_cubes.log10();
    notes.push(format!(
        "full synchronization needs N ~ 10^{full_sync_log10_n:.0}; synchronizing the {} heaviest of {all} frequencies",
        config.sync_frequencies
    ));

    let k = config.sync_frequencies.max(1);
    let lambdas = sync_frequencies(&zeros, &delta, height, k);
    let cubes = config.sync_cubes;
    let n_max = Integer::from(50u64 * cubes.pow(k as u32));
    let problem = SyncProblem::new(lambdas, cubes, n_max.clone())?;
    let hit = sync_lowest_in_range(&problem, None)?;
    let sync = SyncSummary {
        method: "bucket".into(),
        frequencies: problem.k(),
        cubes,
        tolerance: problem.tolerance,
        n_max: n_max.to_string(),
        floor: default_floor(&n_max).to_string(),
        n: hit.n.to_string(),
        fractional_error: hit.fractional_error,
    };
    let n_plus_one = Integer::from(hit.n) + 1u32;
    let value = r_delta(&params, &zeros, &n_plus_one, false)?;
    if value.central_zero {
        notes.push("a zero at the central point was encountered".into());
    }
    let phi = family.phi_f as f64;
    let scale = phi * ((q * q) as f64 / d).ln();
    let ratio = value.r_normalized / scale;
    let perfect = perfect_sync_r(&zeros, d, height) / scale;
    let prediction = final_r_prediction(q, family.phi_f, family.e_q, d, height, params.m, value.y_f64);
    let c_search = search_c(q, family.phi_f, family.e_q, d, value.y_f64);
    if c_search.c0.is_none() {
        notes.push(format!(
            "no C in 10..1000 brings the budget below half the main term (best {:.3} at C = {})",
            c_search.best_ratio, c_search.best_c
        ));
    }
    let phi_q = euler_phi(q);
    let predicted = phi / phi_q as f64 * ((q * q) as f64 / d).ln().powi(2) * (1.0 - 2.0 * config.epsilon) / 4.0;

    let prime_side = if config.small_y_max > 0.0 {
        Some(small_variant(config, &params, &zeros, &delta)?)
    } else {
        None
    };
    let verdict = Verdict::from_bool(
        ratio <= MECHANISM_THRESHOLD && prime_side.as_ref().is_none_or(|p| p.verdict == Verdict::Pass),
    );
    Ok(MechanismReport {
        schema: REPORT_SCHEMA.into(),
        q,
        phi_q,
        delta: delta.to_string(),
        epsilon: config.epsilon,
        c: config.c,
        height,
        m: params.m,
        frequencies: all,
        full_sync_log10_n,
        sync,
        y: value.y.clone(),
        r_normalized: value.r_normalized,
        imag_residual: value.imag_residual,
        ratio,
        target: -((1.0 - 3.0 * config.epsilon) / 4.0).sqrt(),
        threshold: MECHANISM_THRESHOLD,
        perfect_sync_ratio: perfect,
        prediction,
        c_search,
        predicted_variance_lower_bound: predicted,
        prime_side,
        verdict,
        notes,
        provenance: provenance(Some(&zeros))?,
        family,
    })
}

/// A brute-force synchronization with `y <= small_y_max`, checked against the
/// sieved prime side.
fn small_variant(
    config: &ExperimentConfig,
    params: &EFParams,
    zeros: &FamilyZeros,
    delta: &Rational,
) -> Result<PrimeSideCheck> {
    let d = delta.to_f64();
    let top = Integer::from((Rational::from_f64(config.small_y_max).expect("finite") / delta).floor_ref()) - 1u32;
    let floor = Integer::from((Rational::from_f64(config.small_y_min).expect("finite") / delta).ceil_ref()) - 1u32;
    if top < 1 || floor > top {
        return Err(Error::InvalidArgument(format!(
            "no n with {} <= (n + 1) delta <= {}",
            config.small_y_min, config.small_y_max
        )));
    }
    let lambdas = sync_frequencies(zeros, delta, params.height, 2);
    let problem = SyncProblem::new(lambdas, 3, top.clone())?;
    let res = sync_brute(&problem)?;
    let n = res
        .hits
        .iter()
        .copied()
        .find(|&h| h >= floor)
        .ok_or_else(|| Error::SyncMiss {
            floor: floor.to_string(),
            n: top.to_string(),
            hits: res.hits.len(),
            bound: problem.count_lower_bound(),
        })?;
    let n_plus_one = Integer::from(n) + 1u32;
    let agreement = agreement(params, zeros, &n_plus_one, &config.sieve())?;
    info!("small variant: y = {}, |S - R| = {:.4}", agreement.value.y, agreement.difference);
    let _ = d;
    Ok(PrimeSideCheck {
        sync: SyncSummary {
            method: res.method,
            frequencies: problem.k(),
            cubes: problem.m,
            tolerance: problem.tolerance,
            n_max: top.to_string(),
            floor: floor.to_string(),
            n: n.to_string(),
            fractional_error: problem.fractional_error(&Integer::from(n)),
        },
        verdict: Verdict::from_bool(agreement.pass),
        agreement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub x: u64,
    pub theta: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LittlewoodReport {
    pub schema: String,
    pub q: u64,
    pub label: String,
    pub x_ceiling: f64,
    /// `min Re theta(x, chi) / sqrt x` and where it occurs.
    pub min_theta: f64,
    pub argmin_theta: u64,
    pub min_psi: f64,
    pub argmin_psi: u64,
    pub jumps: u64,
    pub provenance: Provenance,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Trajectory points kept: every jump below this count, then a log-spaced sample
/// plus each new minimum.
const TRAJECTORY_FULL: usize = 2000;

/// Scans the prime powers up to `x_ceiling` for the most negative values of
/// `Re theta(x, chi)/sqrt x` and `Re psi(x, chi)/sqrt x`. Both sums are
/// constant between prime powers, so a negative minimum sits at a jump.
pub fn littlewood_demo(chi: &DirichletCharacter, x_ceiling: f64, config: &SieveConfig) -> Result<LittlewoodReport> {
    let x = config.check(x_ceiling)?;
    let primes = config.sieve().primes_up_to(x);
    let powers = higher_prime_powers(x);
    let (mut theta, mut psi) = (0.0f64, 0.0f64);
    let (mut min_t, mut arg_t) = (f64::INFINITY, 0u64);
    let (mut min_p, mut arg_p) = (f64::INFINITY, 0u64);
    let mut traj = Vec::new();
    let mut next_sample = 1.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    let mut jumps = 0u64;
    loop {
        let (n, p, prime) = match (primes.get(i), powers.get(j)) {
            (Some(&a), Some(&(b, pb))) if b < a => {
                j += 1;
                (b, pb, false)
            }
            (Some(&a), _) => {
                i += 1;
                (a, a, true)
            }
            (None, Some(&(b, pb))) => {
                j += 1;
                (b, pb, false)
            }
            (None, None) => break,
        };
        let v = chi.eval_u64(n).re * (p as f64).ln();
        psi += v;
        if prime {
            theta += v;
        }
        jumps += 1;
        let s = (n as f64).sqrt();
        let (t, ps) = (theta / s, psi / s);
        let mut record = traj.len() < TRAJECTORY_FULL && jumps as usize <= TRAJECTORY_FULL;
        if t < min_t {
            min_t = t;
            arg_t = n;
            record = true;
        }
        if ps < min_p {
            min_p = ps;
            arg_p = n;
            record = true;
        }
        if n as f64 >= next_sample {
            record = true;
            next_sample = n as f64 * 1.01;
        }
        if record {
            traj.push(TrajectoryPoint { x: n, theta: t, psi: ps });
        }
    }
    Ok(LittlewoodReport {
        schema: REPORT_SCHEMA.into(),
        q: chi.modulus(),
        label: chi.label().to_string(),
        x_ceiling,
        min_theta: min_t,
        argmin_theta: arg_t,
        min_psi: min_p,
        argmin_psi: arg_p,
        jumps,
        provenance: provenance(None)?,
        trajectory: traj,
    })
}

pub fn write_trajectory_csv<W: Write>(report: &LittlewoodReport, mut w: W) -> Result<()> {
    writeln!(w, "# littlewood trajectory v1 label={}", report.label)?;
    writeln!(w, "x,theta_over_sqrt_x,psi_over_sqrt_x")?;
    for p in &report.trajectory {
        writeln!(w, "{},{:.12e},{:.12e}", p.x, p.theta, p.psi)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckRow {
    pub y: String,
    pub s_normalized: f64,
    pub r_normalized: f64,
    pub difference: f64,
    pub budget: Vec<BudgetItem>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub schema: String,
    pub q: u64,
    pub delta: String,
    pub height: f64,
    pub members: Vec<CharacterLabel>,
    pub rows: Vec<CrossCheckRow>,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

/// `y / delta` as an integer, or an error when `y` is off the grid.
pub fn grid_index(y: &Rational, delta: &Rational) -> Result<Integer> {
    let k = Rational::from(y / delta);
    if *k.denom() != 1 {
        return Err(Error::InvalidArgument(format!("y = {y} is not a multiple of delta = {delta}")));
    }
    Ok(k.numer().clone())
}

/// Prime side against zero side over the nonprincipal characters mod `q`.
pub fn cross_check(
    q: u64,
    y_grid: &[Rational],
    delta: &Rational,
    height: f64,
    digits: u32,
    sieve: &SieveConfig,
    store: Option<&ZeroStore>,
) -> Result<CrossCheckReport> {
    let family = CharacterFamily::nonprincipal(q)?;
    let members: Vec<DirichletCharacter> = character_group(q)?.into_iter().filter(|c| !c.is_principal()).collect();
    let mut rows = Vec::new();
    let mut zeros = None;
    if !y_grid.is_empty() {
        let zcfg = ZeroConfig {
            height_ceiling: height.max(ZeroConfig::default().height_ceiling),
            ..ZeroConfig::default()
        };
        let z = FamilyZeros::compute(q, &members, height, digits, &zcfg, store)?;
        let params = EFParams {
            delta: delta.clone(),
            height,
            m: 1.0,
            c: (Rational::from(delta * 1) * Rational::from_f64(height).expect("finite")).to_f64(),
            epsilon: 0.0,
            family: family.clone(),
        };
        for y in y_grid {
            let a = agreement(&params, &z, &grid_index(y, delta)?, sieve)?;
            rows.push(CrossCheckRow {
                y: a.value.y.clone(),
                s_normalized: a.value.s_normalized.unwrap_or(f64::NAN),
                r_normalized: a.value.r_normalized,
                difference: a.difference,
                budget: a.budget,
                verdict: Verdict::from_bool(a.pass),
            });
        }
        zeros = Some(z);
    }
    Ok(CrossCheckReport {
        schema: REPORT_SCHEMA.into(),
        q,
        delta: delta.to_string(),
        height,
        members: family.members.clone(),
        verdict: Verdict::from_bool(rows.iter().all(|r| r.verdict == Verdict::Pass)),
        rows,
        provenance: provenance(zeros.as_ref())?,
    })
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/10").unwrap(), Rational::from((1, 10)));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::from((1, 4)));
        assert_eq!(parse_rational("3").unwrap(), 3);
        assert!(parse_rational("0.x").is_err());
        assert_eq!(grid_index(&Rational::from(8), &Rational::from((1, 4))).unwrap(), 32);
        assert!(grid_index(&Rational::from((1, 3)), &Rational::from((1, 4))).is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = ExperimentConfig::from_toml("mode = \"cross-check\"\nq = 3\ndelta = \"0.5\"\n").unwrap();
        assert_eq!(c.mode, Mode::CrossCheck);
        assert_eq!(c.delta().unwrap(), Rational::from((1, 2)));
        assert_eq!(c.c, 30.0);
        assert!(ExperimentConfig::from_toml("nonsense = 1").is_err());
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn mod_4_has_no_pair() {
        let c = ExperimentConfig {
            q: 4,
            ..ExperimentConfig::default()
        };
        match mechanism_demo(&c) {
            Err(Error::Family(m)) => assert!(m.contains("q = 5")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_littlewood() {
        let chi = &character_group(4).unwrap()[1];
        let r = littlewood_demo(chi, 10.0, &SieveConfig::default()).unwrap();
        // 2,3,4,5,7,8,9
        assert_eq!(r.jumps, 7);
        assert!(r.trajectory.iter().filter(|p| [2, 3, 5, 7].contains(&p.x)).count() <= 4);
        assert!((r.min_psi - (-(3f64).ln() / 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn empty_cross_check() {
        let r = cross_check(3, &[], &Rational::from((1, 2)), 150.0, 20, &SieveConfig::default(), None).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.verdict, Verdict::Pass);
    }
}
