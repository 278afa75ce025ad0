use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rug::{Float, Integer, Rational};

use hooley_core::characters::{primitive_characters, CharacterLabel, DirichletCharacter};
use hooley_core::explicit::{r_delta, s_delta_prime_side, EFParams, FamilyZeros};
use hooley_core::family::{pipeline_family, select_family, CharacterFamily, FamilySize, PipelineFamilyConfig};
use hooley_core::pipeline::{
    cross_check, littlewood_demo, mechanism_demo, parse_rational, to_json, write_trajectory_csv, ExperimentConfig,
};
use hooley_core::primes::sieve_tally;
use hooley_core::sync::{sync_brute, sync_bucket, sync_lowest_in_range, BucketMode, SyncProblem};
use hooley_core::variance::{hooley_scan, variance_checked, variance_direct, write_rows_csv, write_windows_csv};
use hooley_core::zeros::{find_zero_pair, write_zeros, ZeroConfig, ZeroStatus, ZeroStore};

#[derive(Parser)]
#[command(name = "hooley", version, about = "Primes in progressions: variances, L-function zeros and synchronized explicit formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// G(x;q) and V(x;q) by sieving, optionally checked against the character side
    Variance {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        parseval_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Hooley ratios over a range of moduli
    HooleyScan {
        #[arg(long, default_value_t = 3)]
        q_min: u64,
        #[arg(long, default_value_t = 50)]
        q_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
        x_grid: Vec<f64>,
        /// CSV of per-(q, x) rows
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of window averages
        #[arg(long)]
        windows: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Zeros of L(s, chi) on the critical line for the primitive characters mod q
    Zeros {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        height: f64,
        #[arg(long, default_value_t = 20)]
        digits: u32,
        /// Only this character, e.g. 5:1
        #[arg(long)]
        label: Option<String>,
        /// Fail unless every set is verified
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a conjugation-closed family of characters
    Family {
        #[arg(long)]
        q: u64,
        /// Conductor control w in (0, 1]
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        /// Even family size; all eligible characters when omitted
        #[arg(long)]
        size: Option<usize>,
        /// Use the size formula with g(q) = log q unless --g is given
        #[arg(long)]
        pipeline: bool,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        g: Option<f64>,
        #[arg(long)]
        f: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smoothed explicit formula R at y = (n + 1) delta, optionally with the prime side
    ExplicitFormula {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        height: f64,
        /// A multiple of delta
        #[arg(long)]
        y: String,
        #[arg(long)]
        prime_side: bool,
        /// Family JSON; all nonprincipal characters mod q when omitted
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = 25)]
        digits: u32,
        #[arg(long)]
        allow_unverified: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Find n <= N with ||n lambda|| small for every frequency in a file
    Synchronize {
        /// One decimal frequency per line; '#' starts a comment
        #[arg(long)]
        frequencies: PathBuf,
        #[arg(long = "M")]
        m: u64,
        #[arg(long = "N")]
        n: String,
        #[arg(long)]
        tolerance: Option<f64>,
        /// "auto" for N^(1/3), or an integer; reports the lowest hit at or above it
        #[arg(long)]
        floor: Option<String>,
        #[arg(long, default_value = "bucket")]
        method: String,
        #[arg(long)]
        window: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synchronize the heaviest zeros and evaluate the explicit formula there
    MechanismDemo {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Most negative values of theta(x, chi)/sqrt(x) and psi(x, chi)/sqrt(x)
    LittlewoodDemo {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Prime side against zero side over a grid of y
    CrossCheck {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
}

#[derive(Args)]
struct Common {
    /// Largest integer the sieve will reach
    #[arg(long)]
    sieve_ceiling: Option<u64>,
}

impl Common {
    fn sieve(&self) -> hooley_core::primes::SieveConfig {
        let mut s = hooley_core::primes::SieveConfig::default();
        if let Some(c) = self.sieve_ceiling {
            s.ceiling = c;
        }
        s
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML file; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long)]
    sieve_ceiling: Option<u64>,
    #[arg(long)]
    zero_store: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    x_ceiling: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    y_grid: Option<Vec<String>>,
    #[arg(long)]
    sync_frequencies: Option<usize>,
    #[arg(long)]
    sync_cubes: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::from_toml(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(q, epsilon, c, delta, digits, sieve_ceiling, x_ceiling, y_grid, sync_frequencies, sync_cubes);
        if self.height.is_some() {
            c.height = self.height;
        }
        if self.zero_store.is_some() {
            c.zero_store = self.zero_store;
        }
        if self.label.is_some() {
            c.label = self.label;
        }
        if self.out.is_some() {
            c.output = self.out;
        }
        if self.trajectory.is_some() {
            c.trajectory = self.trajectory;
        }
        Ok(c)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn label_of(q: u64, s: &str) -> Result<CharacterLabel> {
    let body = match s.split_once(':') {
        Some((m, rest)) => {
            if m.parse::<u64>()? != q {
                bail!("label {s} is not mod {q}");
            }
            rest
        }
        None => s,
    };
    Ok(CharacterLabel::parse(q, body)?)
}

fn read_frequencies(path: &Path) -> Result<Vec<Float>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parsed = Float::parse(line).map_err(|e| anyhow::anyhow!("line {}: {e}", i + 1))?;
        let digits = line.trim_start_matches('-').replace('.', "").len() as u32;
        let prec = ((digits as f64 * 10f64.log2()).ceil() as u32 + 64).max(128);
        out.push(Float::with_val(prec, parsed));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Variance { q, x, parseval_check, common } => {
            let tally = sieve_tally(x, q, &common.sieve())?;
            let r = if parseval_check {
                variance_checked(&tally)?
            } else {
                variance_direct(&tally)?
            };
            emit(None, &to_json(&r)?)?;
        }
        Command::HooleyScan { q_min, q_max, x_grid, out, windows, common } => {
            let scan = hooley_scan(q_min, q_max, &x_grid, &common.sieve())?;
            let mut rows = Vec::new();
            write_rows_csv(&scan, &mut rows)?;
            emit(out.as_deref(), &String::from_utf8(rows)?)?;
            if let Some(w) = windows {
                let mut buf = Vec::new();
                write_windows_csv(&scan, &mut buf)?;
                emit(Some(&w), &String::from_utf8(buf)?)?;
            }
        }
        Command::Zeros { q, height, digits, label, verify, out } => {
            let config = ZeroConfig::default();
            let chars: Vec<DirichletCharacter> = match label {
                Some(l) => vec![DirichletCharacter::from_label(&label_of(q, &l)?)?],
                None => primitive_characters(q)?.into_iter().filter(|c| !c.is_principal()).collect(),
            };
            let store = ZeroStore::from_env();
            let mut sets = Vec::new();
            for chi in &chars {
                if sets.iter().any(|s: &hooley_core::zeros::ZeroSet| s.label == chi.label()) {
                    continue;
                }
                let (own, conj) = match &store {
                    Some(s) => s.get_pair(chi, height, digits, &config)?,
                    None => find_zero_pair(chi, height, digits, &config)?,
                };
                sets.push(own);
                if let Some(c) = conj {
                    if chars.iter().any(|x| x.label() == c.label) {
                        sets.push(c);
                    }
                }
            }
            if verify {
                if let Some(s) = sets.iter().find(|s| s.status != ZeroStatus::Verified) {
                    bail!("{} is {}: {}", s.label, s.status, s.diagnostic.clone().unwrap_or_default());
                }
            }
            sets.sort_by(|a, b| a.label.cmp(&b.label));
            let mut buf = Vec::new();
            write_zeros(&sets.iter().collect::<Vec<_>>(), &mut buf)?;
            emit(out.as_deref(), &String::from_utf8(buf)?)?;
        }
        Command::Family { q, w, size, pipeline, epsilon, g, f, out } => {
            let fam = if pipeline {
                pipeline_family(q, &PipelineFamilyConfig { epsilon, g, f, ..PipelineFamilyConfig::default() })?
            } else {
                select_family(q, w, size.map_or(FamilySize::Max, FamilySize::Exact))?
            };
            emit(out.as_deref(), &fam.to_json()?)?;
        }
        Command::ExplicitFormula { q, delta, height, y, prime_side, family, digits, allow_unverified, out, common } => {
            let fam = match (&family, q) {
                (Some(p), _) => CharacterFamily::from_json(&fs::read_to_string(p)?)?,
                (None, Some(q)) => CharacterFamily::nonprincipal(q)?,
                (None, None) => bail!("give --q or --family"),
            };
            if let Some(q) = q {
                if q != fam.q {
                    bail!("family is mod {}, not {q}", fam.q);
                }
            }
            let delta = parse_rational(&delta)?;
            let y = parse_rational(&y)?;
            let k = hooley_core::pipeline::grid_index(&y, &delta)?;
            let config = ZeroConfig {
                height_ceiling: height.max(ZeroConfig::default().height_ceiling),
                ..ZeroConfig::default()
            };
            let store = ZeroStore::from_env();
            let zeros = FamilyZeros::for_family(&fam, height, digits, &config, store.as_ref())?;
            let params = EFParams {
                c: height * delta.to_f64(),
                delta: delta.clone(),
                height,
                m: 1.0,
                epsilon: 0.0,
                family: fam.clone(),
            };
            let mut v = r_delta(&params, &zeros, &k, allow_unverified)?;
            if prime_side {
                let s = s_delta_prime_side(&fam.characters()?, &delta, &k, &common.sieve())?;
                v.s_normalized = Some(s.s_normalized);
            }
            emit(out.as_deref(), &to_json(&v)?)?;
        }
        Command::Synchronize { frequencies, m, n, tolerance, floor, method, window, out } => {
            let n: Integer = n.parse().context("--N must be an integer")?;
            let mut p = SyncProblem::new(read_frequencies(&frequencies)?, m, n)?;
            if let Some(t) = tolerance {
                p = p.with_tolerance(t);
            }
            let text = if let Some(f) = floor {
                let fl = if f == "auto" { None } else { Some(f.parse::<Integer>().context("--floor")?) };
                to_json(&sync_lowest_in_range(&p, fl.as_ref())?)?
            } else {
                let r = match method.as_str() {
                    "brute" => sync_brute(&p)?,
                    "bucket" => match window {
                        Some(w) => sync_bucket(&p, BucketMode::Streaming { window: w })?,
                        None => sync_bucket(&p, BucketMode::default())?,
                    },
                    other => bail!("unknown method {other}; use bucket or brute"),
                };
                to_json(&r)?
            };
            emit(out.as_deref(), &text)?;
        }
        Command::MechanismDemo { exp } => {
            let c = exp.resolve()?;
            let r = mechanism_demo(&c)?;
            emit(c.output.as_deref(), &to_json(&r)?)?;
        }
        Command::LittlewoodDemo { exp } => {
            let c = exp.resolve()?;
            let q = c.q;
            let label = match &c.label {
                Some(l) => label_of(q, l)?,
                None => primitive_characters(q)?
                    .into_iter()
                    .find(|c| c.is_real() && !c.is_principal())
                    .map(|c| c.label())
                    .context("no real primitive character; pass --label")?,
            };
            let chi = DirichletCharacter::from_label(&label)?;
            let r = littlewood_demo(&chi, c.x_ceiling, &c.sieve())?;
            if let Some(t) = &c.trajectory {
                let mut buf = Vec::new();
                write_trajectory_csv(&r, &mut buf)?;
                fs::write(t, buf)?;
            }
            emit(c.output.as_deref(), &to_json(&r)?)?;
        }
        Command::CrossCheck { exp } => {
            let c = exp.resolve()?;
            let delta = c.delta()?;
            let grid: Vec<Rational> = if c.y_grid.is_empty() {
                (4..=12).map(Rational::from).collect()
            } else {
                c.y_grid.iter().map(|s| parse_rational(s)).collect::<hooley_core::Result<_>>()?
            };
            let store = c.store();
            let r = cross_check(c.q, &grid, &delta, c.height.unwrap_or(150.0), c.digits, &c.sieve(), store.as_ref())?;
            emit(c.output.as_deref(), &to_json(&r)?)?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
