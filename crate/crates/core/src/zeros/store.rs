//! Zero tables on disk.
//!
//! CSV, UTF-8, header `q,label,gamma,digits`, rows sorted by `(q, label, gamma)`.
//! Lines starting with `#` are comments; `# height q=<q> label=<label> T=<T>`
//! records the completeness height of a set.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rug::Float;

use super::count::contour_count;
use super::find::{find_zero_pair, residuals, CriticalZero, ZeroConfig, ZeroSet, ZeroStatus};
use super::lfunc::LFunction;
use crate::characters::{CharacterLabel, DirichletCharacter};
use crate::error::{Error, Result};

pub const HEADER: &str = "q,label,gamma,digits";
pub const STORE_ENV: &str = "HOOLEY_ZERO_STORE";

pub fn write_zeros<W: Write>(sets: &[&ZeroSet], mut w: W) -> Result<()> {
    let mut sorted: Vec<&&ZeroSet> = sets.iter().collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label));
    for s in &sorted {
        writeln!(
            w,
            "# height q={} label={} T={}",
            s.label.q,
            s.label.exponent_string(),
            s.height
        )?;
    }
    writeln!(w, "{HEADER}")?;
    for s in sorted {
        for z in &s.zeros {
            writeln!(w, "{},{},{},{}", s.label.q, s.label.exponent_string(), z.gamma, z.digits)?;
        }
    }
    Ok(())
}

pub fn export_zeros(sets: &[&ZeroSet], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_zeros(sets, &mut buf)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, buf)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn schema(line: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        line,
        message: message.into(),
    }
}

fn parse_height(line_no: usize, line: &str) -> Result<Option<(u64, String, f64)>> {
    let body = line.trim_start_matches('#').trim();
    let Some(rest) = body.strip_prefix("height") else {
        return Ok(None);
    };
    let mut q = None;
    let mut label = None;
    let mut t = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("q", v)) => q = v.parse::<u64>().ok(),
            Some(("label", v)) => label = Some(v.to_string()),
            Some(("T", v)) => t = v.parse::<f64>().ok(),
            _ => return Err(schema(line_no, format!("unrecognised height token {tok:?}"))),
        }
    }
    match (q, label, t) {
        (Some(q), Some(l), Some(t)) => Ok(Some((q, l, t))),
        _ => Err(schema(line_no, "height comment needs q=, label= and T=")),
    }
}

/// Parses a zero table. Every set comes back with status `ingested`.
pub fn read_zeros(text: &str) -> Result<Vec<ZeroSet>> {
    let mut heights: BTreeMap<CharacterLabel, f64> = BTreeMap::new();
    let mut sets: BTreeMap<CharacterLabel, Vec<CriticalZero>> = BTreeMap::new();
    let mut seen_header = false;
    let mut last: Option<(CharacterLabel, Float, u32)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some((q, l, t)) = parse_height(line_no, line)? {
                let label = CharacterLabel::parse(q, &l).map_err(|e| schema(line_no, e.to_string()))?;
                heights.insert(label, t);
            }
            continue;
        }
        if !seen_header {
            if line != HEADER {
                return Err(schema(line_no, format!("expected header {HEADER:?}")));
            }
            seen_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(schema(line_no, format!("expected 4 columns, found {}", cols.len())));
        }
        let q: u64 = cols[0]
            .parse()
            .map_err(|_| schema(line_no, format!("bad modulus {:?}", cols[0])))?;
        let label = CharacterLabel::parse(q, cols[1]).map_err(|e| schema(line_no, e.to_string()))?;
        let chi = DirichletCharacter::from_label(&label).map_err(|e| schema(line_no, e.to_string()))?;
        if !chi.is_primitive() {
            return Err(schema(line_no, format!("character {label} is not primitive")));
        }
        let digits: u32 = cols[3]
            .parse()
            .map_err(|_| schema(line_no, format!("bad digit count {:?}", cols[3])))?;
        if digits == 0 {
            return Err(schema(line_no, "digit count must be positive"));
        }
        let zero = CriticalZero::new(label.clone(), cols[2].to_string(), digits)
            .map_err(|e| schema(line_no, e.to_string()))?;
        if !zero.value.is_finite() || zero.value < 0.0 {
            return Err(schema(line_no, "ordinates must be finite and nonnegative"));
        }
        let g = zero.gamma_float();
        if let Some((pl, pg, pd)) = &last {
            if label < *pl {
                return Err(schema(line_no, "rows not sorted by (q, label)"));
            }
            if label == *pl {
                let gap = Float::with_val(g.prec(), &g - pg);
                let res = 10f64.powi(-(digits.min(*pd) as i32));
                if gap < 0 {
                    return Err(schema(line_no, "ordinates not sorted ascending"));
                }
                if gap <= res {
                    return Err(schema(line_no, "duplicate ordinate within stated precision"));
                }
            }
        }
        last = Some((label.clone(), g, digits));
        sets.entry(label).or_default().push(zero);
    }
    if !seen_header {
        return Err(schema(1, format!("missing header {HEADER:?}")));
    }
    Ok(sets
        .into_iter()
        .map(|(label, zeros)| {
            let top = zeros.last().map_or(0.0, |z| z.value);
            let height = heights.get(&label).copied().unwrap_or(top);
            ZeroSet {
                label,
                zeros,
                height,
                verified_count: None,
                status: ZeroStatus::Ingested,
                diagnostic: None,
            }
        })
        .collect())
}

pub fn ingest_zeros(path: &Path) -> Result<Vec<ZeroSet>> {
    read_zeros(&fs::read_to_string(path)?)
}

/// Checks ingested sets for `chi` (and its conjugate) against the contour
/// count and the double-precision residuals, marking them verified on success.
pub fn verify_pair(chi: &DirichletCharacter, own: &mut ZeroSet, conj: Option<&mut ZeroSet>, height: f64) -> Result<bool> {
    let l = LFunction::new(chi)?;
    let count = contour_count(&l, height);
    let own_n = own.zeros.iter().filter(|z| z.value <= height).count() as u64;
    let central = own.zeros.iter().filter(|z| z.value == 0.0).count() as u64;
    let total = match &conj {
        Some(c) => own_n + c.zeros.iter().filter(|z| z.value <= height && z.value > 0.0).count() as u64,
        None => 2 * own_n - central,
    };
    let mut ok = count.count == total && count.defect() <= 0.1 && own.height >= height;
    ok &= residuals(chi, own)?.iter().all(|&r| r < 1e-8);
    let mut conj = conj;
    if let Some(c) = conj.as_deref_mut() {
        ok &= c.height >= height;
        ok &= residuals(&chi.conj(), c)?.iter().all(|&r| r < 1e-8);
    }
    let status = if ok { ZeroStatus::Verified } else { ZeroStatus::Unverified };
    for s in std::iter::once(own).chain(conj) {
        *s = s.truncated(height);
        s.verified_count = Some(count.count);
        s.status = status;
        s.diagnostic = (!ok).then(|| format!("contour count {:.4} vs {total} stored ordinates", count.raw));
    }
    Ok(ok)
}

/// Directory of per-character zero tables; one writer at a time.
#[derive(Debug, Clone)]
pub struct ZeroStore {
    dir: PathBuf,
}

impl ZeroStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The store named by `HOOLEY_ZERO_STORE`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(STORE_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, label: &CharacterLabel) -> PathBuf {
        self.dir
            .join(format!("zeros_q{}_{}.csv", label.q, label.exponent_string()))
    }

    pub fn load(&self, label: &CharacterLabel) -> Result<Option<ZeroSet>> {
        let path = self.path_for(label);
        if !path.exists() {
            return Ok(None);
        }
        let sets = ingest_zeros(&path)?;
        Ok(sets.into_iter().find(|s| &s.label == label))
    }

    pub fn save(&self, set: &ZeroSet) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&set.label);
        export_zeros(&[set], &path)?;
        Ok(path)
    }

    /// Verified zeros of `chi` and its conjugate up to `height` with at least
    /// `digits` places: loaded and re-verified when the store covers them,
    /// otherwise computed and saved.
    pub fn get_pair(
        &self,
        chi: &DirichletCharacter,
        height: f64,
        digits: u32,
        config: &ZeroConfig,
    ) -> Result<(ZeroSet, Option<ZeroSet>)> {
        let real = chi.is_real();
        let own = self.load(&chi.label())?;
        let conj = if real { None } else { self.load(&chi.conj().label())? };
        let covers = |s: &Option<ZeroSet>| {
            s.as_ref()
                .is_some_and(|s| s.height >= height && s.min_digits() >= digits)
        };
        if covers(&own) && (real || covers(&conj)) {
            let mut own = own.unwrap();
            let mut conj = conj;
            if verify_pair(chi, &mut own, conj.as_mut(), height)? {
                return Ok((own, conj));
            }
        }
        let (own, conj) = find_zero_pair(chi, height, digits, config)?;
        if own.status == ZeroStatus::Verified {
            self.save(&own)?;
            if let Some(c) = &conj {
                self.save(c)?;
            }
        }
        Ok((own, conj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character_group;

    #[test]
    fn round_trip() {
        let chi = &character_group(4).unwrap()[1];
        let set = find_zero_pair(chi, 20.0, 25, &ZeroConfig::default()).unwrap().0;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.csv");
        export_zeros(&[&set], &path).unwrap();
        let back = ingest_zeros(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].status, ZeroStatus::Ingested);
        assert_eq!(back[0].zeros, set.zeros);
        assert_eq!(back[0].height, set.height);
    }

    #[test]
    fn schema_errors_name_lines() {
        let unsorted = "q,label,gamma,digits\n4,1,10.2,3\n4,1,6.02,3\n";
        match read_zeros(unsorted) {
            Err(Error::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_zeros("q,gamma\n"), Err(Error::Schema { line: 1, .. })));
        assert!(matches!(read_zeros("q,label,gamma,digits\n4,1,abc,3\n"), Err(Error::Schema { line: 2, .. })));
        assert!(matches!(read_zeros("q,label,gamma,digits\n8,1.0,3.1,3\n"), Err(Error::Schema { line: 2, .. })));
        let dup = "q,label,gamma,digits\n4,1,6.0209,4\n4,1,6.02090,4\n";
        assert!(matches!(read_zeros(dup), Err(Error::Schema { line: 3, .. })));
    }

    #[test]
    fn store_reuses_verified_sets() {
        let dir = tempfile::tempdir().unwrap();
        let store = ZeroStore::new(dir.path());
        let g = character_group(5).unwrap();
        let (a, b) = store.get_pair(&g[1], 20.0, 20, &ZeroConfig::default()).unwrap();
        assert!(store.path_for(&g[3].label()).exists());
        let (a2, b2) = store.get_pair(&g[1], 15.0, 20, &ZeroConfig::default()).unwrap();
        assert_eq!(a2.status, ZeroStatus::Verified);
        assert_eq!(a2.zeros, a.truncated(15.0).zeros);
        assert_eq!(b2.unwrap().zeros, b.unwrap().truncated(15.0).zeros);
    }
}
