//! On-disk cache of residue tallies.
//!
//! Layout (little-endian): magic `HTLY`, format version u32, sieve version u32,
//! q u64, x_floor u64, x f64, higher_total f64, then `q` entries of
//! (theta f64, higher f64, count u64), then a SHA-256 of everything before it.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::tally::{sieve_tally, PrimeTally, SieveConfig, SIEVE_VERSION};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"HTLY";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct TallyCache {
    dir: PathBuf,
}

impl TallyCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, q: u64, x_floor: u64) -> PathBuf {
        self.dir
            .join(format!("tally_q{q}_x{x_floor}_v{SIEVE_VERSION}.bin"))
    }

    /// Cached tally, or `None` if absent. Corrupt or stale files are errors.
    pub fn load(&self, q: u64, x_floor: u64) -> Result<Option<PrimeTally>> {
        let path = self.path_for(q, x_floor);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(&path)?;
        decode(&bytes).map(Some)
    }

    pub fn store(&self, tally: &PrimeTally) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(tally.q, tally.x_floor);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, encode(tally))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Loads the tally if cached, otherwise sieves and stores it.
    pub fn get_or_compute(&self, x: f64, q: u64, config: &SieveConfig) -> Result<PrimeTally> {
        let x_floor = config.check(x)?;
        if let Some(mut t) = self.load(q, x_floor)? {
            t.x = x;
            return Ok(t);
        }
        let t = sieve_tally(x, q, config)?;
        self.store(&t)?;
        Ok(t)
    }
}

pub fn encode(t: &PrimeTally) -> Vec<u8> {
    let mut out = Vec::with_capacity(48 + 24 * t.q as usize + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&t.sieve_version.to_le_bytes());
    out.extend_from_slice(&t.q.to_le_bytes());
    out.extend_from_slice(&t.x_floor.to_le_bytes());
    out.extend_from_slice(&t.x.to_le_bytes());
    out.extend_from_slice(&t.higher_total.to_le_bytes());
    for r in 0..t.q as usize {
        out.extend_from_slice(&t.theta[r].to_le_bytes());
        out.extend_from_slice(&t.higher[r].to_le_bytes());
        out.extend_from_slice(&t.prime_counts[r].to_le_bytes());
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Cache("truncated file".into()))?;
        self.pos = end;
        Ok(slice.try_into().unwrap())
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode(bytes: &[u8]) -> Result<PrimeTally> {
    if bytes.len() < 32 + 44 {
        return Err(Error::Cache("truncated file".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let mut r = Reader { bytes: body, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let fmt = r.u32()?;
    if fmt != FORMAT_VERSION {
        return Err(Error::Cache(format!("format version {fmt}, expected {FORMAT_VERSION}")));
    }
    let sieve_version = r.u32()?;
    if sieve_version != SIEVE_VERSION {
        return Err(Error::Cache(format!(
            "sieve version {sieve_version}, expected {SIEVE_VERSION}"
        )));
    }
    let q = r.u64()?;
    let x_floor = r.u64()?;
    let x = r.f64()?;
    let higher_total = r.f64()?;
    if body.len() != 44 + 24 * q as usize {
        return Err(Error::Cache("length does not match modulus".into()));
    }
    let mut theta = Vec::with_capacity(q as usize);
    let mut higher = Vec::with_capacity(q as usize);
    let mut prime_counts = Vec::with_capacity(q as usize);
    for _ in 0..q {
        theta.push(r.f64()?);
        higher.push(r.f64()?);
        prime_counts.push(r.u64()?);
    }
    Ok(PrimeTally {
        x,
        x_floor,
        q,
        theta,
        higher,
        prime_counts,
        higher_total,
        sieve_version,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TallyCache::new(dir.path());
        let cfg = SieveConfig::default();
        let a = cache.get_or_compute(12_345.5, 12, &cfg).unwrap();
        assert!(cache.path_for(12, 12_345).exists());
        let b = cache.get_or_compute(12_345.5, 12, &cfg).unwrap();
        assert_eq!(a, b);
        for r in 0..12 {
            assert_eq!(a.theta[r].to_bits(), b.theta[r].to_bits());
        }
    }

    #[test]
    fn corruption_detected() {
        let t = sieve_tally(1000.0, 5, &SieveConfig::default()).unwrap();
        let mut bytes = encode(&t);
        assert_eq!(decode(&bytes).unwrap(), t);
        bytes[50] ^= 1;
        assert!(matches!(decode(&bytes), Err(Error::Cache(_))));
        assert!(matches!(decode(&bytes[..20]), Err(Error::Cache(_))));
    }
}
