//! Conjugation-closed character families with controlled conductors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, euler_phi, mobius, CompensatedSum};
use crate::characters::{character_group, CharacterLabel, DirichletCharacter};
use crate::error::{Error, Result};

fn log2q(q: u64) -> f64 {
    (q as f64).ln().ln()
}

/// `(1/phi(q)) sum_{chi mod q} (log q_chi - log q)^2`, one character at a time.
pub fn conductor_variance(q: u64) -> Result<f64> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("conductor variance needs q >= 3, got {q}")));
    }
    let lq = (q as f64).ln();
    let mut s = CompensatedSum::new();
    for chi in character_group(q)? {
        let d = (chi.conductor() as f64).ln() - lq;
        s.add(d * d);
    }
    Ok(s.value() / euler_phi(q) as f64)
}

/// Number of primitive characters modulo `d`: `sum_{e | d} mu(e) phi(d/e)`.
pub fn primitive_count(d: u64) -> u64 {
    let total: i64 = divisors(d)
        .into_iter()
        .map(|e| mobius(e) * euler_phi(d / e) as i64)
        .sum();
    total as u64
}

/// The same statistic grouped by conductor, without building characters.
pub fn conductor_variance_grouped(q: u64) -> Result<f64> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("conductor variance needs q >= 3, got {q}")));
    }
    let lq = (q as f64).ln();
    let mut s = CompensatedSum::new();
    for d in divisors(q) {
        let diff = (d as f64).ln() - lq;
        s.add(primitive_count(d) as f64 * diff * diff);
    }
    Ok(s.value() / euler_phi(q) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilySize {
    Max,
    Exact(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterFamily {
    pub q: u64,
    pub members: Vec<CharacterLabel>,
    pub phi_f: usize,
    pub e_q: f64,
    pub w: f64,
    /// Members satisfy `|log q_chi - log q| <= threshold = log log q / w`.
    pub threshold: f64,
    /// Set when the threshold is at least `log q`, so it rules nothing out.
    pub threshold_vacuous: bool,
    pub g: Option<f64>,
    pub f: Option<f64>,
    pub notes: Vec<String>,
}

impl CharacterFamily {
    pub fn characters(&self) -> Result<Vec<DirichletCharacter>> {
        self.members.iter().map(DirichletCharacter::from_label).collect()
    }

    pub fn is_conjugation_closed(&self) -> Result<bool> {
        let set: BTreeSet<CharacterLabel> = self.members.iter().cloned().collect();
        Ok(self
            .characters()?
            .iter()
            .all(|c| set.contains(&c.conj().label())))
    }

    /// A family from explicit labels; rejects sets not closed under conjugation.
    pub fn from_members(q: u64, labels: &[CharacterLabel], w: f64) -> Result<Self> {
        if labels.iter().any(|l| l.q != q) {
            return Err(Error::Family(format!("all members must be characters mod {q}")));
        }
        let mut members: Vec<CharacterLabel> = labels.to_vec();
        members.sort();
        members.dedup();
        let fam = Self::assemble(q, members, w, Vec::new())?;
        if !fam.is_conjugation_closed()? {
            return Err(Error::Family("family is not closed under conjugation".into()));
        }
        Ok(fam)
    }

    /// Every nonprincipal character mod `q`, real ones included.
    pub fn nonprincipal(q: u64) -> Result<Self> {
        let members = character_group(q)?
            .iter()
            .filter(|c| !c.is_principal())
            .map(|c| c.label())
            .collect();
        Self::assemble(q, members, 1.0, Vec::new())
    }

    fn assemble(q: u64, members: Vec<CharacterLabel>, w: f64, notes: Vec<String>) -> Result<Self> {
        let lq = (q as f64).ln();
        let mut e = CompensatedSum::new();
        for l in &members {
            let chi = DirichletCharacter::from_label(l)?;
            e.add(lq - (chi.conductor() as f64).ln());
        }
        let threshold = log2q(q) / w;
        Ok(Self {
            q,
            phi_f: members.len(),
            members,
            e_q: e.value(),
            w,
            threshold,
            threshold_vacuous: threshold >= lq,
            g: None,
            f: None,
            notes,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let fam: Self = serde_json::from_str(text)?;
        if !fam.is_conjugation_closed()? {
            return Err(Error::Family("family is not closed under conjugation".into()));
        }
        Ok(fam)
    }
}

/// Complex characters with `|log q_chi - log q| <= log log q / w`, truncated to
/// `size` by keeping conjugate pairs with the largest conductors first (ties by
/// label).
pub fn select_family(q: u64, w: f64, size: FamilySize) -> Result<CharacterFamily> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("families need q >= 3, got {q}")));
    }
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::InvalidArgument(format!("w must lie in (0, 1], got {w}")));
    }
    if let FamilySize::Exact(n) = size {
        if n % 2 == 1 {
            return Err(Error::Family(format!("family size must be even, got {n}")));
        }
    }
    let lq = (q as f64).ln();
    let threshold = log2q(q) / w;
    let group = character_group(q)?;
    // one representative per conjugate pair: the smaller label
    let mut pairs: Vec<(u64, CharacterLabel, CharacterLabel)> = group
        .iter()
        .filter(|c| !c.is_real())
        .filter(|c| ((c.conductor() as f64).ln() - lq).abs() <= threshold)
        .filter_map(|c| {
            let (a, b) = (c.label(), c.conj().label());
            (a < b).then(|| (c.conductor(), a, b))
        })
        .collect();
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    let survivors = 2 * pairs.len();
    let keep = match size {
        FamilySize::Max => pairs.len(),
        FamilySize::Exact(n) if n > survivors => {
            return Err(Error::Family(format!(
                "requested {n} characters but only {survivors} complex characters mod {q} pass the conductor threshold"
            )))
        }
        FamilySize::Exact(n) => n / 2,
    };
    let mut members: Vec<CharacterLabel> = pairs
        .into_iter()
        .take(keep)
        .flat_map(|(_, a, b)| [a, b])
        .collect();
    members.sort();
    CharacterFamily::assemble(q, members, w, Vec::new())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineFamilyConfig {
    pub epsilon: f64,
    /// Constant in the family-size factor `1 - K (log log q)^{-2}`.
    pub k: f64,
    /// Overrides the default `g(q) = log q`.
    pub g: Option<f64>,
    pub f: Option<f64>,
}

impl Default for PipelineFamilyConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            k: 1.0,
            g: None,
            f: None,
        }
    }
}

/// `Phi_q = 2 floor(phi(q) g(q) / (2 log q) (1 - K (log log q)^{-2}))` with
/// `w(q) = 1 / log log q`.
pub fn pipeline_family_size(q: u64, g: f64, k: f64) -> i64 {
    let l2 = log2q(q);
    let raw = euler_phi(q) as f64 * g / (2.0 * (q as f64).ln()) * (1.0 - k / (l2 * l2));
    2 * raw.floor() as i64
}

pub fn pipeline_family(q: u64, config: &PipelineFamilyConfig) -> Result<CharacterFamily> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("families need q >= 3, got {q}")));
    }
    let lq = (q as f64).ln();
    let g = config.g.unwrap_or(lq);
    let size = pipeline_family_size(q, g, config.k);
    if size < 2 {
        return Err(Error::Family(format!(
            "the family-size formula gives {size} < 2 at q = {q} (log log q = {:.3}, K = {}); \
             use select_family with an explicit size",
            log2q(q),
            config.k
        )));
    }
    let w = (1.0 / log2q(q)).min(1.0);
    let max = select_family(q, w, FamilySize::Max)?;
    let mut notes = Vec::new();
    let fam = if size as usize > max.phi_f {
        notes.push(format!(
            "formula size {size} exceeds the {} eligible complex characters; using all of them",
            max.phi_f
        ));
        max
    } else {
        select_family(q, w, FamilySize::Exact(size as usize))?
    };
    let mut fam = CharacterFamily::assemble(q, fam.members, w, notes)?;
    if fam.threshold_vacuous {
        fam.notes
            .push("conductor threshold is at least log q and excludes nothing".into());
    }
    fam.g = Some(g);
    fam.f = config.f;
    Ok(fam)
}
