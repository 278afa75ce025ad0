//! Low-lying zero diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::find::ZeroSet;
use crate::characters::{character_group, CharacterLabel};
use crate::error::{Error, Result};

/// Number of stored ordinates indistinguishable from zero at their precision.
pub fn multiplicity_at_half(set: &ZeroSet) -> u64 {
    set.zeros
        .iter()
        .filter(|z| z.value.abs() < 10f64.powi(-(z.digits as i32)))
        .count() as u64
}

/// `(sin(2 pi x) / (2 pi x))^2`.
pub fn fejer(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let u = TAU * x;
    (u.sin() / u).powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerDensity {
    pub q: u64,
    pub height: f64,
    pub value: f64,
    /// Bound on the omitted `|gamma| > T` part, from the zero-counting density.
    pub tail_bound: f64,
    pub characters: usize,
}

/// `sum_{chi != chi_0 mod q} sum_{|gamma_chi| <= T} f((log q / 2 pi) gamma)`,
/// where `f` is the Fejer kernel and the zeros of `chi` are those of its
/// primitive inducing character. `sets` maps primitive labels to zero sets of
/// nonnegative ordinates; the negative ordinates of `chi` are the positive
/// ones of its conjugate.
pub fn fejer_density(q: u64, sets: &BTreeMap<CharacterLabel, ZeroSet>, height: f64) -> Result<FejerDensity> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("density needs q >= 3, got {q}")));
    }
    let lq = (q as f64).ln();
    let scale = lq / TAU;
    let side = |label: &CharacterLabel| -> Result<f64> {
        let set = sets
            .get(label)
            .ok_or_else(|| Error::MissingZeros(label.to_string()))?;
        if set.height < height {
            return Err(Error::MissingZeros(format!("{label} only covers T = {}", set.height)));
        }
        Ok(set
            .zeros
            .iter()
            .filter(|z| z.value <= height)
            .map(|z| fejer(scale * z.value))
            .sum())
    };
    let mut value = 0.0;
    let mut tail = 0.0;
    let mut characters = 0;
    for chi in character_group(q)?.iter().filter(|c| !c.is_principal()) {
        let star = chi.primitive_inducing();
        let own = side(&star.label())?;
        let central: f64 = sets[&star.label()]
            .zeros
            .iter()
            .filter(|z| z.value == 0.0)
            .count() as f64;
        let other = if star.is_real() {
            own - central
        } else {
            side(&star.conj().label())?
        };
        value += own + other;
        let qc = star.modulus() as f64;
        // f(scale * g) <= 1 / (log q * g)^2 against the density (1/pi) log(q_chi g / 2 pi)
        tail += ((qc * height / TAU).ln() + 1.0) / (PI * lq * lq * height);
        characters += 1;
    }
    Ok(FejerDensity {
        q,
        height,
        value,
        tail_bound: tail,
        characters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{find_zero_pair, ZeroConfig};

    #[test]
    fn kernel() {
        assert_eq!(fejer(0.0), 1.0);
        assert!(fejer(0.5).abs() < 1e-30);
        assert!((fejer(0.25) - (2.0 / PI).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn mod_4_density() {
        let chi = &character_group(4).unwrap()[1];
        let (set, _) = find_zero_pair(chi, 50.0, 15, &ZeroConfig::default()).unwrap();
        assert_eq!(multiplicity_at_half(&set), 0);
        let mut sets = BTreeMap::new();
        sets.insert(set.label.clone(), set.clone());
        let d = fejer_density(4, &sets, 50.0).unwrap();
        let s = (4f64).ln() / TAU;
        let expect: f64 = 2.0 * set.zeros.iter().map(|z| fejer(s * z.value)).sum::<f64>();
        assert!((d.value - expect).abs() < 1e-14);
        assert!(d.tail_bound > 0.0);
        let empty = fejer_density(4, &sets, 5.0).unwrap();
        assert_eq!(empty.value, 0.0);
    }
}
