//! Dirichlet characters modulo `q`.
//!
//! The unit group `(Z/qZ)*` is decomposed by the Chinese remainder theorem
//! into cyclic components: one per odd prime power (generated by a primitive
//! root), and for `2^e` the components `<-1>` (e >= 2) and `<5>` (e >= 3).
//! A character is the exponent vector `(e_1, .., e_r)` with
//! `chi(g_j) = exp(2 pi i e_j / ord_j)`.
//!
//! # Labels
//!
//! Characters are addressed externally by `(q, label)` where `label` is the
//! exponent vector joined by `.` in component order (odd primes ascending,
//! preceded by the `-1` and `5` components of the 2-part). The single
//! character of a modulus with trivial unit group (q = 1, 2) has label `0`.
//! Characters enumerate in lexicographic label order; index 0 is principal.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, inv_mod, lcm, pow_mod, primitive_root};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ComponentKind {
    /// Cyclic group of units modulo an odd prime power.
    OddPrimePower,
    /// The `<-1>` factor of the units modulo `2^e`, `e >= 2`.
    TwoMinusOne,
    /// The `<5>` factor of the units modulo `2^e`, `e >= 3`.
    TwoFive,
}

#[derive(Debug, Clone)]
struct Component {
    kind: ComponentKind,
    prime: u64,
    /// The prime power this component lives on.
    modulus: u64,
    /// Generator modulo `q`, lifted by CRT (congruent to 1 at the other primes).
    generator: u64,
    order: u64,
    /// Discrete log of every residue modulo `modulus`; `u32::MAX` for non-units.
    dlog: Vec<u32>,
}

/// Structure of `(Z/qZ)*` together with the shared root-of-unity table.
#[derive(Debug)]
pub struct ModulusContext {
    q: u64,
    factorization: Vec<(u64, u32)>,
    phi: u64,
    components: Vec<Component>,
    /// Exponent of the group (lcm of component orders).
    exponent: u64,
    roots: Vec<Complex64>,
}

impl ModulusContext {
    pub fn new(q: u64) -> Result<Arc<Self>> {
        if q == 0 {
            return Err(Error::InvalidModulus(q));
        }
        let factorization = factorize(q);
        let mut components = Vec::new();
        for &(p, e) in &factorization {
            let pe = p.pow(e);
            let lift = |g: u64| crt_lift(g, pe, q);
            if p == 2 {
                if e >= 2 {
                    let dlog = (0..pe)
                        .map(|a| match a % 4 {
                            1 => 0,
                            3 => 1,
                            _ => u32::MAX,
                        })
                        .collect();
                    components.push(Component {
                        kind: ComponentKind::TwoMinusOne,
                        prime: 2,
                        modulus: pe,
                        generator: lift(pe - 1),
                        order: 2,
                        dlog,
                    });
                }
                if e >= 3 {
                    let order = pe / 4;
                    let mut five_log = vec![u32::MAX; pe as usize];
                    let mut x = 1u64;
                    for v in 0..order {
                        five_log[x as usize] = v as u32;
                        x = x * 5 % pe;
                    }
                    let dlog = (0..pe)
                        .map(|a| {
                            if a % 2 == 0 {
                                u32::MAX
                            } else if a % 4 == 1 {
                                five_log[a as usize]
                            } else {
                                five_log[(pe - a) as usize]
                            }
                        })
                        .collect();
                    components.push(Component {
                        kind: ComponentKind::TwoFive,
                        prime: 2,
                        modulus: pe,
                        generator: lift(5),
                        order,
                        dlog,
                    });
                }
            } else {
                let mut g = primitive_root(p);
                if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
                    g += p;
                }
                let order = pe / p * (p - 1);
                let mut dlog = vec![u32::MAX; pe as usize];
                let mut x = 1u64;
                for v in 0..order {
                    dlog[x as usize] = v as u32;
                    x = x * g % pe;
                }
                components.push(Component {
                    kind: ComponentKind::OddPrimePower,
                    prime: p,
                    modulus: pe,
                    generator: lift(g),
                    order,
                    dlog,
                });
            }
        }
        let phi = components.iter().map(|c| c.order).product::<u64>();
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        Ok(Arc::new(Self {
            q,
            factorization,
            phi,
            components,
            exponent,
            roots: root_table(exponent),
        }))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    /// Generators modulo `q` with their orders, in component order.
    pub fn generators(&self) -> Vec<(u64, u64)> {
        self.components
            .iter()
            .map(|c| (c.generator, c.order))
            .collect()
    }

    pub fn component_orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.order).collect()
    }

    /// Exponent of the unit group; character values are `exponent`-th roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// The `k`-th power of `exp(2 pi i / exponent)`.
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.exponent) as usize]
    }

    /// Exponent vector of the unit `a` on the generators; `None` if `gcd(a, q) > 1`.
    pub fn discrete_log(&self, a: u64) -> Option<Vec<u64>> {
        let a = a % self.q;
        if gcd(a, self.q) != 1 {
            return None;
        }
        Some(
            self.components
                .iter()
                .map(|c| c.dlog[(a % c.modulus) as usize] as u64)
                .collect(),
        )
    }

    /// Residues `0 <= a < q` coprime to `q`; for `q = 1` the single residue is 0.
    pub fn units(&self) -> Vec<u64> {
        if self.q == 1 {
            return vec![0];
        }
        (1..self.q).filter(|&a| gcd(a, self.q) == 1).collect()
    }
}

fn crt_lift(g: u64, pe: u64, q: u64) -> u64 {
    if pe == q {
        return g % q;
    }
    let rest = q / pe;
    let inv = inv_mod(rest % pe, pe).expect("coprime CRT moduli");
    let k = crate::arith::mul_mod((g + pe - 1) % pe, inv, pe);
    (1 + rest as u128 * k as u128) as u64 % q
}

fn root_table(n: u64) -> Vec<Complex64> {
    let n_us = n as usize;
    let mut roots = vec![Complex64::new(0.0, 0.0); n_us];
    for k in 0..=n_us / 2 {
        let z = if (4 * k) % n_us == 0 {
            match (4 * k / n_us) % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            }
        } else {
            let angle = std::f64::consts::TAU * k as f64 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        };
        roots[k] = z;
        if k != 0 {
            roots[n_us - k] = z.conj();
        }
    }
    roots
}

/// External address of a character.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacterLabel {
    pub q: u64,
    pub exponents: Vec<u64>,
}

impl CharacterLabel {
    pub fn exponent_string(&self) -> String {
        if self.exponents.is_empty() {
            "0".to_string()
        } else {
            self.exponents
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn parse(q: u64, s: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel {
            q,
            label: s.to_string(),
        };
        let exponents: Vec<u64> = s
            .split('.')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Ok(Self { q, exponents })
    }
}

impl fmt::Display for CharacterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.q, self.exponent_string())
    }
}

/// A Dirichlet character modulo `q`, immutable after construction.
#[derive(Clone)]
pub struct DirichletCharacter {
    ctx: Arc<ModulusContext>,
    exponents: Vec<u64>,
    conductor: u64,
    order: u64,
    parity: u8,
    gauss: Arc<OnceLock<Complex64>>,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("label", &self.label().to_string())
            .field("conductor", &self.conductor)
            .field("order", &self.order)
            .field("parity", &self.parity)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.q == other.ctx.q && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    pub fn from_exponents(ctx: &Arc<ModulusContext>, exponents: Vec<u64>) -> Result<Self> {
        let orders = ctx.component_orders();
        let valid = if orders.is_empty() {
            exponents.is_empty() || exponents == [0]
        } else {
            exponents.len() == orders.len() && exponents.iter().zip(&orders).all(|(e, o)| e < o)
        };
        if !valid {
            return Err(Error::InvalidLabel {
                q: ctx.q,
                label: format!("{exponents:?}"),
            });
        }
        let exponents = if orders.is_empty() { vec![] } else { exponents };
        let mut conductor = 1u64;
        let mut two_part = 1u64;
        let mut order = 1u64;
        for (c, &e) in ctx.components.iter().zip(&exponents) {
            let comp_order = c.order / gcd(e, c.order);
            order = lcm(order, comp_order);
            let f = component_conductor(c, e, comp_order);
            if c.prime == 2 {
                // both 2-adic factors live on the same prime power
                two_part = two_part.max(f);
            } else {
                conductor *= f;
            }
        }
        conductor *= two_part;
        let mut chi = Self {
            ctx: ctx.clone(),
            exponents,
            conductor,
            order,
            parity: 0,
            gauss: Arc::new(OnceLock::new()),
        };
        if ctx.q > 2 && chi.root_index(ctx.q - 1) != Some(0) {
            chi.parity = 1;
        }
        Ok(chi)
    }

    pub fn from_label(label: &CharacterLabel) -> Result<Self> {
        let ctx = ModulusContext::new(label.q)?;
        Self::from_exponents(&ctx, label.exponents.clone())
    }

    pub fn principal(ctx: &Arc<ModulusContext>) -> Self {
        let zeros = vec![0; ctx.components.len()];
        Self::from_exponents(ctx, zeros).expect("principal exponents are valid")
    }

    pub fn context(&self) -> &Arc<ModulusContext> {
        &self.ctx
    }

    pub fn modulus(&self) -> u64 {
        self.ctx.q
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn label(&self) -> CharacterLabel {
        CharacterLabel {
            q: self.ctx.q,
            exponents: self.exponents.clone(),
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `a` with `chi(-1) = (-1)^a`.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.ctx.q
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .ctx
            .components
            .iter()
            .zip(&self.exponents)
            .map(|(c, &e)| (c.order - e) % c.order)
            .collect();
        Self::from_exponents(&self.ctx, exps).expect("conjugate exponents are valid")
    }

    /// `chi(n) = exp(2 pi i k / exponent)`; returns `k`, or `None` when `gcd(n, q) > 1`.
    pub fn root_index(&self, n: u64) -> Option<u64> {
        let ctx = &*self.ctx;
        let a = n % ctx.q;
        if ctx.q > 1 && gcd(a, ctx.q) != 1 {
            return None;
        }
        let mut k = 0u64;
        for (c, &e) in ctx.components.iter().zip(&self.exponents) {
            let l = c.dlog[(a % c.modulus) as usize] as u64;
            k = (k + (e * l % c.order) * (ctx.exponent / c.order)) % ctx.exponent;
        }
        Some(k)
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        let r = n.rem_euclid(self.ctx.q as i64) as u64;
        match self.root_index(r) {
            Some(k) => self.ctx.root(k),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn eval_u64(&self, n: u64) -> Complex64 {
        match self.root_index(n) {
            Some(k) => self.ctx.root(k),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Value table indexed by residue `0..q`.
    pub fn values(&self) -> Vec<Complex64> {
        (0..self.ctx.q).map(|a| self.eval_u64(a)).collect()
    }

    /// The primitive character modulo the conductor that induces this one.
    pub fn primitive_inducing(&self) -> Self {
        if self.is_primitive() {
            return self.clone();
        }
        let d = self.conductor;
        let ctx_d = ModulusContext::new(d).expect("conductor is positive");
        let q = self.ctx.q;
        let big = self.ctx.exponent;
        let exps = ctx_d
            .components
            .iter()
            .map(|c| {
                let mut n = c.generator;
                while gcd(n, q) != 1 {
                    n += d;
                }
                let r = self.root_index(n).expect("lift is a unit");
                let num = r * c.order;
                debug_assert_eq!(num % big, 0, "inducing value has wrong order");
                (num / big) % c.order
            })
            .collect();
        let prim = Self::from_exponents(&ctx_d, exps).expect("valid inducing exponents");
        debug_assert!(prim.is_primitive());
        prim
    }

    /// Gauss sum `sum_{a mod q} chi(a) e(a/q)`; primitive characters only.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive {
                q: self.ctx.q,
                conductor: self.conductor,
            });
        }
        Ok(*self.gauss.get_or_init(|| {
            let q = self.ctx.q;
            if q == 1 {
                return Complex64::new(1.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 1..=q {
                if let Some(k) = self.root_index(a) {
                    let angle = std::f64::consts::TAU * (a % q) as f64 / q as f64;
                    acc += self.ctx.root(k) * Complex64::new(angle.cos(), angle.sin());
                }
            }
            acc
        }))
    }

    /// Root number `tau(chi) / (i^a sqrt(q))` of the functional equation.
    pub fn root_number(&self) -> Result<Complex64> {
        let tau = self.gauss_sum()?;
        let i_a = if self.parity == 1 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(tau / (i_a * (self.ctx.q as f64).sqrt()))
    }
}

fn component_conductor(c: &Component, e: u64, comp_order: u64) -> u64 {
    if e == 0 {
        return 1;
    }
    match c.kind {
        ComponentKind::OddPrimePower => {
            let mut j = 0;
            let mut o = comp_order;
            while o.is_multiple_of(c.prime) {
                o /= c.prime;
                j += 1;
            }
            c.prime.pow(j + 1)
        }
        ComponentKind::TwoMinusOne => 4,
        // the 5-part of order 2^j factors through (Z/2^{j+2}Z)*
        ComponentKind::TwoFive => 4 * comp_order,
    }
}

/// All `phi(q)` characters modulo `q` in label order; index 0 is principal.
pub fn character_group(q: u64) -> Result<Vec<DirichletCharacter>> {
    let ctx = ModulusContext::new(q)?;
    Ok(characters_of(&ctx))
}

pub fn characters_of(ctx: &Arc<ModulusContext>) -> Vec<DirichletCharacter> {
    let orders = ctx.component_orders();
    let mut out = Vec::with_capacity(ctx.phi as usize);
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter::from_exponents(ctx, exps.clone()).expect("in range"));
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Primitive characters modulo `q` (label order).
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(character_group(q)?
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect())
}
