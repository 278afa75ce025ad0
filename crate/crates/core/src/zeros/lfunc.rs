//! Double-precision Dirichlet L-functions, used for scanning and counting.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

/// `B_{2j}` for `j = 1..=20`.
const BERNOULLI_2J: [f64; 20] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
];

const EM_TERMS: usize = 16;

/// Principal branch of `log Gamma(z)` for `Re z > 0`, continuous there.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for j in 0..8 {
        let k = (2 * j + 2) as f64;
        series += pow * (BERNOULLI_2J[j] / (k * (k - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * TAU.ln() + series - shift
}

/// A primitive character prepared for repeated evaluation of `L(s, chi)`.
#[derive(Debug, Clone)]
pub struct LFunction {
    q: u64,
    parity: u8,
    values: Vec<Complex64>,
    root_number: Complex64,
}

impl LFunction {
    pub fn new(chi: &DirichletCharacter) -> Result<Self> {
        if !chi.is_primitive() {
            return Err(Error::NotPrimitive {
                q: chi.modulus(),
                conductor: chi.conductor(),
            });
        }
        Ok(Self {
            q: chi.modulus(),
            parity: chi.parity(),
            values: chi.values(),
            root_number: chi.root_number()?,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn root_number(&self) -> Complex64 {
        self.root_number
    }

    fn chi(&self, n: u64) -> Complex64 {
        self.values[(n % self.q) as usize]
    }

    /// Shift `N` such that the Euler-Maclaurin terms decay like `pi^{-2j}`.
    fn shift(&self, s: Complex64) -> u64 {
        (s.norm() / 2.0).ceil() as u64 + 10
    }

    /// `L(s, chi)` by Euler-Maclaurin on each residue class, to about 1e-14 relative.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let q = self.q;
        let n_shift = self.shift(s);
        let mut head = Complex64::new(0.0, 0.0);
        for n in 1..=q * n_shift {
            let c = self.chi(n);
            if c.re != 0.0 || c.im != 0.0 {
                head += c * (-s * (n as f64).ln()).exp();
            }
        }
        let qf = q as f64;
        let mut tail = Complex64::new(0.0, 0.0);
        for a in 1..=q {
            let c = self.chi(a);
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let x = (q * n_shift + a) as f64;
            let lx = x.ln();
            let x_pow = (-s * lx).exp();
            let mut t = x_pow * x / (qf * (s - 1.0)) + x_pow * 0.5;
            // (s)_{2j-1} q^{2j-1} X^{-s-2j+1}
            let mut rising = s;
            let mut pow = x_pow * (qf / x);
            let mut fact = 2.0;
            for j in 0..EM_TERMS {
                t += rising * pow * (BERNOULLI_2J[j] / fact);
                let k = (2 * j + 1) as f64;
                rising *= (s + k) * (s + k + 1.0);
                pow *= (qf / x) * (qf / x);
                fact *= (k + 2.0) * (k + 3.0);
            }
            tail += c * t;
        }
        head + tail
    }

    pub fn eval_critical(&self, t: f64) -> Complex64 {
        self.eval(Complex64::new(0.5, t))
    }

    /// Phase `theta(t)` making `exp(i theta) L(1/2 + it)` real.
    pub fn theta(&self, t: f64) -> f64 {
        let a = self.parity as f64;
        let g = ln_gamma(Complex64::new((0.5 + a) / 2.0, t / 2.0));
        (t / 2.0) * (self.q as f64 / PI).ln() + g.im - self.root_number.arg() / 2.0
    }

    /// Hardy's function: real on the real line, `|Z(t)| = |L(1/2 + it)|`.
    pub fn hardy_z(&self, t: f64) -> f64 {
        let l = self.eval_critical(t);
        let th = self.theta(t);
        (Complex64::new(th.cos(), th.sin()) * l).re
    }

    /// `(T/2) log(q/pi) + Im log Gamma((1/2 + a + iT)/2)`, the gamma-factor
    /// part of the argument change along the right half of the contour.
    pub fn gamma_phase(&self, t: f64) -> f64 {
        let a = self.parity as f64;
        (t / 2.0) * (self.q as f64 / PI).ln()
            + ln_gamma(Complex64::new((0.5 + a) / 2.0, t / 2.0)).im
    }
}

pub fn hardy_z(chi: &DirichletCharacter, t: f64) -> Result<f64> {
    Ok(LFunction::new(chi)?.hardy_z(t))
}
