//! Dirichlet L-values on the critical line, used only to check ingested
//! zero ordinates.

use num_complex::Complex64;

use crate::residue::Angle;

/// `B_2, B_4, ..., B_16`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `zeta(s, a)` by Euler-Maclaurin with `n` direct terms.
pub fn hurwitz_zeta(s: Complex64, a: f64, n: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..n {
        sum += (-s * (j as f64 + a).ln()).exp();
    }
    let na = n as f64 + a;
    let ln_na = na.ln();
    let pow = (-s * ln_na).exp(); // (N+a)^{-s}
    let one = Complex64::new(1.0, 0.0);
    sum += pow * na / (s - one);
    sum += pow * 0.5;
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * (N+a)^{-s-2j+1}
    let mut rising = s; // s (s+1) ... (s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut npow = pow / na; // (N+a)^{-s-1}
    for (j, &b) in BERNOULLI.iter().enumerate() {
        sum += rising * npow * (b / fact);
        let m = 2 * j as u32 + 1;
        rising *= (s + (m as f64)) * (s + (m as f64 + 1.0));
        fact *= ((m + 2) * (m + 3)) as f64;
        npow /= na * na;
    }
    sum
}

/// `L(s, chi)` for a character given by its values modulo `q` (`None` off
/// the units), via `q^{-s} sum_a chi(a) zeta(s, a/q)`.
pub fn l_value(values: &[Option<Angle>], s: Complex64, terms: usize) -> Complex64 {
    let q = values.len();
    let per_class = terms.div_ceil(q).max(16 + (s.im.abs() / 2.0) as usize);
    let mut total = Complex64::new(0.0, 0.0);
    for (a, v) in values.iter().enumerate() {
        if let Some(angle) = v {
            let a = if a == 0 { q } else { a };
            total += angle.to_complex() * hurwitz_zeta(s, a as f64 / q as f64, per_class);
        }
    }
    total * (-s * (q as f64).ln()).exp()
}

/// Principal-branch `log Gamma(z)` for `Re z > 0`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    let half_ln_2pi = 0.918_938_533_204_672_8;
    let mut s = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let zinv = 1.0 / z;
    let z2 = zinv * zinv;
    let mut zp = zinv;
    for (j, &b) in BERNOULLI.iter().enumerate() {
        let m = 2.0 * (j as f64 + 1.0);
        s += zp * (b / (m * (m - 1.0)));
        zp *= z2;
    }
    s - shift
}

/// The real rotation `Z(t)` of `L(1/2 + it, chi)` for a primitive character
/// of conductor `q`: `Z(t) = eps^{-1/2} e^{i theta(t)} L(1/2 + it)`, real for
/// real `t`.
#[derive(Debug, Clone)]
pub struct RealRotation {
    values: Vec<Option<Angle>>,
    q: f64,
    parity: f64,
    inv_sqrt_root_number: Complex64,
}

impl RealRotation {
    pub fn new(values: Vec<Option<Angle>>) -> Self {
        let q = values.len();
        let minus_one = values[q - 1].expect("-1 is a unit");
        let parity = if minus_one.num == 0 { 0.0 } else { 1.0 };
        let mut gauss = Complex64::new(0.0, 0.0);
        for (a, v) in values.iter().enumerate() {
            if let Some(angle) = v {
                let t = std::f64::consts::TAU * a as f64 / q as f64;
                gauss += angle.to_complex() * Complex64::new(t.cos(), t.sin());
            }
        }
        let i_pow = if parity == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let eps = gauss / (i_pow * (q as f64).sqrt());
        Self {
            values,
            q: q as f64,
            parity,
            inv_sqrt_root_number: 1.0 / eps.sqrt(),
        }
    }

    pub fn theta(&self, t: f64) -> f64 {
        let z = Complex64::new((0.5 + self.parity) / 2.0, t / 2.0);
        t / 2.0 * (self.q / std::f64::consts::PI).ln() + ln_gamma(z).im
    }

    pub fn complex(&self, t: f64, terms: usize) -> Complex64 {
        let l = l_value(&self.values, Complex64::new(0.5, t), terms);
        let th = self.theta(t);
        self.inv_sqrt_root_number * Complex64::new(th.cos(), th.sin()) * l
    }

    pub fn z(&self, t: f64, terms: usize) -> f64 {
        self.complex(t, terms).re
    }
}
