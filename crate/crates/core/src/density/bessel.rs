//! `J_0` and the truncated zero products `F(z, chi)`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::zeros::ZeroSet;

const SERIES_LIMIT: f64 = 1.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function of the first kind of order zero.
///
/// Taylor series near the origin, Miller's backward recurrence normalised
/// by `J_0 + 2 sum J_2m = 1` in the middle range, Hankel's expansion for
/// large arguments.
pub fn bessel_j0(z: f64) -> f64 {
    let x = z.abs();
    if x <= SERIES_LIMIT {
        series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x)
    } else {
        hankel(x)
    }
}

fn series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut m = 1.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= q / (m * m);
        sum += term;
        m += 1.0;
    }
    sum
}

fn miller(x: f64) -> f64 {
    let mut n = (x + 20.0 + (40.0 * x).sqrt()) as usize;
    n += n % 2;
    let mut next = 0.0;
    let mut cur = 1e-300_f64.sqrt();
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    for m in (1..=n).rev() {
        let prev = m as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds the value at order m - 1
        if (m - 1) % 2 == 0 && m > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            next *= 1e-200;
            norm *= 1e-200;
        }
    }
    cur / (norm + cur)
}

fn hankel(x: f64) -> f64 {
    let inv = 1.0 / x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf);
        pow *= inv;
        let t = a * pow;
        if t > last || t < 1e-17 {
            break;
        }
        last = t;
        match k % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() + q * chi.sin())
}

/// `F(z, chi) = prod_{gamma} J_0(2z / sqrt(1/4 + gamma^2))` over the loaded
/// ordinates, times `exp(-z^2 S2 - z^4 S4 / 4)` for the zeros above the
/// last one, with `S2, S4` from the zero-counting density
/// `(1/2pi) log(q gamma / 2pi)`.
#[derive(Debug, Clone)]
pub struct BesselFactor {
    pub character: usize,
    pub conductor: u64,
    pub height: f64,
    pub zeros: usize,
    weights: Vec<f64>,
    /// Estimated `sum_{gamma > H} 1/gamma^2` and `sum 1/gamma^4`.
    pub tail_s2: f64,
    pub tail_s4: f64,
    /// Multiplier on the tail sums, 1 by default.
    pub tail_scale: f64,
}

impl BesselFactor {
    pub fn new(zs: &ZeroSet) -> Result<Self> {
        if !zs.is_usable() {
            return Err(Error::InvalidParameter(format!(
                "zero set for character {} modulo {} is empty",
                zs.character, zs.modulus
            )));
        }
        let h = zs.max_height;
        let q = zs.conductor as f64;
        let l = (q * h / (2.0 * PI)).ln();
        Ok(Self {
            character: zs.character,
            conductor: zs.conductor,
            height: h,
            zeros: zs.len(),
            weights: zs
                .gammas
                .iter()
                .map(|&g| 2.0 / (0.25 + g * g).sqrt())
                .collect(),
            tail_s2: (l + 1.0) / (2.0 * PI * h),
            tail_s4: (l + 1.0 / 3.0) / (6.0 * PI * h.powi(3)),
            tail_scale: 1.0,
        })
    }

    /// Toy factor over explicit ordinates with no tail correction.
    pub fn from_ordinates(gammas: &[f64]) -> Self {
        Self {
            character: 0,
            conductor: 1,
            height: gammas.last().copied().unwrap_or(0.0),
            zeros: gammas.len(),
            weights: gammas.iter().map(|&g| 2.0 / (0.25 + g * g).sqrt()).collect(),
            tail_s2: 0.0,
            tail_s4: 0.0,
            tail_scale: 1.0,
        }
    }

    pub fn with_tail_scale(mut self, scale: f64) -> Self {
        self.tail_scale = scale;
        self
    }

    /// Finite product over the loaded zeros only.
    pub fn product(&self, z: f64) -> f64 {
        let mut p = 1.0;
        for &w in &self.weights {
            p *= bessel_j0(w * z);
            if p.abs() < 1e-300 {
                return 0.0;
            }
        }
        p
    }

    pub fn tail(&self, z: f64) -> f64 {
        let z2 = z * z;
        (-self.tail_scale * (z2 * self.tail_s2 + 0.25 * z2 * z2 * self.tail_s4)).exp()
    }

    pub fn value(&self, z: f64) -> f64 {
        if z == 0.0 {
            return 1.0;
        }
        self.product(z) * self.tail(z)
    }

    /// `F(z)` with the spread between no tail correction and a doubled one.
    pub fn evaluate(&self, z: f64) -> (f64, f64) {
        let p = self.product(z);
        let t = self.tail(z);
        let t2 = t * t;
        (p * t, (p * (1.0 - t2)).abs() * 0.5)
    }

    /// Full `sum 1/(1/4 + gamma^2)` including the tail estimate; `F(z)` is
    /// close to `exp(-z^2 * this)` for small `z`.
    pub fn quadratic_rate(&self) -> f64 {
        self.weights.iter().map(|w| 0.25 * w * w).sum::<f64>() + self.tail_scale * self.tail_s2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_oracle(z: f64) -> f64 {
        // Plain alternating series; fine below 8 to about 1e-13.
        let q = -0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..80 {
            term *= q / ((m * m) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn matches_series() {
        let mut z = 0.0;
        while z <= 8.0 {
            assert!((bessel_j0(z) - series_oracle(z)).abs() < 2e-13, "z = {z}");
            z += 0.0625;
        }
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_eq!(bessel_j0(-3.7), bessel_j0(3.7));
    }

    #[test]
    fn first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if series_oracle(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn regimes_agree_at_seams() {
        for z in [24.0, 24.9, 25.0, 25.1, 30.0, 40.0] {
            assert!((miller(z) - hankel(z)).abs() < 1e-14, "z = {z}");
        }
        assert!((miller(1.0) - series(1.0)).abs() < 1e-15);
        // Tabulated J0(10), J0(100).
        assert!((bessel_j0(10.0) - -0.245_935_764_451_348_3).abs() < 1e-15);
        assert!((bessel_j0(100.0) - 0.019_985_850_304_223_122).abs() < 1e-15);
    }

    #[test]
    fn toy_product() {
        let f = BesselFactor::from_ordinates(&[1.0, 2.0]);
        let direct = bessel_j0(2.0 / 1.25f64.sqrt()) * bessel_j0(2.0 / 4.25f64.sqrt());
        assert!((f.value(1.0) - direct).abs() < 1e-15);
        assert_eq!(f.value(0.0), 1.0);
    }

    #[test]
    fn decreasing_before_first_sign_flip() {
        let f = BesselFactor::from_ordinates(&[6.02, 10.24, 12.99]);
        // first flip where 2z/|rho_1| = 2.4048
        let zstar = 2.404 * (0.25f64 + 6.02 * 6.02).sqrt() / 2.0;
        let mut prev = 1.0;
        let mut z = 0.01;
        while z < zstar {
            let v = f.value(z);
            assert!(v < prev && v.abs() <= 1.0);
            prev = v;
            z += 0.01;
        }
    }
}
