use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{gauss3, integrate};
use crate::sieve::{stream_primes_with, SieveConfig};
use crate::summation::CompensatedSum;

const REL_TOL: f64 = 1e-13;

/// `Li(x) = PV int_0^x dt / log t` for `x > 1`.
///
/// The singularity at `t = 1` is excised symmetrically over `[1-e, 1+e]`;
/// the excised principal value is `e + e^3/36 + 3e^5/400 + O(e^7)` from the
/// Laurent expansion `1/log t = 1/u + 1/2 - u/12 + u^2/24 - ...`, `u = t-1`.
pub fn li(x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("Li(x) needs x > 1, got {x}")));
    }
    let eps = 1e-3f64.min((x - 1.0) / 2.0);
    // int_0^{1-e} dt/log t = -int_{u0}^inf e^{-u}/u du with t = e^{-u}
    let u0 = -(1.0 - eps).ln();
    let mut lower = CompensatedSum::new();
    let mut a = u0;
    let mut width = 1.0f64.min(u0.max(1e-3) * 4.0);
    while a < 60.0 {
        let b = a + width;
        lower.add(integrate(|u: f64| (-u).exp() / u, a, b, 0.0, REL_TOL, 40).value);
        a = b;
        width = (width * 2.0).min(8.0);
    }
    // int_{1+e}^x dt/log t = int_{v0}^{log x} e^v/v dv with t = e^v
    let v0 = (1.0 + eps).ln();
    let lx = x.ln();
    let mut upper = CompensatedSum::new();
    let mut a = v0;
    while a < lx {
        let b = lx.min(if a < 1.0 { (a * 4.0).min(1.0).max(a + 1e-3) } else { a + 1.0 });
        upper.add(integrate(|v: f64| v.exp() / v, a, b, 0.0, REL_TOL, 40).value);
        a = b;
    }
    let excised = eps + eps.powi(3) / 36.0 + 3.0 * eps.powi(5) / 400.0;
    let mut total = upper;
    total.add(-lower.value());
    total.add(excised);
    Ok(total.value())
}

/// Result of comparing `pi(x)` with `Li(x)` at every prime up to `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LittlewoodScan {
    pub t: u64,
    /// First prime `p` with `pi(p) >= Li(p)`.
    pub first_reversal: Option<u64>,
    /// Largest value of `pi(p) - Li(p)` seen at a prime.
    pub max_difference: f64,
    pub max_at: u64,
}

/// `pi(x) - Li(x)` is largest right at primes, so checking primes suffices.
/// `Li` is carried along with three-point Gauss steps between primes.
pub fn littlewood_scan(t: u64, sieve: &SieveConfig) -> Result<LittlewoodScan> {
    if t < 2 {
        return Err(Error::InvalidParameter("scan bound below 2".into()));
    }
    let mut li_acc = CompensatedSum::new();
    li_acc.add(li(2.0)?);
    let mut prev = 2.0f64;
    let mut count = 0u64;
    let mut scan = LittlewoodScan {
        t,
        first_reversal: None,
        max_difference: f64::NEG_INFINITY,
        max_at: 2,
    };
    stream_primes_with(2, t + 1, sieve, |p| {
        let pf = p as f64;
        if pf > prev {
            li_acc.add(gauss3(|s: f64| 1.0 / s.ln(), prev, pf));
            prev = pf;
        }
        count += 1;
        let d = count as f64 - li_acc.value();
        if d > scan.max_difference {
            scan.max_difference = d;
            scan.max_at = p;
        }
        if d >= 0.0 && scan.first_reversal.is_none() {
            scan.first_reversal = Some(p);
        }
    })?;
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ramanujan-type series `gamma + ln ln x + sum (ln x)^n / (n n!)`.
    fn li_series(x: f64) -> f64 {
        let l = x.ln();
        let mut term = 1.0;
        let mut s = CompensatedSum::new();
        s.add(0.577_215_664_901_532_9);
        s.add(l.ln());
        for n in 1..400 {
            term *= l / n as f64;
            s.add(term / n as f64);
            if term < 1e-20 {
                break;
            }
        }
        s.value()
    }

    #[test]
    fn matches_series() {
        for x in [1.0005, 1.5, 2.0, 10.0, 100.0, 1e4, 1e6] {
            let a = li(x).unwrap();
            let b = li_series(x);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "x={x}: {a} vs {b}");
        }
        assert!((li(1e6).unwrap() - 78_627.549_159_462_18).abs() < 1e-7);
        assert!(li(1.0).is_err());
    }

    #[test]
    fn no_reversal_at_small_height() {
        let s = littlewood_scan(100_000, &SieveConfig::default()).unwrap();
        assert_eq!(s.first_reversal, None);
        assert!(s.max_difference < 0.0);
    }
}
