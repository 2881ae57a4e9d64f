//! Weighted prime sums: Abel means `sum eps(n) w(n) e^{-nr}`, the alternating
//! Chebyshev series, the Gaussian-log kernel `exp(-log^2(p/x)/r)` and the
//! kernels `p^{-alpha} exp(-log^2 p / x)`.
//!
//! Every sum runs through [`CompensatedSum`] in ascending prime order, with
//! parallel segments reduced in segment order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::race::CountingFunction;
use crate::residue::ResidueSystem;
use crate::sieve::{
    for_each_segment, higher_powers, stream_prime_powers_with, stream_primes_with, SieveConfig,
    SieveSegment,
};
use crate::summation::CompensatedSum;

pub const DEFAULT_PRIME_CAP: u64 = 1_000_000_000;
/// Relative tail target for Abel sums.
pub const ABEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    /// For Abel sums a certified bound on the omitted terms; for the
    /// Gaussian kernels the omitted absolute mass estimated from the prime
    /// number theorem density.
    pub tail_bound: f64,
    /// Terms with argument `>= cutoff` were not summed.
    pub cutoff: u64,
    /// The natural truncation point lay beyond the prime cap.
    pub truncated: bool,
    pub warnings: Vec<String>,
}

/// Arithmetic weight attached to each prime or prime power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weight {
    /// `log p` on primes.
    LogP,
    /// `Lambda(n)` on prime powers.
    Lambda,
    /// `Lambda(n)/log n = 1/m` on `p^m`.
    LambdaOverLog,
    /// 1 on primes.
    Unit,
}

impl Weight {
    fn uses_powers(self) -> bool {
        matches!(self, Weight::Lambda | Weight::LambdaOverLog)
    }

    #[inline]
    fn of(self, m: u32, log_p: f64) -> f64 {
        match self {
            Weight::LogP | Weight::Lambda => log_p,
            Weight::LambdaOverLog => 1.0 / m as f64,
            Weight::Unit => 1.0,
        }
    }

    /// Largest weight of any `n <= t`, as a function of `log t`.
    fn envelope_is_log(self) -> bool {
        matches!(self, Weight::LogP | Weight::Lambda)
    }

    pub fn for_function(f: CountingFunction) -> Result<Self> {
        match f {
            CountingFunction::Psi => Ok(Weight::Lambda),
            CountingFunction::BigPi => Ok(Weight::LambdaOverLog),
            CountingFunction::Theta => Ok(Weight::LogP),
            CountingFunction::Pi => Ok(Weight::Unit),
            CountingFunction::Pi2 => Err(Error::Unsupported(
                "Abel sums are defined for pi, theta, psi and Pi".into(),
            )),
        }
    }
}

/// Mode of the `p^{-alpha} exp(-log^2 p / (s x))` sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BentzMode {
    /// `(-1)^{(p-1)/2}` on odd primes.
    ModFour,
    /// The real character modulo 3, including `chi(2) = -1`.
    Chi3,
    /// `eps(k; p, l1, l2)`.
    Classes { k: u64, l1: u64, l2: u64 },
}

/// Sign function on integers for a two-class race.
#[derive(Debug, Clone)]
struct ClassSign {
    k: u64,
    sign: Vec<i8>,
}

impl ClassSign {
    fn new(k: u64, l1: u64, l2: u64) -> Result<Self> {
        let sys = ResidueSystem::new(k)?;
        crate::residue::epsilon(&sys, 1, l1, l2)?;
        let mut sign = vec![0i8; k as usize];
        sign[(l1 % k) as usize] = 1;
        sign[(l2 % k) as usize] = -1;
        Ok(Self { k, sign })
    }

    #[inline]
    fn at(&self, n: u64) -> i8 {
        self.sign[(n % self.k) as usize]
    }
}

impl BentzMode {
    fn signer(&self) -> Result<impl Fn(u64) -> i8 + Sync> {
        let cls = match *self {
            BentzMode::Classes { k, l1, l2 } => Some(ClassSign::new(k, l1, l2)?),
            _ => None,
        };
        let mode = *self;
        Ok(move |p: u64| match mode {
            BentzMode::ModFour => match p % 4 {
                1 => 1,
                3 => -1,
                _ => 0,
            },
            BentzMode::Chi3 => match p % 3 {
                1 => 1,
                2 => -1,
                _ => 0,
            },
            BentzMode::Classes { .. } => cls.as_ref().map_or(0, |c| c.at(p)),
        })
    }
}

/// Tunables shared by the kernel sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// No prime at or above this bound is summed.
    pub prime_cap: u64,
    /// `s` in `exp(-log^2 p / (s x))`; 1 and 4 are the two customary choices.
    pub scale: f64,
    pub sieve: SieveConfig,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            prime_cap: DEFAULT_PRIME_CAP,
            scale: 1.0,
            sieve: SieveConfig::default(),
        }
    }
}

/// Bound on `sum_{n >= N} w(n) e^{-nr}` via `int_{N-1}^inf W(t) e^{-rt} dt`,
/// valid once `W(t) e^{-rt}` is decreasing on `[N-1, inf)`.
fn abel_tail(n: u64, r: f64, log_weight: bool) -> Option<f64> {
    let a = (n - 1) as f64;
    if log_weight {
        if a < 3.0 || r * a * a.ln() < 1.0 {
            return None;
        }
        Some((-r * a).exp() * (a.ln() + 1.0 / (r * a)) / r)
    } else {
        Some((-r * a).exp() / r)
    }
}

/// `Delta_F(r; k, l1, l2) = sum_{n = l1} w(n) e^{-nr} - sum_{n = l2} w(n) e^{-nr}`.
pub fn abel_delta(
    f: CountingFunction,
    r: f64,
    k: u64,
    l1: u64,
    l2: u64,
    sieve: &SieveConfig,
) -> Result<KernelValue> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("Abel rate must be positive, got {r}")));
    }
    let weight = Weight::for_function(f)?;
    let cls = ClassSign::new(k, l1, l2)?;
    let mut acc = CompensatedSum::new();
    let mut lo = 2u64;
    let mut hi = 64u64.max((8.0 / r).ceil() as u64);
    loop {
        let mut add = |n: u64, m: u32, log_p: f64| {
            let s = cls.at(n);
            if s != 0 {
                acc.add(s as f64 * weight.of(m, log_p) * (-(n as f64) * r).exp());
            }
        };
        if weight.uses_powers() {
            stream_prime_powers_with(lo, hi, sieve, |e| add(e.n, e.m, e.log_p))?;
        } else {
            stream_primes_with(lo, hi, sieve, |p| add(p, 1, (p as f64).ln()))?;
        }
        if let Some(bound) = abel_tail(hi, r, weight.envelope_is_log()) {
            if bound < ABEL_TOLERANCE * (acc.value().abs() + 1e-300) {
                return Ok(KernelValue {
                    value: acc.value(),
                    tail_bound: bound,
                    cutoff: hi,
                    truncated: false,
                    warnings: Vec::new(),
                });
            }
        }
        if hi >= (1u64 << 62) {
            return Err(Error::BudgetExhausted(format!(
                "Abel sum at r = {r} did not meet its tail target"
            )));
        }
        lo = hi;
        hi *= 2;
    }
}

/// `sum_{3 <= p <= X} (-1)^{(p+1)/2} f(p)`.
pub fn chebyshev_series<F: Fn(f64) -> f64>(f: F, x: u64, sieve: &SieveConfig) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    if x >= 3 {
        stream_primes_with(3, x + 1, sieve, |p| {
            let v = f(p as f64);
            if p % 4 == 3 {
                acc.add(v);
            } else {
                acc.add(-v);
            }
        })?;
    }
    Ok(acc.value())
}

/// `int_{u_a}^{u_b} exp(g(u)) du` by adaptive quadrature on unit panels.
fn log_space_mass(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut acc = CompensatedSum::new();
    let mut lo = a;
    while lo < b {
        let hi = b.min(lo + 1.0);
        acc.add(integrate(|u| g(u).exp(), lo, hi, 1e-300, 1e-10, 30).value);
        lo = hi;
    }
    acc.value()
}

/// Sum of `sign(p) * w(p) * kernel(p)` over primes (and powers if the weight
/// needs them) in `[lo, hi)`, reduced in ascending order.
fn weighted_prime_sum<S, K>(
    lo: u64,
    hi: u64,
    weight: Weight,
    sign: S,
    kernel: K,
    sieve: &SieveConfig,
) -> Result<f64>
where
    S: Fn(u64) -> i8 + Sync,
    K: Fn(u64, f64) -> f64 + Sync,
{
    let mut total = CompensatedSum::new();
    if hi <= lo.max(2) {
        return Ok(0.0);
    }
    for_each_segment(
        lo.max(2),
        hi,
        sieve,
        |a, b, base| {
            let mut part = CompensatedSum::new();
            SieveSegment::sieve(a, b, base).for_each_prime(|p| {
                let s = sign(p);
                if s != 0 {
                    let lp = (p as f64).ln();
                    part.add(s as f64 * weight.of(1, lp) * kernel(p, lp));
                }
            });
            part
        },
        |part| total.merge(&part),
    )?;
    if weight.uses_powers() {
        for e in higher_powers(lo.max(2), hi) {
            let s = sign(e.n);
            if s != 0 {
                let ln_n = e.m as f64 * e.log_p;
                total.add(s as f64 * weight.of(e.m, e.log_p) * kernel(e.n, ln_n));
            }
        }
    }
    Ok(total.value())
}

/// `sum_p eps(k; p, l1, l2) w(p) exp(-(1/r) log^2(p/x))`.
///
/// With the prime density `dp / log p` the summand mass in `u = log(p/x)`
/// is `x exp(u - u^2/r)`, a Gaussian centred at `r/2` with variance `r/2`;
/// the window `|u - r/2| <= 4.6 sqrt r` leaves a relative tail below
/// `erfc(4.6)/2 < 1e-9`.
pub fn kt_gauss_sum(
    k: u64,
    l1: u64,
    l2: u64,
    x: f64,
    r: f64,
    weight: Weight,
    options: &KernelOptions,
) -> Result<KernelValue> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x must exceed 1, got {x}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let cls = ClassSign::new(k, l1, l2)?;
    let mut warnings = Vec::new();
    if r > x.ln() {
        warnings.push(format!("r = {r} exceeds log x = {}", x.ln()));
    }
    let lx = x.ln();
    let d = 4.6 * r.sqrt();
    let u_lo = lx + r / 2.0 - d;
    let u_hi = lx + r / 2.0 + d;
    let lo = if u_lo <= 2f64.ln() { 2 } else { u_lo.exp().floor() as u64 };
    let natural_hi = if u_hi >= 63.0 * 2f64.ln() { u64::MAX } else { u_hi.exp().ceil() as u64 + 1 };
    let hi = natural_hi.min(options.prime_cap);
    let truncated = natural_hi > options.prime_cap;
    let value = weighted_prime_sum(
        lo,
        hi,
        weight,
        |p| cls.at(p),
        |_, lp| {
            let v = lp - lx;
            (-v * v / r).exp()
        },
        &options.sieve,
    )?;
    let density = |u: f64| u - (u - lx) * (u - lx) / r;
    let lower_tail = log_space_mass(density, (2f64.ln()).min(u_lo), (lo.max(2) as f64).ln());
    let upper_from = (hi as f64).ln();
    let upper_tail = log_space_mass(density, upper_from, upper_from.max(u_hi) + 10.0 * r.sqrt());
    if truncated {
        warnings.push(format!("sum truncated at the prime cap {}", options.prime_cap));
    }
    Ok(KernelValue {
        value,
        tail_bound: lower_tail + upper_tail,
        cutoff: hi,
        truncated,
        warnings,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1/2], got {alpha}")));
    }
    Ok(())
}

/// Point beyond which `log^2 p / (s x) > 300 + alpha log p`.
fn bentz_natural_cutoff(x: f64, alpha: f64, scale: f64) -> f64 {
    let sx = scale * x;
    let b = sx * alpha;
    (b + (b * b + 1200.0 * sx).sqrt()) / 2.0
}

/// `sum_p sign(p) log p p^{-alpha} exp(-log^2 p / (s x))` for each `x` in
/// `xs`, in one pass over the primes.
pub fn bentz_grid(mode: BentzMode, xs: &[f64], alpha: f64, options: &KernelOptions) -> Result<Vec<KernelValue>> {
    check_alpha(alpha)?;
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
    }
    if !(options.scale > 0.0) {
        return Err(Error::InvalidParameter("kernel scale must be positive".into()));
    }
    let sign = mode.signer()?;
    let cutoffs: Vec<f64> = xs
        .iter()
        .map(|&x| bentz_natural_cutoff(x, alpha, options.scale))
        .collect();
    let natural: Vec<u64> = cutoffs
        .iter()
        .map(|&u| if u >= 63.0 * 2f64.ln() { u64::MAX } else { u.exp().ceil() as u64 + 1 })
        .collect();
    let his: Vec<u64> = natural.iter().map(|&n| n.min(options.prime_cap)).collect();
    let top = his.iter().copied().max().unwrap_or(2);
    let denom: Vec<f64> = xs.iter().map(|&x| options.scale * x).collect();
    let mut totals = vec![CompensatedSum::new(); xs.len()];
    if top > 2 {
        for_each_segment(
            2,
            top,
            &options.sieve,
            |a, b, base| {
                let mut parts = vec![CompensatedSum::new(); denom.len()];
                SieveSegment::sieve(a, b, base).for_each_prime(|p| {
                    let s = sign(p);
                    if s == 0 {
                        return;
                    }
                    let lp = (p as f64).ln();
                    let front = s as f64 * lp * (-alpha * lp).exp();
                    for (j, part) in parts.iter_mut().enumerate() {
                        if p < his[j] {
                            part.add(front * (-lp * lp / denom[j]).exp());
                        }
                    }
                });
                parts
            },
            |parts| {
                for (t, p) in totals.iter_mut().zip(&parts) {
                    t.merge(p);
                }
            },
        )?;
    }
    Ok(xs
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let truncated = natural[j] > options.prime_cap;
            let sx = denom[j];
            let from = (his[j] as f64).ln();
            let tail = log_space_mass(
                |u| (1.0 - alpha) * u - u * u / sx,
                from,
                from.max(cutoffs[j]) + 1.0,
            );
            KernelValue {
                value: totals[j].value(),
                tail_bound: tail,
                cutoff: his[j],
                truncated,
                warnings: if truncated {
                    vec![format!("sum truncated at the prime cap {}", options.prime_cap)]
                } else {
                    Vec::new()
                },
            }
        })
        .collect())
}

pub fn bentz_sum(mode: BentzMode, x: f64, alpha: f64, options: &KernelOptions) -> Result<KernelValue> {
    Ok(bentz_grid(mode, &[x], alpha, options)?.remove(0))
}

/// A kernel sum with its parameters, for batch evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum KernelSpec {
    Abel {
        function: CountingFunction,
        r: f64,
        k: u64,
        l1: u64,
        l2: u64,
    },
    KtGauss {
        k: u64,
        l1: u64,
        l2: u64,
        x: f64,
        r: f64,
        weight: Weight,
    },
    Bentz {
        mode: BentzMode,
        x: f64,
        alpha: f64,
    },
    /// Chebyshev series with `f(t) = exp(-t / c)`.
    ChebyshevExp { c: f64, x: u64 },
}

impl KernelSpec {
    pub fn evaluate(&self, options: &KernelOptions) -> Result<KernelValue> {
        match *self {
            KernelSpec::Abel { function, r, k, l1, l2 } => abel_delta(function, r, k, l1, l2, &options.sieve),
            KernelSpec::KtGauss { k, l1, l2, x, r, weight } => kt_gauss_sum(k, l1, l2, x, r, weight, options),
            KernelSpec::Bentz { mode, x, alpha } => bentz_sum(mode, x, alpha, options),
            KernelSpec::ChebyshevExp { c, x } => {
                if !(c > 0.0) {
                    return Err(Error::InvalidParameter("scale c must be positive".into()));
                }
                Ok(KernelValue {
                    value: chebyshev_series(|t| (-t / c).exp(), x, &options.sieve)?,
                    tail_bound: 0.0,
                    cutoff: x + 1,
                    truncated: false,
                    warnings: Vec::new(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abel_large_rate_is_first_term() {
        let v = abel_delta(CountingFunction::Pi, 5.0, 4, 3, 1, &SieveConfig::default()).unwrap();
        let lead = (-15f64).exp();
        assert!(v.value > 0.0);
        assert!((v.value / lead - 1.0).abs() < 1e-4);
        assert!(v.tail_bound < 1e-12 * v.value);
        assert!(abel_delta(CountingFunction::Pi, 0.0, 4, 3, 1, &SieveConfig::default()).is_err());
        assert!(abel_delta(CountingFunction::Pi2, 1.0, 4, 3, 1, &SieveConfig::default()).is_err());
    }

    #[test]
    fn chebyshev_small() {
        let cfg = SieveConfig::default();
        assert_eq!(chebyshev_series(|_| 1.0, 12, &cfg).unwrap(), 2.0);
        assert_eq!(chebyshev_series(|t| t, 4, &cfg).unwrap(), 3.0);
        assert_eq!(chebyshev_series(|_| 1.0, 2, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn kt_concentrates_near_x() {
        let o = KernelOptions::default();
        let v = kt_gauss_sum(4, 1, 3, 29.5, 1e-3, Weight::LogP, &o).unwrap();
        assert!(v.value > 0.0, "29 = 1 mod 4 should dominate");
        let w = kt_gauss_sum(4, 3, 1, 29.5, 1e-3, Weight::LogP, &o).unwrap();
        assert_eq!(v.value, -w.value);
        assert!(kt_gauss_sum(4, 3, 3, 29.5, 1.0, Weight::LogP, &o).is_err());
        assert!(kt_gauss_sum(4, 3, 1, 1.0, 1.0, Weight::LogP, &o).is_err());
        let wide = kt_gauss_sum(4, 3, 1, 100.0, 6.0, Weight::LogP, &o).unwrap();
        assert_eq!(wide.warnings.len(), 1);
    }

    #[test]
    fn bentz_small_x_sign_of_first_term() {
        let o = KernelOptions::default();
        let v = bentz_sum(BentzMode::ModFour, 0.05, 0.5, &o).unwrap();
        assert!(v.value < 0.0);
        let three = -(3f64.ln()) / 3f64.sqrt() * (-(3f64.ln().powi(2)) / 0.05).exp();
        assert!((v.value / three - 1.0).abs() < 1e-6);
        assert!(!v.truncated);
        assert!(bentz_sum(BentzMode::ModFour, 1.0, 0.6, &o).is_err());
    }
}
