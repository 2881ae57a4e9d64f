//! Naive oracles for the counting functions and kernel sums.

use prlb::kernel::{abel_delta, bentz_sum, chebyshev_series, kt_gauss_sum, BentzMode, KernelOptions, Weight};
use prlb::race::{CountingFunction, SweepOptions, Sweep};
use prlb::sieve::SieveConfig;

/// Smallest prime factor by trial division.
fn spf(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

fn omega(mut n: u64) -> u32 {
    let mut c = 0;
    while n > 1 {
        n /= spf(n);
        c += 1;
    }
    c
}

/// `Some((p, m))` if `n = p^m`.
fn prime_power(n: u64) -> Option<(u64, u32)> {
    let p = spf(n);
    let mut m = 0;
    let mut r = n;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    s: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }
}

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

pub fn counting_functions_match_trial_division() -> Result<(), String> {
    const X: u64 = 100_000;
    for k in [3u64, 4, 5, 8, 12] {
        let options = SweepOptions {
            ratio: 1e-12,
            record_counts: true,
            semiprimes: true,
            ..SweepOptions::default()
        };
        let mut sweep = Sweep::new(k, &options).unwrap();
        sweep.advance_to(X).unwrap();
        let result = sweep.result();
        let traj = &result.trajectory;
        ensure(traj.len() as u64 == X - 1, || format!("k = {k}: one sample per integer"))?;

        let classes = traj[0].classes.clone();
        let idx = |n: u64| classes.iter().position(|&l| l == n % k);
        let mut pi = vec![0u64; classes.len()];
        let mut pi2 = vec![0u64; classes.len()];
        let mut theta = vec![Kahan::default(); classes.len()];
        let mut psi = vec![Kahan::default(); classes.len()];
        let mut big_pi = vec![Kahan::default(); classes.len()];
        let mut total = 0u64;
        for (n, s) in (2..=X).zip(traj) {
            if let Some((p, m)) = prime_power(n) {
                if m == 1 {
                    total += 1;
                }
                if let Some(i) = idx(n) {
                    let lp = (p as f64).ln();
                    if m == 1 {
                        pi[i] += 1;
                        theta[i].add(lp);
                    }
                    psi[i].add(lp);
                    big_pi[i].add(1.0 / m as f64);
                }
            }
            if omega(n) == 2 {
                if let Some(i) = idx(n) {
                    pi2[i] += 1;
                }
            }
            ensure(s.x == n, || format!("sample at {} instead of {n}", s.x))?;
            ensure(s.pi == pi, || format!("pi, k = {k}, x = {n}"))?;
            ensure(s.pi2.as_ref().unwrap() == &pi2, || format!("pi2, k = {k}, x = {n}"))?;
            ensure(s.total_primes == total, || format!("total, k = {k}, x = {n}"))?;
            for i in 0..classes.len() {
                ensure(close(s.theta[i], theta[i].s, 1e-14), || format!("theta k = {k} x = {n}"))?;
                ensure(close(s.psi[i], psi[i].s, 1e-14), || format!("psi k = {k} x = {n}"))?;
                ensure(close(s.big_pi[i], big_pi[i].s, 1e-14), || format!("Pi k = {k} x = {n}"))?;
                for f in [CountingFunction::Pi, CountingFunction::Pi2] {
                    let v = s.value(f, classes[i]).unwrap();
                    ensure(v.fract() == 0.0, || format!("{f} not integral at x = {n}"))?;
                }
            }
        }
    }
    Ok(())
}

fn eratosthenes(n: usize) -> Vec<u64> {
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

fn eps(n: u64, k: u64, l1: u64, l2: u64) -> f64 {
    match n % k {
        r if r == l1 => 1.0,
        r if r == l2 => -1.0,
        _ => 0.0,
    }
}

pub fn abel_sums_match_naive() -> Result<(), String> {
    let grid: Vec<f64> = (0..20).map(|i| 0.02 * 1.3f64.powi(i)).collect();
    let cfg = SieveConfig::default();
    for (f, k, l1, l2) in [
        (CountingFunction::Pi, 4, 3, 1),
        (CountingFunction::Theta, 3, 2, 1),
        (CountingFunction::Psi, 4, 3, 1),
        (CountingFunction::BigPi, 5, 2, 1),
    ] {
        for &r in &grid {
            let got = abel_delta(f, r, k, l1, l2, &cfg).unwrap();
            let n_max = (60.0 / r) as u64 + 100;
            let mut acc = Kahan::default();
            for n in 2..=n_max {
                let e = eps(n, k, l1, l2);
                if e == 0.0 {
                    continue;
                }
                if let Some((p, m)) = prime_power(n) {
                    let w = match f {
                        CountingFunction::Pi if m == 1 => 1.0,
                        CountingFunction::Theta if m == 1 => (p as f64).ln(),
                        CountingFunction::Psi => (p as f64).ln(),
                        CountingFunction::BigPi => 1.0 / m as f64,
                        _ => 0.0,
                    };
                    acc.add(e * w * (-(n as f64) * r).exp());
                }
            }
            ensure(close(got.value, acc.s, 1e-9), || format!("{f} r = {r}: {} vs {}", got.value, acc.s))?;
        }
    }
    Ok(())
}

pub fn gaussian_window_sums_match_naive() -> Result<(), String> {
    let primes = eratosthenes(20_000_000);
    let opts = KernelOptions::default();
    let mut points = 0;
    for x in [10.0f64, 20.0, 40.0, 80.0] {
        for r in [0.5f64, 1.0, 1.5, 2.0, 3.0] {
            let got = kt_gauss_sum(4, 3, 1, x, r, Weight::LogP, &opts).unwrap();
            let lx = x.ln();
            let mut acc = Kahan::default();
            for &p in &primes {
                let v = (p as f64).ln() - lx;
                acc.add(eps(p, 4, 3, 1) * (p as f64).ln() * (-v * v / r).exp());
            }
            ensure(close(got.value, acc.s, 1e-9), || format!("x = {x} r = {r}: {} vs {}", got.value, acc.s))?;
            points += 1;
        }
    }
    ensure(points == 20, || format!("{points} grid points"))?;
    Ok(())
}

pub fn bentz_sums_match_naive_at_the_cap() -> Result<(), String> {
    let cap = 2_000_000u64;
    let primes = eratosthenes(cap as usize);
    let opts = KernelOptions {
        prime_cap: cap,
        ..KernelOptions::default()
    };
    for i in 0..20 {
        let x = 1.0 + i as f64;
        for (mode, sign) in [
            (BentzMode::ModFour, (|p: u64| eps(p, 4, 1, 3)) as fn(u64) -> f64),
            (BentzMode::Chi3, |p: u64| eps(p, 3, 1, 2)),
        ] {
            let got = bentz_sum(mode, x, 0.5, &opts).unwrap();
            let mut acc = Kahan::default();
            for &p in primes.iter().take_while(|&&p| p < got.cutoff) {
                let lp = (p as f64).ln();
                acc.add(sign(p) * lp * (-0.5 * lp).exp() * (-lp * lp / x).exp());
            }
            ensure(close(got.value, acc.s, 1e-9), || format!("x = {x}: {} vs {}", got.value, acc.s))?;
        }
    }
    Ok(())
}

pub fn chebyshev_series_matches_naive() -> Result<(), String> {
    let primes = eratosthenes(200_000);
    for i in 0..20u64 {
        let x = 10_000 * (i + 1);
        let c = 3_000.0;
        let got = chebyshev_series(|t| (-t / c).exp(), x, &SieveConfig::default()).unwrap();
        let mut acc = Kahan::default();
        for &p in primes.iter().filter(|&&p| p >= 3 && p <= x) {
            let s = if p % 4 == 3 { 1.0 } else { -1.0 };
            acc.add(s * (-(p as f64) / c).exp());
        }
        ensure(close(got, acc.s, 1e-9), || format!("x = {x}"))?;
    }
    Ok(())
}
