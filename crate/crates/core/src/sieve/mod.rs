//! Segmented sieve of Eratosthenes over odd numbers, streaming primes,
//! prime powers and semiprimes in ascending order.
//!
//! Segments are sieved in parallel batches and handed to the consumer
//! strictly in ascending order, so anything downstream sees the same
//! sequence regardless of worker count or segment size.

mod checkpoint;
mod omega;

pub use checkpoint::{BlockReader, BlockWriter, Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use omega::OmegaSegment;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest admissible exclusive upper bound.
pub const MAX_BOUND: u64 = 1 << 63;
pub const DEFAULT_SEGMENT_BYTES: usize = 256 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Bytes of bitset per segment; each byte covers 16 integers.
    pub segment_bytes: usize,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_bytes: DEFAULT_SEGMENT_BYTES,
            threads: 0,
        }
    }
}

impl SieveConfig {
    pub fn with_segment_bytes(mut self, bytes: usize) -> Self {
        self.segment_bytes = bytes;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Integers covered by one segment.
    pub fn segment_span(&self) -> u64 {
        (self.segment_bytes.max(8) as u64 / 8) * 128
    }

    /// Dedicated pool when a thread count is configured.
    pub(crate) fn pool(&self) -> Option<rayon::ThreadPool> {
        (self.threads > 0).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build()
                .expect("thread pool construction")
        })
    }

    pub(crate) fn install<R: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
        match pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    fn batch_len(&self) -> usize {
        let workers = if self.threads == 0 {
            rayon::current_num_threads()
        } else {
            self.threads
        };
        2 * workers.max(1)
    }
}

/// A sieved block `[lo, hi)`.  Bit `i` of `composite` covers the odd number
/// `first_odd + 2i`; a clear bit marks a prime.
#[derive(Debug, Clone)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    first_odd: u64,
    len: usize,
    composite: Vec<u64>,
}

impl SieveSegment {
    pub fn sieve(lo: u64, hi: u64, base_primes: &[u32]) -> Self {
        let first_odd = lo | 1;
        let len = if hi > first_odd {
            ((hi - first_odd + 1) / 2) as usize
        } else {
            0
        };
        let mut composite = vec![0u64; len.div_ceil(64)];
        if first_odd == 1 && len > 0 {
            composite[0] |= 1;
        }
        for &p in base_primes.iter().skip_while(|&&p| p == 2) {
            let p = p as u64;
            let sq = p * p;
            if sq >= hi {
                break;
            }
            let start = if sq >= first_odd {
                sq
            } else {
                let r = first_odd % p;
                let m = if r == 0 { first_odd } else { first_odd + p - r };
                if m % 2 == 0 {
                    m + p
                } else {
                    m
                }
            };
            let step = p as usize;
            let mut i = ((start - first_odd) / 2) as usize;
            while i < len {
                composite[i >> 6] |= 1 << (i & 63);
                i += step;
            }
        }
        Self {
            lo,
            hi,
            first_odd,
            len,
            composite,
        }
    }

    /// Calls `f` on every prime in the segment, ascending.
    #[inline]
    pub fn for_each_prime(&self, mut f: impl FnMut(u64)) {
        if self.lo <= 2 && 2 < self.hi {
            f(2);
        }
        for (w, &bits) in self.composite.iter().enumerate() {
            let mut primes = !bits;
            let base = w * 64;
            if base + 64 > self.len {
                let valid = self.len - base;
                primes &= if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
            }
            while primes != 0 {
                let t = primes.trailing_zeros() as usize;
                f(self.first_odd + 2 * (base + t) as u64);
                primes &= primes - 1;
            }
        }
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut v = Vec::new();
        self.for_each_prime(|p| v.push(p));
        v
    }

    pub fn count(&self) -> u64 {
        let mut n = u64::from(self.lo <= 2 && 2 < self.hi);
        for (w, &bits) in self.composite.iter().enumerate() {
            let mut primes = !bits;
            let base = w * 64;
            if base + 64 > self.len {
                let valid = self.len - base;
                primes &= if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
            }
            n += primes.count_ones() as u64;
        }
        n
    }
}

/// A prime power `n = p^m` with `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimePowerEvent {
    pub n: u64,
    pub p: u64,
    pub m: u32,
    pub log_p: f64,
}

/// Primes up to `limit` inclusive by a plain sieve.
pub fn small_primes(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    let mut is_comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !is_comp[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub(crate) fn check_range(lo: u64, hi: u64) -> Result<()> {
    if hi > MAX_BOUND {
        return Err(Error::RangeTooLarge(hi));
    }
    if hi <= lo || lo < 2 {
        return Err(Error::EmptyRange { lo, hi });
    }
    Ok(())
}

/// Segment driver for `[lo, hi)`: `work` runs on each segment in parallel,
/// `consume` receives the results in ascending order.
pub fn for_each_segment<W, R, C>(lo: u64, hi: u64, config: &SieveConfig, work: W, mut consume: C) -> Result<()>
where
    W: Fn(u64, u64, &[u32]) -> R + Sync,
    R: Send,
    C: FnMut(R),
{
    check_range(lo, hi)?;
    let base = small_primes(isqrt(hi - 1) + 1);
    let span = config.segment_span();
    let batch = config.batch_len();
    let mut bounds = Vec::with_capacity(batch);
    let mut start = lo;
    let pool = config.pool();
    while start < hi {
        bounds.clear();
        while bounds.len() < batch && start < hi {
            let end = hi.min(start.saturating_add(span));
            bounds.push((start, end));
            start = end;
        }
        let results: Vec<R> = SieveConfig::install(&pool, || {
            bounds
                .par_iter()
                .map(|&(a, b)| work(a, b, &base))
                .collect()
        });
        for r in results {
            consume(r);
        }
    }
    Ok(())
}

/// Delivers every prime in `[lo, hi)` to `f`, ascending, and returns how many.
pub fn stream_primes(lo: u64, hi: u64, f: impl FnMut(u64)) -> Result<u64> {
    stream_primes_with(lo, hi, &SieveConfig::default(), f)
}

pub fn stream_primes_with(lo: u64, hi: u64, config: &SieveConfig, mut f: impl FnMut(u64)) -> Result<u64> {
    let mut count = 0;
    for_each_segment(
        lo,
        hi,
        config,
        |a, b, base| SieveSegment::sieve(a, b, base),
        |seg| {
            seg.for_each_prime(|p| {
                count += 1;
                f(p)
            })
        },
    )?;
    Ok(count)
}

/// Number of primes in `[lo, hi)` without visiting them.
pub fn count_primes(lo: u64, hi: u64, config: &SieveConfig) -> Result<u64> {
    let mut count = 0;
    for_each_segment(
        lo,
        hi,
        config,
        |a, b, base| SieveSegment::sieve(a, b, base).count(),
        |c| count += c,
    )?;
    Ok(count)
}

/// All `p^m` with `m >= 2` in `[lo, hi)`, ascending.
pub fn higher_powers(lo: u64, hi: u64) -> Vec<PrimePowerEvent> {
    let mut out = Vec::new();
    if hi <= 4 {
        return out;
    }
    for p in small_primes(isqrt(hi - 1)) {
        let p = p as u64;
        let log_p = (p as f64).ln();
        let mut n = p * p;
        let mut m = 2;
        while n < hi {
            if n >= lo {
                out.push(PrimePowerEvent { n, p, m, log_p });
            }
            match n.checked_mul(p) {
                Some(next) => n = next,
                None => break,
            }
            m += 1;
        }
    }
    out.sort_by_key(|e| e.n);
    out
}

/// Delivers every prime power in `[lo, hi)` ascending and returns how many.
pub fn stream_prime_powers(lo: u64, hi: u64, f: impl FnMut(PrimePowerEvent)) -> Result<u64> {
    stream_prime_powers_with(lo, hi, &SieveConfig::default(), f)
}

pub fn stream_prime_powers_with(
    lo: u64,
    hi: u64,
    config: &SieveConfig,
    mut f: impl FnMut(PrimePowerEvent),
) -> Result<u64> {
    check_range(lo, hi)?;
    let powers = higher_powers(lo, hi);
    let mut next = 0;
    let mut count = 0u64;
    stream_primes_with(lo, hi, config, |p| {
        while next < powers.len() && powers[next].n < p {
            f(powers[next]);
            next += 1;
            count += 1;
        }
        f(PrimePowerEvent {
            n: p,
            p,
            m: 1,
            log_p: (p as f64).ln(),
        });
        count += 1;
    })?;
    for e in &powers[next..] {
        f(*e);
        count += 1;
    }
    Ok(count)
}

/// Delivers every `n = p*q` (`p <= q` primes) in `[lo, hi)` ascending,
/// together with its smaller factor.
pub fn stream_semiprimes(lo: u64, hi: u64, config: &SieveConfig, mut f: impl FnMut(u64, u64)) -> Result<u64> {
    let mut count = 0;
    for_each_segment(
        lo,
        hi,
        config,
        |a, b, base| OmegaSegment::sieve(a, b, base).semiprimes(),
        |list| {
            for (n, p) in list {
                count += 1;
                f(n, p);
            }
        },
    )?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    #[test]
    fn first_primes() {
        let mut v = Vec::new();
        let n = stream_primes(2, 30, |p| v.push(p)).unwrap();
        assert_eq!(n, 10);
        assert_eq!(v, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(stream_primes(2, 101, |_| {}).unwrap(), 25);
    }

    #[test]
    fn window_around_first_crossing() {
        let mut v = Vec::new();
        stream_primes(26850, 26870, |p| v.push(p)).unwrap();
        assert!(v.contains(&26861) && v.contains(&26863));
        assert!(v.iter().all(|&p| is_prime(p)));
    }

    #[test]
    fn tiny_segments_agree_with_trial_division() {
        let cfg = SieveConfig::default().with_segment_bytes(8);
        let mut v = Vec::new();
        stream_primes_with(2, 5000, &cfg, |p| v.push(p)).unwrap();
        let oracle: Vec<u64> = (2..5000).filter(|&n| is_prime(n)).collect();
        assert_eq!(v, oracle);
        let mut w = Vec::new();
        stream_primes_with(1001, 4003, &cfg, |p| w.push(p)).unwrap();
        let oracle: Vec<u64> = (1001..4003).filter(|&n| is_prime(n)).collect();
        assert_eq!(w, oracle);
    }

    #[test]
    fn prime_powers_small() {
        let mut v = Vec::new();
        stream_prime_powers(2, 20, |e| v.push(e)).unwrap();
        let ns: Vec<u64> = v.iter().map(|e| e.n).collect();
        assert_eq!(ns, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19]);
        let e16 = v.iter().find(|e| e.n == 16).unwrap();
        assert_eq!((e16.p, e16.m), (2, 4));
        let mut w = Vec::new();
        stream_prime_powers(20, 25, |e| w.push(e.n)).unwrap();
        assert_eq!(w, vec![23]);
    }

    #[test]
    fn semiprimes_small() {
        let mut v = Vec::new();
        stream_semiprimes(2, 26, &SieveConfig::default(), |n, _| v.push(n)).unwrap();
        assert_eq!(v, vec![4, 6, 9, 10, 14, 15, 21, 22, 25]);
    }

    #[test]
    fn empty_range_rejected() {
        assert!(matches!(stream_primes(10, 10, |_| {}), Err(Error::EmptyRange { .. })));
        assert!(matches!(stream_primes(2, MAX_BOUND + 1, |_| {}), Err(Error::RangeTooLarge(_))));
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4294967295);
    }
}
