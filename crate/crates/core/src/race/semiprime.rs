use serde::Serialize;

use super::sweep::{sweep, SweepOptions, SweepResult};
use super::{CountingFunction, RaceSpec};
use crate::error::{Error, Result};
use crate::residue::ResidueSystem;
use crate::sieve::{isqrt, stream_primes_with, SieveConfig};

/// `pi_2(T; k, l)` per unit class, counted pair by pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pi2Counts {
    pub modulus: u64,
    pub t: u64,
    pub classes: Vec<u64>,
    pub counts: Vec<u64>,
    /// Semiprimes `<= T` sharing a factor with the modulus.
    pub non_units: u64,
    pub total: u64,
}

impl Pi2Counts {
    pub fn count(&self, l: u64) -> Option<u64> {
        let l = l % self.modulus;
        self.classes
            .iter()
            .position(|&c| c == l)
            .map(|i| self.counts[i])
    }
}

/// Counts `n = p q <= T`, `p <= q`, by running `q` over the primes in
/// `[p, T/p]` for each prime `p <= sqrt T`.
pub fn pi2_counts(k: u64, t: u64, sieve: &SieveConfig) -> Result<Pi2Counts> {
    let sys = ResidueSystem::new(k)?;
    let mut primes = Vec::new();
    if t >= 4 {
        stream_primes_with(2, t / 2 + 1, sieve, |p| primes.push(p))?;
    }
    let mut counts = vec![0u64; sys.euler_phi()];
    let mut non_units = 0;
    let mut total = 0;
    let root = isqrt(t);
    for (i, &p) in primes.iter().enumerate() {
        if p > root {
            break;
        }
        let lim = t / p;
        for &q in primes[i..].iter().take_while(|&&q| q <= lim) {
            total += 1;
            match sys.index_of((p % k) * (q % k) % k) {
                Some(j) => counts[j] += 1,
                None => non_units += 1,
            }
        }
    }
    Ok(Pi2Counts {
        modulus: k,
        t,
        classes: sys.reduced().to_vec(),
        counts,
        non_units,
        total,
    })
}

/// Semiprime race `pi_2(x; k, l1) - pi_2(x; k, l2)` swept to `T`.
pub fn pi2_sweep(k: u64, l1: u64, l2: u64, t: u64, options: &SweepOptions) -> Result<SweepResult> {
    if t < 4 {
        return Err(Error::InvalidParameter("semiprime sweep needs T >= 4".into()));
    }
    let mut opts = options.clone();
    opts.races = vec![RaceSpec::pair(CountingFunction::Pi2, l1, l2)];
    opts.semiprimes = true;
    sweep(k, t, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semiprimes_to_25() {
        let c = pi2_counts(4, 25, &SieveConfig::default()).unwrap();
        assert_eq!(c.count(1), Some(3));
        assert_eq!(c.count(3), Some(1));
        assert_eq!(c.total, 9);
        let c = pi2_counts(4, 4, &SieveConfig::default()).unwrap();
        assert_eq!((c.count(1), c.count(3), c.total), (Some(0), Some(0), 1));
    }

    #[test]
    fn sweep_matches_pair_count() {
        let r = pi2_sweep(4, 1, 3, 25, &SweepOptions::default()).unwrap();
        let pi2 = r.counts.pi2.as_ref().unwrap();
        assert_eq!(pi2, &vec![3, 1]);
        assert_eq!(r.races[0].delta, 2.0);
    }
}
