use super::isqrt;

/// Segment of `[lo, hi)` annotated with `Omega(n)`, the number of prime
/// factors with multiplicity, and the smallest prime factor.
#[derive(Debug, Clone)]
pub struct OmegaSegment {
    pub lo: u64,
    pub hi: u64,
    omega: Vec<u8>,
    smallest: Vec<u64>,
}

impl OmegaSegment {
    pub fn sieve(lo: u64, hi: u64, base_primes: &[u32]) -> Self {
        let len = (hi - lo) as usize;
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut omega = vec![0u8; len];
        let mut smallest = vec![0u64; len];
        let root = isqrt(hi.saturating_sub(1));
        for &p in base_primes {
            let p = p as u64;
            if p > root {
                break;
            }
            let mut pk = p;
            loop {
                let first = lo.div_ceil(pk) * pk;
                let mut n = first;
                while n < hi {
                    let i = (n - lo) as usize;
                    omega[i] = omega[i].saturating_add(1);
                    rem[i] /= p;
                    if smallest[i] == 0 {
                        smallest[i] = p;
                    }
                    n += pk;
                }
                match pk.checked_mul(p) {
                    Some(next) if next < hi => pk = next,
                    _ => break,
                }
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                omega[i] = omega[i].saturating_add(1);
                if smallest[i] == 0 {
                    smallest[i] = rem[i];
                }
            }
        }
        Self {
            lo,
            hi,
            omega,
            smallest,
        }
    }

    pub fn omega(&self, n: u64) -> u8 {
        self.omega[(n - self.lo) as usize]
    }

    /// `(n, smallest prime factor)` for every `n` with `Omega(n) = 2`.
    pub fn semiprimes(&self) -> Vec<(u64, u64)> {
        self.omega
            .iter()
            .enumerate()
            .filter(|(_, &w)| w == 2)
            .map(|(i, _)| (self.lo + i as u64, self.smallest[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::small_primes;

    #[test]
    fn omega_values() {
        let base = small_primes(20);
        let seg = OmegaSegment::sieve(2, 100, &base);
        assert_eq!(seg.omega(2), 1);
        assert_eq!(seg.omega(64), 6);
        assert_eq!(seg.omega(60), 4);
        assert_eq!(seg.omega(97), 1);
        assert_eq!(seg.omega(91), 2);
        let sp = seg.semiprimes();
        assert!(sp.contains(&(91, 7)));
        assert!(sp.contains(&(49, 7)));
    }
}
