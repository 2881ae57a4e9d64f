use serde::Serialize;

use crate::error::{Error, Result};
use crate::residue::ResidueSystem;
use crate::sieve::{stream_primes_with, SieveConfig};

fn class_indices(sys: &ResidueSystem, classes: &[u64]) -> Result<Vec<usize>> {
    let mut seen = vec![false; sys.euler_phi()];
    let mut out = Vec::with_capacity(classes.len());
    for &a in classes {
        let i = sys.index_of(a).ok_or(Error::InvalidResidue {
            modulus: sys.modulus(),
            residue: a,
        })?;
        if seen[i] {
            return Err(Error::DuplicateClass(a % sys.modulus()));
        }
        seen[i] = true;
        out.push(i);
    }
    Ok(out)
}

/// Smallest `m` in `[x_start, x_end]` with
/// `pi(m; k, a_1) > pi(m; k, a_2) > ... > pi(m; k, a_r)`.
pub fn find_ordering(
    k: u64,
    ordering: &[u64],
    x_start: u64,
    x_end: u64,
    sieve: &SieveConfig,
) -> Result<Option<u64>> {
    let sys = ResidueSystem::new(k)?;
    if ordering.len() < 2 || ordering.len() > sys.euler_phi() {
        return Err(Error::InvalidRace(format!(
            "ordering of {} classes is impossible modulo {k} (phi = {})",
            ordering.len(),
            sys.euler_phi()
        )));
    }
    let idx = class_indices(&sys, ordering)?;
    if x_end < x_start || x_end < 2 {
        return Ok(None);
    }
    // slot[i] = position of unit i in the ordering
    let mut slot = vec![usize::MAX; sys.euler_phi()];
    for (j, &i) in idx.iter().enumerate() {
        slot[i] = j;
    }
    let mut counts = vec![0u64; ordering.len()];
    let holds = |c: &[u64]| c.windows(2).all(|w| w[0] > w[1]);
    let x_start = x_start.max(2);
    let mut found = None;
    let mut checked_start = false;
    stream_primes_with(2, x_end + 1, sieve, |p| {
        if found.is_some() {
            return;
        }
        if p > x_start && !checked_start {
            checked_start = true;
            if holds(&counts) {
                found = Some(x_start);
                return;
            }
        }
        if let Some(i) = sys.index_of(p) {
            if slot[i] != usize::MAX {
                counts[slot[i]] += 1;
                if p >= x_start && holds(&counts) {
                    found = Some(p);
                }
            }
        }
    })?;
    if found.is_none() && !checked_start && holds(&counts) {
        found = Some(x_start);
    }
    Ok(found)
}

/// Samples of `(log x / sqrt x) (phi(k) pi(x; k, a) - pi(x))` per class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EVector {
    pub modulus: u64,
    pub classes: Vec<u64>,
    pub samples: Vec<(u64, Vec<f64>)>,
}

pub fn e_vector(k: u64, classes: &[u64], xs: &[u64], sieve: &SieveConfig) -> Result<EVector> {
    let sys = ResidueSystem::new(k)?;
    let idx = class_indices(&sys, classes)?;
    if let Some(&x) = xs.iter().find(|&&x| x < 2) {
        return Err(Error::InvalidParameter(format!("sample point {x} is below 2")));
    }
    let mut points: Vec<u64> = xs.to_vec();
    points.sort_unstable();
    points.dedup();
    let phi = sys.euler_phi() as f64;
    let mut per_class = vec![0u64; sys.euler_phi()];
    let mut total = 0u64;
    let mut samples = Vec::with_capacity(points.len());
    let mut next = 0;
    let record = |x: u64, per_class: &[u64], total: u64| {
        let xf = x as f64;
        let scale = xf.ln() / xf.sqrt();
        let v = idx
            .iter()
            .map(|&i| scale * (phi * per_class[i] as f64 - total as f64))
            .collect();
        (x, v)
    };
    if let Some(&last) = points.last() {
        stream_primes_with(2, last + 1, sieve, |p| {
            while next < points.len() && points[next] < p {
                samples.push(record(points[next], &per_class, total));
                next += 1;
            }
            total += 1;
            if let Some(i) = sys.index_of(p) {
                per_class[i] += 1;
            }
        })?;
        while next < points.len() {
            samples.push(record(points[next], &per_class, total));
            next += 1;
        }
    }
    Ok(EVector {
        modulus: k,
        classes: classes.iter().map(|a| a % k).collect(),
        samples,
    })
}
