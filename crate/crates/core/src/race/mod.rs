//! Per-class counting functions and empirical race statistics.

mod emit;
mod li;
mod ordering;
mod semiprime;
mod series;
mod sweep;

pub use emit::{counts_csv, crossing_report, series_csv, CrossingReport};
pub use li::{li, littlewood_scan, LittlewoodScan};
pub use ordering::{e_vector, find_ordering, EVector};
pub use semiprime::{pi2_counts, pi2_sweep, Pi2Counts};
pub use series::{Crossing, LeadDensity, LogDensity, RacePoint, RaceSeries};
pub use sweep::{lead_density, log_density, sweep, CountSample, CountVector, Sweep, SweepOptions, SweepResult};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::residue::ResidueSystem;

/// The five counting functions a race can be run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CountingFunction {
    /// Primes.
    Pi,
    /// `sum log p` over primes.
    Theta,
    /// `sum Lambda(n)` over prime powers.
    Psi,
    /// `sum 1/m` over prime powers `p^m`.
    BigPi,
    /// Products of two primes.
    Pi2,
}

impl CountingFunction {
    pub const ALL: [CountingFunction; 5] = [
        CountingFunction::Pi,
        CountingFunction::Theta,
        CountingFunction::Psi,
        CountingFunction::BigPi,
        CountingFunction::Pi2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CountingFunction::Pi => "pi",
            CountingFunction::Theta => "theta",
            CountingFunction::Psi => "psi",
            CountingFunction::BigPi => "Pi",
            CountingFunction::Pi2 => "pi2",
        }
    }

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(c: u8) -> Result<Self> {
        Self::ALL
            .get(c as usize)
            .copied()
            .ok_or_else(|| Error::CheckpointFormat(format!("bad function code {c}")))
    }
}

impl fmt::Display for CountingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CountingFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(Self::Pi),
            "theta" => Ok(Self::Theta),
            "psi" => Ok(Self::Psi),
            "Pi" | "bigpi" | "Pi_" => Ok(Self::BigPi),
            "pi2" => Ok(Self::Pi2),
            other => Err(Error::InvalidParameter(format!(
                "unknown counting function {other:?} (expected pi, theta, psi, Pi, pi2)"
            ))),
        }
    }
}

/// `delta = sum_{l in lead} f(x; k, l) - sum_{l in trail} f(x; k, l)`.
///
/// A two-class race has one class on each side; larger sides give the
/// union races.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaceSpec {
    pub function: CountingFunction,
    pub lead: Vec<u64>,
    pub trail: Vec<u64>,
}

impl RaceSpec {
    pub fn pair(function: CountingFunction, l1: u64, l2: u64) -> Self {
        Self {
            function,
            lead: vec![l1],
            trail: vec![l2],
        }
    }

    pub fn union(function: CountingFunction, lead: Vec<u64>, trail: Vec<u64>) -> Self {
        Self {
            function,
            lead,
            trail,
        }
    }

    /// Per-unit weights (+1 lead, -1 trail, 0 elsewhere), after checking
    /// that every class is a unit and the two sides are disjoint.
    pub fn weights(&self, sys: &ResidueSystem) -> Result<Vec<i8>> {
        let k = sys.modulus();
        if self.lead.is_empty() || self.trail.is_empty() {
            return Err(Error::InvalidRace("both sides need at least one class".into()));
        }
        let mut w = vec![0i8; sys.euler_phi()];
        for (side, sign) in [(&self.lead, 1i8), (&self.trail, -1i8)] {
            for &l in side {
                let i = sys
                    .index_of(l)
                    .ok_or_else(|| Error::InvalidRace(format!("{l} is not a unit modulo {k}")))?;
                if w[i] != 0 {
                    return Err(Error::InvalidRace(format!(
                        "class {} appears twice",
                        l % k
                    )));
                }
                w[i] = sign;
            }
        }
        Ok(w)
    }

    pub fn label(&self, k: u64) -> String {
        let side = |v: &[u64]| {
            v.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("+")
        };
        format!(
            "{}(x;{k},{}) - {}(x;{k},{})",
            self.function,
            side(&self.lead),
            self.function,
            side(&self.trail)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_names_round_trip() {
        for f in CountingFunction::ALL {
            assert_eq!(f.name().parse::<CountingFunction>().unwrap(), f);
            assert_eq!(CountingFunction::from_code(f.code()).unwrap(), f);
        }
        assert!("phi".parse::<CountingFunction>().is_err());
    }

    #[test]
    fn race_weights() {
        let sys = ResidueSystem::new(8).unwrap();
        let w = RaceSpec::union(CountingFunction::Pi, vec![3, 5], vec![7]).weights(&sys).unwrap();
        assert_eq!(w, vec![0, 1, 1, -1]);
        assert!(RaceSpec::pair(CountingFunction::Pi, 3, 3).weights(&sys).is_err());
        assert!(RaceSpec::pair(CountingFunction::Pi, 3, 4).weights(&sys).is_err());
    }
}
