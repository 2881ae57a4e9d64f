//! Reduced residue systems, quadratic-residue data, Dirichlet characters and
//! the race sign function.

mod characters;
pub mod cyclotomic;

pub use characters::{Angle, CharValue, Character, CharacterTable, CyclicComponent};

use serde::Serialize;

use crate::arith::{gcd, mul_mod};
use crate::error::{Error, Result};

const NOT_A_UNIT: u32 = u32::MAX;

/// A modulus `k` with its units, square-root counts and index lookup.
///
/// `square_count(l)` is the number of `x` in `[0, k)` with `x^2 = l (mod k)`.
#[derive(Debug, Clone)]
pub struct ResidueSystem {
    modulus: u64,
    reduced: Vec<u64>,
    square_count: Vec<u32>,
    index: Vec<u32>,
}

impl ResidueSystem {
    pub fn new(k: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidModulus(k));
        }
        if k > u32::MAX as u64 {
            return Err(Error::InvalidParameter(format!(
                "modulus {k} too large for a residue table"
            )));
        }
        let size = k as usize;
        let mut index = vec![NOT_A_UNIT; size];
        let mut reduced = Vec::new();
        for a in 1..k {
            if gcd(a, k) == 1 {
                index[a as usize] = reduced.len() as u32;
                reduced.push(a);
            }
        }
        let mut square_count = vec![0u32; size];
        for x in 0..k {
            square_count[mul_mod(x, x, k) as usize] += 1;
        }
        Ok(Self {
            modulus: k,
            reduced,
            square_count,
            index,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Units modulo `k`, ascending.
    pub fn reduced(&self) -> &[u64] {
        &self.reduced
    }

    pub fn euler_phi(&self) -> usize {
        self.reduced.len()
    }

    pub fn is_unit(&self, a: u64) -> bool {
        self.index_of(a).is_some()
    }

    /// Position of `a mod k` within [`reduced`](Self::reduced).
    #[inline]
    pub fn index_of(&self, a: u64) -> Option<usize> {
        match self.index[(a % self.modulus) as usize] {
            NOT_A_UNIT => None,
            i => Some(i as usize),
        }
    }

    /// `N_k(l)`, the number of incongruent solutions of `x^2 = l (mod k)`.
    pub fn square_count(&self, l: u64) -> u32 {
        self.square_count[(l % self.modulus) as usize]
    }

    pub fn is_quadratic_residue(&self, l: u64) -> bool {
        self.is_unit(l) && self.square_count(l) > 0
    }

    /// Units that are quadratic residues, ascending.
    pub fn quadratic_residues(&self) -> Vec<u64> {
        self.reduced
            .iter()
            .copied()
            .filter(|&a| self.square_count(a) > 0)
            .collect()
    }

    pub fn require_unit(&self, a: u64) -> Result<usize> {
        self.index_of(a).ok_or(Error::InvalidResidue {
            modulus: self.modulus,
            residue: a,
        })
    }

    /// Compares the square-root counts of two classes.  The class with fewer
    /// square roots is the one heuristically expected to hold more primes;
    /// this is a classification only and carries no guarantee.
    pub fn expected_leader(&self, l1: u64, l2: u64) -> Option<u64> {
        let (n1, n2) = (self.square_count(l1), self.square_count(l2));
        match n1.cmp(&n2) {
            std::cmp::Ordering::Less => Some(l1 % self.modulus),
            std::cmp::Ordering::Greater => Some(l2 % self.modulus),
            std::cmp::Ordering::Equal => None,
        }
    }
}

/// `epsilon(k; n, l1, l2)`: +1 on class `l1`, -1 on class `l2`, 0 elsewhere.
pub fn epsilon(sys: &ResidueSystem, n: u64, l1: u64, l2: u64) -> Result<i8> {
    let k = sys.modulus();
    sys.require_unit(l1)
        .and_then(|_| sys.require_unit(l2))
        .map_err(|e| Error::InvalidRace(e.to_string()))?;
    if l1 % k == l2 % k {
        return Err(Error::InvalidRace(format!(
            "classes {l1} and {l2} coincide modulo {k}"
        )));
    }
    let r = n % k;
    Ok(if r == l1 % k {
        1
    } else if r == l2 % k {
        -1
    } else {
        0
    })
}

/// The bias constant `c(q, a) = N_q(a) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BiasConstant {
    pub modulus: u64,
    pub residue: u64,
    pub value: i64,
}

pub fn bias_constant(sys: &ResidueSystem, a: u64) -> Result<BiasConstant> {
    sys.require_unit(a)?;
    Ok(BiasConstant {
        modulus: sys.modulus(),
        residue: a % sys.modulus(),
        value: sys.square_count(a) as i64 - 1,
    })
}
