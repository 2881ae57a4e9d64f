use std::fmt;

use num_complex::Complex64;

use super::cyclotomic::{cyclotomic_polynomial, reduce_by};
use super::ResidueSystem;
use crate::arith::{divisors, factorize, gcd, lcm, pow_mod};
use crate::error::{Error, Result};

/// A rational fraction of a full turn, `num/den` in lowest terms, `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    pub num: u64,
    pub den: u64,
}

impl Angle {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = gcd(num, den).max(1);
        let (num, den) = (num / g, den / g);
        // gcd(0, den) = den, which already reduces 0/den to 0/1
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn to_complex(self) -> Complex64 {
        if self.num == 0 {
            return Complex64::new(1.0, 0.0);
        }
        // exact values on the axes keep +-1 and +-i free of rounding
        match (4 * self.num) % self.den == 0 {
            true => match 4 * self.num / self.den {
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                3 => Complex64::new(0.0, -1.0),
                _ => Complex64::new(1.0, 0.0),
            },
            false => {
                let t = std::f64::consts::TAU * self.num as f64 / self.den as f64;
                Complex64::new(t.cos(), t.sin())
            }
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        let (n, d) = token.trim().split_once('/')?;
        let n: u64 = n.trim().parse().ok()?;
        let d: u64 = d.trim().parse().ok()?;
        if d == 0 || n >= d {
            return None;
        }
        let a = Self::new(n, d);
        (a.num == n && a.den == d).then_some(a)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Value of a character at a residue: zero off the units, a root of unity on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root(Angle),
}

impl CharValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::Root(a) => a.to_complex(),
        }
    }
}

/// One cyclic factor of the unit group, living on the prime power `prime_power`.
#[derive(Debug, Clone)]
pub struct CyclicComponent {
    pub prime: u64,
    pub prime_power: u64,
    pub order: u64,
    /// Generator as a residue modulo `prime_power`.
    pub generator: u64,
    /// The same generator lifted to a unit modulo `k` that is 1 on the other factors.
    pub lifted: u64,
}

#[derive(Debug, Clone)]
pub struct Character {
    pub index: usize,
    /// Exponent of the root of unity assigned to each component generator.
    pub exponents: Vec<u64>,
    pub is_principal: bool,
    pub is_real: bool,
    pub order: u64,
    pub conductor: u64,
    /// `chi(-1) = -1`.
    pub is_odd: bool,
}

/// All Dirichlet characters modulo `k`.
///
/// Characters are indexed lexicographically by their exponent tuple, the first
/// component (smallest prime; for `2^e` the `-1` factor before the `5` factor)
/// being the most significant.  Index 0 is always the principal character.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    system: ResidueSystem,
    exponent: u64,
    components: Vec<CyclicComponent>,
    /// Discrete logs, `logs[unit_index * m + component]`.
    logs: Vec<u32>,
    characters: Vec<Character>,
    /// `Phi_exponent`, for exact sums of character values.
    cyclotomic: Vec<i128>,
}

fn is_primitive_root_mod_p(g: u64, p: u64) -> bool {
    factorize(p - 1)
        .iter()
        .all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1)
}

fn crt_lift(value: u64, prime_power: u64, k: u64) -> u64 {
    // x = value mod prime_power, x = 1 mod k/prime_power
    let other = k / prime_power;
    let mut x = value % prime_power;
    while x % other != 1 % other {
        x += prime_power;
    }
    x
}

impl CharacterTable {
    pub fn new(k: u64) -> Result<Self> {
        let system = ResidueSystem::new(k)?;
        let mut components = Vec::new();
        // per component, map residue mod prime_power -> discrete log
        let mut tables: Vec<(u64, Box<dyn Fn(u64) -> u64>)> = Vec::new();

        for (p, e) in factorize(k) {
            let pe = p.pow(e);
            if p == 2 {
                if e >= 2 {
                    components.push(CyclicComponent {
                        prime: 2,
                        prime_power: pe,
                        order: 2,
                        generator: pe - 1,
                        lifted: crt_lift(pe - 1, pe, k),
                    });
                    tables.push((pe, Box::new(move |a| u64::from(a % 4 == 3))));
                }
                if e >= 3 {
                    let order = pe / 4;
                    let mut log5 = vec![u32::MAX; pe as usize];
                    let mut x = 1u64;
                    for i in 0..order {
                        log5[x as usize] = i as u32;
                        x = x * 5 % pe;
                    }
                    components.push(CyclicComponent {
                        prime: 2,
                        prime_power: pe,
                        order,
                        generator: 5,
                        lifted: crt_lift(5, pe, k),
                    });
                    tables.push((
                        pe,
                        Box::new(move |a| {
                            let b = if a % 4 == 3 { pe - a } else { a };
                            log5[b as usize] as u64
                        }),
                    ));
                }
            } else {
                let order = pe / p * (p - 1);
                let g = (2..p)
                    .find(|&g| {
                        is_primitive_root_mod_p(g, p) && (e == 1 || pow_mod(g, p - 1, p * p) != 1)
                    })
                    .unwrap_or(1);
                let mut log = vec![u32::MAX; pe as usize];
                let mut x = 1u64;
                for i in 0..order {
                    log[x as usize] = i as u32;
                    x = x * g % pe;
                }
                components.push(CyclicComponent {
                    prime: p,
                    prime_power: pe,
                    order,
                    generator: g,
                    lifted: crt_lift(g, pe, k),
                });
                tables.push((pe, Box::new(move |a| log[a as usize] as u64)));
            }
        }

        let m = components.len();
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        let mut logs = Vec::with_capacity(system.euler_phi() * m);
        for &a in system.reduced() {
            for (pe, f) in &tables {
                logs.push(f(a % pe) as u32);
            }
        }

        let mut table = Self {
            system,
            exponent,
            components,
            logs,
            characters: Vec::new(),
            cyclotomic: cyclotomic_polynomial(exponent),
        };
        table.characters = table.enumerate();
        Ok(table)
    }

    fn enumerate(&self) -> Vec<Character> {
        let orders: Vec<u64> = self.components.iter().map(|c| c.order).collect();
        let count: u64 = orders.iter().product();
        let mut out = Vec::with_capacity(count as usize);
        let mut exps = vec![0u64; orders.len()];
        let minus_one = self
            .system
            .index_of(self.modulus() - 1)
            .expect("-1 is a unit");
        for index in 0..count as usize {
            let order = exps
                .iter()
                .zip(&orders)
                .fold(1, |acc, (&e, &n)| lcm(acc, n / gcd(e, n)));
            let mut chi = Character {
                index,
                exponents: exps.clone(),
                is_principal: exps.iter().all(|&e| e == 0),
                is_real: order <= 2,
                order,
                conductor: 1,
                is_odd: false,
            };
            chi.is_odd = self.numerator_of(&chi.exponents, minus_one) != 0;
            chi.conductor = self.structural_conductor(&chi.exponents);
            out.push(chi);
            // lexicographic increment, last component fastest
            for i in (0..exps.len()).rev() {
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
        out
    }

    fn structural_conductor(&self, exps: &[u64]) -> u64 {
        let mut conductor = 1;
        let mut two_minus = false;
        let mut two_five = 1u64;
        for (c, &e) in self.components.iter().zip(exps) {
            let ord = c.order / gcd(e, c.order);
            if c.prime == 2 {
                if c.order == 2 && c.generator == c.prime_power - 1 {
                    two_minus = ord > 1;
                } else {
                    two_five = ord;
                }
            } else if ord > 1 {
                let mut f = c.prime;
                let mut o = ord;
                while o % c.prime == 0 {
                    o /= c.prime;
                    f *= c.prime;
                }
                conductor *= f;
            }
        }
        if two_five > 1 {
            conductor *= 4 * two_five;
        } else if two_minus {
            conductor *= 4;
        }
        conductor
    }

    pub fn modulus(&self) -> u64 {
        self.system.modulus()
    }

    pub fn system(&self) -> &ResidueSystem {
        &self.system
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// Common denominator (the group exponent) of all character angles.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn components(&self) -> &[CyclicComponent] {
        &self.components
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn character(&self, index: usize) -> &Character {
        &self.characters[index]
    }

    pub fn non_principal(&self) -> impl Iterator<Item = &Character> {
        self.characters.iter().filter(|c| !c.is_principal)
    }

    fn numerator_of(&self, exps: &[u64], unit_index: usize) -> u64 {
        let m = self.components.len();
        let logs = &self.logs[unit_index * m..(unit_index + 1) * m];
        let mut acc = 0u64;
        for ((c, &e), &l) in self.components.iter().zip(exps).zip(logs) {
            acc += (e * l as u64 % c.order) * (self.exponent / c.order);
        }
        acc % self.exponent
    }

    /// Angle numerator of `chi(a)` over [`exponent`](Self::exponent), for the
    /// unit with position `unit_index` in the reduced system.
    pub fn numerator(&self, chi: usize, unit_index: usize) -> u64 {
        self.numerator_of(&self.characters[chi].exponents, unit_index)
    }

    pub fn value(&self, chi: usize, a: u64) -> CharValue {
        match self.system.index_of(a) {
            None => CharValue::Zero,
            Some(i) => CharValue::Root(Angle::new(self.numerator(chi, i), self.exponent)),
        }
    }

    pub fn complex(&self, chi: usize, a: u64) -> Complex64 {
        self.value(chi, a).to_complex()
    }

    /// Index of the complex-conjugate character.
    pub fn conjugate(&self, chi: usize) -> usize {
        let exps: Vec<u64> = self.characters[chi]
            .exponents
            .iter()
            .zip(&self.components)
            .map(|(&e, c)| (c.order - e) % c.order)
            .collect();
        self.index_of_exponents(&exps)
    }

    fn index_of_exponents(&self, exps: &[u64]) -> usize {
        exps.iter()
            .zip(&self.components)
            .fold(0usize, |acc, (&e, c)| acc * c.order as usize + e as usize)
    }

    /// Value fingerprint: `chi(a)` for `a = 0..k` as comma-separated tokens,
    /// `n/d` for a root of unity `e^{2 pi i n/d}` and `0` off the units.
    pub fn fingerprint(&self, chi: usize) -> String {
        (0..self.modulus())
            .map(|a| match self.value(chi, a) {
                CharValue::Zero => "0".to_string(),
                CharValue::Root(angle) => angle.to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn find_fingerprint(&self, fingerprint: &str) -> Option<usize> {
        let tokens: Vec<&str> = fingerprint.split(',').map(str::trim).collect();
        if tokens.len() as u64 != self.modulus() {
            return None;
        }
        let mut parsed = Vec::with_capacity(tokens.len());
        for t in &tokens {
            parsed.push(match *t {
                "0" => CharValue::Zero,
                t => CharValue::Root(Angle::parse(t)?),
            });
        }
        (0..self.len()).find(|&chi| {
            parsed
                .iter()
                .enumerate()
                .all(|(a, v)| self.value(chi, a as u64) == *v)
        })
    }

    /// Values of the primitive character inducing `chi`, indexed by `n mod f`
    /// where `f` is the conductor; `None` where `gcd(n, f) > 1`.
    pub fn primitive_values(&self, chi: usize) -> Vec<Option<Angle>> {
        let f = self.characters[chi].conductor;
        let k = self.modulus();
        (0..f)
            .map(|n| {
                if gcd(n, f) != 1 {
                    return None;
                }
                let mut a = n;
                while gcd(a, k) != 1 {
                    a += f;
                }
                match self.value(chi, a % k) {
                    CharValue::Root(angle) => Some(angle),
                    CharValue::Zero => None,
                }
            })
            .collect()
    }

    /// Conductor from the definition: the least divisor `d` of `k` such that
    /// `chi(a) = 1` whenever `a` is a unit with `a = 1 (mod d)`.
    pub fn conductor_by_induction(&self, chi: usize) -> u64 {
        let k = self.modulus();
        divisors(k)
            .into_iter()
            .find(|&d| {
                self.system
                    .reduced()
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a % d == 1 % d)
                    .all(|(i, _)| self.numerator(chi, i) == 0)
            })
            .unwrap_or(k)
    }

    /// Exact value of `sum_a chi_i(a) conj(chi_j(a))` over units, or `None` if
    /// the sum were not a rational integer (it always is).
    pub fn inner_product_exact(&self, i: usize, j: usize) -> Option<i64> {
        let lam = self.exponent;
        let mut hist = vec![0i64; lam as usize];
        for u in 0..self.system.euler_phi() {
            let d = (self.numerator(i, u) + lam - self.numerator(j, u)) % lam;
            hist[d as usize] += 1;
        }
        reduce_by(&hist, &self.cyclotomic)
    }

    /// Exact value of `sum_chi chi(a)` over all characters.
    pub fn column_sum_exact(&self, a: u64) -> Result<Option<i64>> {
        let u = self.system.require_unit(a)?;
        let mut hist = vec![0i64; self.exponent as usize];
        for chi in 0..self.len() {
            hist[self.numerator(chi, u) as usize] += 1;
        }
        Ok(reduce_by(&hist, &self.cyclotomic))
    }

    /// Index of the character with the given primitive fingerprint, lifted
    /// from a smaller modulus.  Used when zero data exists only for the
    /// inducing character.
    pub fn find_induced_from(&self, other: &CharacterTable, other_chi: usize) -> Result<usize> {
        let f = other.modulus();
        if self.modulus() % f != 0 {
            return Err(Error::InvalidParameter(format!(
                "modulus {f} does not divide {}",
                self.modulus()
            )));
        }
        (0..self.len())
            .find(|&chi| {
                self.system.reduced().iter().all(|&a| {
                    let mine = self.value(chi, a);
                    let theirs = other.value(other_chi, a % f);
                    mine == theirs
                })
            })
            .ok_or_else(|| Error::InvalidParameter("character does not induce".into()))
    }
}
