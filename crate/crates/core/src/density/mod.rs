//! Limiting logarithmic densities of prime races from the characteristic
//! function of the limiting distribution, assuming GRH and linear
//! independence of zero ordinates.
//!
//! For the differences `Y_j = X_{a_j} - X_{a_{j+1}}` the transform is
//!
//! ```text
//! rho(eta) = exp(i sum_j (c(a_j) - c(a_{j+1})) eta_j)
//!          * prod_{chi != chi_0} F(|sum_j (chi(a_j) - chi(a_{j+1})) eta_j|, chi)
//! ```
//!
//! and the density of `Y_1 > 0, ..., Y_{r-1} > 0` is
//! `2^{-(r-1)} (1 + sum_B (i/pi)^|B| PV int rho(B) prod_{j in B} d eta_j / eta_j)`.
//! Each principal value is folded onto the positive orthant by summing the
//! sign patterns, which leaves a bounded real integrand.

mod bessel;

pub use bessel::{bessel_j0, BesselFactor};

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{inverse_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::quadrature::kronrod_rule;
use crate::residue::{CharacterTable, ResidueSystem};
use crate::summation::CompensatedSum;
use crate::zeros::ZeroArchive;

/// `chi(a_j) - chi(a_{j+1})` for one non-principal character.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterDiff {
    pub character: usize,
    pub coefficients: Vec<Complex64>,
}

/// The data that defines `rho` for one tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformSpec {
    pub modulus: u64,
    pub tuple: Vec<u64>,
    /// `c(k, a_j)`.
    pub offsets: Vec<i64>,
    /// `c(k, a_j) - c(k, a_{j+1})`, the phase frequencies.
    pub phase: Vec<i64>,
    pub characters: Vec<CharacterDiff>,
    /// Inside `|eta_j| < excision` the folded integrand is evaluated at the
    /// band edge; it is even in each variable, so the error is second order.
    pub excision: f64,
}

/// Checks that the tuple consists of at least two distinct units.
pub fn validate_tuple(sys: &ResidueSystem, tuple: &[u64]) -> Result<Vec<u64>> {
    let k = sys.modulus();
    if tuple.len() < 2 {
        return Err(Error::InvalidRace(format!(
            "a race needs at least two classes, got {}",
            tuple.len()
        )));
    }
    let mut seen = vec![false; k as usize];
    let mut out = Vec::with_capacity(tuple.len());
    for &a in tuple {
        sys.require_unit(a)?;
        let r = a % k;
        if seen[r as usize] {
            return Err(Error::DuplicateClass(r));
        }
        seen[r as usize] = true;
        out.push(r);
    }
    Ok(out)
}

impl TransformSpec {
    pub fn new(table: &CharacterTable, tuple: &[u64], excision: f64) -> Result<Self> {
        let sys = table.system();
        let tuple = validate_tuple(sys, tuple)?;
        let offsets: Vec<i64> = tuple
            .iter()
            .map(|&a| sys.square_count(a) as i64 - 1)
            .collect();
        let phase = offsets.windows(2).map(|w| w[0] - w[1]).collect();
        let characters = table
            .non_principal()
            .map(|chi| CharacterDiff {
                character: chi.index,
                coefficients: tuple
                    .windows(2)
                    .map(|w| table.complex(chi.index, w[0]) - table.complex(chi.index, w[1]))
                    .collect(),
            })
            .collect();
        Ok(Self {
            modulus: table.modulus(),
            tuple,
            offsets,
            phase,
            characters,
            excision,
        })
    }

    /// Number of frequency variables, `r - 1`.
    pub fn dimension(&self) -> usize {
        self.tuple.len() - 1
    }

    /// Argument `|sum_j d_j eta_j|` of the factor for `characters[i]`.
    pub fn argument(&self, i: usize, eta: &[f64]) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (d, &e) in self.characters[i].coefficients.iter().zip(eta) {
            s += d * e;
        }
        s.norm()
    }

    pub fn phase_at(&self, eta: &[f64]) -> f64 {
        self.phase.iter().zip(eta).map(|(&c, &e)| c as f64 * e).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOptions {
    /// Use only the first `n` zeros of each character.
    pub max_zeros: Option<usize>,
    pub excision: f64,
    /// Stop refining once two successive levels agree to this.
    pub tolerance: f64,
    /// Panel width at level `L` is `base_width / 2^L`.
    pub base_width: f64,
    pub min_level: u32,
    pub max_level: u32,
    /// A shell of panels whose largest `|rho|` is below this ends the domain.
    pub cutoff: f64,
    pub max_evaluations: u64,
    /// Re-run the final level with the zero-tail sums scaled by this factor
    /// and count the change as tail uncertainty; `None` skips it.
    pub tail_probe: Option<f64>,
    pub threads: Option<usize>,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            max_zeros: None,
            excision: 1e-4,
            tolerance: 1e-6,
            base_width: 1.0,
            min_level: 0,
            max_level: 5,
            cutoff: 1e-16,
            max_evaluations: 2_000_000_000,
            tail_probe: Some(1.25),
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureInfo {
    pub rule: String,
    pub level: u32,
    pub width: f64,
    pub extent: f64,
    pub excision: f64,
    pub level_change: f64,
    pub tail_change: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityResult {
    pub k: u64,
    pub tuple: Vec<u64>,
    pub delta: f64,
    pub error_estimate: f64,
    /// Smallest largest-ordinate among the characters used.
    pub zeros_height: f64,
    pub zeros_per_character: Vec<(usize, usize)>,
    pub quadrature: QuadratureInfo,
    pub unbiased: bool,
}

/// Bessel factors for every non-principal character of one modulus.
#[derive(Debug, Clone)]
pub struct DensityModel {
    table: CharacterTable,
    factors: Vec<Option<BesselFactor>>,
    options: DensityOptions,
}

impl DensityModel {
    pub fn new(k: u64, archive: &ZeroArchive, options: DensityOptions) -> Result<Self> {
        let table = CharacterTable::new(k)?;
        let found = archive.require(&table)?;
        let mut factors = vec![None; table.len()];
        for (chi, zs) in found {
            let zs = match options.max_zeros {
                Some(n) => zs.truncated(n),
                None => zs.clone(),
            };
            factors[chi] = Some(BesselFactor::new(&zs)?);
        }
        Ok(Self {
            table,
            factors,
            options,
        })
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn options(&self) -> &DensityOptions {
        &self.options
    }

    pub fn factor(&self, chi: usize) -> Option<&BesselFactor> {
        self.factors[chi].as_ref()
    }

    pub fn spec(&self, tuple: &[u64]) -> Result<TransformSpec> {
        TransformSpec::new(&self.table, tuple, self.options.excision)
    }

    fn factor_list(&self, spec: &TransformSpec, tail_scale: f64) -> Vec<BesselFactor> {
        spec.characters
            .iter()
            .map(|c| {
                self.factors[c.character]
                    .clone()
                    .expect("factors exist for every non-principal character")
                    .with_tail_scale(tail_scale)
            })
            .collect()
    }

    /// `rho(eta)` for the tuple.
    pub fn rho_hat(&self, spec: &TransformSpec, eta: &[f64]) -> Result<Complex64> {
        if eta.len() != spec.dimension() {
            return Err(Error::InvalidParameter(format!(
                "expected {} frequency variables, got {}",
                spec.dimension(),
                eta.len()
            )));
        }
        let factors = self.factor_list(spec, 1.0);
        Ok(Evaluator::new(spec, &factors).rho(eta, &mut None))
    }

    pub fn density(&self, tuple: &[u64]) -> Result<DensityResult> {
        let spec = self.spec(tuple)?;
        let opts = &self.options;
        let factors = self.factor_list(&spec, 1.0);
        let run = || -> Result<DensityResult> {
            let mut evaluations = 0u64;
            let mut previous: Option<f64> = None;
            let mut outcome = None;
            for level in opts.min_level..=opts.max_level {
                let width = opts.base_width / f64::from(1u32 << level);
                let (delta, extent) =
                    assemble(&spec, &factors, width, opts, &mut evaluations)?;
                if let Some(p) = previous {
                    let change = (delta - p).abs();
                    if change < opts.tolerance {
                        outcome = Some((level, width, delta, extent, change));
                        break;
                    }
                }
                previous = Some(delta);
            }
            let Some((level, width, delta, extent, level_change)) = outcome else {
                return Err(Error::BudgetExhausted(format!(
                    "density did not settle to {} by level {}",
                    opts.tolerance, opts.max_level
                )));
            };
            let tail_change = match opts.tail_probe {
                Some(scale) => {
                    let probe = self.factor_list(&spec, scale);
                    let (d, _) = assemble(&spec, &probe, width, opts, &mut evaluations)?;
                    (d - delta).abs()
                }
                None => 0.0,
            };
            let used: Vec<&BesselFactor> = factors.iter().collect();
            Ok(DensityResult {
                k: spec.modulus,
                tuple: spec.tuple.clone(),
                delta: delta.clamp(0.0, 1.0),
                error_estimate: level_change + tail_change,
                zeros_height: used.iter().map(|f| f.height).fold(f64::INFINITY, f64::min),
                zeros_per_character: used.iter().map(|f| (f.character, f.zeros)).collect(),
                quadrature: QuadratureInfo {
                    rule: "tensor Gauss-Kronrod 15, sign-folded orthant".into(),
                    level,
                    width,
                    extent,
                    excision: opts.excision,
                    level_change,
                    tail_change,
                    evaluations,
                },
                unbiased: unbiased_check(self.table.system(), &spec.tuple)?.unbiased,
            })
        };
        match opts.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .install(run),
            None => run(),
        }
    }
}

/// Density of `pi(x; k, a_1) > ... > pi(x; k, a_r)` in logarithmic measure.
pub fn density(k: u64, tuple: &[u64], archive: &ZeroArchive, options: DensityOptions) -> Result<DensityResult> {
    DensityModel::new(k, archive, options)?.density(tuple)
}

struct Evaluator<'a> {
    spec: &'a TransformSpec,
    factors: &'a [BesselFactor],
}

type FactorCache = Option<HashMap<(usize, u64), f64>>;

impl<'a> Evaluator<'a> {
    fn new(spec: &'a TransformSpec, factors: &'a [BesselFactor]) -> Self {
        Self { spec, factors }
    }

    fn rho(&self, eta: &[f64], cache: &mut FactorCache) -> Complex64 {
        let mut modulus = 1.0;
        for (i, f) in self.factors.iter().enumerate() {
            let z = self.spec.argument(i, eta);
            if z == 0.0 {
                continue;
            }
            let v = match cache {
                Some(map) => *map.entry((i, z.to_bits())).or_insert_with(|| f.value(z)),
                None => f.value(z),
            };
            modulus *= v;
            if modulus == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
        }
        Complex64::from_polar(modulus, self.spec.phase_at(eta))
    }

    /// Sign-folded integrand of the `B` term at a point of the open orthant,
    /// with the largest `|rho|` seen.
    fn folded(&self, b: &[usize], x: &[f64], eta: &mut [f64], cache: &mut FactorCache) -> (f64, f64) {
        let m = b.len();
        let eps = self.spec.excision;
        let mut denom = 1.0;
        for &xi in x {
            denom *= xi.max(eps);
        }
        let mut acc = 0.0;
        let mut peak: f64 = 0.0;
        for pattern in 0..(1usize << (m - 1)) {
            eta.iter_mut().for_each(|e| *e = 0.0);
            let mut sign = 1.0;
            for i in 0..m {
                let s = if i > 0 && (pattern >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 };
                sign *= s;
                eta[b[i]] = s * x[i].max(eps);
            }
            let g = self.rho(eta, cache);
            peak = peak.max(g.norm());
            acc += sign * if m % 2 == 1 { g.im } else { g.re };
        }
        (acc / denom, peak)
    }
}

/// `2 (-1)^{ceil(m/2)} / pi^m`: folds `(i/pi)^m` with the sign-pattern pairing.
fn fold_coefficient(m: usize) -> f64 {
    let sign = if m.div_ceil(2) % 2 == 0 { 1.0 } else { -1.0 };
    2.0 * sign / PI.powi(m as i32)
}

/// `delta` at one panel width, and the largest extent reached.
fn assemble(
    spec: &TransformSpec,
    factors: &[BesselFactor],
    width: f64,
    opts: &DensityOptions,
    evaluations: &mut u64,
) -> Result<(f64, f64)> {
    let d = spec.dimension();
    let ev = Evaluator::new(spec, factors);
    let mut total = CompensatedSum::new();
    total.add(1.0);
    let mut extent: f64 = 0.0;
    for mask in 1usize..(1 << d) {
        let b: Vec<usize> = (0..d).filter(|j| mask >> j & 1 == 1).collect();
        let (value, reach) = integrate_orthant(&ev, &b, width, opts, evaluations)?;
        extent = extent.max(reach);
        total.add(fold_coefficient(b.len()) * value);
    }
    Ok((total.value() / f64::from(1u32 << d), extent))
}

/// Panel multi-indices with largest coordinate `n`, in lexicographic order.
fn shell(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        if idx.iter().any(|&i| i == n) {
            out.push(idx.clone());
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < n {
                idx[pos] += 1;
                for j in pos + 1..m {
                    idx[j] = 0;
                }
                break;
            }
        }
    }
}

fn integrate_orthant(
    ev: &Evaluator<'_>,
    b: &[usize],
    width: f64,
    opts: &DensityOptions,
    evaluations: &mut u64,
) -> Result<(f64, f64)> {
    let m = b.len();
    let (nodes, weights) = kronrod_rule();
    let points_per_panel = 15u64.pow(m as u32) << (m - 1);
    let dim = ev.spec.dimension();
    let mut total = CompensatedSum::new();
    let mut n = 0usize;
    loop {
        let panels = shell(m, n);
        *evaluations += points_per_panel * panels.len() as u64;
        if *evaluations > opts.max_evaluations {
            return Err(Error::BudgetExhausted(format!(
                "more than {} integrand evaluations",
                opts.max_evaluations
            )));
        }
        let results: Vec<(f64, f64)> = panels
            .par_iter()
            .map(|panel| {
                let mut cache: FactorCache = Some(HashMap::new());
                let mut eta = vec![0.0; dim];
                let mut x = vec![0.0; m];
                let mut sum = CompensatedSum::new();
                let mut peak: f64 = 0.0;
                let mut node = vec![0usize; m];
                loop {
                    let mut w = 1.0;
                    for i in 0..m {
                        x[i] = (panel[i] as f64 + 0.5 + 0.5 * nodes[node[i]]) * width;
                        w *= 0.5 * width * weights[node[i]];
                    }
                    let (f, p) = ev.folded(b, &x, &mut eta, &mut cache);
                    sum.add(w * f);
                    peak = peak.max(p);
                    let mut pos = m;
                    loop {
                        if pos == 0 {
                            return (sum.value(), peak);
                        }
                        pos -= 1;
                        if node[pos] < 14 {
                            node[pos] += 1;
                            for j in pos + 1..m {
                                node[j] = 0;
                            }
                            break;
                        }
                    }
                }
            })
            .collect();
        let mut peak: f64 = 0.0;
        for (v, p) in results {
            total.add(v);
            peak = peak.max(p);
        }
        n += 1;
        if peak < opts.cutoff {
            return Ok((total.value(), n as f64 * width));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnbiasedCheck {
    pub unbiased: bool,
    pub reason: String,
}

/// Structural test for races whose limiting distribution is symmetric
/// under every permutation of the classes: two classes with equal bias
/// constants, or three classes `a, a rho, a rho^2` with `rho^3 = 1 != rho`.
pub fn unbiased_check(sys: &ResidueSystem, tuple: &[u64]) -> Result<UnbiasedCheck> {
    let tuple = validate_tuple(sys, tuple)?;
    let k = sys.modulus();
    let c = |a: u64| sys.square_count(a) as i64 - 1;
    Ok(match tuple.len() {
        2 => {
            let (c1, c2) = (c(tuple[0]), c(tuple[1]));
            UnbiasedCheck {
                unbiased: c1 == c2,
                reason: format!("two classes with bias constants {c1} and {c2}"),
            }
        }
        3 => {
            let inv = inverse_mod(tuple[0], k).expect("validated unit");
            let rho = mul_mod(tuple[1], inv, k);
            let orbit = rho != 1
                && pow_mod(rho, 3, k) == 1
                && mul_mod(tuple[0], mul_mod(rho, rho, k), k) == tuple[2];
            UnbiasedCheck {
                unbiased: orbit,
                reason: if orbit {
                    format!("classes are a, a*{rho}, a*{rho}^2 with {rho}^3 = 1")
                } else {
                    "classes are not an orbit of a nontrivial cube root of unity".into()
                },
            }
        }
        r => UnbiasedCheck {
            unbiased: false,
            reason: format!("{r} classes are never unbiased"),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryItem {
    pub rule: String,
    pub tuple: Option<Vec<u64>>,
    pub delta: Option<f64>,
    pub deviation: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub base: DensityResult,
    pub items: Vec<SymmetryItem>,
    pub max_deviation: f64,
}

/// Tuples that must share the density of `tuple` by the symmetries of the
/// limiting distribution, each with the rule that gives it or the reason it
/// does not apply.
pub fn symmetry_transforms(sys: &ResidueSystem, tuple: &[u64]) -> Result<Vec<(String, std::result::Result<Vec<u64>, String>)>> {
    let tuple = validate_tuple(sys, tuple)?;
    let k = sys.modulus();
    let c = |a: u64| sys.square_count(a) as i64 - 1;
    let is_square = |a: u64| sys.is_quadratic_residue(a);
    let scale = |b: u64, t: &[u64]| t.iter().map(|&a| mul_mod(a, b, k)).collect::<Vec<_>>();
    let units: Vec<u64> = sys.reduced().iter().copied().filter(|&b| b != 1).collect();
    let mut out = Vec::new();

    out.push((
        "inverses".to_string(),
        Ok(tuple.iter().map(|&a| inverse_mod(a, k).expect("unit")).collect()),
    ));

    let same_c = units
        .iter()
        .copied()
        .find(|&b| tuple.iter().all(|&a| c(a) == c(mul_mod(a, b, k))));
    out.push((
        "translation preserving bias constants".to_string(),
        same_c
            .map(|b| scale(b, &tuple))
            .ok_or_else(|| "no unit b != 1 keeps every c(k, a_j)".to_string()),
    ));

    let all_sq = tuple.iter().all(|&a| is_square(a));
    let all_non = tuple.iter().all(|&a| !is_square(a));
    out.push((
        "translation of squares".to_string(),
        if !all_sq {
            Err("classes are not all squares".into())
        } else {
            units
                .iter()
                .copied()
                .find(|&b| !is_square(b))
                .map(|b| scale(b, &tuple))
                .ok_or_else(|| "every unit is a square".to_string())
        },
    ));

    out.push((
        "reversal".to_string(),
        if all_sq || all_non {
            Ok(tuple.iter().rev().copied().collect())
        } else {
            Err("classes mix squares and non-squares".into())
        },
    ));

    let flip = units
        .iter()
        .copied()
        .find(|&b| tuple.iter().all(|&a| c(a) != c(mul_mod(a, b, k))));
    out.push((
        "translation changing every bias constant, reversed".to_string(),
        flip.map(|b| {
            let mut t = scale(b, &tuple);
            t.reverse();
            t
        })
        .ok_or_else(|| "no unit b changes every c(k, a_j)".to_string()),
    ));
    Ok(out)
}

/// Densities of the tuple and of every applicable symmetric image.
pub fn fm_symmetry_suite(model: &DensityModel, tuple: &[u64]) -> Result<SymmetryReport> {
    let mut memo: HashMap<Vec<u64>, DensityResult> = HashMap::new();
    let base = model.density(tuple)?;
    memo.insert(base.tuple.clone(), base.clone());
    let mut items = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for (rule, image) in symmetry_transforms(model.table().system(), tuple)? {
        match image {
            Ok(t) => {
                let r = match memo.get(&t) {
                    Some(r) => r.clone(),
                    None => {
                        let r = model.density(&t)?;
                        memo.insert(t.clone(), r.clone());
                        r
                    }
                };
                let dev = (r.delta - base.delta).abs();
                max_deviation = max_deviation.max(dev);
                items.push(SymmetryItem {
                    rule,
                    tuple: Some(t),
                    delta: Some(r.delta),
                    deviation: Some(dev),
                    skipped: None,
                });
            }
            Err(reason) => items.push(SymmetryItem {
                rule,
                tuple: None,
                delta: None,
                deviation: None,
                skipped: Some(reason),
            }),
        }
    }
    Ok(SymmetryReport {
        base,
        items,
        max_deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianCheck {
    pub k: u64,
    pub pair: (u64, u64),
    /// Variance of `X_a - X_b` implied by the zero sums.
    pub variance: f64,
    pub max_deviation: f64,
    pub within_band: bool,
}

/// Compares `|rho(eta / sigma)|` for a two-class race with `exp(-eta^2/2)`
/// on `eta` in `[0, 3]`.  A loose, qualitative check of approximate
/// normality; the band is 0.15.
pub fn gaussian_check(model: &DensityModel, a: u64, b: u64) -> Result<GaussianCheck> {
    let spec = model.spec(&[a, b])?;
    let factors = model.factor_list(&spec, 1.0);
    let variance: f64 = spec
        .characters
        .iter()
        .zip(&factors)
        .map(|(c, f)| 2.0 * c.coefficients[0].norm_sqr() * f.quadratic_rate())
        .sum();
    let sigma = variance.sqrt();
    let ev = Evaluator::new(&spec, &factors);
    let mut worst: f64 = 0.0;
    for i in 0..=60 {
        let t = i as f64 * 0.05;
        let v = ev.rho(&[t / sigma], &mut None).norm();
        worst = worst.max((v - (-0.5 * t * t).exp()).abs());
    }
    Ok(GaussianCheck {
        k: spec.modulus,
        pair: (spec.tuple[0], spec.tuple[1]),
        variance,
        max_deviation: worst,
        within_band: worst <= 0.15,
    })
}
