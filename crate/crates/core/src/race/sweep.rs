use std::path::Path;

use serde::Serialize;

use super::series::{next_geometric, LeadDensity, LogDensity, RaceSeries, RaceTracker};
use super::{CountingFunction, RaceSpec};
use crate::error::{Error, Result};
use crate::residue::ResidueSystem;
use crate::sieve::{
    for_each_segment, higher_powers, BlockReader, BlockWriter, Checkpoint, OmegaSegment,
    SieveConfig, SieveSegment, MAX_BOUND,
};
use crate::summation::CompensatedSum;

/// Counting-function values per unit class at `x`.
///
/// `pi` counts only primes not dividing the modulus; `total_primes` is the
/// full `pi(x)`.  Semiprime fields are present only when the sweep tracked
/// them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountVector {
    pub modulus: u64,
    pub x: u64,
    pub classes: Vec<u64>,
    pub pi: Vec<u64>,
    pub theta: Vec<f64>,
    pub psi: Vec<f64>,
    pub big_pi: Vec<f64>,
    pub pi2: Option<Vec<u64>>,
    pub total_primes: u64,
    pub total_semiprimes: Option<u64>,
}

pub type CountSample = CountVector;

impl CountVector {
    pub fn class_index(&self, l: u64) -> Option<usize> {
        self.classes.iter().position(|&c| c == l % self.modulus)
    }

    /// `f(x; k, l)` as a float, `None` for a non-unit or untracked function.
    pub fn value(&self, f: CountingFunction, l: u64) -> Option<f64> {
        let i = self.class_index(l)?;
        Some(match f {
            CountingFunction::Pi => self.pi[i] as f64,
            CountingFunction::Theta => self.theta[i],
            CountingFunction::Psi => self.psi[i],
            CountingFunction::BigPi => self.big_pi[i],
            CountingFunction::Pi2 => self.pi2.as_ref()?[i] as f64,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub races: Vec<RaceSpec>,
    /// Geometric ratio between stored sample points.
    pub ratio: f64,
    /// Keep a [`CountVector`] at every sample point.
    pub record_counts: bool,
    /// Track semiprimes even without a semiprime race.
    pub semiprimes: bool,
    /// Maximum number of crossings stored per race.
    pub crossing_cap: usize,
    pub sieve: SieveConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            races: Vec::new(),
            ratio: 1e-3,
            record_counts: false,
            semiprimes: false,
            crossing_cap: 100_000,
            sieve: SieveConfig::default(),
        }
    }
}

impl SweepOptions {
    pub fn with_race(mut self, race: RaceSpec) -> Self {
        self.races.push(race);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub modulus: u64,
    pub t: u64,
    pub counts: CountVector,
    pub trajectory: Vec<CountVector>,
    pub races: Vec<RaceSeries>,
}

#[derive(Debug, Clone)]
struct Accumulators {
    pi: Vec<u64>,
    theta: Vec<CompensatedSum>,
    psi: Vec<CompensatedSum>,
    /// `sum 1/m` over `p^m`, `m >= 2`.
    extra: Vec<CompensatedSum>,
    pi2: Vec<u64>,
    total_primes: u64,
    total_semiprimes: u64,
}

impl Accumulators {
    fn new(phi: usize) -> Self {
        Self {
            pi: vec![0; phi],
            theta: vec![CompensatedSum::new(); phi],
            psi: vec![CompensatedSum::new(); phi],
            extra: vec![CompensatedSum::new(); phi],
            pi2: vec![0; phi],
            total_primes: 0,
            total_semiprimes: 0,
        }
    }
}

/// A resumable single pass over `[2, T]`.
#[derive(Debug, Clone)]
pub struct Sweep {
    sys: ResidueSystem,
    acc: Accumulators,
    /// Next integer to process.
    position: u64,
    trackers: Vec<RaceTracker>,
    ratio: f64,
    record_counts: bool,
    semiprimes: bool,
    crossing_cap: usize,
    samples: Vec<CountVector>,
    next_sample: u64,
    sieve: SieveConfig,
}

struct SegmentEvents {
    lo: u64,
    hi: u64,
    primes: Vec<u64>,
    semiprimes: Vec<u64>,
}

const OMEGA_CHUNK: u64 = 1 << 16;

impl Sweep {
    pub fn new(k: u64, options: &SweepOptions) -> Result<Self> {
        if !(options.ratio > 0.0) {
            return Err(Error::InvalidParameter("checkpoint ratio must be positive".into()));
        }
        let sys = ResidueSystem::new(k)?;
        let mut trackers = Vec::with_capacity(options.races.len());
        for race in &options.races {
            let w = race.weights(&sys)?;
            trackers.push(RaceTracker::new(race.clone(), w, options.ratio, options.crossing_cap));
        }
        let semiprimes = options.semiprimes
            || options
                .races
                .iter()
                .any(|r| r.function == CountingFunction::Pi2);
        let phi = sys.euler_phi();
        Ok(Self {
            sys,
            acc: Accumulators::new(phi),
            position: 2,
            trackers,
            ratio: options.ratio,
            record_counts: options.record_counts,
            semiprimes,
            crossing_cap: options.crossing_cap,
            samples: Vec::new(),
            next_sample: 2,
            sieve: options.sieve,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.sys.modulus()
    }

    /// Every integer below this has been processed.
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn set_sieve(&mut self, sieve: SieveConfig) {
        self.sieve = sieve;
    }

    fn snapshot(&self, x: u64) -> CountVector {
        let a = &self.acc;
        CountVector {
            modulus: self.sys.modulus(),
            x,
            classes: self.sys.reduced().to_vec(),
            pi: a.pi.clone(),
            theta: a.theta.iter().map(|s| s.value()).collect(),
            psi: a.psi.iter().map(|s| s.value()).collect(),
            big_pi: a
                .pi
                .iter()
                .zip(&a.extra)
                .map(|(&p, e)| {
                    let mut s = *e;
                    s.add(p as f64);
                    s.value()
                })
                .collect(),
            pi2: self.semiprimes.then(|| a.pi2.clone()),
            total_primes: a.total_primes,
            total_semiprimes: self.semiprimes.then_some(a.total_semiprimes),
        }
    }

    #[inline]
    fn flush_samples(&mut self, n: u64) {
        if self.record_counts {
            while self.next_sample < n {
                let s = self.snapshot(self.next_sample);
                self.samples.push(s);
                self.next_sample = next_geometric(self.next_sample, self.ratio);
            }
        }
    }

    #[inline]
    fn on_prime(&mut self, p: u64) {
        self.flush_samples(p);
        self.acc.total_primes += 1;
        let Some(i) = self.sys.index_of(p) else { return };
        let lp = (p as f64).ln();
        self.acc.pi[i] += 1;
        self.acc.theta[i].add(lp);
        self.acc.psi[i].add(lp);
        for t in &mut self.trackers {
            let w = t.weights[i];
            if w != 0 {
                let inc = match t.function() {
                    CountingFunction::Pi | CountingFunction::BigPi => 1.0,
                    CountingFunction::Theta | CountingFunction::Psi => lp,
                    CountingFunction::Pi2 => continue,
                };
                t.apply(p, w as f64 * inc);
            }
        }
    }

    #[inline]
    fn on_power(&mut self, n: u64, m: u32, log_p: f64) {
        self.flush_samples(n);
        let Some(i) = self.sys.index_of(n) else { return };
        self.acc.psi[i].add(log_p);
        self.acc.extra[i].add(1.0 / m as f64);
        for t in &mut self.trackers {
            let w = t.weights[i];
            if w != 0 {
                let inc = match t.function() {
                    CountingFunction::Psi => log_p,
                    CountingFunction::BigPi => 1.0 / m as f64,
                    _ => continue,
                };
                t.apply(n, w as f64 * inc);
            }
        }
    }

    #[inline]
    fn on_semiprime(&mut self, n: u64) {
        self.flush_samples(n);
        self.acc.total_semiprimes += 1;
        let Some(i) = self.sys.index_of(n) else { return };
        self.acc.pi2[i] += 1;
        for t in &mut self.trackers {
            let w = t.weights[i];
            if w != 0 && t.function() == CountingFunction::Pi2 {
                t.apply(n, w as f64);
            }
        }
    }

    /// Processes every integer up to and including `t`.
    pub fn advance_to(&mut self, t: u64) -> Result<()> {
        if t >= MAX_BOUND {
            return Err(Error::RangeTooLarge(t));
        }
        let hi = t + 1;
        if hi <= self.position {
            return Ok(());
        }
        let lo = self.position;
        let powers = higher_powers(lo, hi);
        let mut next_power = 0;
        let semiprimes = self.semiprimes;
        let sieve = self.sieve;
        let mut consume = |seg: SegmentEvents| {
            let (mut i, mut j) = (0, 0);
            let (ps, ss) = (&seg.primes, &seg.semiprimes);
            loop {
                let np = ps.get(i).copied().unwrap_or(u64::MAX);
                let ns = ss.get(j).copied().unwrap_or(u64::MAX);
                let nw = powers
                    .get(next_power)
                    .map(|e| e.n)
                    .filter(|&n| n < seg.hi)
                    .unwrap_or(u64::MAX);
                let n = np.min(ns).min(nw);
                if n == u64::MAX {
                    break;
                }
                if nw == n {
                    let e = powers[next_power];
                    self.on_power(e.n, e.m, e.log_p);
                    next_power += 1;
                } else if np == n {
                    self.on_prime(n);
                    i += 1;
                }
                if ns == n {
                    self.on_semiprime(n);
                    j += 1;
                }
            }
            debug_assert!(seg.lo == self.position);
            self.position = seg.hi;
        };
        for_each_segment(
            lo,
            hi,
            &sieve,
            |a, b, base| {
                let primes = SieveSegment::sieve(a, b, base).primes();
                let mut semis = Vec::new();
                if semiprimes {
                    let mut c = a;
                    while c < b {
                        let d = b.min(c + OMEGA_CHUNK);
                        semis.extend(
                            OmegaSegment::sieve(c, d, base)
                                .semiprimes()
                                .into_iter()
                                .map(|(n, _)| n),
                        );
                        c = d;
                    }
                }
                SegmentEvents {
                    lo: a,
                    hi: b,
                    primes,
                    semiprimes: semis,
                }
            },
            &mut consume,
        )
    }

    /// Statistics as of the current position.
    pub fn result(&self) -> SweepResult {
        let t = self.position - 1;
        let k = self.sys.modulus();
        let mut trajectory = self.samples.clone();
        if self.record_counts {
            let mut x = self.next_sample;
            while x <= t {
                trajectory.push(self.snapshot(x));
                x = next_geometric(x, self.ratio);
            }
        }
        let races = self
            .trackers
            .iter()
            .map(|tr| {
                let mut tr = tr.clone();
                tr.settle(t);
                tr.report(k, t)
            })
            .collect();
        SweepResult {
            modulus: k,
            t,
            counts: self.snapshot(t),
            trajectory,
            races,
        }
    }

    /// Serialised state; equal states give equal bytes.
    pub fn state_block(&self) -> Vec<u8> {
        let mut w = BlockWriter::new();
        w.u64(self.sys.modulus());
        w.f64(self.ratio);
        w.u8(self.record_counts as u8);
        w.u8(self.semiprimes as u8);
        w.u64(self.crossing_cap as u64);
        let a = &self.acc;
        w.u64(a.total_primes);
        w.u64(a.total_semiprimes);
        for i in 0..self.sys.euler_phi() {
            w.u64(a.pi[i]);
            w.u64(a.pi2[i]);
            for s in [&a.theta[i], &a.psi[i], &a.extra[i]] {
                let (x, c) = s.parts();
                w.f64(x);
                w.f64(c);
            }
        }
        w.u64(self.next_sample);
        w.u64(self.samples.len() as u64);
        for s in &self.samples {
            w.u64(s.x);
            w.u64(s.total_primes);
            w.opt_u64(s.total_semiprimes);
            for i in 0..s.pi.len() {
                w.u64(s.pi[i]);
                w.f64(s.theta[i]);
                w.f64(s.psi[i]);
                w.f64(s.big_pi[i]);
                w.opt_u64(s.pi2.as_ref().map(|v| v[i]));
            }
        }
        w.u64(self.trackers.len() as u64);
        for t in &self.trackers {
            t.encode(&mut w);
        }
        w.finish()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            position: self.position,
            block: self.state_block(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.checkpoint().write(path)
    }

    /// Rebuilds a sweep from a checkpoint.  If `options` lists races they
    /// must match the stored ones.
    pub fn from_checkpoint(cp: &Checkpoint, options: &SweepOptions) -> Result<Self> {
        let mut r = BlockReader::new(&cp.block);
        let k = r.u64()?;
        let sys = ResidueSystem::new(k).map_err(|e| Error::CheckpointFormat(e.to_string()))?;
        let phi = sys.euler_phi();
        let ratio = r.f64()?;
        let record_counts = r.u8()? != 0;
        let semiprimes = r.u8()? != 0;
        let crossing_cap = r.u64()? as usize;
        let mut acc = Accumulators::new(phi);
        acc.total_primes = r.u64()?;
        acc.total_semiprimes = r.u64()?;
        for i in 0..phi {
            acc.pi[i] = r.u64()?;
            acc.pi2[i] = r.u64()?;
            acc.theta[i] = CompensatedSum::from_parts(r.f64()?, r.f64()?);
            acc.psi[i] = CompensatedSum::from_parts(r.f64()?, r.f64()?);
            acc.extra[i] = CompensatedSum::from_parts(r.f64()?, r.f64()?);
        }
        let next_sample = r.u64()?;
        let n = r.u64()?;
        let mut samples = Vec::new();
        for _ in 0..n {
            let x = r.u64()?;
            let total_primes = r.u64()?;
            let total_semiprimes = r.opt_u64()?;
            let mut s = CountVector {
                modulus: k,
                x,
                classes: sys.reduced().to_vec(),
                pi: Vec::with_capacity(phi),
                theta: Vec::with_capacity(phi),
                psi: Vec::with_capacity(phi),
                big_pi: Vec::with_capacity(phi),
                pi2: total_semiprimes.map(|_| Vec::with_capacity(phi)),
                total_primes,
                total_semiprimes,
            };
            for _ in 0..phi {
                s.pi.push(r.u64()?);
                s.theta.push(r.f64()?);
                s.psi.push(r.f64()?);
                s.big_pi.push(r.f64()?);
                let v = r.opt_u64()?;
                if let (Some(vec), Some(v)) = (s.pi2.as_mut(), v) {
                    vec.push(v);
                }
            }
            samples.push(s);
        }
        let n = r.u64()?;
        let mut trackers = Vec::new();
        for _ in 0..n {
            trackers.push(RaceTracker::decode(&mut r, |spec| {
                spec.weights(&sys)
                    .map_err(|e| Error::CheckpointFormat(e.to_string()))
            })?);
        }
        if !r.is_done() {
            return Err(Error::CheckpointFormat("trailing bytes in counter block".into()));
        }
        if !options.races.is_empty() {
            let stored: Vec<&RaceSpec> = trackers.iter().map(|t| &t.spec).collect();
            let wanted: Vec<&RaceSpec> = options.races.iter().collect();
            if stored != wanted {
                return Err(Error::CheckpointFormat(
                    "checkpoint was written for a different set of races".into(),
                ));
            }
        }
        Ok(Self {
            sys,
            acc,
            position: cp.position,
            trackers,
            ratio,
            record_counts,
            semiprimes,
            crossing_cap,
            samples,
            next_sample,
            sieve: options.sieve,
        })
    }

    pub fn restore(path: &Path, options: &SweepOptions) -> Result<Self> {
        Self::from_checkpoint(&Checkpoint::read(path)?, options)
    }
}

/// One pass over `[2, t]` updating every counter and the requested races.
pub fn sweep(k: u64, t: u64, options: &SweepOptions) -> Result<SweepResult> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!("sweep bound {t} is below 2")));
    }
    let mut s = Sweep::new(k, options)?;
    s.advance_to(t)?;
    Ok(s.result())
}

/// Exact `N(T)/T` for the prime race `delta_pi(n; k, l1, l2) > 0`.
pub fn lead_density(k: u64, l1: u64, l2: u64, t: u64, sieve: &SieveConfig) -> Result<LeadDensity> {
    let sys = ResidueSystem::new(k)?;
    let race = RaceSpec::pair(CountingFunction::Pi, l1, l2);
    race.weights(&sys)?;
    if t < 2 {
        return Ok(LeadDensity {
            numerator: 0,
            denominator: t.max(1),
        });
    }
    let options = SweepOptions {
        races: vec![race],
        sieve: *sieve,
        ..SweepOptions::default()
    };
    Ok(sweep(k, t, &options)?.races[0].lead_density())
}

pub fn log_density(k: u64, l1: u64, l2: u64, x: u64, sieve: &SieveConfig) -> Result<LogDensity> {
    if x < 2 {
        return Err(Error::InvalidParameter("log density needs X >= 2".into()));
    }
    let options = SweepOptions {
        races: vec![RaceSpec::pair(CountingFunction::Pi, l1, l2)],
        sieve: *sieve,
        ..SweepOptions::default()
    };
    sweep(k, x, &options)?.races[0].log_density()
}
