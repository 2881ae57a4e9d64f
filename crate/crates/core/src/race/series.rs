use serde::Serialize;

use super::{CountingFunction, RaceSpec};
use crate::error::{Error, Result};
use crate::sieve::{BlockReader, BlockWriter};
use crate::summation::CompensatedSum;

/// `delta` at a stored sample point, with the accumulated measure
/// `int_2^x [delta(t) > 0] dt/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RacePoint {
    pub x: u64,
    pub delta: f64,
    pub log_measure: f64,
}

/// A strict sign change: `delta` had sign of `before` on the last event
/// point with non-zero value and sign of `after` from `at` on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub at: u64,
    pub previous_event: u64,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeadDensity {
    pub numerator: u64,
    pub denominator: u64,
}

impl LeadDensity {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Empirical logarithmic density of `{t <= X : delta(t) > 0}`.
///
/// `measure` is `int_{P cap [2, X]} dt/t`.  `literal` divides it by `X`,
/// `standard` by `log X`; `lower` and `upper` bracket the standard
/// normalisation over the stored sample points in `[sqrt X, X]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDensity {
    pub x: u64,
    pub measure: f64,
    pub literal: f64,
    pub standard: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Race statistics swept to `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceSeries {
    pub spec: RaceSpec,
    pub modulus: u64,
    pub t: u64,
    pub delta: f64,
    pub checkpoints: Vec<RacePoint>,
    pub sign_changes: u64,
    pub first_negative: Option<u64>,
    pub first_positive: Option<u64>,
    pub crossings: Vec<Crossing>,
    pub crossings_dropped: u64,
    pub positive_count: u64,
    pub log_measure: f64,
}

impl RaceSeries {
    /// `w_f(T)`, the number of strict sign alternations on `[1, T]`.
    pub fn sign_changes(&self) -> u64 {
        self.sign_changes
    }

    /// `N(T)/T` with `N(T) = #{1 <= n <= T : delta(n) > 0}`.
    pub fn lead_density(&self) -> LeadDensity {
        LeadDensity {
            numerator: self.positive_count,
            denominator: self.t,
        }
    }

    pub fn log_density(&self) -> Result<LogDensity> {
        let x = self.t;
        if x < 2 {
            return Err(Error::InvalidParameter("log density needs X >= 2".into()));
        }
        let lx = (x as f64).ln();
        let standard = if x > 2 { self.log_measure / lx } else { 0.0 };
        let root = (x as f64).sqrt();
        let (mut lower, mut upper) = (standard, standard);
        for p in &self.checkpoints {
            if (p.x as f64) >= root && p.x > 2 && p.x <= x {
                let v = p.log_measure / (p.x as f64).ln();
                lower = lower.min(v);
                upper = upper.max(v);
            }
        }
        Ok(LogDensity {
            x,
            measure: self.log_measure,
            literal: self.log_measure / x as f64,
            standard,
            lower,
            upper,
        })
    }
}

/// Incremental state of one race.  Updated only at event points, so the
/// state after any prefix of the event stream is independent of how the
/// stream was chunked.
#[derive(Debug, Clone)]
pub(crate) struct RaceTracker {
    pub spec: RaceSpec,
    pub weights: Vec<i8>,
    delta: CompensatedSum,
    /// Start of the current constant stretch of `delta`.
    last_event: u64,
    last_sign: i8,
    sign_changes: u64,
    first_negative: Option<u64>,
    first_positive: Option<u64>,
    /// Integers in `[1, last_event)` with positive `delta`.
    positive_count: u64,
    /// `int_2^{last_event} [delta > 0] dt/t`.
    log_measure: CompensatedSum,
    checkpoints: Vec<RacePoint>,
    next_checkpoint: u64,
    ratio: f64,
    crossings: Vec<Crossing>,
    crossing_cap: usize,
    crossings_dropped: u64,
}

fn log_ratio(b: u64, a: u64) -> f64 {
    // ln(b/a) for b > a >= 1, accurate for nearby arguments
    ((b - a) as f64 / a as f64).ln_1p()
}

pub(crate) fn next_geometric(x: u64, ratio: f64) -> u64 {
    let grown = (x as f64 * (1.0 + ratio)).ceil() as u64;
    grown.max(x + 1)
}

impl RaceTracker {
    pub fn new(spec: RaceSpec, weights: Vec<i8>, ratio: f64, crossing_cap: usize) -> Self {
        Self {
            spec,
            weights,
            delta: CompensatedSum::new(),
            last_event: 1,
            last_sign: 0,
            sign_changes: 0,
            first_negative: None,
            first_positive: None,
            positive_count: 0,
            log_measure: CompensatedSum::new(),
            checkpoints: Vec::new(),
            next_checkpoint: 2,
            ratio,
            crossings: Vec::new(),
            crossing_cap,
            crossings_dropped: 0,
        }
    }

    pub fn function(&self) -> CountingFunction {
        self.spec.function
    }

    #[inline]
    fn current(&self) -> f64 {
        self.delta.value()
    }

    fn measure_at(&self, x: u64) -> f64 {
        let mut m = self.log_measure;
        let from = self.last_event.max(2);
        if self.current() > 0.0 && x > from {
            m.add(log_ratio(x, from));
        }
        m.value()
    }

    fn flush_before(&mut self, n: u64) {
        while self.next_checkpoint < n {
            let x = self.next_checkpoint;
            self.checkpoints.push(RacePoint {
                x,
                delta: self.current(),
                log_measure: self.measure_at(x),
            });
            self.next_checkpoint = next_geometric(x, self.ratio);
        }
    }

    /// `delta` changes by `increment` at the integer `n`.
    #[inline]
    pub fn apply(&mut self, n: u64, increment: f64) {
        if n > self.next_checkpoint {
            self.flush_before(n);
        }
        let old = self.current();
        if old > 0.0 {
            self.positive_count += n - self.last_event;
            let from = self.last_event.max(2);
            if n > from {
                self.log_measure.add(log_ratio(n, from));
            }
        }
        self.delta.add(increment);
        let new = self.current();
        let sign = if new > 0.0 {
            1
        } else if new < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if self.last_sign != 0 && sign != self.last_sign {
                self.sign_changes += 1;
                if self.crossings.len() < self.crossing_cap {
                    self.crossings.push(Crossing {
                        at: n,
                        previous_event: self.last_event,
                        before: old,
                        after: new,
                    });
                } else {
                    self.crossings_dropped += 1;
                }
            }
            self.last_sign = sign;
            if sign < 0 && self.first_negative.is_none() {
                self.first_negative = Some(n);
            }
            if sign > 0 && self.first_positive.is_none() {
                self.first_positive = Some(n);
            }
        }
        self.last_event = n;
        if self.next_checkpoint == n {
            self.checkpoints.push(RacePoint {
                x: n,
                delta: new,
                log_measure: self.log_measure.value(),
            });
            self.next_checkpoint = next_geometric(n, self.ratio);
        }
    }

    /// Stores every sample point up to `t`; no event can move them anymore.
    pub fn settle(&mut self, t: u64) {
        self.flush_before(t + 1);
    }

    pub fn report(&self, modulus: u64, t: u64) -> RaceSeries {
        let pending = if self.current() > 0.0 && t >= self.last_event {
            t - self.last_event + 1
        } else {
            0
        };
        RaceSeries {
            spec: self.spec.clone(),
            modulus,
            t,
            delta: self.current(),
            checkpoints: self
                .checkpoints
                .iter()
                .copied()
                .filter(|p| p.x <= t)
                .collect(),
            sign_changes: self.sign_changes,
            first_negative: self.first_negative,
            first_positive: self.first_positive,
            crossings: self.crossings.clone(),
            crossings_dropped: self.crossings_dropped,
            positive_count: self.positive_count + pending,
            log_measure: if t >= 2 { self.measure_at(t) } else { 0.0 },
        }
    }

    pub fn encode(&self, w: &mut BlockWriter) {
        w.u8(self.spec.function.code());
        for side in [&self.spec.lead, &self.spec.trail] {
            w.u64(side.len() as u64);
            for &l in side {
                w.u64(l);
            }
        }
        let (s, c) = self.delta.parts();
        w.f64(s);
        w.f64(c);
        w.u64(self.last_event);
        w.i64(self.last_sign as i64);
        w.u64(self.sign_changes);
        w.opt_u64(self.first_negative);
        w.opt_u64(self.first_positive);
        w.u64(self.positive_count);
        let (s, c) = self.log_measure.parts();
        w.f64(s);
        w.f64(c);
        w.u64(self.next_checkpoint);
        w.f64(self.ratio);
        w.u64(self.checkpoints.len() as u64);
        for p in &self.checkpoints {
            w.u64(p.x);
            w.f64(p.delta);
            w.f64(p.log_measure);
        }
        w.u64(self.crossing_cap as u64);
        w.u64(self.crossings_dropped);
        w.u64(self.crossings.len() as u64);
        for c in &self.crossings {
            w.u64(c.at);
            w.u64(c.previous_event);
            w.f64(c.before);
            w.f64(c.after);
        }
    }

    pub fn decode(r: &mut BlockReader<'_>, weights_for: impl Fn(&RaceSpec) -> Result<Vec<i8>>) -> Result<Self> {
        let function = CountingFunction::from_code(r.u8()?)?;
        let mut sides = [Vec::new(), Vec::new()];
        for side in &mut sides {
            let n = r.u64()?;
            for _ in 0..n {
                side.push(r.u64()?);
            }
        }
        let [lead, trail] = sides;
        let spec = RaceSpec {
            function,
            lead,
            trail,
        };
        let weights = weights_for(&spec)?;
        let delta = CompensatedSum::from_parts(r.f64()?, r.f64()?);
        let last_event = r.u64()?;
        let last_sign = r.i64()? as i8;
        let sign_changes = r.u64()?;
        let first_negative = r.opt_u64()?;
        let first_positive = r.opt_u64()?;
        let positive_count = r.u64()?;
        let log_measure = CompensatedSum::from_parts(r.f64()?, r.f64()?);
        let next_checkpoint = r.u64()?;
        let ratio = r.f64()?;
        let n = r.u64()?;
        let mut checkpoints = Vec::with_capacity(n.min(1 << 24) as usize);
        for _ in 0..n {
            checkpoints.push(RacePoint {
                x: r.u64()?,
                delta: r.f64()?,
                log_measure: r.f64()?,
            });
        }
        let crossing_cap = r.u64()? as usize;
        let crossings_dropped = r.u64()?;
        let n = r.u64()?;
        let mut crossings = Vec::with_capacity(n.min(1 << 24) as usize);
        for _ in 0..n {
            crossings.push(Crossing {
                at: r.u64()?,
                previous_event: r.u64()?,
                before: r.f64()?,
                after: r.f64()?,
            });
        }
        Ok(Self {
            spec,
            weights,
            delta,
            last_event,
            last_sign,
            sign_changes,
            first_negative,
            first_positive,
            positive_count,
            log_measure,
            checkpoints,
            next_checkpoint,
            ratio,
            crossings,
            crossing_cap,
            crossings_dropped,
        })
    }
}
