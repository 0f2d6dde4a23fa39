//! Evaluation accounting shared by both optimizers.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::format::g17;

/// Why an objective refused to produce a value.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Halt {
    #[error("evaluation budget exhausted")]
    Budget,
    #[error("wall-clock budget exhausted")]
    WallClock,
    #[error("evaluation {eval} returned non-finite value {value}")]
    NonFinite { eval: usize, value: f64 },
}

/// Something an optimizer can minimize. Every call to `evaluate` counts as one
/// energy evaluation.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64, Halt>;

    /// Evaluates points in order; implementations may compute them concurrently
    /// but must record them in index order.
    fn evaluate_batch(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>, Halt> {
        xs.iter().map(|x| self.evaluate(x)).collect()
    }

    /// Called once per accepted optimizer iterate.
    fn on_accept(&mut self, _x: &[f64], _f: f64) {}

    /// Lowest value recorded so far, including finite-difference probes.
    fn best(&self) -> Option<(&[f64], f64)> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub eval: usize,
    pub energy: f64,
    pub best: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    pub records: Vec<TraceRecord>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {index}: {message}")]
    Invariant { index: usize, message: String },
}

pub const TRACE_HEADER: &str = "eval,energy,best,seconds";

impl EnergyTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_eval(&self) -> usize {
        self.records.last().map_or(0, |r| r.eval)
    }

    pub fn best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best)
    }

    pub fn push(&mut self, energy: f64, seconds: f64) {
        let best = self.best().map_or(energy, |b| b.min(energy));
        let eval = self.last_eval() + 1;
        self.records.push(TraceRecord {
            eval,
            energy,
            best,
            seconds,
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.eval,
                g17(r.energy),
                g17(r.best),
                g17(r.seconds)
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, TraceError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_HEADER => {}
            _ => {
                return Err(TraceError::Parse {
                    line: 1,
                    message: format!("expected header {TRACE_HEADER:?}"),
                })
            }
        }
        let mut records = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| TraceError::Parse { line: i + 1, message };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 columns, got {}", cols.len())));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err(format!("bad number {s:?}")));
            records.push(TraceRecord {
                eval: cols[0]
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad eval index {:?}", cols[0])))?,
                energy: num(cols[1])?,
                best: num(cols[2])?,
                seconds: num(cols[3])?,
            });
        }
        Ok(EnergyTrace { records })
    }

    /// Dense 1-based indexing and `best = running min(energy)`.
    pub fn check_invariants(&self) -> Result<(), TraceError> {
        let mut best = f64::INFINITY;
        for (index, r) in self.records.iter().enumerate() {
            let bad = |message: String| TraceError::Invariant { index, message };
            if r.eval != index + 1 {
                return Err(bad(format!("eval index {} should be {}", r.eval, index + 1)));
            }
            best = best.min(r.energy);
            if r.best != best {
                return Err(bad(format!("best {} should be {}", r.best, best)));
            }
        }
        Ok(())
    }
}

/// Budget, wall-clock and trace bookkeeping around a plain function.
///
/// `f(x, eval_index)` receives the 1-based global index of the evaluation it
/// produces, which lets stochastic objectives derive per-evaluation streams.
pub struct Tracked<F, B = BatchFn> {
    f: F,
    /// Optional whole-batch evaluator; must agree with `f` point by point.
    batch: Option<B>,
    /// Total evaluations allowed, counting ones inherited from a previous leg.
    budget: usize,
    deadline: Option<Instant>,
    started: Instant,
    timing: bool,
    pool: Option<rayon::ThreadPool>,
    pub trace: EnergyTrace,
    pub best_x: Option<Vec<f64>>,
    pub best_f: f64,
    /// Eval index at which each accepted iterate was recorded.
    pub accepted: Vec<usize>,
    pub last_accepted: Option<(Vec<f64>, f64)>,
    hook: Option<Box<dyn FnMut(&AcceptInfo)>>,
}

/// Batch evaluator type used when none is supplied.
pub type BatchFn = fn(&[Vec<f64>], usize) -> Vec<f64>;

/// Passed to accept hooks after each accepted iterate.
pub struct AcceptInfo<'a> {
    pub x: &'a [f64],
    pub f: f64,
    pub evaluations: usize,
    pub best_x: Option<&'a [f64]>,
    pub best_f: f64,
}

impl<F> Tracked<F>
where
    F: Fn(&[f64], usize) -> f64 + Sync,
{
    pub fn new(f: F, budget: usize) -> Self {
        Tracked {
            f,
            batch: None,
            budget,
            deadline: None,
            started: Instant::now(),
            timing: false,
            pool: None,
            trace: EnergyTrace::default(),
            best_x: None,
            best_f: f64::INFINITY,
            accepted: Vec::new(),
            last_accepted: None,
            hook: None,
        }
    }

    /// `batch(xs, first)` evaluates `xs` as indices `first, first + 1, ...`.
    /// Used for sequential batches; a thread pool from `with_jobs` takes precedence.
    pub fn with_batch<B>(self, batch: B) -> Tracked<F, B>
    where
        B: Fn(&[Vec<f64>], usize) -> Vec<f64>,
    {
        Tracked {
            f: self.f,
            batch: Some(batch),
            budget: self.budget,
            deadline: self.deadline,
            started: self.started,
            timing: self.timing,
            pool: self.pool,
            trace: self.trace,
            best_x: self.best_x,
            best_f: self.best_f,
            accepted: self.accepted,
            last_accepted: self.last_accepted,
            hook: self.hook,
        }
    }
}

impl<F, B> Tracked<F, B>
where
    F: Fn(&[f64], usize) -> f64 + Sync,
    B: Fn(&[Vec<f64>], usize) -> Vec<f64>,
{
    /// Continues a previous leg: numbering resumes after `prior.last_eval()`.
    pub fn with_prior(mut self, prior: EnergyTrace, best: Option<(Vec<f64>, f64)>) -> Self {
        if let Some((x, f)) = best {
            self.best_f = f;
            self.best_x = Some(x);
        }
        self.trace = prior;
        self
    }

    pub fn with_wall_clock(mut self, limit: Option<Duration>) -> Self {
        self.deadline = limit.map(|d| self.started + d);
        self
    }

    /// Records elapsed seconds in the trace; off by default so reruns are byte-identical.
    pub fn with_timing(mut self, on: bool) -> Self {
        self.timing = on;
        self
    }

    /// Evaluates batches on `jobs` workers when `jobs > 1`.
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.pool = (jobs > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool")
        });
        self
    }

    pub fn with_accept_hook(mut self, hook: impl FnMut(&AcceptInfo) + 'static) -> Self {
        self.hook = Some(Box::new(hook));
        self
    }

    pub fn evaluations(&self) -> usize {
        self.trace.last_eval()
    }

    pub fn remaining(&self) -> usize {
        self.budget.saturating_sub(self.evaluations())
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    fn gate(&self) -> Result<(), Halt> {
        if self.remaining() == 0 {
            return Err(Halt::Budget);
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Halt::WallClock);
        }
        Ok(())
    }

    fn record(&mut self, x: &[f64], value: f64) -> Result<f64, Halt> {
        let seconds = if self.timing {
            self.started.elapsed().as_secs_f64()
        } else {
            0.0
        };
        self.trace.push(value, seconds);
        if !value.is_finite() {
            return Err(Halt::NonFinite {
                eval: self.evaluations(),
                value,
            });
        }
        if value < self.best_f {
            self.best_f = value;
            self.best_x = Some(x.to_vec());
        }
        Ok(value)
    }
}

impl<F, B> Objective for Tracked<F, B>
where
    F: Fn(&[f64], usize) -> f64 + Sync,
    B: Fn(&[Vec<f64>], usize) -> Vec<f64>,
{
    fn evaluate(&mut self, x: &[f64]) -> Result<f64, Halt> {
        self.gate()?;
        let value = (self.f)(x, self.evaluations() + 1);
        self.record(x, value)
    }

    fn evaluate_batch(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>, Halt> {
        if self.pool.is_none() && self.batch.is_none() {
            return xs.iter().map(|x| self.evaluate(x)).collect();
        }
        self.gate()?;
        let n = xs.len().min(self.remaining());
        let first = self.evaluations() + 1;
        let values: Vec<f64> = match (&self.pool, &self.batch) {
            (Some(pool), _) => {
                let f = &self.f;
                pool.install(|| xs[..n].par_iter().enumerate().map(|(k, x)| f(x, first + k)).collect())
            }
            (None, Some(batch)) => batch(&xs[..n], first),
            (None, None) => unreachable!(),
        };
        let mut out = Vec::with_capacity(n);
        for (x, v) in xs.iter().zip(values) {
            out.push(self.record(x, v)?);
        }
        if n < xs.len() {
            return Err(Halt::Budget);
        }
        Ok(out)
    }

    fn best(&self) -> Option<(&[f64], f64)> {
        self.best_x.as_deref().map(|x| (x, self.best_f))
    }

    fn on_accept(&mut self, x: &[f64], f: f64) {
        self.accepted.push(self.evaluations());
        self.last_accepted = Some((x.to_vec(), f));
        if let Some(hook) = self.hook.as_mut() {
            hook(&AcceptInfo {
                x,
                f,
                evaluations: self.trace.last_eval(),
                best_x: self.best_x.as_deref(),
                best_f: self.best_f,
            });
        }
    }
}

/// Forward differences `g_i = (f(x + h_i e_i) - f(x)) / h_i` with
/// `h_i = h * max(1, |x_i|)`. Always spends exactly `P + 1` evaluations, the
/// first at `x` itself; returns `(f(x), g)`.
pub fn finite_difference_gradient<O: Objective + ?Sized>(
    objective: &mut O,
    x: &[f64],
    h: f64,
) -> Result<(f64, Vec<f64>), Halt> {
    let steps: Vec<f64> = x.iter().map(|xi| h * xi.abs().max(1.0)).collect();
    let mut points = Vec::with_capacity(x.len() + 1);
    points.push(x.to_vec());
    for (i, &hi) in steps.iter().enumerate() {
        let mut p = x.to_vec();
        p[i] += hi;
        points.push(p);
    }
    let values = objective.evaluate_batch(&points)?;
    let f0 = values[0];
    let g = values[1..]
        .iter()
        .zip(&points[1..])
        .enumerate()
        .map(|(i, (fi, p))| (fi - f0) / (p[i] - x[i]))
        .collect();
    Ok((f0, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_invariants_and_csv() {
        let mut t = EnergyTrace::default();
        for e in [-1.0, -3.0, -2.0, -3.5] {
            t.push(e, 0.0);
        }
        assert_eq!(t.records.iter().map(|r| r.best).collect::<Vec<_>>(), [-1.0, -3.0, -3.0, -3.5]);
        t.check_invariants().unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("eval,energy,best,seconds\n1,-1,-1,0\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(EnergyTrace::from_csv(&csv).unwrap(), t);
        let mut broken = t.clone();
        broken.records[2].eval = 7;
        assert!(broken.check_invariants().is_err());
    }

    #[test]
    fn budget_is_never_exceeded() {
        let mut obj = Tracked::new(|x: &[f64], _| x[0], 3);
        for _ in 0..3 {
            obj.evaluate(&[1.0]).unwrap();
        }
        assert_eq!(obj.evaluate(&[1.0]), Err(Halt::Budget));
        assert_eq!(obj.evaluations(), 3);
    }

    #[test]
    fn gradient_costs_p_plus_one() {
        let mut obj = Tracked::new(|x: &[f64], _| x.iter().map(|v| v * v).sum(), 100);
        let (f0, g) = finite_difference_gradient(&mut obj, &[0.0; 12], 1e-6).unwrap();
        assert_eq!(obj.evaluations(), 13);
        assert_eq!(f0, 0.0);
        for gi in g {
            assert!((gi - 1e-6).abs() <= 1e-9);
        }
        let mut constant = Tracked::new(|_: &[f64], _| 4.0, 100);
        let (_, g) = finite_difference_gradient(&mut constant, &[0.3, -2.0], 1e-6).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn non_finite_values_halt() {
        let mut obj = Tracked::new(|_: &[f64], _| f64::NAN, 10);
        assert!(matches!(obj.evaluate(&[0.0]), Err(Halt::NonFinite { eval: 1, .. })));
    }

    #[test]
    fn parallel_batches_match_sequential() {
        let f = |x: &[f64], k: usize| x[0] * k as f64;
        let xs: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64]).collect();
        let mut a = Tracked::new(f, 100);
        let mut b = Tracked::new(f, 100).with_jobs(3);
        assert_eq!(a.evaluate_batch(&xs).unwrap(), b.evaluate_batch(&xs).unwrap());
        assert_eq!(a.trace, b.trace);
        let mut c = Tracked::new(f, 5).with_jobs(2);
        assert_eq!(c.evaluate_batch(&xs), Err(Halt::Budget));
        assert_eq!(c.evaluations(), 5);

        let batch = |xs: &[Vec<f64>], first: usize| {
            xs.iter().enumerate().map(|(k, x)| f(x, first + k)).collect::<Vec<_>>()
        };
        let mut d = Tracked::new(f, 100).with_batch(batch);
        d.evaluate_batch(&xs).unwrap();
        assert_eq!(d.trace, a.trace);
        let mut e = Tracked::new(f, 4).with_batch(batch);
        assert_eq!(e.evaluate_batch(&xs), Err(Halt::Budget));
        assert_eq!(e.trace.records[..], a.trace.records[..4]);
    }

    #[test]
    fn prior_trace_continues_numbering() {
        let mut first = Tracked::new(|x: &[f64], _| x[0], 2);
        first.evaluate(&[-1.0]).unwrap();
        first.evaluate(&[2.0]).unwrap();
        let mut second = Tracked::new(|x: &[f64], _| x[0], 4)
            .with_prior(first.trace.clone(), Some((vec![-1.0], -1.0)));
        second.evaluate(&[0.5]).unwrap();
        assert_eq!(second.trace.records[2].eval, 3);
        assert_eq!(second.trace.records[2].best, -1.0);
        second.trace.check_invariants().unwrap();
    }
}
