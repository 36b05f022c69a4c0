//! Trial execution and the estimators built on it.
//!
//! A [`Program`] is a host closure that draws random values and calls
//! `observe` on a [`TrialContext`], then returns the real value whose
//! expectation we want. Each trial runs against its own random stream, so a
//! run is a deterministic function of `(seed, width)` no matter how trials are
//! spread over threads.
//!
//! In [`Mode::Weighted`] each observe multiplies the trial weight by the
//! (possibly infinitesimal) probability of the observed interval. The
//! estimate is the weighted average computed in infinitesimal arithmetic, so
//! only trials at the lowest ε-order survive the sums and the ε factors cancel
//! in the final division.

use std::sync::atomic::{AtomicI32, Ordering as AtomicOrdering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Continuous, DiscreteDist, DistError, Sampler};
use crate::infnum::{InfError, InfNum};
use crate::measure::{prob, prob_point, Interval, MeasureError};
use crate::rng::RandomStream;
use crate::transform::TransformError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `weight *= P(D, I)` with infinitesimal arithmetic.
    Weighted,
    /// `weight *= pdf(D, mid)`; interval widths are ignored.
    Density,
    /// Sample from `D` and reject the trial unless the draw lands in `I`.
    Rejection,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Weighted => "weighted",
            Mode::Density => "density",
            Mode::Rejection => "rejection",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" => Ok(Mode::Weighted),
            "density" => Ok(Mode::Density),
            "rejection" => Ok(Mode::Rejection),
            other => Err(format!("unknown mode '{other}' (expected weighted, density or rejection)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("undefined estimate: the weights at the dominant order ε^{min_order} sum to zero ({effective_trials} trials)")]
    UndefinedEstimate { min_order: i32, effective_trials: u64 },
    #[error("no trial was accepted out of {trials}")]
    NoAcceptedTrials { trials: u64 },
    #[error("rejection sampling cannot observe the infinitesimal interval {0}")]
    InfinitesimalUnderRejection(Interval),
    #[error("trial {trial} returned the non-finite value {value}")]
    NonFiniteValue { trial: u64, value: f64 },
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Arithmetic(#[from] InfError),
}

/// Why a trial stopped before returning a value.
#[derive(Debug, Clone, PartialEq)]
pub enum Halt {
    /// A rejection-mode observe failed.
    Rejected,
    /// The trial's weight became negligible next to a finished trial.
    Pruned,
    Fault(EngineError),
}

impl<E: Into<EngineError>> From<E> for Halt {
    fn from(e: E) -> Self {
        Halt::Fault(e.into())
    }
}

/// Per-trial state handed to a program.
pub struct TrialContext<'a> {
    rng: RandomStream,
    aux: RandomStream,
    weight: InfNum,
    mode: Mode,
    prune_bound: Option<&'a AtomicI32>,
}

impl<'a> TrialContext<'a> {
    pub fn new(mode: Mode, seed: u64, trial: u64) -> Self {
        TrialContext {
            rng: RandomStream::for_trial(seed, trial),
            aux: RandomStream::auxiliary(seed, trial),
            weight: InfNum::ONE,
            mode,
            prune_bound: None,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn weight(&self) -> InfNum {
        self.weight
    }

    /// Draws from `d`. The same `(seed, trial, call index)` yields the same
    /// value in every mode and at every width.
    pub fn draw<D: Sampler + ?Sized>(&mut self, d: &D) -> f64 {
        d.sample(&mut self.rng)
    }

    pub fn draw_int(&mut self, d: &DiscreteDist) -> i64 {
        d.sample_int(&mut self.rng)
    }

    /// Draws a `Bernoulli(p)` coin.
    pub fn flip(&mut self, p: f64) -> Result<bool, Halt> {
        Ok(self.draw_int(&DiscreteDist::bernoulli(p)?) == 1)
    }

    /// Conditions on a draw from `d` landing in `interval`.
    pub fn observe<D: Continuous + ?Sized>(&mut self, d: &D, interval: Interval) -> Result<(), Halt> {
        match self.mode {
            Mode::Weighted => self.reweight(prob(d, &interval)?),
            Mode::Density => self.reweight(InfNum::try_new(d.pdf(interval.mid()), 0)?),
            Mode::Rejection => {
                if interval.is_infinitesimal() {
                    return Err(Halt::Fault(EngineError::InfinitesimalUnderRejection(interval)));
                }
                let y = d.sample(&mut self.aux);
                if interval.contains(y) {
                    Ok(())
                } else {
                    Err(Halt::Rejected)
                }
            }
        }
    }

    /// Shorthand for `observe(d, Interval::new(mid, width)?)`.
    pub fn observe_at<D: Continuous + ?Sized>(&mut self, d: &D, mid: f64, width: InfNum) -> Result<(), Halt> {
        let interval = Interval::new(mid, width)?;
        self.observe(d, interval)
    }

    /// Conditions on a draw from `d` being exactly `k`.
    pub fn observe_discrete(&mut self, d: &DiscreteDist, k: i64) -> Result<(), Halt> {
        match self.mode {
            Mode::Weighted | Mode::Density => self.reweight(prob_point(d, k)),
            Mode::Rejection => {
                if d.sample_int(&mut self.aux) == k {
                    Ok(())
                } else {
                    Err(Halt::Rejected)
                }
            }
        }
    }

    /// Conditions on a boolean event.
    pub fn condition(&mut self, holds: bool) -> Result<(), Halt> {
        match self.mode {
            Mode::Weighted | Mode::Density => self.reweight(InfNum::from_real(if holds { 1.0 } else { 0.0 })),
            Mode::Rejection if holds => Ok(()),
            Mode::Rejection => Err(Halt::Rejected),
        }
    }

    fn reweight(&mut self, factor: InfNum) -> Result<(), Halt> {
        self.weight = self.weight.checked_mul(factor)?;
        if let Some(bound) = self.prune_bound {
            // Orders never decrease within a trial, so once above the bound
            // this trial cannot reach the dominant order.
            if self.weight.order() > bound.load(AtomicOrdering::Relaxed) {
                return Err(Halt::Pruned);
            }
        }
        Ok(())
    }
}

pub type ProgramFn = dyn Fn(&mut TrialContext<'_>, InfNum) -> Result<f64, Halt> + Send + Sync;

/// A probabilistic program together with the interval width it runs at.
///
/// The body receives the width as its second argument; it may only use it in
/// interval widths. The return type is a plain real, so a program cannot
/// smuggle ε into the value being estimated.
#[derive(Clone)]
pub struct Program {
    body: Arc<ProgramFn>,
    width: InfNum,
}

impl std::fmt::Debug for Program {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Program").field("width", &self.width).finish_non_exhaustive()
    }
}

impl Program {
    pub fn new<F>(width: InfNum, body: F) -> Self
    where
        F: Fn(&mut TrialContext<'_>, InfNum) -> Result<f64, Halt> + Send + Sync + 'static,
    {
        Program { body: Arc::new(body), width }
    }

    pub fn width(&self) -> InfNum {
        self.width
    }

    /// The same program at another width.
    pub fn with_width(&self, width: InfNum) -> Self {
        Program { body: self.body.clone(), width }
    }

    pub fn run(&self, ctx: &mut TrialContext<'_>) -> Result<f64, Halt> {
        (self.body)(ctx, self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    Rejected,
    Pruned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub weight: InfNum,
    /// The returned value; NaN unless the trial completed.
    pub value: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Abandon weighted trials whose order exceeds that of a finished trial.
    pub prune: bool,
}

/// Runs `trials` independent trials and returns one record per trial, in
/// trial order. The first fault (by trial index) aborts the run.
pub fn run_trials(
    program: &Program,
    mode: Mode,
    trials: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<TrialRecord>, EngineError> {
    if trials == 0 {
        return Err(EngineError::ZeroTrials);
    }
    let bound = AtomicI32::new(i32::MAX);
    let prune = opts.prune && mode == Mode::Weighted;
    let one = |k: u64| -> Result<TrialRecord, EngineError> {
        let mut ctx = TrialContext::new(mode, seed, k);
        if prune {
            ctx.prune_bound = Some(&bound);
        }
        match program.run(&mut ctx) {
            Ok(value) => {
                if !value.is_finite() {
                    return Err(EngineError::NonFiniteValue { trial: k, value });
                }
                if prune {
                    bound.fetch_min(ctx.weight.order(), AtomicOrdering::Relaxed);
                }
                Ok(TrialRecord { weight: ctx.weight, value, outcome: Outcome::Completed })
            }
            Err(Halt::Rejected) => Ok(TrialRecord { weight: ctx.weight, value: f64::NAN, outcome: Outcome::Rejected }),
            Err(Halt::Pruned) => Ok(TrialRecord { weight: ctx.weight, value: f64::NAN, outcome: Outcome::Pruned }),
            Err(Halt::Fault(e)) => Err(e),
        }
    };
    let run = || (0..trials).into_par_iter().map(one).collect::<Vec<_>>();
    let results = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| EngineError::ThreadPool(e.to_string()))?
            .install(run),
        None => run(),
    };
    results.into_iter().collect()
}

/// Result of an estimator run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mode: Mode,
    pub value: f64,
    /// The dominant ε-order among trial weights.
    pub min_order: i32,
    /// Trials whose weight has the dominant order (accepted trials for
    /// rejection sampling).
    pub effective_trials: u64,
    /// Leading coefficient of the summed weights.
    pub denom_coeff: f64,
    pub trials: u64,
    pub seed: u64,
    /// Standard error of `value`, from the self-normalised weights at the
    /// dominant order.
    pub std_error: f64,
}

/// The weighted average `Σ wₖ·Vₖ / Σ wₖ` in infinitesimal arithmetic.
///
/// Sums run in trial order. Pruned and rejected records are skipped; they
/// never sit at the dominant order.
pub fn weighted_estimate(records: &[TrialRecord], mode: Mode, seed: u64) -> Result<Estimate, EngineError> {
    let mut completed = records.iter().filter(|r| r.outcome == Outcome::Completed);
    let first = completed.next().ok_or(EngineError::ZeroTrials)?;
    let mut num = first.weight.checked_mul(InfNum::try_new(first.value, 0)?)?;
    let mut den = first.weight;
    for r in completed {
        num = num.checked_add(r.weight.checked_mul(InfNum::try_new(r.value, 0)?)?)?;
        den = den.checked_add(r.weight)?;
    }
    let min_order = den.order();
    let dominant = || {
        records
            .iter()
            .filter(move |r| r.outcome == Outcome::Completed && r.weight.order() == min_order)
    };
    let effective_trials = dominant().count() as u64;
    let ratio = match num.checked_div(den) {
        Ok(v) => v,
        Err(InfError::Undefined(_)) => return Err(EngineError::UndefinedEstimate { min_order, effective_trials }),
        Err(e) => return Err(e.into()),
    };
    debug_assert_eq!(ratio.order(), 0, "numerator and denominator share the dominant order");
    let value = ratio.coeff();
    let spread: f64 = dominant().map(|r| (r.weight.coeff() * (r.value - value)).powi(2)).sum();
    Ok(Estimate {
        mode,
        value,
        min_order,
        effective_trials,
        denom_coeff: den.coeff(),
        trials: records.len() as u64,
        seed,
        std_error: spread.sqrt() / den.coeff().abs(),
    })
}

/// Plain mean over the accepted trials.
pub fn rejection_estimate(records: &[TrialRecord], seed: u64) -> Result<Estimate, EngineError> {
    let accepted: Vec<f64> = records
        .iter()
        .filter(|r| r.outcome == Outcome::Completed)
        .map(|r| r.value)
        .collect();
    let trials = records.len() as u64;
    if accepted.is_empty() {
        return Err(EngineError::NoAcceptedTrials { trials });
    }
    let n = accepted.len() as f64;
    let mean = accepted.iter().sum::<f64>() / n;
    let var = if accepted.len() > 1 {
        accepted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mode: Mode::Rejection,
        value: mean,
        min_order: 0,
        effective_trials: accepted.len() as u64,
        denom_coeff: n,
        trials,
        seed,
        std_error: (var / n).sqrt(),
    })
}

/// Runs `program` under `mode` and reduces the trials to an estimate.
pub fn estimate(
    program: &Program,
    mode: Mode,
    trials: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Estimate, EngineError> {
    let records = run_trials(program, mode, trials, seed, opts)?;
    match mode {
        Mode::Weighted | Mode::Density => weighted_estimate(&records, mode, seed),
        Mode::Rejection => rejection_estimate(&records, seed),
    }
}

/// Importance sampling with infinitesimal weights.
pub fn importance(trials: u64, program: &Program, seed: u64) -> Result<Estimate, EngineError> {
    estimate(program, Mode::Weighted, trials, seed, &RunOptions::default())
}

/// Likelihood weighting with probability densities.
pub fn run_density(trials: u64, program: &Program, seed: u64) -> Result<Estimate, EngineError> {
    estimate(program, Mode::Density, trials, seed, &RunOptions::default())
}

/// Rejection sampling. Every observe must use a finite width.
pub fn rejection(trials: u64, program: &Program, seed: u64) -> Result<Estimate, EngineError> {
    estimate(program, Mode::Rejection, trials, seed, &RunOptions::default())
}
