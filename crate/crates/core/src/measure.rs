//! Interval observations and their (possibly infinitesimal) probabilities.
//!
//! An [`Interval`] is a midpoint plus a width that may be infinitesimal. For a
//! finite width `r·ε⁰` the probability of the interval is a cdf difference.
//! For an infinitesimal width `r·εⁿ` (n > 0) it is `pdf(mid)·r·εⁿ`, the
//! leading term of the cdf difference as ε → 0.
//!
//! [`ProbExpr`] is a small expression language over such probabilities with
//! one free variable `x` appearing only in interval widths. It can be
//! evaluated at a real `x` or at the symbolic ε, and [`limit_check`] compares
//! the two to confirm that the infinitesimal result is the limit of the real
//! one.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Continuous, ContinuousDist, DiscreteDist};
use crate::infnum::{InfError, InfNum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("interval midpoint {0} is not finite")]
    NonFiniteMidpoint(f64),
    #[error("interval width {0} must have a non-negative coefficient and order")]
    InvalidWidth(InfNum),
    #[error(transparent)]
    Arithmetic(#[from] InfError),
}

/// The closed interval `[mid − w/2, mid + w/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    mid: f64,
    width: InfNum,
}

impl Interval {
    pub fn new(mid: f64, width: InfNum) -> Result<Self, MeasureError> {
        if !mid.is_finite() {
            return Err(MeasureError::NonFiniteMidpoint(mid));
        }
        if width.coeff() < 0.0 || width.order() < 0 {
            return Err(MeasureError::InvalidWidth(width));
        }
        Ok(Interval { mid, width })
    }

    /// An interval of ordinary (finite) width.
    pub fn finite(mid: f64, width: f64) -> Result<Self, MeasureError> {
        let w = InfNum::try_new(width, 0)?;
        Self::new(mid, w)
    }

    pub fn mid(&self) -> f64 {
        self.mid
    }

    pub fn width(&self) -> InfNum {
        self.width
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.width.is_infinitesimal()
    }

    /// Endpoints of a finite-width interval. For an infinitesimal width both
    /// endpoints are the midpoint.
    pub fn bounds(&self) -> (f64, f64) {
        if self.is_infinitesimal() {
            (self.mid, self.mid)
        } else {
            let half = 0.5 * self.width.coeff();
            (self.mid - half, self.mid + half)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.bounds();
        lo <= x && x <= hi && !self.is_infinitesimal()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.mid, self.width)
    }
}

/// Probability that a draw from `d` lands in `interval`.
///
/// Fails only when an infinitesimal interval sits on a pole of the density,
/// where no finite leading coefficient exists.
pub fn prob<D: Continuous + ?Sized>(d: &D, interval: &Interval) -> Result<InfNum, InfError> {
    let width = interval.width();
    if width.order() == 0 {
        let (lo, hi) = interval.bounds();
        Ok(InfNum::from_real(d.mass_between(lo, hi)))
    } else {
        InfNum::try_new(d.pdf(interval.mid()) * width.coeff(), width.order())
    }
}

/// Probability of the single point `k` under a discrete distribution.
pub fn prob_point(d: &DiscreteDist, k: i64) -> InfNum {
    InfNum::from_real(d.pmf(k))
}

/// Expressions built from constants and interval probabilities whose widths
/// are proportional to a single variable `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProbExpr {
    Const(f64),
    /// `P(dist, (mid, scale·x))`.
    IntervalProb { dist: ContinuousDist, mid: f64, scale: f64 },
    Add(Box<ProbExpr>, Box<ProbExpr>),
    Sub(Box<ProbExpr>, Box<ProbExpr>),
    Mul(Box<ProbExpr>, Box<ProbExpr>),
    Div(Box<ProbExpr>, Box<ProbExpr>),
}

/// Raised when a real evaluation divides by exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("division by zero at x = {0}")]
pub struct RealDivByZero(pub f64);

impl ProbExpr {
    /// The bare variable `x`, written as `P(Uniform(0,1), (½, x))`, which
    /// equals `x` for `0 < x ≤ 1` and evaluates to `1·ε¹` at ε.
    pub fn var() -> Self {
        ProbExpr::IntervalProb {
            dist: ContinuousDist::Uniform { lo: 0.0, hi: 1.0 },
            mid: 0.5,
            scale: 1.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        ProbExpr::Const(c)
    }

    pub fn interval_prob(dist: ContinuousDist, mid: f64, scale: f64) -> Self {
        ProbExpr::IntervalProb { dist, mid, scale }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProbExpr::Const(_) | ProbExpr::IntervalProb { .. } => 1,
            ProbExpr::Add(a, b) | ProbExpr::Sub(a, b) | ProbExpr::Mul(a, b) | ProbExpr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Evaluates at the symbolic infinitesimal ε.
    pub fn eval_inf(&self) -> Result<InfNum, InfError> {
        Ok(match self {
            ProbExpr::Const(c) => InfNum::try_new(*c, 0)?,
            ProbExpr::IntervalProb { dist, mid, scale } => {
                let width = InfNum::try_new(scale.abs(), 1)?;
                prob(dist, &Interval { mid: *mid, width })?
            }
            ProbExpr::Add(a, b) => a.eval_inf()?.checked_add(b.eval_inf()?)?,
            ProbExpr::Sub(a, b) => a.eval_inf()?.checked_sub(b.eval_inf()?)?,
            ProbExpr::Mul(a, b) => a.eval_inf()?.checked_mul(b.eval_inf()?)?,
            ProbExpr::Div(a, b) => a.eval_inf()?.checked_div(b.eval_inf()?)?,
        })
    }

    /// Evaluates at a positive real `x`, with finite-width interval probabilities.
    pub fn eval_real(&self, x: f64) -> Result<f64, RealDivByZero> {
        Ok(match self {
            ProbExpr::Const(c) => *c,
            ProbExpr::IntervalProb { dist, mid, scale } => {
                let half = 0.5 * scale.abs() * x;
                dist.mass_between(mid - half, mid + half)
            }
            ProbExpr::Add(a, b) => a.eval_real(x)? + b.eval_real(x)?,
            ProbExpr::Sub(a, b) => a.eval_real(x)? - b.eval_real(x)?,
            ProbExpr::Mul(a, b) => a.eval_real(x)? * b.eval_real(x)?,
            ProbExpr::Div(a, b) => {
                let d = b.eval_real(x)?;
                if d == 0.0 {
                    return Err(RealDivByZero(x));
                }
                a.eval_real(x)? / d
            }
        })
    }
}

macro_rules! expr_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for ProbExpr {
            type Output = ProbExpr;

            fn $method(self, rhs: ProbExpr) -> ProbExpr {
                ProbExpr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_op!(Add, add, Add);
expr_op!(Sub, sub, Sub);
expr_op!(Mul, mul, Mul);
expr_op!(Div, div, Div);

/// One row of a [`LimitReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitStep {
    pub x: f64,
    /// `f(x) / xⁿ`, or `None` if the real evaluation divided by zero.
    pub ratio: Option<f64>,
    /// Relative error against the leading coefficient (absolute when it is 0).
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LimitReport {
    /// The infinitesimal evaluation succeeded and was compared with the real one.
    Checked {
        leading: InfNum,
        steps: Vec<LimitStep>,
        /// Whether the error shrank at every step of the schedule.
        monotone: bool,
        passed: bool,
    },
    /// The infinitesimal evaluation divided by zero; nothing can be concluded.
    NoInformation(InfError),
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        matches!(self, LimitReport::Checked { passed: true, .. })
    }
}

/// Checks that `f(x)/xⁿ → r` along the schedule `xs`, where `f(ε) = r·εⁿ`.
///
/// Passes when the error at the smallest `x` is within `tol`. The error is
/// relative to `r`, or absolute when `r = 0`.
pub fn limit_check(f: &ProbExpr, xs: &[f64], tol: f64) -> LimitReport {
    let leading = match f.eval_inf() {
        Ok(v) => v,
        Err(e) => return LimitReport::NoInformation(e),
    };
    let r = leading.coeff();
    let n = leading.order();
    let steps: Vec<LimitStep> = xs
        .iter()
        .map(|&x| {
            let ratio = f.eval_real(x).ok().map(|v| v / x.powi(n));
            let error = ratio.map(|q| if r == 0.0 { q.abs() } else { ((q - r) / r).abs() });
            LimitStep { x, ratio, error }
        })
        .collect();
    let monotone = steps
        .windows(2)
        .all(|w| matches!((w[0].error, w[1].error), (Some(a), Some(b)) if b <= a));
    let smallest = steps
        .iter()
        .min_by(|a, b| a.x.total_cmp(&b.x))
        .and_then(|s| s.error);
    let passed = matches!(smallest, Some(e) if e <= tol);
    LimitReport::Checked { leading, steps, monotone, passed }
}

/// The geometric schedule `start, start·ratio, …` with `count` entries.
pub fn geometric_schedule(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    std::iter::successors(Some(start), |x| Some(x * ratio)).take(count).collect()
}
