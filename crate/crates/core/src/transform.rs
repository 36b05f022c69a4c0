//! Monotone parameter transformations.
//!
//! A [`Transform`] bundles an increasing, continuously differentiable map with
//! its derivative, inverse and inverse derivative. It acts on distributions by
//! pushforward ([`Transform::push_dist`]) and on intervals by mapping the
//! endpoints, or for infinitesimal widths by scaling the width with the
//! derivative at the midpoint ([`Transform::push_interval`]). Together these
//! preserve interval probabilities: `P(T(D), T(I)) = P(D, I)`.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use thiserror::Error;

use crate::dist::{Continuous, RealInterval, Sampler};
use crate::infnum::InfError;
use crate::measure::{Interval, MeasureError};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("affine scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("transform is not increasing at x = {x} (derivative {deriv})")]
    NotIncreasing { x: f64, deriv: f64 },
    #[error("cannot compose: range {inner_range} of the inner transform is not inside domain {outer_domain}")]
    IncompatibleDomains { inner_range: RealInterval, outer_domain: RealInterval },
    #[error("support {support} is not inside the transform domain {domain}")]
    SupportOutsideDomain { support: RealInterval, domain: RealInterval },
    #[error("interval {interval} escapes the transform domain {domain}")]
    IntervalOutsideDomain { interval: Interval, domain: RealInterval },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

impl From<InfError> for TransformError {
    fn from(e: InfError) -> Self {
        TransformError::Measure(MeasureError::Arithmetic(e))
    }
}

/// The 4-tuple `(T, T′, T⁻¹, (T⁻¹)′)` plus domain and range.
#[derive(Clone)]
pub struct Transform {
    name: String,
    fwd: RealFn,
    fwd_deriv: RealFn,
    inv: RealFn,
    inv_deriv: RealFn,
    domain: RealInterval,
    range: RealInterval,
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transform")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .finish()
    }
}

impl Transform {
    /// Builds a transform from hand-written functions.
    ///
    /// The derivative is checked to be positive at a spread of points inside
    /// the domain; decreasing maps are rejected.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        fwd: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fwd_deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inv_deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: RealInterval,
        range: RealInterval,
    ) -> Result<Self, TransformError> {
        let t = Transform {
            name: name.into(),
            fwd: Arc::new(fwd),
            fwd_deriv: Arc::new(fwd_deriv),
            inv: Arc::new(inv),
            inv_deriv: Arc::new(inv_deriv),
            domain,
            range,
        };
        for x in probe_points(&domain) {
            let deriv = t.deriv(x);
            if deriv.is_nan() || deriv <= 0.0 {
                return Err(TransformError::NotIncreasing { x, deriv });
            }
        }
        Ok(t)
    }

    /// `x ↦ a·x + b` with `a > 0`.
    pub fn affine(a: f64, b: f64) -> Result<Self, TransformError> {
        if a.is_nan() || a <= 0.0 || a.is_infinite() {
            return Err(TransformError::NonPositiveScale(a));
        }
        Ok(Transform {
            name: format!("affine({a}, {b})"),
            fwd: Arc::new(move |x| a * x + b),
            fwd_deriv: Arc::new(move |_| a),
            inv: Arc::new(move |y| (y - b) / a),
            inv_deriv: Arc::new(move |_| 1.0 / a),
            domain: RealInterval::REAL_LINE,
            range: RealInterval::REAL_LINE,
        })
    }

    pub fn exp() -> Self {
        Transform {
            name: "exp".into(),
            fwd: Arc::new(f64::exp),
            fwd_deriv: Arc::new(f64::exp),
            inv: Arc::new(f64::ln),
            inv_deriv: Arc::new(|y| 1.0 / y),
            domain: RealInterval::REAL_LINE,
            range: RealInterval::POSITIVE,
        }
    }

    pub fn log() -> Self {
        Transform {
            name: "log".into(),
            fwd: Arc::new(f64::ln),
            fwd_deriv: Arc::new(|x| 1.0 / x),
            inv: Arc::new(f64::exp),
            inv_deriv: Arc::new(f64::exp),
            domain: RealInterval::POSITIVE,
            range: RealInterval::REAL_LINE,
        }
    }

    /// `outer ∘ inner`: apply `inner` first.
    pub fn compose(outer: &Transform, inner: &Transform) -> Result<Self, TransformError> {
        if !outer.domain.contains_interval(&inner.range) {
            return Err(TransformError::IncompatibleDomains {
                inner_range: inner.range,
                outer_domain: outer.domain,
            });
        }
        let range = RealInterval {
            lo: outer.apply(inner.range.lo),
            hi: outer.apply(inner.range.hi),
            lo_closed: inner.range.lo_closed,
            hi_closed: inner.range.hi_closed,
        };
        let pair = Arc::new((outer.clone(), inner.clone()));
        let (p1, p2, p3, p4) = (pair.clone(), pair.clone(), pair.clone(), pair);
        Ok(Transform {
            name: format!("{}∘{}", outer.name, inner.name),
            fwd: Arc::new(move |x| p1.0.apply(p1.1.apply(x))),
            fwd_deriv: Arc::new(move |x| p2.0.deriv(p2.1.apply(x)) * p2.1.deriv(x)),
            inv: Arc::new(move |y| p3.1.invert(p3.0.invert(y))),
            inv_deriv: Arc::new(move |y| p4.1.inv_deriv(p4.0.invert(y)) * p4.0.inv_deriv(y)),
            domain: inner.domain,
            range,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> RealInterval {
        self.domain
    }

    pub fn range(&self) -> RealInterval {
        self.range
    }

    pub fn apply(&self, x: f64) -> f64 {
        (self.fwd)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.fwd_deriv)(x)
    }

    pub fn invert(&self, y: f64) -> f64 {
        (self.inv)(y)
    }

    pub fn inv_deriv(&self, y: f64) -> f64 {
        (self.inv_deriv)(y)
    }

    /// The distribution of `T(X)` for `X ~ dist`.
    pub fn push_dist<D: Continuous>(&self, dist: D) -> Result<Pushforward<D>, TransformError> {
        let support = dist.support();
        if !self.domain.contains_interval(&support) {
            return Err(TransformError::SupportOutsideDomain { support, domain: self.domain });
        }
        Ok(Pushforward { transform: self.clone(), base: dist })
    }

    /// The image of an interval.
    ///
    /// Finite widths map their endpoints. An infinitesimal width `r·εⁿ` maps to
    /// `(T(mid), T′(mid)·r·εⁿ)`.
    pub fn push_interval(&self, interval: &Interval) -> Result<Interval, TransformError> {
        let escapes = || TransformError::IntervalOutsideDomain { interval: *interval, domain: self.domain };
        if interval.is_infinitesimal() {
            if !self.domain.contains(interval.mid()) {
                return Err(escapes());
            }
            let width = interval.width().scale(self.deriv(interval.mid()))?;
            Ok(Interval::new(self.apply(interval.mid()), width)?)
        } else {
            let (lo, hi) = interval.bounds();
            if !self.domain.contains(lo) || !self.domain.contains(hi) {
                return Err(escapes());
            }
            let (l, r) = (self.apply(lo), self.apply(hi));
            Ok(Interval::finite(0.5 * (l + r), r - l)?)
        }
    }
}

/// Sample points for sanity checks: a grid over a finite domain, or a
/// symmetric spread of magnitudes over an unbounded one.
pub fn probe_points(domain: &RealInterval) -> Vec<f64> {
    let (lo, hi) = (domain.lo, domain.hi);
    let pts: Vec<f64> = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (1..100).map(|i| lo + (hi - lo) * i as f64 / 100.0).collect(),
        (true, false) => (-20..=20).map(|k| lo + 10f64.powf(k as f64 / 4.0)).collect(),
        (false, true) => (-20..=20).map(|k| hi - 10f64.powf(k as f64 / 4.0)).collect(),
        (false, false) => (-20..=20)
            .flat_map(|k| {
                let m = 10f64.powf(k as f64 / 10.0);
                [m, -m]
            })
            .chain([0.0])
            .collect(),
    };
    pts.into_iter().filter(|x| domain.contains(*x)).collect()
}

/// `T(D)`: samples are `T(x)`, `cdf(y) = cdf_D(T⁻¹(y))` and
/// `pdf(y) = pdf_D(T⁻¹(y))·(T⁻¹)′(y)`.
#[derive(Debug, Clone)]
pub struct Pushforward<D> {
    transform: Transform,
    base: D,
}

impl<D> Pushforward<D> {
    pub fn base(&self) -> &D {
        &self.base
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }
}

impl<D: Continuous> Sampler for Pushforward<D> {
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.transform.apply(self.base.sample(rng))
    }
}

impl<D: Continuous> Continuous for Pushforward<D> {
    fn pdf(&self, y: f64) -> f64 {
        if !self.transform.range.contains(y) {
            return 0.0;
        }
        self.base.pdf(self.transform.invert(y)) * self.transform.inv_deriv(y)
    }

    fn cdf(&self, y: f64) -> f64 {
        let r = self.transform.range;
        if y <= r.lo {
            0.0
        } else if y >= r.hi {
            1.0
        } else {
            self.base.cdf(self.transform.invert(y))
        }
    }

    fn sf(&self, y: f64) -> f64 {
        let r = self.transform.range;
        if y <= r.lo {
            1.0
        } else if y >= r.hi {
            0.0
        } else {
            self.base.sf(self.transform.invert(y))
        }
    }

    fn support(&self) -> RealInterval {
        let s = self.base.support();
        RealInterval {
            lo: self.transform.apply(s.lo),
            hi: self.transform.apply(s.hi),
            lo_closed: s.lo_closed,
            hi_closed: s.hi_closed,
        }
    }
}
