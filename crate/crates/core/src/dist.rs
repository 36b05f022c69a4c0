//! Probability distributions: sampling, density, cumulative and mass functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rand::{Rng, RngCore};
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::{beta, erf, gamma};
use thiserror::Error;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid {dist} parameters: {reason}")]
pub struct DistError {
    pub dist: &'static str,
    pub reason: String,
}

fn invalid(dist: &'static str, reason: impl Into<String>) -> DistError {
    DistError { dist, reason: reason.into() }
}

/// A subset of the real line with optionally open ends. Infinite ends are
/// always treated as open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl RealInterval {
    pub const REAL_LINE: RealInterval = RealInterval::open(f64::NEG_INFINITY, f64::INFINITY);
    pub const POSITIVE: RealInterval = RealInterval::open(0.0, f64::INFINITY);

    pub const fn open(lo: f64, hi: f64) -> Self {
        RealInterval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub const fn closed(lo: f64, hi: f64) -> Self {
        RealInterval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed && self.lo.is_finite() { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed && self.hi.is_finite() { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// True if every point of `other` lies in `self`.
    pub fn contains_interval(&self, other: &RealInterval) -> bool {
        let lo_ok = self.lo < other.lo
            || (self.lo == other.lo && (self.lo_closed || !other.lo_closed || !self.lo.is_finite()));
        let hi_ok = self.hi > other.hi
            || (self.hi == other.hi && (self.hi_closed || !other.hi_closed || !self.hi.is_finite()));
        lo_ok && hi_ok
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed && self.lo.is_finite() { '[' } else { '(' };
        let r = if self.hi_closed && self.hi.is_finite() { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Anything that can be sampled inside a trial. Discrete values are returned
/// as reals.
pub trait Sampler {
    fn sample(&self, rng: &mut dyn RngCore) -> f64;
}

/// A continuous distribution on the real line.
pub trait Continuous: Sampler {
    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// Survival function `1 − cdf(x)`. Implementations override this when the
    /// complement can be computed without cancellation.
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// The closed hull of the set where the density is positive.
    fn support(&self) -> RealInterval;

    /// Probability of `[lo, hi]`. Uses the survival function in the upper
    /// half so that tail intervals keep their significant digits.
    fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let c = self.cdf(lo);
        let mass = if c > 0.5 { self.sf(lo) - self.sf(hi) } else { self.cdf(hi) - c };
        mass.max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousDist {
    Normal { mu: f64, sigma: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    Cauchy { x0: f64, gamma: f64 },
    Beta { alpha: f64, beta: f64 },
}

fn finite(dist: &'static str, vals: &[f64]) -> Result<(), DistError> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(dist, "parameters must be finite"))
    }
}

impl ContinuousDist {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self, DistError> {
        finite("Normal", &[mu, sigma])?;
        if sigma <= 0.0 {
            return Err(invalid("Normal", format!("sigma = {sigma} must be positive")));
        }
        Ok(ContinuousDist::Normal { mu, sigma })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self, DistError> {
        finite("LogNormal", &[mu, sigma])?;
        if sigma <= 0.0 {
            return Err(invalid("LogNormal", format!("sigma = {sigma} must be positive")));
        }
        Ok(ContinuousDist::LogNormal { mu, sigma })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistError> {
        finite("Uniform", &[lo, hi])?;
        if lo >= hi {
            return Err(invalid("Uniform", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(ContinuousDist::Uniform { lo, hi })
    }

    pub fn cauchy(x0: f64, gamma: f64) -> Result<Self, DistError> {
        finite("Cauchy", &[x0, gamma])?;
        if gamma <= 0.0 {
            return Err(invalid("Cauchy", format!("gamma = {gamma} must be positive")));
        }
        Ok(ContinuousDist::Cauchy { x0, gamma })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self, DistError> {
        finite("Beta", &[alpha, beta])?;
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(invalid("Beta", format!("shape parameters ({alpha}, {beta}) must be positive")));
        }
        Ok(ContinuousDist::Beta { alpha, beta })
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z * FRAC_1_SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

impl Sampler for ContinuousDist {
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        match *self {
            ContinuousDist::Normal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            ContinuousDist::LogNormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
            ContinuousDist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            ContinuousDist::Cauchy { x0, gamma } => {
                x0 + gamma * (PI * (rng.random::<f64>() - 0.5)).tan()
            }
            ContinuousDist::Beta { alpha, beta } => rand_distr::Beta::new(alpha, beta)
                .expect("validated beta parameters")
                .sample(rng),
        }
    }
}

impl Continuous for ContinuousDist {
    fn pdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousDist::Normal { mu, sigma } => std_normal_pdf((x - mu) / sigma) / sigma,
            ContinuousDist::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_pdf((x.ln() - mu) / sigma) / (sigma * x)
                }
            }
            ContinuousDist::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            ContinuousDist::Cauchy { x0, gamma } => {
                let t = (x - x0) / gamma;
                1.0 / (PI * gamma * (1.0 + t * t))
            }
            ContinuousDist::Beta { alpha, beta } => beta_pdf(alpha, beta, x),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousDist::Normal { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            ContinuousDist::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf((x.ln() - mu) / sigma)
                }
            }
            ContinuousDist::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousDist::Cauchy { x0, gamma } => (1.0f64).atan2(-(x - x0) / gamma) / PI,
            ContinuousDist::Beta { alpha, beta } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta::beta_reg(alpha, beta, x)
                }
            }
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match *self {
            ContinuousDist::Normal { mu, sigma } => std_normal_cdf(-(x - mu) / sigma),
            ContinuousDist::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    std_normal_cdf(-(x.ln() - mu) / sigma)
                }
            }
            ContinuousDist::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousDist::Cauchy { x0, gamma } => (1.0f64).atan2((x - x0) / gamma) / PI,
            ContinuousDist::Beta { alpha, beta } => {
                if x <= 0.0 {
                    1.0
                } else if x >= 1.0 {
                    0.0
                } else {
                    beta::beta_reg(beta, alpha, 1.0 - x)
                }
            }
        }
    }

    fn support(&self) -> RealInterval {
        match *self {
            ContinuousDist::Normal { .. } | ContinuousDist::Cauchy { .. } => RealInterval::REAL_LINE,
            ContinuousDist::LogNormal { .. } => RealInterval::POSITIVE,
            ContinuousDist::Uniform { lo, hi } => RealInterval::closed(lo, hi),
            ContinuousDist::Beta { .. } => RealInterval::closed(0.0, 1.0),
        }
    }
}

fn beta_pdf(alpha: f64, beta: f64, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    if x == 0.0 || x == 1.0 {
        let a = if x == 0.0 { alpha } else { beta };
        return match a.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0 / beta::beta(alpha, beta),
            _ => 0.0,
        };
    }
    ((alpha - 1.0) * x.ln() + (beta - 1.0) * (-x).ln_1p() - beta::ln_beta(alpha, beta)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscreteDist {
    Bernoulli { p: f64 },
    Binomial { n: u64, p: f64 },
    DiscreteUniform { lo: i64, hi: i64 },
}

impl DiscreteDist {
    pub fn bernoulli(p: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("Bernoulli", format!("p = {p} outside [0, 1]")));
        }
        Ok(DiscreteDist::Bernoulli { p })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("Binomial", format!("p = {p} outside [0, 1]")));
        }
        if n > i64::MAX as u64 {
            return Err(invalid("Binomial", "n too large"));
        }
        Ok(DiscreteDist::Binomial { n, p })
    }

    pub fn discrete_uniform(lo: i64, hi: i64) -> Result<Self, DistError> {
        if lo > hi {
            return Err(invalid("DiscreteUniform", format!("need lo <= hi, got {lo}..{hi}")));
        }
        Ok(DiscreteDist::DiscreteUniform { lo, hi })
    }

    pub fn sample_int(&self, rng: &mut dyn RngCore) -> i64 {
        match *self {
            DiscreteDist::Bernoulli { p } => (rng.random::<f64>() < p) as i64,
            DiscreteDist::Binomial { n, p } => rand_distr::Binomial::new(n, p)
                .expect("validated binomial parameters")
                .sample(rng) as i64,
            DiscreteDist::DiscreteUniform { lo, hi } => rng.random_range(lo..=hi),
        }
    }

    pub fn pmf(&self, k: i64) -> f64 {
        match *self {
            DiscreteDist::Bernoulli { p } => match k {
                0 => 1.0 - p,
                1 => p,
                _ => 0.0,
            },
            DiscreteDist::Binomial { n, p } => binomial_pmf(n, p, k),
            DiscreteDist::DiscreteUniform { lo, hi } => {
                if (lo..=hi).contains(&k) {
                    1.0 / ((hi - lo) as f64 + 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Inclusive range outside of which the pmf is zero.
    pub fn support(&self) -> (i64, i64) {
        match *self {
            DiscreteDist::Bernoulli { .. } => (0, 1),
            DiscreteDist::Binomial { n, .. } => (0, n as i64),
            DiscreteDist::DiscreteUniform { lo, hi } => (lo, hi),
        }
    }
}

fn binomial_pmf(n: u64, p: f64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    let k = k as u64;
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let (nf, kf) = (n as f64, k as f64);
    let ln_choose = gamma::ln_gamma(nf + 1.0) - gamma::ln_gamma(kf + 1.0) - gamma::ln_gamma(nf - kf + 1.0);
    (ln_choose + kf * p.ln() + (nf - kf) * (-p).ln_1p()).exp()
}

impl Sampler for DiscreteDist {
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.sample_int(rng) as f64
    }
}
