//! Probabilistic programs whose `observe` statements condition on intervals.
//!
//! Interval widths may be infinitesimal numbers `r·εⁿ`. Importance sampling
//! then carries trial weights as infinitesimals, and the weighted average
//! returns the exact `ε → 0` limit of conditioning on ever smaller intervals.
//! This sidesteps the unit and reparameterisation anomalies of weighting
//! trials by probability densities.
//!
//! ```
//! use infppl::{importance, ContinuousDist, InfNum, Program};
//!
//! let program = Program::new(InfNum::EPS, |ctx, width| {
//!     let h = ctx.draw(&ContinuousDist::normal(1.7, 0.5)?);
//!     if ctx.flip(0.5)? {
//!         ctx.observe_at(&ContinuousDist::normal(2.0, 0.1)?, h, width)?;
//!     }
//!     Ok(h)
//! });
//! let est = importance(20_000, &program, 1).unwrap();
//! assert!((est.value - 1.7).abs() < 0.02);
//! assert_eq!(est.min_order, 0);
//! ```

pub mod corpus;
pub mod dist;
pub mod engine;
pub mod infnum;
pub mod measure;
pub mod rng;
pub mod transform;

pub use dist::{Continuous, ContinuousDist, DiscreteDist, DistError, RealInterval, Sampler};
pub use engine::{
    estimate, importance, rejection, run_density, run_trials, EngineError, Estimate, Halt, Mode, Outcome, Program,
    RunOptions, TrialContext, TrialRecord,
};
pub use infnum::{InfError, InfNum};
pub use measure::{limit_check, prob, prob_point, Interval, LimitReport, MeasureError, ProbExpr};
pub use transform::{Pushforward, Transform, TransformError};
