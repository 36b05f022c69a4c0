//! The example programs, each parameterised by the observation width.
//!
//! Discrete examples carry an exact expectation computed by enumerating the
//! conditioning event directly, not by running the program.

use std::sync::OnceLock;

use thiserror::Error;

use crate::dist::{ContinuousDist, DiscreteDist};
use crate::engine::Program;
use crate::infnum::InfNum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValue {
    pub value: f64,
    /// How the value was obtained.
    pub method: &'static str,
}

#[derive(Debug, Clone)]
pub struct Example {
    name: &'static str,
    description: &'static str,
    program: Program,
    exact: Option<ExactValue>,
}

impl Example {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn description(&self) -> &'static str {
        self.description
    }

    /// The program at its default width of `1ε`.
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn at_width(&self, width: InfNum) -> Program {
        self.program.with_width(width)
    }

    pub fn exact_value(&self) -> Option<ExactValue> {
        self.exact
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown example '{0}'")]
pub struct UnknownExample(pub String);

/// Every example, in a fixed order.
pub fn list_examples() -> &'static [Example] {
    static CATALOG: OnceLock<Vec<Example>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

pub fn get(name: &str) -> Result<&'static Example, UnknownExample> {
    list_examples()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| UnknownExample(name.to_string()))
}

fn example(name: &'static str, description: &'static str, program: Program, exact: Option<ExactValue>) -> Example {
    Example { name, description, program, exact }
}

fn build_catalog() -> Vec<Example> {
    vec![
        example(
            "two_dice",
            "E[x | x + y = 8] for two fair dice",
            Program::new(InfNum::EPS, |ctx, _| {
                let die = DiscreteDist::discrete_uniform(1, 6)?;
                let x = ctx.draw_int(&die);
                ctx.observe_discrete(&die, 8 - x)?;
                Ok(x as f64)
            }),
            Some(ExactValue { value: two_dice_exact(), method: "enumeration of 36 outcomes" }),
        ),
        example(
            "dice_coin",
            "two dice, conditioned on x + y = 8 only when a fair coin lands heads",
            Program::new(InfNum::EPS, |ctx, _| {
                let die = DiscreteDist::discrete_uniform(1, 6)?;
                let x = ctx.draw_int(&die);
                if ctx.flip(0.5)? {
                    ctx.observe_discrete(&die, 8 - x)?;
                }
                Ok(x as f64)
            }),
            Some(ExactValue { value: dice_coin_exact(), method: "enumeration over (x, y, coin)" }),
        ),
        example(
            "intro_m",
            "height in metres, observed only when a coin lands heads",
            Program::new(InfNum::EPS, |ctx, w| {
                let h = ctx.draw(&ContinuousDist::normal(1.7, 0.5)?);
                if ctx.flip(0.5)? {
                    ctx.observe_at(&ContinuousDist::normal(2.0, 0.1)?, h, w)?;
                }
                Ok(h)
            }),
            None,
        ),
        example(
            "intro_cm",
            "intro_m in centimetres; the interval is 100 times wider",
            Program::new(InfNum::EPS, |ctx, w| {
                let h = ctx.draw(&ContinuousDist::normal(170.0, 50.0)?);
                if ctx.flip(0.5)? {
                    ctx.observe_at(&ContinuousDist::normal(200.0, 10.0)?, h, w.scale(100.0)?)?;
                }
                Ok(h)
            }),
            None,
        ),
        example(
            "bmi_m",
            "BMI with height in metres; either height or weight is observed",
            Program::new(InfNum::EPS, |ctx, eps| {
                const A: f64 = 1.0;
                const B: f64 = 1.0;
                let h = ctx.draw(&ContinuousDist::normal(1.7, 0.5)?);
                let w = ctx.draw(&ContinuousDist::normal(70.0, 30.0)?);
                if ctx.flip(0.5)? {
                    ctx.observe_at(&ContinuousDist::normal(2.0, 0.1)?, h, eps.scale(A)?)?;
                } else {
                    ctx.observe_at(&ContinuousDist::normal(90.0, 5.0)?, w, eps.scale(B)?)?;
                }
                Ok(w / (h * h))
            }),
            None,
        ),
        example(
            "bmi_cm",
            "bmi_m with height in centimetres",
            Program::new(InfNum::EPS, |ctx, eps| {
                const A: f64 = 100.0;
                const B: f64 = 1.0;
                let h = ctx.draw(&ContinuousDist::normal(170.0, 50.0)?);
                let w = ctx.draw(&ContinuousDist::normal(70.0, 30.0)?);
                if ctx.flip(0.5)? {
                    ctx.observe_at(&ContinuousDist::normal(200.0, 10.0)?, h, eps.scale(A)?)?;
                } else {
                    ctx.observe_at(&ContinuousDist::normal(90.0, 5.0)?, w, eps.scale(B)?)?;
                }
                let h_m = 0.01 * h;
                Ok(w / (h_m * h_m))
            }),
            None,
        ),
        example(
            "binomial_analogue",
            "discrete analogue of intro_m: an unlikely observation behind a coin flip",
            Program::new(InfNum::EPS, |ctx, _| {
                let h = ctx.draw_int(&DiscreteDist::binomial(10_000, 0.5)?);
                if ctx.flip(0.5)? {
                    ctx.observe_discrete(&DiscreteDist::binomial(10_000, 0.9)?, h)?;
                }
                Ok(h as f64)
            }),
            Some(ExactValue { value: binomial_analogue_exact(), method: "log-space sum over the overlap of both binomials" }),
        ),
        example(
            "type3_db",
            "x ~ Normal(10, 5) conditioned on a Normal(15, 5) draw equal to x",
            Program::new(InfNum::EPS, |ctx, eps| {
                let x = ctx.draw(&ContinuousDist::normal(10.0, 5.0)?);
                ctx.observe_at(&ContinuousDist::normal(15.0, 5.0)?, x, eps)?;
                Ok(x)
            }),
            None,
        ),
        example(
            "type3_energy",
            "type3_db after the change of variables exp(x); the width becomes exp(x)·eps",
            Program::new(InfNum::EPS, |ctx, eps| {
                let exp_x = ctx.draw(&ContinuousDist::log_normal(10.0, 5.0)?);
                ctx.observe_at(&ContinuousDist::log_normal(15.0, 5.0)?, exp_x, eps.scale(exp_x)?)?;
                Ok(exp_x.ln())
            }),
            None,
        ),
        example(
            "example1",
            "BMI with differently scaled observation widths in each branch",
            Program::new(InfNum::EPS, |ctx, width| {
                let h = ctx.draw(&ContinuousDist::normal(1.70, 0.2)?);
                let w = ctx.draw(&ContinuousDist::normal(70.0, 30.0)?);
                if ctx.flip(0.5)? {
                    ctx.observe_at(&ContinuousDist::normal(2.0, 0.1)?, h, width.scale(10.0)?)?;
                } else {
                    ctx.observe_at(&ContinuousDist::normal(90.0, 5.0)?, w, width)?;
                }
                Ok(w / (h * h))
            }),
            None,
        ),
        example(
            "example2",
            "a single observation behind a coin flip",
            Program::new(InfNum::EPS, |ctx, width| {
                let h = ctx.draw(&ContinuousDist::normal(1.7, 0.5)?);
                if ctx.flip(0.5)? {
                    ctx.observe_at(&ContinuousDist::normal(2.0, 0.1)?, h, width)?;
                }
                Ok(h)
            }),
            None,
        ),
        example(
            "example3",
            "one unconditional observation",
            Program::new(InfNum::EPS, |ctx, width| {
                let x = ctx.draw(&ContinuousDist::normal(10.0, 5.0)?);
                ctx.observe_at(&ContinuousDist::normal(15.0, 5.0)?, x, width)?;
                Ok(x)
            }),
            None,
        ),
    ]
}

fn two_dice_exact() -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for x in 1..=6 {
        for y in 1..=6 {
            if x + y == 8 {
                num += x as f64;
                den += 1.0;
            }
        }
    }
    num / den
}

fn dice_coin_exact() -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for x in 1..=6 {
        for y in 1..=6 {
            for heads in [false, true] {
                if !heads || x + y == 8 {
                    num += x as f64;
                    den += 1.0;
                }
            }
        }
    }
    num / den
}

fn ln_binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let (n, k) = (n as f64, k as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0) + k * p.ln() + (n - k) * (1.0 - p).ln()
}

/// `E[h | tails ∨ (heads ∧ h = h')]` with `h ~ Bin(10⁴, ½)`, `h' ~ Bin(10⁴, 0.9)`.
///
/// With `S₀ = Σ P(h=k)P(h'=k)` and `m` the mean of `k` under those products,
/// the value is `(5000 + S₀·m) / (1 + S₀)`, i.e. `5000 + S₀(m − 5000)/(1 + S₀)`.
/// `S₀` is far below the smallest double, so it is kept as a logarithm.
fn binomial_analogue_exact() -> f64 {
    let n = 10_000;
    let terms: Vec<f64> = (0..=n).map(|k| ln_binomial_pmf(n, 0.5, k) + ln_binomial_pmf(n, 0.9, k)).collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = terms.iter().map(|t| (t - top).exp()).collect();
    let total: f64 = scaled.iter().sum();
    let m = scaled.iter().enumerate().map(|(k, s)| k as f64 * s).sum::<f64>() / total;
    let s0 = (top + total.ln()).exp();
    5000.0 + s0 * (m - 5000.0) / (1.0 + s0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_contents() {
        let names: Vec<&str> = list_examples().iter().map(|e| e.name()).collect();
        assert!(names.len() >= 10);
        for required in ["two_dice", "bmi_m", "bmi_cm", "example1", "example2", "example3", "type3_energy"] {
            assert!(names.contains(&required), "{required}");
        }
        let mut unique = names.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), names.len());
    }

    #[test]
    fn unknown_name() {
        assert_eq!(get("three_dice").unwrap_err(), UnknownExample("three_dice".into()));
        assert_eq!(get("dice_coin").unwrap().name(), "dice_coin");
    }

    #[test]
    fn enumeration_oracles() {
        assert_eq!(get("two_dice").unwrap().exact_value().unwrap().value, 4.0);
        let dc = get("dice_coin").unwrap().exact_value().unwrap().value;
        assert!((dc - 146.0 / 41.0).abs() < 1e-12);
        let b = get("binomial_analogue").unwrap().exact_value().unwrap().value;
        assert!((b - 5000.0).abs() < 1e-6);
    }

    #[test]
    fn default_width_is_eps() {
        for e in list_examples() {
            assert_eq!(e.program().width(), InfNum::EPS);
            assert_eq!(e.at_width(InfNum::from_real(0.5)).width(), InfNum::from_real(0.5));
        }
    }
}
