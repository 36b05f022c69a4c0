//! Symbolic infinitesimal numbers `r·εⁿ`.
//!
//! An [`InfNum`] keeps only the leading term of a Laurent series in the formal
//! parameter ε: a real coefficient and an integer order. Addition keeps the
//! lowest-order term, multiplication multiplies coefficients and adds orders,
//! and division is undefined when the divisor's coefficient is exactly zero.
//!
//! A zero coefficient does not collapse the order: `0·ε¹` and `0·ε⁵` are
//! different values. Use [`InfNum::cmp_magnitude`] when the question is
//! "which one is negligible" rather than "are these the same term".

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest order magnitude an [`InfNum`] may carry.
pub const MAX_ORDER: i32 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize)]
pub enum InfError {
    /// Division by a number whose coefficient is exactly zero. The limit
    /// cannot be determined from leading terms alone.
    #[error("undefined: division by {0}")]
    Undefined(InfNum),
    #[error("order overflow: ε^{0} exceeds the supported range ±{MAX_ORDER}")]
    OrderOverflow(i64),
    #[error("non-finite coefficient {0}")]
    NonFinite(f64),
    #[error("magnitude comparison needs non-negative coefficients, got {0}")]
    NegativeCoefficient(InfNum),
}

/// The leading term `coeff · ε^order`.
///
/// Equality is structural: `(r, n) == (s, k)` iff `r == s` and `n == k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInfNum")]
pub struct InfNum {
    coeff: f64,
    order: i32,
}

impl InfNum {
    /// `1·ε⁰`.
    pub const ONE: InfNum = InfNum { coeff: 1.0, order: 0 };
    /// `0·ε⁰`.
    pub const ZERO: InfNum = InfNum { coeff: 0.0, order: 0 };
    /// The symbolic infinitesimal `1·ε¹`.
    pub const EPS: InfNum = InfNum { coeff: 1.0, order: 1 };

    pub fn try_new(coeff: f64, order: i32) -> Result<Self, InfError> {
        if !coeff.is_finite() {
            return Err(InfError::NonFinite(coeff));
        }
        check_order(order as i64)?;
        Ok(InfNum { coeff, order })
    }

    /// Panics if `coeff` is not finite or `order` is out of range.
    pub fn new(coeff: f64, order: i32) -> Self {
        match Self::try_new(coeff, order) {
            Ok(v) => v,
            Err(e) => panic!("invalid infinitesimal: {e}"),
        }
    }

    /// Embeds a real number as `r·ε⁰`. Panics if `r` is not finite.
    pub fn from_real(r: f64) -> Self {
        Self::new(r, 0)
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// True for order 0, i.e. an ordinary real number.
    pub fn is_real(&self) -> bool {
        self.order == 0
    }

    /// True when the order is positive (infinitely small, or zero).
    pub fn is_infinitesimal(&self) -> bool {
        self.order > 0
    }

    /// Multiplies the coefficient by a real, keeping the order.
    pub fn scale(self, r: f64) -> Result<Self, InfError> {
        Self::try_new(self.coeff * r, self.order)
    }

    pub fn checked_add(self, rhs: InfNum) -> Result<Self, InfError> {
        match self.order.cmp(&rhs.order) {
            Ordering::Equal => Self::try_new(self.coeff + rhs.coeff, self.order),
            Ordering::Less => Ok(self),
            Ordering::Greater => Ok(rhs),
        }
    }

    pub fn checked_sub(self, rhs: InfNum) -> Result<Self, InfError> {
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: InfNum) -> Result<Self, InfError> {
        let order = check_order(self.order as i64 + rhs.order as i64)?;
        Self::try_new(self.coeff * rhs.coeff, order)
    }

    pub fn checked_div(self, rhs: InfNum) -> Result<Self, InfError> {
        if rhs.coeff == 0.0 {
            return Err(InfError::Undefined(rhs));
        }
        let order = check_order(self.order as i64 - rhs.order as i64)?;
        Self::try_new(self.coeff / rhs.coeff, order)
    }

    /// Semantic size comparison of two non-negative infinitesimals.
    ///
    /// Any zero coefficient counts as zero regardless of order. Otherwise the
    /// lower order is the larger number, and equal orders compare coefficients.
    pub fn cmp_magnitude(&self, other: &InfNum) -> Result<Ordering, InfError> {
        if self.coeff < 0.0 {
            return Err(InfError::NegativeCoefficient(*self));
        }
        if other.coeff < 0.0 {
            return Err(InfError::NegativeCoefficient(*other));
        }
        let ord = match (self.coeff == 0.0, other.coeff == 0.0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => match self.order.cmp(&other.order) {
                Ordering::Equal => self.coeff.total_cmp(&other.coeff),
                ord => ord.reverse(),
            },
        };
        Ok(ord)
    }
}

#[derive(Deserialize)]
struct RawInfNum {
    coeff: f64,
    order: i32,
}

impl TryFrom<RawInfNum> for InfNum {
    type Error = InfError;

    fn try_from(raw: RawInfNum) -> Result<Self, Self::Error> {
        InfNum::try_new(raw.coeff, raw.order)
    }
}

fn check_order(order: i64) -> Result<i32, InfError> {
    if order.abs() > MAX_ORDER as i64 {
        Err(InfError::OrderOverflow(order))
    } else {
        Ok(order as i32)
    }
}

impl From<f64> for InfNum {
    fn from(r: f64) -> Self {
        InfNum::from_real(r)
    }
}

impl fmt::Display for InfNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ε^{}", self.coeff, self.order)
    }
}

impl Neg for InfNum {
    type Output = InfNum;

    fn neg(self) -> InfNum {
        InfNum { coeff: -self.coeff, order: self.order }
    }
}

// The operator forms panic on overflow or a non-finite coefficient, like
// integer arithmetic in debug builds. Use the `checked_*` methods to recover.

impl Add for InfNum {
    type Output = InfNum;

    fn add(self, rhs: InfNum) -> InfNum {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for InfNum {
    type Output = InfNum;

    fn sub(self, rhs: InfNum) -> InfNum {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for InfNum {
    type Output = InfNum;

    fn mul(self, rhs: InfNum) -> InfNum {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul<f64> for InfNum {
    type Output = InfNum;

    fn mul(self, rhs: f64) -> InfNum {
        self.scale(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}
