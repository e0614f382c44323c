//! Two-track numeric value: exact big rationals where the pipeline is exact,
//! doubles once anything real-valued (a log weight) has entered. Promotion is
//! one-way; nothing silently converts a real back to an exact value.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_rat, format_real, rat_to_f64, rat_u64, Rat};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rat),
    Real(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rat::zero())
    }

    pub fn one() -> Self {
        Value::Exact(Rat::one())
    }

    pub fn from_u64(n: u64) -> Self {
        Value::Exact(rat_u64(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Real(x) => *x == 0.0,
        }
    }

    /// The exact rational inside, or an error if reals already entered the
    /// computation: callers that need exactness must fail loudly, not round.
    pub fn as_exact(&self) -> Result<&Rat> {
        match self {
            Value::Exact(r) => Ok(r),
            Value::Real(x) => Err(Error::DomainMismatch(format!(
                "expected exact rational, found real {x}"
            ))),
        }
    }

    pub fn into_exact(self) -> Result<Rat> {
        match self {
            Value::Exact(r) => Ok(r),
            Value::Real(x) => Err(Error::DomainMismatch(format!(
                "expected exact rational, found real {x}"
            ))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rat_to_f64(r),
            Value::Real(x) => *x,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&format_rat(r)),
            Value::Real(x) => f.write_str(&format_real(*x)),
        }
    }
}

impl From<Rat> for Value {
    fn from(r: Rat) -> Self {
        Value::Exact(r)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            (a, b) => Value::Real(a.to_f64() + b.to_f64()),
        }
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            (a, b) => Value::Real(a.to_f64() - b.to_f64()),
        }
    }
}

impl Mul for Value {
    type Output = Value;
    fn mul(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            (a, b) => Value::Real(a.to_f64() * b.to_f64()),
        }
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(-r),
            Value::Real(x) => Value::Real(-x),
        }
    }
}

impl AddAssign for Value {
    fn add_assign(&mut self, rhs: Value) {
        let lhs = std::mem::replace(self, Value::zero());
        *self = lhs + rhs;
    }
}

impl MulAssign for Value {
    fn mul_assign(&mut self, rhs: Value) {
        let lhs = std::mem::replace(self, Value::one());
        *self = lhs * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rat;

    #[test]
    fn exact_stays_exact() {
        let a = Value::Exact(parse_rat("1/3").unwrap());
        let b = Value::Exact(parse_rat("1/6").unwrap());
        let s = a + b;
        assert_eq!(s.as_exact().unwrap(), &parse_rat("1/2").unwrap());
    }

    #[test]
    fn real_contaminates() {
        let a = Value::Exact(parse_rat("1/3").unwrap());
        let b = Value::Real(0.5);
        let s = a * b;
        assert!(!s.is_exact());
        assert!(s.as_exact().is_err());
        assert!((s.to_f64() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Value::from_u64(7).to_string(), "7/1");
        let r = Value::Real(0.5).to_string();
        assert!(r.contains('e'), "{r}");
    }
}
