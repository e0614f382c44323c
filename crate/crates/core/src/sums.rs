//! The sum families: Ramanujan c_k, Cohen c_k^(a), the two-function divisor
//! sum s_k, and the generalized three-function form s^(a)_{f,g,h}(k, j). Each
//! classical family also has an independent exponential form used purely as a
//! floating-point cross-check; identity verification never consumes it.

use std::f64::consts::TAU;

use crate::arith::{divisors, gcd, generalized_gcd_a, mobius};
use crate::error::{Error, Result};
use crate::func::{pow_checked, ArithFn, Domain};
use crate::value::Value;

/// Parameters (a, f, g, h, k) of the generalized divisor sum.
#[derive(Debug, Clone)]
pub struct SumSpec {
    a: u32,
    f: ArithFn,
    g: ArithFn,
    h: ArithFn,
    k: u64,
}

impl SumSpec {
    pub fn new(a: u32, f: ArithFn, g: ArithFn, h: ArithFn, k: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::Domain("SumSpec needs a >= 1".into()));
        }
        if k == 0 {
            return Err(Error::Domain("SumSpec needs k >= 1".into()));
        }
        Ok(SumSpec { a, f, g, h, k })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn f(&self) -> &ArithFn {
        &self.f
    }

    pub fn g(&self) -> &ArithFn {
        &self.g
    }

    pub fn h(&self) -> &ArithFn {
        &self.h
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn is_exact(&self) -> bool {
        self.f.domain() == Domain::Rational
            && self.g.domain() == Domain::Rational
            && self.h.domain() == Domain::Rational
    }
}

/// Ramanujan sum via the divisor form sum_{d | gcd(j,k)} d mu(k/d).
/// j = 0 is understood through gcd(0, k) = k, giving c_k(0) = phi(k).
pub fn ramanujan(k: u64, j: u64) -> Result<i64> {
    if k == 0 {
        return Err(Error::Domain("ramanujan needs k >= 1".into()));
    }
    let mut acc: i128 = 0;
    for &d in divisors(gcd(j, k))?.iter() {
        acc += d as i128 * mobius(k / d)? as i128;
    }
    i64::try_from(acc).map_err(|_| Error::Domain("ramanujan value exceeds i64".into()))
}

/// Exponential form: (re, im) of sum over coprime residues m of e(m j / k).
pub fn ramanujan_exp_parts(k: u64, j: u64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::Domain("ramanujan needs k >= 1".into()));
    }
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for m in 1..=k {
        if gcd(m, k) == 1 {
            let ang = TAU * ((m % k) as f64) * ((j % k) as f64) / k as f64;
            re += ang.cos();
            im += ang.sin();
        }
    }
    Ok((re, im))
}

/// Real part of the exponential form; agrees with [`ramanujan`] within 1e-6.
pub fn ramanujan_exp(k: u64, j: u64) -> Result<f64> {
    Ok(ramanujan_exp_parts(k, j)?.0)
}

/// Cohen's generalization via the divisor form sum_{d|k, d^a|j} d^a mu(k/d);
/// j = 0 means every d | k qualifies.
pub fn cohen(a: u32, k: u64, j: u64) -> Result<i64> {
    if a == 0 || k == 0 {
        return Err(Error::Domain("cohen needs a >= 1, k >= 1".into()));
    }
    let mut acc: i128 = 0;
    for &d in divisors(k)?.iter() {
        let qualifies = match (d as u128).checked_pow(a) {
            Some(da) => j == 0 || (j as u128) % da == 0,
            None => j == 0,
        };
        if qualifies {
            let da = (d as u128).pow(a); // in range whenever it divided j
            acc += da as i128 * mobius(k / d)? as i128;
        }
    }
    i64::try_from(acc).map_err(|_| Error::Domain("cohen value exceeds i64".into()))
}

/// Exponential cross-form: sum over m <= k^a with (m, k^a)_a = 1 of
/// e(m j / k^a), returned as (re, im).
pub fn cohen_exp_parts(a: u32, k: u64, j: u64) -> Result<(f64, f64)> {
    let ka = pow_checked(k, a)?;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for m in 1..=ka {
        if generalized_gcd_a(m, k, a)? == 1 {
            let ang = TAU * ((m % ka) as f64) * ((j % ka) as f64) / ka as f64;
            re += ang.cos();
            im += ang.sin();
        }
    }
    Ok((re, im))
}

pub fn cohen_exp(a: u32, k: u64, j: u64) -> Result<f64> {
    Ok(cohen_exp_parts(a, k, j)?.0)
}

/// Two-function divisor sum s_k(j) = sum_{d | gcd(k,j)} f(d) g(k/d).
pub fn anderson_apostol(f: &ArithFn, g: &ArithFn, k: u64, j: u64) -> Result<Value> {
    if k == 0 {
        return Err(Error::Domain("anderson_apostol needs k >= 1".into()));
    }
    let mut acc = Value::zero();
    for &d in divisors(gcd(k, j))?.iter() {
        acc += f.eval(d)? * g.eval(k / d)?;
    }
    Ok(acc)
}

/// Generalized sum s^(a)_{f,g,h}(k, j) = sum_{d|k, d^a|j} f(d) g(k/d) h(j/d^a).
///
/// j = 0 is permitted only when h is the constant one: every divisor of k
/// then qualifies and the h argument is never consumed. With any other h the
/// evaluation h(0/d^a) would be meaningless and is rejected.
pub fn gen_aa(spec: &SumSpec, j: u64) -> Result<Value> {
    if j == 0 && !spec.h.is_one() {
        return Err(Error::Domain(
            "j = 0 is only defined when h = one".into(),
        ));
    }
    let mut acc = Value::zero();
    for &d in divisors(spec.k)?.iter() {
        let da = match (d as u128).checked_pow(spec.a) {
            Some(da) => da,
            None => {
                if j == 0 {
                    u128::MAX // marker: qualifies, h never consumed
                } else {
                    continue;
                }
            }
        };
        if j == 0 {
            acc += spec.f.eval(d)? * spec.g.eval(spec.k / d)?;
        } else if (j as u128) % da == 0 {
            acc += spec.f.eval(d)?
                * spec.g.eval(spec.k / d)?
                * spec.h.eval(j / da as u64)?;
        }
    }
    Ok(acc)
}
