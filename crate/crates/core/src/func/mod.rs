//! Declarative arithmetic-function expressions: a small set of builtins plus
//! Dirichlet convolution, pointwise product and rational scaling, each value
//! carrying a multiplicativity class and a rational/real domain tag. The
//! class is what identity preconditions consume; it is declared and
//! spot-checked, never silently trusted from user input.

mod parse;

pub use parse::parse_expr;

use std::fmt;
use std::sync::Arc;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, divisors, generalized_gcd_a};
use crate::error::{Error, Result};
use crate::exact::{format_rat, within_relative, Rat};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    One,
    /// n -> n^r for integer r >= 0.
    IdPower(u32),
    /// n -> n^s for any integer s; negative s is rational-valued.
    Power(i64),
    Mobius,
    EulerPhi,
    /// Jordan totient of integer order m (negative m allowed, rational-valued).
    Jordan(i64),
    Log,
    BigOmega,
    Dirichlet(Arc<Expr>, Arc<Expr>),
    Pointwise(Arc<Expr>, Arc<Expr>),
    Scale(Rat, Arc<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FnClass {
    CompletelyMultiplicative,
    CompletelyAdditive,
    Multiplicative,
    General,
}

impl FnClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FnClass::CompletelyMultiplicative => "completely_multiplicative",
            FnClass::CompletelyAdditive => "completely_additive",
            FnClass::Multiplicative => "multiplicative",
            FnClass::General => "general",
        }
    }

    fn is_multiplicative(self) -> bool {
        matches!(
            self,
            FnClass::CompletelyMultiplicative | FnClass::Multiplicative
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Rational,
    Real,
}

/// An immutable arithmetic function. Cheap to clone (shared expression tree);
/// evaluation is pure, so values can be used freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithFn {
    expr: Arc<Expr>,
    class: FnClass,
    domain: Domain,
}

fn infer_domain(e: &Expr) -> Domain {
    match e {
        Expr::Log => Domain::Real,
        Expr::Dirichlet(a, b) | Expr::Pointwise(a, b) => {
            if infer_domain(a) == Domain::Real || infer_domain(b) == Domain::Real {
                Domain::Real
            } else {
                Domain::Rational
            }
        }
        Expr::Scale(_, a) => infer_domain(a),
        _ => Domain::Rational,
    }
}

// Conservative class inference: only upgrades that hold unconditionally.
fn infer_class(e: &Expr) -> FnClass {
    match e {
        Expr::One | Expr::IdPower(_) | Expr::Power(_) => FnClass::CompletelyMultiplicative,
        Expr::Mobius | Expr::EulerPhi | Expr::Jordan(_) => FnClass::Multiplicative,
        Expr::Log | Expr::BigOmega => FnClass::CompletelyAdditive,
        Expr::Dirichlet(a, b) => {
            if infer_class(a).is_multiplicative() && infer_class(b).is_multiplicative() {
                FnClass::Multiplicative
            } else {
                FnClass::General
            }
        }
        Expr::Pointwise(a, b) => {
            let (ca, cb) = (infer_class(a), infer_class(b));
            if ca == FnClass::CompletelyMultiplicative && cb == FnClass::CompletelyMultiplicative {
                FnClass::CompletelyMultiplicative
            } else if ca.is_multiplicative() && cb.is_multiplicative() {
                FnClass::Multiplicative
            } else {
                FnClass::General
            }
        }
        Expr::Scale(c, a) => {
            if c.is_one() {
                infer_class(a)
            } else if infer_class(a) == FnClass::CompletelyAdditive {
                // (c w)(mn) = c w(m) + c w(n): scaling preserves additivity.
                FnClass::CompletelyAdditive
            } else {
                FnClass::General
            }
        }
    }
}

impl ArithFn {
    fn from_expr(expr: Expr) -> Self {
        let class = infer_class(&expr);
        let domain = infer_domain(&expr);
        ArithFn {
            expr: Arc::new(expr),
            class,
            domain,
        }
    }

    pub fn one() -> Self {
        Self::from_expr(Expr::One)
    }

    pub fn id() -> Self {
        Self::from_expr(Expr::IdPower(1))
    }

    pub fn id_power(r: u32) -> Self {
        Self::from_expr(Expr::IdPower(r))
    }

    pub fn power(s: i64) -> Self {
        Self::from_expr(Expr::Power(s))
    }

    pub fn mobius() -> Self {
        Self::from_expr(Expr::Mobius)
    }

    pub fn euler_phi() -> Self {
        Self::from_expr(Expr::EulerPhi)
    }

    pub fn jordan(m: i64) -> Self {
        Self::from_expr(Expr::Jordan(m))
    }

    pub fn log() -> Self {
        Self::from_expr(Expr::Log)
    }

    pub fn big_omega() -> Self {
        Self::from_expr(Expr::BigOmega)
    }

    pub fn dirichlet(f: &ArithFn, g: &ArithFn) -> Self {
        Self::from_expr(Expr::Dirichlet(f.expr.clone(), g.expr.clone()))
    }

    pub fn pointwise(f: &ArithFn, g: &ArithFn) -> Self {
        Self::from_expr(Expr::Pointwise(f.expr.clone(), g.expr.clone()))
    }

    pub fn scale(c: Rat, f: &ArithFn) -> Self {
        Self::from_expr(Expr::Scale(c, f.expr.clone()))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn class(&self) -> FnClass {
        self.class
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Structurally the constant-one function (the `h = 1` gate for j = 0).
    pub fn is_one(&self) -> bool {
        matches!(*self.expr, Expr::One)
    }

    /// Re-declare the multiplicativity class. The claim is spot-checked on 50
    /// seeded random pairs <= 10^4 (mixed coprime and non-coprime for the
    /// complete classes, coprime-only for plain multiplicative) before it is
    /// accepted; a counterexample rejects the declaration.
    pub fn with_class(self, class: FnClass) -> Result<ArithFn> {
        spot_check_class(&self, class)?;
        Ok(ArithFn { class, ..self })
    }

    pub fn eval(&self, n: u64) -> Result<Value> {
        if n == 0 {
            return Err(Error::Domain("arithmetic functions need n >= 1".into()));
        }
        eval_expr(&self.expr, n)
    }

    /// Exact evaluation; rejects real-domain expressions instead of rounding.
    pub fn eval_exact(&self, n: u64) -> Result<Rat> {
        if self.domain == Domain::Real {
            return Err(Error::DomainMismatch(format!(
                "`{self}` is real-valued; an exact pipeline cannot evaluate it"
            )));
        }
        self.eval(n)?.into_exact()
    }
}

fn eval_expr(e: &Expr, n: u64) -> Result<Value> {
    Ok(match e {
        Expr::One => Value::one(),
        Expr::IdPower(r) => Value::Exact(Rat::from_integer(arith::bigint_pow(n, *r))),
        Expr::Power(s) => Value::Exact(arith::big_rational_pow(n, *s)?),
        Expr::Mobius => Value::Exact(Rat::from_integer(arith::mobius(n)?.into())),
        Expr::EulerPhi => Value::from_u64(arith::euler_phi(n)?),
        Expr::Jordan(m) => Value::Exact(arith::jordan_totient(*m, n)?),
        Expr::Log => Value::Real((n as f64).ln()),
        Expr::BigOmega => Value::from_u64(arith::big_omega(n)? as u64),
        Expr::Dirichlet(f, g) => {
            let mut acc = Value::zero();
            for &d in divisors(n)?.iter() {
                acc += eval_expr(f, d)? * eval_expr(g, n / d)?;
            }
            acc
        }
        Expr::Pointwise(f, g) => eval_expr(f, n)? * eval_expr(g, n)?,
        Expr::Scale(c, f) => Value::Exact(c.clone()) * eval_expr(f, n)?,
    })
}

fn values_agree(domain: Domain, l: &Value, r: &Value) -> bool {
    match domain {
        Domain::Rational => match (l, r) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => false,
        },
        Domain::Real => within_relative(l.to_f64(), r.to_f64(), 1e-9),
    }
}

fn spot_check_class(f: &ArithFn, class: FnClass) -> Result<()> {
    if class == FnClass::General {
        return Ok(());
    }
    let additive = class == FnClass::CompletelyAdditive;
    let unit = f.eval(1)?;
    let unit_ok = if additive {
        unit.is_zero()
    } else {
        values_agree(f.domain, &unit, &Value::one())
    };
    if !unit_ok {
        return Err(Error::Precondition(format!(
            "`{f}` declared {} but F(1) = {unit}",
            class.as_str()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CA11);
    for i in 0..50u32 {
        let (a, b) = loop {
            let mut a = rng.gen_range(2..=10_000u64);
            let mut b = rng.gen_range(2..=10_000u64);
            match class {
                // Complete flags must survive shared factors too; force some.
                FnClass::CompletelyMultiplicative | FnClass::CompletelyAdditive => {
                    if i % 2 == 0 {
                        a = (a / 2).max(1) * 2;
                        b = (b / 2).max(1) * 2;
                    }
                    break (a, b);
                }
                FnClass::Multiplicative => {
                    if arith::gcd(a, b) == 1 {
                        break (a, b);
                    }
                }
                FnClass::General => unreachable!(),
            }
        };
        let lhs = f.eval(a * b)?;
        let rhs = if additive {
            f.eval(a)? + f.eval(b)?
        } else {
            f.eval(a)? * f.eval(b)?
        };
        if !values_agree(f.domain, &lhs, &rhs) {
            return Err(Error::Precondition(format!(
                "`{f}` declared {} but F({a}*{b}) = {lhs} while the combination gives {rhs}",
                class.as_str()
            )));
        }
    }
    Ok(())
}

/// Psi(omega, m) = sum of omega(l) over 1 <= l <= m with gcd(l, m) = 1.
pub fn psi_weight(omega: &ArithFn, m: u64) -> Result<Value> {
    if m == 0 {
        return Err(Error::Domain("psi_weight needs m >= 1".into()));
    }
    let mut acc = Value::zero();
    for l in 1..=m {
        if arith::gcd(l, m) == 1 {
            acc += omega.eval(l)?;
        }
    }
    Ok(acc)
}

/// Generalized Psi: sum of omega(l) over 1 <= l <= N^a with (l, N^a)_a = 1.
pub fn psi_weight_a(a: u32, omega: &ArithFn, n: u64) -> Result<Value> {
    let na = pow_checked(n, a)?;
    let mut acc = Value::zero();
    for l in 1..=na {
        if generalized_gcd_a(l, n, a)? == 1 {
            acc += omega.eval(l)?;
        }
    }
    Ok(acc)
}

/// Generalized totient: #{ 1 <= l <= N^a : (l, N^a)_a = 1 }.
pub fn phi_a(a: u32, n: u64) -> Result<u64> {
    let na = pow_checked(n, a)?;
    let mut count = 0;
    for l in 1..=na {
        if generalized_gcd_a(l, n, a)? == 1 {
            count += 1;
        }
    }
    Ok(count)
}

pub(crate) fn pow_checked(n: u64, a: u32) -> Result<u64> {
    if n == 0 || a == 0 {
        return Err(Error::Domain("power range needs n >= 1, a >= 1".into()));
    }
    n.checked_pow(a)
        .ok_or_else(|| Error::Domain(format!("{n}^{a} overflows u64")))
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Scale(..) => 0,
        Expr::Dirichlet(..) => 1,
        Expr::Pointwise(..) => 2,
        _ => 3,
    }
}

fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "(")?;
        fmt_expr(e, f, 0)?;
        return write!(f, ")");
    }
    match e {
        Expr::One => write!(f, "one"),
        Expr::IdPower(1) => write!(f, "id"),
        Expr::IdPower(r) => write!(f, "id^{r}"),
        Expr::Power(s) => write!(f, "pow^{s}"),
        Expr::Mobius => write!(f, "mu"),
        Expr::EulerPhi => write!(f, "phi"),
        Expr::Jordan(m) => write!(f, "jordan[{m}]"),
        Expr::Log => write!(f, "log"),
        Expr::BigOmega => write!(f, "bigomega"),
        Expr::Dirichlet(a, b) => {
            fmt_expr(a, f, 1)?;
            write!(f, "*")?;
            fmt_expr(b, f, 2)
        }
        Expr::Pointwise(a, b) => {
            fmt_expr(a, f, 2)?;
            write!(f, ".")?;
            fmt_expr(b, f, 3)
        }
        Expr::Scale(c, a) => {
            write!(f, "{}:", format_rat(c))?;
            fmt_expr(a, f, 0)
        }
    }
}

impl fmt::Display for ArithFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(&self.expr, f, 0)
    }
}
