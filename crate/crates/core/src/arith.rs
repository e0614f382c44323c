//! Integer foundations: deterministic factorization with process-wide memo
//! caches, divisor enumeration, Mobius, Euler/Jordan totients, lcm, and the
//! generalized gcd (j, k^a)_a.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Prime factorization of a positive integer, exponents in increasing prime
/// order. Constructed only through [`factorize`], which guarantees the
/// invariants (primes strictly increasing, exponents >= 1, product == value).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// (prime, exponent) pairs; empty for n = 1.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn num_divisors(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }
}

// Factorizations and divisor lists are requested over and over for the same
// small moduli during grid sweeps, so both are memoized process-wide. DashMap
// gives lock-free concurrent reads for the rayon-driven verifier. Only small
// arguments are cached: direct sums sweep j up to ~10^6 distinct values and
// caching those once-off factorizations would trade memory for nothing.
const CACHE_MAX: u64 = 1 << 17;
static FACTOR_CACHE: LazyLock<DashMap<u64, Arc<Factorization>>> = LazyLock::new(DashMap::new);
static DIVISOR_CACHE: LazyLock<DashMap<u64, Arc<Vec<u64>>>> = LazyLock::new(DashMap::new);

/// Deterministic trial division over a 2/3/5 wheel. Complete for all u64
/// inputs; fast for the desk-scale inputs (<= 10^12) this crate targets.
pub fn factorize(n: u64) -> Result<Arc<Factorization>> {
    if n == 0 {
        return Err(Error::Domain("factorize(0) is undefined".into()));
    }
    if let Some(f) = FACTOR_CACHE.get(&n) {
        return Ok(f.clone());
    }
    let mut m = n;
    let mut factors = Vec::new();
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    // Increments that skip multiples of 2, 3 and 5 starting from 7.
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut w = 0usize;
    while p.checked_mul(p).map_or(false, |pp| pp <= m) {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
        p += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let f = Arc::new(Factorization { value: n, factors });
    if n < CACHE_MAX {
        FACTOR_CACHE.insert(n, f.clone());
    }
    Ok(f)
}

/// All positive divisors of n in increasing order.
pub fn divisors(n: u64) -> Result<Arc<Vec<u64>>> {
    if let Some(d) = DIVISOR_CACHE.get(&n) {
        return Ok(d.clone());
    }
    let f = factorize(n)?;
    let mut ds: Vec<u64> = vec![1];
    for &(p, e) in f.factors() {
        let prev = ds.clone();
        let mut pp = 1u64;
        for _ in 0..e {
            pp *= p;
            ds.extend(prev.iter().map(|d| d * pp));
        }
    }
    ds.sort_unstable();
    let ds = Arc::new(ds);
    if n < CACHE_MAX {
        DIVISOR_CACHE.insert(n, ds.clone());
    }
    Ok(ds)
}

/// Mobius function: 0 on non-squarefree n, else (-1)^(number of primes).
pub fn mobius(n: u64) -> Result<i32> {
    let f = factorize(n)?;
    if f.factors().iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.factors().len() % 2 == 0 { 1 } else { -1 })
}

/// Number of prime factors counted with multiplicity; Omega(1) = 0.
pub fn big_omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.factors().iter().map(|&(_, e)| e).sum())
}

/// Euler totient via the product formula.
pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    let mut r = n;
    for &(p, _) in f.factors() {
        r = r / p * (p - 1);
    }
    Ok(r)
}

/// Jordan totient of any integer order m: phi_m(n) = sum_{d|n} d^m mu(n/d),
/// computed as the product over prime powers p^e of (p^(m e) - p^(m(e-1))).
/// Negative orders give non-integer rationals, e.g. phi_{-1}(4) = -1/4.
pub fn jordan_totient(order: i64, n: u64) -> Result<BigRational> {
    let f = factorize(n)?;
    let mut r = BigRational::one();
    for &(p, e) in f.factors() {
        let p = BigInt::from(p);
        let hi = rational_pow(&p, order * e as i64);
        let lo = rational_pow(&p, order * (e as i64 - 1));
        r *= hi - lo;
    }
    Ok(r)
}

/// base^exp as an exact rational, for integer base > 0 and any integer exp.
fn rational_pow(base: &BigInt, exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(base.pow(exp as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-exp) as u32))
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// lcm of a nonempty list, erroring on u64 overflow.
pub fn lcm_list(ks: &[u64]) -> Result<u64> {
    if ks.is_empty() {
        return Err(Error::Domain("lcm of an empty list".into()));
    }
    let mut l: u64 = 1;
    for &k in ks {
        if k == 0 {
            return Err(Error::Domain("lcm with a zero entry".into()));
        }
        let g = gcd(l, k);
        l = l
            .checked_mul(k / g)
            .ok_or_else(|| Error::Domain("lcm overflows u64".into()))?;
    }
    Ok(l)
}

/// Generalized gcd (j, k^a)_a: the largest d with d | k and d^a | j.
/// The qualifying set is closed under lcm, so the maximum is also the unique
/// divisor every qualifying d divides. By convention (0, k^a)_a = k.
pub fn generalized_gcd_a(j: u64, k: u64, a: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("generalized gcd with k = 0".into()));
    }
    if a == 0 {
        return Err(Error::Domain("generalized gcd needs a >= 1".into()));
    }
    if j == 0 {
        return Ok(k);
    }
    let ds = divisors(k)?;
    for &d in ds.iter().rev() {
        match (d as u128).checked_pow(a) {
            Some(da) if da <= j as u128 && (j as u128) % da == 0 => return Ok(d),
            _ => {}
        }
    }
    Ok(1)
}

/// Exact n^e as a BigInt (convenience for closed forms).
pub fn bigint_pow(n: u64, e: u32) -> BigInt {
    BigInt::from(n).pow(e)
}

/// Exact n^e as a BigRational for any integer e (negative e gives 1/n^|e|).
pub fn big_rational_pow(n: u64, e: i64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("0 cannot be raised to a negative power".into()));
    }
    Ok(rational_pow(&BigInt::from(n), e))
}

/// True iff phi_m would be zero: only for n with a squared prime at order 0.
pub fn is_zero_rational(r: &BigRational) -> bool {
    r.is_zero()
}
