//! Exact rational special values (Bernoulli numbers and polynomials, binomial
//! coefficients, power-sum closed forms) plus the small set of controlled
//! real-valued functions the Gamma/log identities need.

use std::f64::consts::PI;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, divisors, euler_phi, factorize, jordan_totient, mobius};
use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat_u64(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

const BERNOULLI_MAX: usize = 200;

// Exact Bernoulli numbers B_0..B_200 (B_1 = -1/2) from the defining
// recurrence sum_{j<=m} binom(m+1,j) B_j = 0. Built once; read-only after.
static BERNOULLI: LazyLock<Vec<Rat>> = LazyLock::new(|| {
    let mut b: Vec<Rat> = Vec::with_capacity(BERNOULLI_MAX + 1);
    b.push(Rat::one());
    for m in 1..=BERNOULLI_MAX {
        if m > 1 && m % 2 == 1 {
            b.push(Rat::zero());
            continue;
        }
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += Rat::from_integer(binomial(m as u64 + 1, j as u64)) * bj;
            }
        }
        b.push(-acc / rat_u64(m as u64 + 1));
    }
    b
});

/// Exact Bernoulli number B_m with the B_1 = -1/2 convention. m <= 200.
pub fn bernoulli_number(m: u32) -> Rat {
    assert!(
        (m as usize) <= BERNOULLI_MAX,
        "bernoulli_number supports m <= {BERNOULLI_MAX}"
    );
    BERNOULLI[m as usize].clone()
}

/// Exact Bernoulli polynomial B_m(x) = sum_i binom(m,i) B_i x^(m-i).
pub fn bernoulli_poly(m: u32, x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    let mut xpow = Rat::one(); // x^(m-i), built from the i = m end downward
    for i in (0..=m).rev() {
        let bi = bernoulli_number(i);
        if !bi.is_zero() {
            acc += Rat::from_integer(binomial(m as u64, i as u64)) * bi * &xpow;
        }
        if i > 0 {
            xpow *= x;
        }
    }
    acc
}

/// Exact binomial coefficient via the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    for i in 0..k {
        num = num * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    num
}

/// Exact sum_{m=1}^{N} m^r. For r >= 1 this is the even-Bernoulli split form
/// N^r/2 + (1/(r+1)) sum_m binom(r+1,2m) B_2m N^(r+1-2m); that split is not
/// valid at r = 0 (it would give N + 1/2), where the sum is just N.
pub fn faulhaber_sum(n: u64, r: u32) -> Rat {
    if r == 0 {
        return rat_u64(n);
    }
    let nr = Rat::from_integer(arith::bigint_pow(n, r));
    let mut acc = Rat::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        acc += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64))
            * b
            * Rat::from_integer(arith::bigint_pow(n, r + 1 - 2 * m));
    }
    nr / rat_u64(2) + acc / rat_u64(r as u64 + 1)
}

/// Exact sum_{m<=N, gcd(m,N)=1} m^r via the Jordan-totient closed form
/// (N^r/(r+1)) sum_m binom(r+1,2m) B_2m phi_{1-2m}(N) for N > 1. The cited
/// source prints prefactor N^(r+1)/(r+1), which is off by a factor N
/// (N=6, r=1: true value 6, printed form gives 36).
pub fn coprime_power_sum(n: u64, r: u32) -> Result<Rat> {
    if n == 0 {
        return Err(Error::Domain("coprime_power_sum needs N >= 1".into()));
    }
    if n == 1 {
        return Ok(Rat::one());
    }
    let mut acc = Rat::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        acc += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64))
            * b
            * jordan_totient(1 - 2 * m as i64, n)?;
    }
    Ok(Rat::from_integer(arith::bigint_pow(n, r)) * acc / rat_u64(r as u64 + 1))
}

/// sum_{l<=N, gcd(l,N)=1} log l via the Mobius-factorial closed form
/// sum_{z|N} mu(N/z) log(z!) - phi(N) sum_{p|N} log p / (p-1).
pub fn coprime_log_sum(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("coprime_log_sum needs N >= 1".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let mut t = 0.0;
    for &z in divisors(n)?.iter() {
        let mu = mobius(n / z)?;
        if mu != 0 {
            t += mu as f64 * log_factorial(z);
        }
    }
    let phi = euler_phi(n)? as f64;
    for &(p, _) in factorize(n)?.factors() {
        t -= phi * (p as f64).ln() / (p as f64 - 1.0);
    }
    Ok(t)
}

/// sum_{m=0}^{floor(r/2)} binom(r+1,2m) B_2m, exactly. Equals (r+1)/2 for
/// every r >= 1; at r = 0 the literal sum is B_0 = 1, not 1/2.
pub fn sum_binom_bernoulli(r: u32) -> Rat {
    let mut acc = Rat::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if !b.is_zero() {
            acc += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64)) * b;
        }
    }
    acc
}

/// log(n!) by direct summation of logs; relative error well under 1e-12 for
/// n <= 10^6.
pub fn log_factorial(n: u64) -> f64 {
    let mut acc = 0.0f64;
    let mut c = 0.0f64; // Kahan compensation
    for i in 2..=n {
        let y = (i as f64).ln() - c;
        let t = acc + y;
        c = (t - acc) - y;
        acc = t;
    }
    acc
}

/// log Gamma(x) for x > 0 via the Stirling series after shifting the argument
/// up to >= 16; truncation error is far below double rounding there.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    let mut shift = 0.0f64;
    let mut z = x;
    while z < 16.0 {
        shift += z.ln();
        z += 1.0;
    }
    // Stirling coefficients B_2k / (2k (2k-1)) for k = 1..8.
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let zinv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut zpow = 1.0 / z;
    for c in C {
        series += c * zpow;
        zpow *= zinv2;
    }
    let half_log_2pi = 0.5 * (2.0 * PI).ln();
    Ok((z - 0.5) * z.ln() - z + half_log_2pi + series - shift)
}

/// Open Stirling bracket for log(n!): returns (lower, upper) with
/// lower = n log n - n + (1/2) log n + log sqrt(2 pi) and upper = lower +
/// 1/(12n); log(n!) lies strictly between them.
pub fn stirling_bracket(n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("stirling_bracket needs n >= 1".into()));
    }
    let nf = n as f64;
    let lower = nf * nf.ln() - nf + 0.5 * nf.ln() + 0.5 * (2.0 * PI).ln();
    Ok((lower, lower + 1.0 / (12.0 * nf)))
}

/// sum_{j=1}^{n} log Gamma(j/n); closed form ((n-1)/2) log(2 pi) - (log n)/2
/// by the Gauss-Legendre multiplication formula.
pub fn log_gamma_product(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("log_gamma_product needs n >= 1".into()));
    }
    let mut acc = 0.0;
    for j in 1..=n {
        acc += log_gamma(j as f64 / n as f64)?;
    }
    Ok(acc)
}

pub fn log_gamma_product_closed(n: u64) -> f64 {
    (n as f64 - 1.0) / 2.0 * (2.0 * PI).ln() - 0.5 * (n as f64).ln()
}

/// Exact sum_{m=0}^{floor(n/r)} binom(n, m r).
pub fn binom_multisection(n: u64, r: u64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut m = 0;
    while m * r <= n {
        acc += binomial(n, m * r);
        m += 1;
    }
    acc
}

/// Cosine closed form of the same multisection:
/// (2^n / r) sum_{l=1}^{r} cos^n(pi l / r) cos(pi l n / r).
pub fn binom_multisection_cos(n: u64, r: u64) -> f64 {
    let nf = n as f64;
    let mut acc = 0.0;
    for l in 1..=r {
        let ang = PI * l as f64 / r as f64;
        acc += ang.cos().powi(n as i32) * (ang * nf).cos();
    }
    2.0f64.powi(n as i32) / r as f64 * acc
}

/// Canonical rational formatting: always "p/q" with q >= 1 and gcd(p,q)=1.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse "p/q" or a bare integer "p" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.into() };
    let (num, den) = match s.find('/') {
        Some(i) => (&s[..i], &s[i + 1..]),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| err(0, "invalid rational numerator"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| err(num.len() + 1, "invalid rational denominator"))?;
    if d.is_zero() {
        return Err(err(num.len() + 1, "zero denominator"));
    }
    Ok(Rat::new(n, d))
}

/// Render a real with 17 significant digits (round-trippable for f64).
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Scaled absolute deviation |l - r| <= tol * (1 + |l|); used where sums of
/// thousands of double terms make plain absolute tolerances meaningless.
pub fn within_scaled(l: f64, r: f64, tol: f64) -> bool {
    (l - r).abs() <= tol * (1.0 + l.abs())
}

/// Relative deviation with the scale floored at 1 so zero-valued left sides
/// degrade to an absolute comparison.
pub fn within_relative(l: f64, r: f64, tol: f64) -> bool {
    (l - r).abs() <= tol * l.abs().max(1.0)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back for magnitudes outside f64 range of numer/denom separately.
        let s = if r.is_negative() { -1.0 } else { 1.0 };
        s * f64::INFINITY
    })
}
