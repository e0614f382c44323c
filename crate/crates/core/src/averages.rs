//! Weighted averages of products of generalized divisor sums: the direct
//! (brute-force) evaluator `u_direct` acting as universal oracle, the
//! divisor-tuple identities it is checked against, the convolution
//! representations over divisors of K^a, the Gamma/binomial/Bernoulli weight
//! formulas, and the classical E / S_r family for Ramanujan products.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    self, bigint_pow, divisors, euler_phi, generalized_gcd_a, jordan_totient, lcm_list, mobius,
};
use crate::error::{Error, Result};
use crate::exact::{
    bernoulli_number, bernoulli_poly, binomial, coprime_log_sum, log_gamma, rat_u64, Rat,
};
use crate::func::{phi_a, psi_weight, psi_weight_a, ArithFn, FnClass};
use crate::sums::{gen_aa, ramanujan, SumSpec};
use crate::value::Value;

/// One factor slot (f_i, g_i, h_i) of a product of generalized sums.
#[derive(Debug, Clone)]
pub struct Slot {
    f: ArithFn,
    g: ArithFn,
    h: ArithFn,
}

impl Slot {
    pub fn new(f: ArithFn, g: ArithFn, h: ArithFn) -> Self {
        Slot { f, g, h }
    }

    /// Slot with h = one (the h-free specializations).
    pub fn fg(f: ArithFn, g: ArithFn) -> Self {
        Slot::new(f, g, ArithFn::one())
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

    fn is_exact(&self) -> bool {
        use crate::func::Domain::Rational;
        self.f.domain() == Rational && self.g.domain() == Rational && self.h.domain() == Rational
    }
}

/// A full average instance: modulus tuple, per-slot functions, and weight.
#[derive(Debug, Clone)]
pub struct TupleInstance {
    a: u32,
    ks: Vec<u64>,
    slots: Vec<Slot>,
    weight: ArithFn,
    k_lcm: u64,
}

impl TupleInstance {
    pub fn new(a: u32, ks: Vec<u64>, slots: Vec<Slot>, weight: ArithFn) -> Result<Self> {
        if a == 0 {
            return Err(Error::Domain("TupleInstance needs a >= 1".into()));
        }
        if ks.is_empty() {
            return Err(Error::Domain("TupleInstance needs n >= 1".into()));
        }
        if ks.len() != slots.len() {
            return Err(Error::Domain(format!(
                "{} moduli but {} slots",
                ks.len(),
                slots.len()
            )));
        }
        let k_lcm = lcm_list(&ks)?; // also rejects zero entries
        Ok(TupleInstance {
            a,
            ks,
            slots,
            weight,
            k_lcm,
        })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn ks(&self) -> &[u64] {
        &self.ks
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn weight(&self) -> &ArithFn {
        &self.weight
    }

    pub fn k_lcm(&self) -> u64 {
        self.k_lcm
    }

    /// K^a as a checked u64.
    pub fn ka(&self) -> Result<u64> {
        crate::func::pow_checked(self.k_lcm, self.a)
    }

    pub fn is_exact_pipeline(&self) -> bool {
        self.weight.domain() == crate::func::Domain::Rational
            && self.slots.iter().all(Slot::is_exact)
    }

    pub fn all_h_one(&self) -> bool {
        self.slots.iter().all(|s| s.h.is_one())
    }
}

/// Term-count guard for the brute-force sums.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    max_terms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_terms: 1_000_000,
        }
    }
}

impl Budget {
    pub fn new(max_terms: u64) -> Self {
        Budget { max_terms }
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.max_terms as u128 {
            return Err(Error::Budget {
                needed,
                limit: self.max_terms,
            });
        }
        Ok(())
    }
}

/// The theta-free part and the theta coefficient of the log-weight bracket.
#[derive(Debug, Clone, Copy)]
pub struct ThetaBracket {
    pub main: f64,
    pub width: f64,
}

impl ThetaBracket {
    /// Residual ratio (direct - main) / width; the identity asserts it lies
    /// strictly in (0,1) for nonnegative f,g with positive width.
    pub fn theta(&self, direct: f64) -> f64 {
        (direct - self.main) / self.width
    }
}

// ---------------------------------------------------------------------------
// Per-slot evaluation support
// ---------------------------------------------------------------------------

// Values of j mod k^a fully determine s^(a)(k, j), so slots with small k^a
// are evaluated through a period table; larger ones fall back to gen_aa.
const TABLE_MAX: u64 = 1 << 16;

enum SlotEval {
    Table { ka: u64, vals: Vec<Value> },
    Plain(SumSpec),
}

impl SlotEval {
    fn build(a: u32, k: u64, slot: &Slot) -> Result<SlotEval> {
        let spec = SumSpec::new(a, slot.f.clone(), slot.g.clone(), slot.h.clone(), k)?;
        let ka = match k.checked_pow(a) {
            Some(ka) if ka <= TABLE_MAX && slot.h.is_one() => ka,
            _ => return Ok(SlotEval::Plain(spec)),
        };
        // vals[m] = s(k, j) for any j = m (mod k^a); m = 0 means k^a | j,
        // where the generalized gcd is k itself.
        let ds = divisors(k)?;
        let mut by_gcd: BTreeMap<u64, Value> = BTreeMap::new();
        for &e in ds.iter() {
            let mut acc = Value::zero();
            for &d in divisors(e)?.iter() {
                acc += slot.f.eval(d)? * slot.g.eval(k / d)?;
            }
            by_gcd.insert(e, acc);
        }
        let mut vals = Vec::with_capacity(ka as usize);
        for m in 0..ka {
            let e = generalized_gcd_a(m, k, a)?;
            vals.push(by_gcd[&e].clone());
        }
        Ok(SlotEval::Table { ka, vals })
    }

    fn eval(&self, j: u64) -> Result<Value> {
        match self {
            SlotEval::Table { ka, vals } => Ok(vals[(j % ka) as usize].clone()),
            SlotEval::Plain(spec) => gen_aa(spec, j),
        }
    }
}

fn slot_evals(t: &TupleInstance) -> Result<Vec<SlotEval>> {
    t.ks
        .iter()
        .zip(&t.slots)
        .map(|(&k, s)| SlotEval::build(t.a, k, s))
        .collect()
}

/// Product over slots of s^(a)_{f_i,g_i,1}(k_i, j), exactly.
fn slot_product_at(a: u32, ks: &[u64], fgs: &[(ArithFn, ArithFn)], j: u64) -> Result<Rat> {
    let mut acc = Rat::one();
    for (&k, (f, g)) in ks.iter().zip(fgs) {
        let spec = SumSpec::new(a, f.clone(), g.clone(), ArithFn::one(), k)?;
        acc *= gen_aa(&spec, j)?.into_exact()?;
    }
    Ok(acc)
}

/// Walk every divisor tuple (d_1|k_1, ..., d_n|k_n); the visitor receives the
/// tuple and its per-slot index into the sorted divisor lists.
fn for_each_divisor_tuple<F>(ks: &[u64], mut visit: F) -> Result<()>
where
    F: FnMut(&[u64], &[usize]) -> Result<()>,
{
    let lists: Vec<_> = ks.iter().map(|&k| divisors(k)).collect::<Result<_>>()?;
    let n = lists.len();
    let mut idx = vec![0usize; n];
    let mut ds: Vec<u64> = lists.iter().map(|l| l[0]).collect();
    loop {
        visit(&ds, &idx)?;
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                ds[i] = lists[i][idx[i]];
                break;
            }
            idx[i] = 0;
            ds[i] = lists[i][0];
            i += 1;
        }
    }
}

/// Exact per-slot tables of f(d) g(k/d) aligned with the divisor lists.
fn fg_tables(ks: &[u64], fgs: &[(ArithFn, ArithFn)]) -> Result<Vec<Vec<Rat>>> {
    ks.iter()
        .zip(fgs)
        .map(|(&k, (f, g))| {
            divisors(k)?
                .iter()
                .map(|&d| Ok(f.eval_exact(d)? * g.eval_exact(k / d)?))
                .collect()
        })
        .collect()
}

fn require_class(f: &ArithFn, class: FnClass, role: &str) -> Result<()> {
    if f.class() != class {
        return Err(Error::Precondition(format!(
            "{role} must be declared {}, `{f}` is {}",
            class.as_str(),
            f.class().as_str()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Direct evaluator (the universal oracle)
// ---------------------------------------------------------------------------

/// Brute force: sum_{j=1}^{K^a} w(j) prod_i s^(a)_{f_i,g_i,h_i}(k_i, j).
/// Exact whenever the instance's exact-pipeline flag holds.
pub fn u_direct(t: &TupleInstance, budget: &Budget) -> Result<Value> {
    let ka_wide = (t.k_lcm as u128)
        .checked_pow(t.a)
        .ok_or_else(|| Error::Domain("K^a overflows".into()))?;
    budget.check(ka_wide)?;
    let ka = ka_wide as u64;
    let evals = slot_evals(t)?;
    let mut acc = Value::zero();
    for j in 1..=ka {
        let mut term = t.weight.eval(j)?;
        if term.is_zero() {
            continue;
        }
        for e in &evals {
            term *= e.eval(j)?;
            if term.is_zero() {
                break;
            }
        }
        acc += term;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Divisor-tuple identities for completely multiplicative / additive weights
// ---------------------------------------------------------------------------

/// Completely multiplicative weight, arbitrary h_i: the divisor-tuple double
/// sum with per-tuple inner sum over l <= L^a of w(l) prod_i h_i((D/d_i)^a l).
pub fn u_thm1_rhs(t: &TupleInstance) -> Result<Value> {
    require_class(&t.weight, FnClass::CompletelyMultiplicative, "weight")?;
    t.ka()?; // D^a and (D/d_i)^a l below stay within u64 once K^a fits
    let mut tot = Value::zero();
    for_each_divisor_tuple(&t.ks, |ds, _| {
        let dl = lcm_list(ds)?;
        let la = (t.k_lcm / dl).pow(t.a);
        let mut coef = t.weight.eval(dl.pow(t.a))?;
        for ((&k, &d), slot) in t.ks.iter().zip(ds).zip(&t.slots) {
            coef *= slot.f.eval(d)? * slot.g.eval(k / d)?;
        }
        if coef.is_zero() {
            return Ok(());
        }
        let mut inner = Value::zero();
        for l in 1..=la {
            let mut term = t.weight.eval(l)?;
            for (&d, slot) in ds.iter().zip(&t.slots) {
                term *= slot.h.eval((dl / d).pow(t.a) * l)?;
            }
            inner += term;
        }
        tot += coef * inner;
        Ok(())
    })?;
    Ok(tot)
}

/// Completely multiplicative weight AND completely multiplicative h_i: the
/// h factors split off the inner sum, which then depends only on L and is
/// memoized per distinct L.
pub fn u_thm1_cm_rhs(t: &TupleInstance) -> Result<Value> {
    require_class(&t.weight, FnClass::CompletelyMultiplicative, "weight")?;
    for slot in &t.slots {
        require_class(&slot.h, FnClass::CompletelyMultiplicative, "h")?;
    }
    let mut inner_by_l: BTreeMap<u64, Value> = BTreeMap::new();
    let mut tot = Value::zero();
    for_each_divisor_tuple(&t.ks, |ds, _| {
        let dl = lcm_list(ds)?;
        let l_quot = t.k_lcm / dl;
        let mut coef = t.weight.eval(dl.pow(t.a))?;
        for ((&k, &d), slot) in t.ks.iter().zip(ds).zip(&t.slots) {
            coef *= slot.f.eval(d)?
                * slot.g.eval(k / d)?
                * slot.h.eval((dl / d).pow(t.a))?;
        }
        if coef.is_zero() {
            return Ok(());
        }
        let inner = match inner_by_l.get(&l_quot) {
            Some(v) => v.clone(),
            None => {
                let mut acc = Value::zero();
                for l in 1..=l_quot.pow(t.a) {
                    let mut term = t.weight.eval(l)?;
                    for slot in &t.slots {
                        term *= slot.h.eval(l)?;
                    }
                    acc += term;
                }
                inner_by_l.insert(l_quot, acc.clone());
                acc
            }
        };
        tot += coef * inner;
        Ok(())
    })?;
    Ok(tot)
}

/// Completely additive weight, arbitrary h_i: two-part divisor-tuple sum,
/// w(D^a) against the unweighted inner sum plus the w-weighted inner sum.
pub fn u_thm2_rhs(t: &TupleInstance) -> Result<Value> {
    require_class(&t.weight, FnClass::CompletelyAdditive, "weight")?;
    let mut tot = Value::zero();
    for_each_divisor_tuple(&t.ks, |ds, _| {
        let dl = lcm_list(ds)?;
        let la = (t.k_lcm / dl).pow(t.a);
        let mut coef = Value::one();
        for ((&k, &d), slot) in t.ks.iter().zip(ds).zip(&t.slots) {
            coef *= slot.f.eval(d)? * slot.g.eval(k / d)?;
        }
        if coef.is_zero() {
            return Ok(());
        }
        let mut plain = Value::zero();
        let mut weighted = Value::zero();
        for l in 1..=la {
            let mut hprod = Value::one();
            for (&d, slot) in ds.iter().zip(&t.slots) {
                hprod *= slot.h.eval((dl / d).pow(t.a) * l)?;
            }
            plain += hprod.clone();
            weighted += t.weight.eval(l)? * hprod;
        }
        tot += t.weight.eval(dl.pow(t.a))? * coef.clone() * plain + coef * weighted;
        Ok(())
    })?;
    Ok(tot)
}

/// Completely additive weight with completely multiplicative h_i; the inner
/// pair of sums depends only on L and is memoized.
pub fn u_thm2_cm_rhs(t: &TupleInstance) -> Result<Value> {
    require_class(&t.weight, FnClass::CompletelyAdditive, "weight")?;
    for slot in &t.slots {
        require_class(&slot.h, FnClass::CompletelyMultiplicative, "h")?;
    }
    let mut inner_by_l: BTreeMap<u64, (Value, Value)> = BTreeMap::new();
    let mut tot = Value::zero();
    for_each_divisor_tuple(&t.ks, |ds, _| {
        let dl = lcm_list(ds)?;
        let l_quot = t.k_lcm / dl;
        let mut coef = Value::one();
        for ((&k, &d), slot) in t.ks.iter().zip(ds).zip(&t.slots) {
            coef *= slot.f.eval(d)?
                * slot.g.eval(k / d)?
                * slot.h.eval((dl / d).pow(t.a))?;
        }
        if coef.is_zero() {
            return Ok(());
        }
        let (plain, weighted) = match inner_by_l.get(&l_quot) {
            Some(v) => v.clone(),
            None => {
                let mut p = Value::zero();
                let mut w = Value::zero();
                for l in 1..=l_quot.pow(t.a) {
                    let mut hprod = Value::one();
                    for slot in &t.slots {
                        hprod *= slot.h.eval(l)?;
                    }
                    p += hprod.clone();
                    w += t.weight.eval(l)? * hprod;
                }
                inner_by_l.insert(l_quot, (p.clone(), w.clone()));
                (p, w)
            }
        };
        tot += t.weight.eval(dl.pow(t.a))? * coef.clone() * plain + coef * weighted;
        Ok(())
    })?;
    Ok(tot)
}

// ---------------------------------------------------------------------------
// Power-weight moments (direct side of the h = one closed forms)
// ---------------------------------------------------------------------------

struct MomentAcc {
    small: i128,
    big: BigInt,
}

impl MomentAcc {
    fn new() -> Self {
        MomentAcc {
            small: 0,
            big: BigInt::zero(),
        }
    }

    fn add(&mut self, v: i128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                self.big += BigInt::from(self.small);
                self.small = v;
            }
        }
    }

    fn add_big(&mut self, v: BigInt) {
        self.big += v;
    }

    fn finish(self) -> BigInt {
        self.big + BigInt::from(self.small)
    }
}

/// All power moments sum_{j=1}^{K^a} j^r prod_i s^(a)_{f_i,g_i,1}(k_i, j)
/// for r = 0..=max_r in one sweep. This is the direct side for every id_r
/// closed form; integer-valued slot tables take an i128 fast path with
/// overflow spill into BigInt.
pub fn u_tilde_power_moments(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    max_r: u32,
    budget: &Budget,
) -> Result<Vec<Rat>> {
    if ks.is_empty() || ks.len() != fgs.len() {
        return Err(Error::Domain("moduli and slot lists must match".into()));
    }
    let k_lcm = lcm_list(ks)?;
    let ka_wide = (k_lcm as u128)
        .checked_pow(a)
        .ok_or_else(|| Error::Domain("K^a overflows".into()))?;
    budget.check(ka_wide)?;
    let ka = ka_wide as u64;

    // Per-slot period tables of exact s-values.
    let mut tables: Vec<(u64, Vec<Rat>)> = Vec::with_capacity(ks.len());
    for (&k, (f, g)) in ks.iter().zip(fgs) {
        let kai = k.pow(a); // divides K^a, already checked
        let ds = divisors(k)?;
        let mut by_gcd: BTreeMap<u64, Rat> = BTreeMap::new();
        for &e in ds.iter() {
            let mut acc = Rat::zero();
            for &d in divisors(e)?.iter() {
                acc += f.eval_exact(d)? * g.eval_exact(k / d)?;
            }
            by_gcd.insert(e, acc);
        }
        let mut vals = Vec::with_capacity(kai as usize);
        for m in 0..kai {
            vals.push(by_gcd[&generalized_gcd_a(m, k, a)?].clone());
        }
        tables.push((kai, vals));
    }

    let int_tables: Option<Vec<(u64, Vec<i128>)>> = tables
        .iter()
        .map(|(kai, vals)| {
            let iv: Option<Vec<i128>> = vals
                .iter()
                .map(|v| {
                    if v.is_integer() {
                        v.numer().to_i128().filter(|x| x.abs() <= i64::MAX as i128)
                    } else {
                        None
                    }
                })
                .collect();
            iv.map(|iv| (*kai, iv))
        })
        .collect();

    if let Some(int_tables) = int_tables {
        let mut accs: Vec<MomentAcc> = (0..=max_r).map(|_| MomentAcc::new()).collect();
        for j in 1..=ka {
            let mut p: i128 = 1;
            for (kai, vals) in &int_tables {
                p *= vals[(j % kai) as usize]; // |values| <= i64::MAX, n <= 3: no overflow
                if p == 0 {
                    break;
                }
            }
            if p == 0 {
                continue;
            }
            let mut jr: i128 = 1;
            let mut fallback_from = None;
            for r in 0..=max_r {
                match jr.checked_mul(p) {
                    Some(term) => accs[r as usize].add(term),
                    None => {
                        fallback_from = Some(r);
                        break;
                    }
                }
                if r < max_r {
                    match jr.checked_mul(j as i128) {
                        Some(next) => jr = next,
                        None => {
                            fallback_from = Some(r + 1);
                            break;
                        }
                    }
                }
            }
            if let Some(r0) = fallback_from {
                let jb = BigInt::from(j);
                let pb = BigInt::from(p);
                for r in r0..=max_r {
                    accs[r as usize].add_big(jb.pow(r) * &pb);
                }
            }
        }
        return Ok(accs
            .into_iter()
            .map(|acc| Rat::from_integer(acc.finish()))
            .collect());
    }

    // Generic exact path for rational-valued slots.
    let mut accs = vec![Rat::zero(); max_r as usize + 1];
    for j in 1..=ka {
        let mut p = Rat::one();
        for (kai, vals) in &tables {
            p *= &vals[(j % kai) as usize];
        }
        if p.is_zero() {
            continue;
        }
        let jb = BigInt::from(j);
        let mut jr = BigInt::one();
        for r in 0..=max_r {
            accs[r as usize] += Rat::from_integer(jr.clone()) * &p;
            if r < max_r {
                jr *= &jb;
            }
        }
    }
    Ok(accs)
}

/// Single power moment sum_{j<=K^a} j^r prod s (direct side convenience).
pub fn u_tilde_direct(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    r: u32,
    budget: &Budget,
) -> Result<Rat> {
    Ok(u_tilde_power_moments(a, ks, fgs, r, budget)?.pop().unwrap())
}

// ---------------------------------------------------------------------------
// Closed forms for the id_r weight
// ---------------------------------------------------------------------------

/// Bernoulli closed form of sum_{j=1}^{K^a} j^r prod s^(a)_{f,g,1}(k_i, j).
///
/// For r >= 1 this is K^{ar}/2 prod (f*g)(k_i) plus the even-Bernoulli sum;
/// the split behind it is invalid at r = 0, where the weight is constant and
/// the sum collapses to K^a sum_{d-tuples} prod f g / lcm(d)^a directly.
pub fn u_tilde_idr_closed(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    r: u32,
) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let tables = fg_tables(ks, fgs)?;
    if r == 0 {
        let mut tot = Rat::zero();
        for_each_divisor_tuple(ks, |ds, idx| {
            let dl = lcm_list(ds)?;
            let mut c = Rat::one();
            for (i, &pos) in idx.iter().enumerate() {
                c *= &tables[i][pos];
            }
            tot += c * crate::arith::big_rational_pow(dl, -(a as i64))?;
            Ok(())
        })?;
        return Ok(Rat::from_integer(bigint_pow(k_lcm, a)) * tot);
    }
    let ka_big = bigint_pow(k_lcm, a);
    let mut lead = Rat::from_integer(ka_big.clone().pow(r)) / rat_u64(2);
    for table in &tables {
        let s: Rat = table.iter().cloned().sum();
        lead *= s;
    }
    let mut tail = Rat::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        let mut inner = Rat::zero();
        for_each_divisor_tuple(ks, |ds, idx| {
            let dl = lcm_list(ds)?;
            let mut c = crate::arith::big_rational_pow(dl, a as i64 * (2 * m as i64 - 1))?;
            for (i, &pos) in idx.iter().enumerate() {
                c *= &tables[i][pos];
            }
            inner += c;
            Ok(())
        })?;
        tail += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64))
            * b
            * Rat::new(BigInt::one(), ka_big.clone().pow(2 * m))
            * inner;
    }
    tail *= Rat::from_integer(ka_big.pow(r + 1)) / rat_u64(r as u64 + 1);
    Ok(lead + tail)
}

/// Weighted average of products of gcd-sum style functions: the id_r average
/// of prod_i s^(a)_{f_i * mu, 1, 1}(k_i, j), normalized by K^{ar}. At a = 1
/// the left-hand side is (1/K^r) sum_j j^r prod f_i(gcd(k_i, j)).
pub fn gcdsum_weighted(a: u32, ks: &[u64], fs: &[ArithFn], r: u32) -> Result<Rat> {
    let fgs: Vec<(ArithFn, ArithFn)> = fs
        .iter()
        .map(|f| (ArithFn::dirichlet(f, &ArithFn::mobius()), ArithFn::one()))
        .collect();
    let k_lcm = lcm_list(ks)?;
    let norm = Rat::from_integer(bigint_pow(k_lcm, a).pow(r));
    Ok(u_tilde_idr_closed(a, ks, &fgs, r)? / norm)
}

/// Dual substitution: slots (1, g_i * mu), same normalization.
pub fn gcdsum_weighted_dual(a: u32, ks: &[u64], gs: &[ArithFn], r: u32) -> Result<Rat> {
    let fgs: Vec<(ArithFn, ArithFn)> = gs
        .iter()
        .map(|g| (ArithFn::one(), ArithFn::dirichlet(g, &ArithFn::mobius())))
        .collect();
    let k_lcm = lcm_list(ks)?;
    let norm = Rat::from_integer(bigint_pow(k_lcm, a).pow(r));
    Ok(u_tilde_idr_closed(a, ks, &fgs, r)? / norm)
}

/// One-modulus closed form of the normalized id_r average, r >= 1:
/// (f*g)(k)/2 plus the Bernoulli sum over divisors weighted by
/// (k/d)^{a(1-2m)}. Equals u_tilde_direct(a, [k], [(f,g)], r) / k^{ar}, but
/// through a differently-shaped divisor expression.
pub fn one_modulus_moment_closed(a: u32, k: u64, f: &ArithFn, g: &ArithFn, r: u32) -> Result<Rat> {
    if r == 0 {
        return Err(Error::Precondition(
            "one-modulus closed form is stated for r >= 1".into(),
        ));
    }
    let mut t = Rat::zero();
    for &d in divisors(k)?.iter() {
        t += f.eval_exact(d)? * g.eval_exact(k / d)?;
    }
    t /= rat_u64(2);
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        let mut conv = Rat::zero();
        for &d in divisors(k)?.iter() {
            conv += f.eval_exact(d)?
                * crate::arith::big_rational_pow(k / d, a as i64 * (1 - 2 * m as i64))?
                * g.eval_exact(k / d)?;
        }
        t += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64)) * b * conv
            / rat_u64(r as u64 + 1);
    }
    Ok(t)
}

/// Direct gcd-product side of [`gcdsum_weighted`] at a = 1:
/// (1/K^r) sum_{j=1}^K j^r prod_i f_i(gcd(k_i, j)).
pub fn gcdsum_direct_a1(ks: &[u64], fs: &[ArithFn], r: u32, budget: &Budget) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    budget.check(k_lcm as u128)?;
    let mut acc = Rat::zero();
    for j in 1..=k_lcm {
        let mut term = Rat::from_integer(BigInt::from(j).pow(r));
        for (&k, f) in ks.iter().zip(fs) {
            term *= f.eval_exact(arith::gcd(k, j))?;
        }
        acc += term;
    }
    Ok(acc / Rat::from_integer(BigInt::from(k_lcm).pow(r)))
}

// ---------------------------------------------------------------------------
// Log weight: the Stirling-style bracket
// ---------------------------------------------------------------------------

/// Theta-free main term and theta coefficient of the log-weight average
/// sum_{j<=K^a} log(j) prod s^(a)(k_i, j).
pub fn u_tilde_log_bracket(a: u32, ks: &[u64], fgs: &[(ArithFn, ArithFn)]) -> Result<ThetaBracket> {
    let k_lcm = lcm_list(ks)?;
    let ka = crate::func::pow_checked(k_lcm, a)? as f64;
    let tables = fg_tables(ks, fgs)?;
    let (mut s_inv, mut s_log, mut s_one, mut s_pos) = (0.0f64, 0.0, 0.0, 0.0);
    for_each_divisor_tuple(ks, |ds, idx| {
        let dl = lcm_list(ds)?;
        let mut c = 1.0f64;
        for (i, &pos) in idx.iter().enumerate() {
            c *= crate::exact::rat_to_f64(&tables[i][pos]);
        }
        let da = (dl as f64).powi(a as i32);
        s_inv += c / da;
        s_log += c * (dl as f64).ln();
        s_one += c;
        s_pos += c * da;
        Ok(())
    })?;
    let main = ka * (ka.ln() - 1.0) * s_inv - (a as f64 / 2.0) * s_log
        + (std::f64::consts::TAU * ka).sqrt().ln() * s_one;
    Ok(ThetaBracket {
        main,
        width: s_pos / (12.0 * ka),
    })
}

/// Direct log-weighted sum (real pipeline), the oracle for the bracket.
pub fn u_tilde_log_direct(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    budget: &Budget,
) -> Result<f64> {
    let slots = fgs
        .iter()
        .map(|(f, g)| Slot::fg(f.clone(), g.clone()))
        .collect();
    let t = TupleInstance::new(a, ks.to_vec(), slots, ArithFn::log())?;
    Ok(u_direct(&t, budget)?.to_f64())
}

// ---------------------------------------------------------------------------
// Convolution representations over divisors of K^a (and the K variants)
// ---------------------------------------------------------------------------

/// Convolution-at-K^a representation of U~ for h = one: the completely
/// multiplicative path sums w(d) prod s(k_i, d) Psi_w(K^a/d); the completely
/// additive path adds the phi-weighted term instead.
pub fn conv_repr(t: &TupleInstance) -> Result<Value> {
    if !t.all_h_one() {
        return Err(Error::Precondition(
            "convolution representation needs every h = one".into(),
        ));
    }
    let ka = t.ka()?;
    let fgs: Vec<(ArithFn, ArithFn)> = t
        .slots
        .iter()
        .map(|s| (s.f.clone(), s.g.clone()))
        .collect();
    let prod_at = |j: u64| -> Result<Value> {
        let mut acc = Value::one();
        for (&k, (f, g)) in t.ks.iter().zip(&fgs) {
            let spec = SumSpec::new(t.a, f.clone(), g.clone(), ArithFn::one(), k)?;
            acc *= gen_aa(&spec, j)?;
        }
        Ok(acc)
    };
    let mut tot = Value::zero();
    match t.weight.class() {
        FnClass::CompletelyMultiplicative => {
            for &d in divisors(ka)?.iter() {
                tot += t.weight.eval(d)? * prod_at(d)? * psi_weight(&t.weight, ka / d)?;
            }
        }
        FnClass::CompletelyAdditive => {
            for &d in divisors(ka)?.iter() {
                let phi_term = t.weight.eval(d)? * Value::from_u64(euler_phi(ka / d)?);
                tot += prod_at(d)? * (phi_term + psi_weight(&t.weight, ka / d)?);
            }
        }
        other => {
            return Err(Error::Precondition(format!(
                "weight must be completely multiplicative or completely additive, \
                 `{}` is {}",
                t.weight,
                other.as_str()
            )));
        }
    }
    Ok(tot)
}

/// Alternate convolution path over divisors of K (not K^a), using a = 1
/// sums against the generalized coprimality weight Psi^(a) / Phi^(a).
/// Must agree with [`conv_repr`] wherever both apply.
pub fn conv_repr_remark(t: &TupleInstance) -> Result<Value> {
    if !t.all_h_one() {
        return Err(Error::Precondition(
            "convolution representation needs every h = one".into(),
        ));
    }
    t.ka()?; // range validation only
    let prod_at = |j: u64| -> Result<Value> {
        let mut acc = Value::one();
        for (&k, slot) in t.ks.iter().zip(&t.slots) {
            let spec = SumSpec::new(1, slot.f.clone(), slot.g.clone(), ArithFn::one(), k)?;
            acc *= gen_aa(&spec, j)?;
        }
        Ok(acc)
    };
    let mut tot = Value::zero();
    match t.weight.class() {
        FnClass::CompletelyMultiplicative => {
            for &d in divisors(t.k_lcm)?.iter() {
                tot += t.weight.eval(d.pow(t.a))?
                    * prod_at(d)?
                    * psi_weight_a(t.a, &t.weight, t.k_lcm / d)?;
            }
        }
        FnClass::CompletelyAdditive => {
            for &d in divisors(t.k_lcm)?.iter() {
                let phi_term = t.weight.eval(d.pow(t.a))?
                    * Value::from_u64(phi_a(t.a, t.k_lcm / d)?);
                tot += prod_at(d)? * (phi_term + psi_weight_a(t.a, &t.weight, t.k_lcm / d)?);
            }
        }
        other => {
            return Err(Error::Precondition(format!(
                "weight must be completely multiplicative or completely additive, \
                 `{}` is {}",
                t.weight,
                other.as_str()
            )));
        }
    }
    Ok(tot)
}

/// Bernoulli/Jordan closed form of the id_r average through the convolution
/// representation, on the U~ scale (times K^{ar} relative to its normalized
/// display). The derivation's correct coefficient is phi_{1-2m}(d) alone;
/// `printed` switches in the extra factor d that the flawed published
/// version carries, kept only so the mismatch itself can be regression
/// tested (witness k=2, a=1, r=1, f=phi, g=one: corrected 5/2, printed 3
/// after normalization).
pub fn u_tilde_idr_conv_closed(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    r: u32,
    printed: bool,
) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let ka = crate::func::pow_checked(k_lcm, a)?;
    if r == 0 {
        // id_0 weight: the convolution collapses against Euler phi.
        let mut tot = Rat::zero();
        for &d in divisors(ka)?.iter() {
            tot += slot_product_at(a, ks, fgs, d)? * rat_u64(euler_phi(ka / d)?);
        }
        return Ok(tot);
    }
    let mut val = slot_product_at(a, ks, fgs, ka)? / rat_u64(2);
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        let mut inner = Rat::zero();
        for &d in divisors(ka)?.iter() {
            let mut c = jordan_totient(1 - 2 * m as i64, d)?;
            if printed {
                c *= rat_u64(d);
            }
            inner += c * slot_product_at(a, ks, fgs, ka / d)?;
        }
        val += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64)) * b * inner
            / rat_u64(r as u64 + 1);
    }
    Ok(Rat::from_integer(bigint_pow(ka, 1).pow(r)) * val)
}

/// Log-weight average through the convolution representation: the phi-paired
/// log(d) part plus the Mobius-factorial coprime log sums.
pub fn u_tilde_log_conv(a: u32, ks: &[u64], fgs: &[(ArithFn, ArithFn)]) -> Result<f64> {
    let k_lcm = lcm_list(ks)?;
    let ka = crate::func::pow_checked(k_lcm, a)?;
    let mut t1 = 0.0f64;
    let mut t2 = 0.0f64;
    for &d in divisors(ka)?.iter() {
        let p = crate::exact::rat_to_f64(&slot_product_at(a, ks, fgs, d)?);
        t1 += (d as f64).ln() * p * euler_phi(ka / d)? as f64;
        let q = crate::exact::rat_to_f64(&slot_product_at(a, ks, fgs, ka / d)?);
        t2 += q * coprime_log_sum(d)?;
    }
    Ok(t1 + t2)
}

// ---------------------------------------------------------------------------
// Gamma / binomial / Bernoulli-polynomial weights
// ---------------------------------------------------------------------------

/// Both sides of the log-Gamma weight identity: direct
/// sum_{j=1}^{K^a} log Gamma(j/K^a) prod s(k_i, j) against the three-term
/// closed form. The identity is stated for a >= 2; `allow_a_one` opts into
/// exploratory a = 1 evaluation.
pub fn gamma_weight_check(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    allow_a_one: bool,
    budget: &Budget,
) -> Result<(f64, f64)> {
    if a < 2 && !allow_a_one {
        return Err(Error::Precondition(
            "log-Gamma weight identity is stated for a >= 2 \
             (pass the exploratory flag to evaluate a = 1)"
                .into(),
        ));
    }
    let k_lcm = lcm_list(ks)?;
    let ka_wide = (k_lcm as u128)
        .checked_pow(a)
        .ok_or_else(|| Error::Domain("K^a overflows".into()))?;
    budget.check(ka_wide)?;
    let ka = ka_wide as u64;

    let slots = fgs
        .iter()
        .map(|(f, g)| Slot::fg(f.clone(), g.clone()))
        .collect();
    let t = TupleInstance::new(a, ks.to_vec(), slots, ArithFn::one())?;
    let evals = slot_evals(&t)?;
    let mut lhs = 0.0f64;
    for j in 1..=ka {
        let mut p = 1.0f64;
        for e in &evals {
            p *= e.eval(j)?.to_f64();
        }
        if p != 0.0 {
            lhs += log_gamma(j as f64 / ka as f64)? * p;
        }
    }

    let tables = fg_tables(ks, fgs)?;
    let mut prod_fg = 1.0f64;
    for table in &tables {
        prod_fg *= crate::exact::rat_to_f64(&table.iter().cloned().sum::<Rat>());
    }
    let (mut s_inv, mut s_log) = (0.0f64, 0.0);
    for_each_divisor_tuple(ks, |ds, idx| {
        let dl = lcm_list(ds)?;
        let mut c = 1.0f64;
        for (i, &pos) in idx.iter().enumerate() {
            c *= crate::exact::rat_to_f64(&tables[i][pos]);
        }
        s_inv += c / (dl as f64).powi(a as i32);
        s_log += c * (dl as f64).ln();
        Ok(())
    })?;
    let two_pi = std::f64::consts::TAU;
    let rhs = ka as f64 / 2.0 * two_pi.ln() * s_inv - 0.5 * (two_pi * ka as f64).ln() * prod_fg
        + a as f64 / 2.0 * s_log;
    Ok((lhs, rhs))
}

/// Both sides of the binomial weight identity: exact
/// sum_{j=0}^{K^a} binom(K^a, j) prod s(k_i, j) against the cosine closed
/// form, which is only well-conditioned for K^a <= 36.
pub fn binom_weight_check(a: u32, ks: &[u64], fgs: &[(ArithFn, ArithFn)]) -> Result<(Rat, f64)> {
    let k_lcm = lcm_list(ks)?;
    let ka_wide = (k_lcm as u128)
        .checked_pow(a)
        .ok_or_else(|| Error::Domain("K^a overflows".into()))?;
    if ka_wide > 36 {
        return Err(Error::Budget {
            needed: ka_wide,
            limit: 36,
        });
    }
    let ka = ka_wide as u64;
    let mut lhs = Rat::zero();
    for j in 0..=ka {
        lhs += Rat::from_integer(binomial(ka, j)) * slot_product_at(a, ks, fgs, j)?;
    }
    let tables = fg_tables(ks, fgs)?;
    let mut rhs = 0.0f64;
    for_each_divisor_tuple(ks, |ds, idx| {
        let dl = lcm_list(ds)?;
        let da = dl.pow(a);
        let la = ka / da;
        let mut c = 1.0f64;
        for (i, &pos) in idx.iter().enumerate() {
            c *= crate::exact::rat_to_f64(&tables[i][pos]);
        }
        let mut inner = 0.0f64;
        for l in 1..=da {
            let sign = if (l * la) % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * (std::f64::consts::PI * l as f64 / da as f64).cos().powi(ka as i32);
        }
        rhs += c / da as f64 * inner;
        Ok(())
    })?;
    rhs *= 2.0f64.powi(ka as i32);
    Ok((lhs, rhs))
}

/// Direct Bernoulli-polynomial weighted sum over j = 0..K^a-1, exact.
pub fn bernoulli_weight_direct(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    m: u32,
    budget: &Budget,
) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let ka_wide = (k_lcm as u128)
        .checked_pow(a)
        .ok_or_else(|| Error::Domain("K^a overflows".into()))?;
    budget.check(ka_wide)?;
    let ka = ka_wide as u64;
    let mut acc = Rat::zero();
    for j in 0..ka {
        let x = Rat::new(BigInt::from(j), BigInt::from(ka));
        acc += bernoulli_poly(m, &x) * slot_product_at(a, ks, fgs, j)?;
    }
    Ok(acc)
}

/// Closed form B_m / K^{a(m-1)} sum_{d-tuples} lcm(d)^{a(m-1)} prod f g.
pub fn bernoulli_weight_closed(
    a: u32,
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    m: u32,
) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let tables = fg_tables(ks, fgs)?;
    let mut tot = Rat::zero();
    for_each_divisor_tuple(ks, |ds, idx| {
        let dl = lcm_list(ds)?;
        let mut c = crate::arith::big_rational_pow(dl, a as i64 * (m as i64 - 1))?;
        for (i, &pos) in idx.iter().enumerate() {
            c *= &tables[i][pos];
        }
        tot += c;
        Ok(())
    })?;
    let ka = crate::func::pow_checked(k_lcm, a)?;
    Ok(bernoulli_number(m) * tot * crate::arith::big_rational_pow(ka, 1 - m as i64)?)
}

// ---------------------------------------------------------------------------
// The classical E / S_r family (Ramanujan products, a = 1)
// ---------------------------------------------------------------------------

/// Mean of the Ramanujan product over a period, by direct summation.
pub fn e_direct(ks: &[u64]) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let mut acc: i128 = 0;
    for j in 1..=k_lcm {
        let mut p: i128 = 1;
        for &k in ks {
            p *= ramanujan(k, j)? as i128;
            if p == 0 {
                break;
            }
        }
        acc += p;
    }
    Ok(Rat::new(BigInt::from(acc), BigInt::from(k_lcm)))
}

/// The same mean through the divisor form
/// sum_{d-tuples} prod d_i mu(k_i/d_i) / lcm(d); an independent route.
pub fn e_toth(ks: &[u64]) -> Result<Rat> {
    let mut tot = Rat::zero();
    for_each_divisor_tuple(ks, |ds, _| {
        let dl = lcm_list(ds)?;
        let mut c: i128 = 1;
        for (&k, &d) in ks.iter().zip(ds) {
            c *= d as i128 * mobius(k / d)? as i128;
        }
        tot += Rat::new(BigInt::from(c), BigInt::from(dl));
        Ok(())
    })?;
    Ok(tot)
}

/// Normalized power moment of the Ramanujan product:
/// (1/K^{r+1}) sum_{j=1}^K j^r prod c_{k_i}(j), by direct summation.
pub fn s_r_direct(ks: &[u64], r: u32) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let mut acc = BigInt::zero();
    for j in 1..=k_lcm {
        let mut p: i128 = 1;
        for &k in ks {
            p *= ramanujan(k, j)? as i128;
            if p == 0 {
                break;
            }
        }
        if p != 0 {
            acc += BigInt::from(j).pow(r) * BigInt::from(p);
        }
    }
    Ok(Rat::new(acc, BigInt::from(k_lcm).pow(r + 1)))
}

/// Divisor-form helper sum_{d-tuples} prod d_i mu(k_i/d_i) lcm(d)^{2m-1}.
pub fn g_m_helper(ks: &[u64], m: u32) -> Result<Rat> {
    let mut tot = Rat::zero();
    for_each_divisor_tuple(ks, |ds, _| {
        let dl = lcm_list(ds)?;
        let mut c = crate::arith::big_rational_pow(dl, 2 * m as i64 - 1)?;
        for (&k, &d) in ks.iter().zip(ds) {
            c *= crate::exact::rat_i64(d as i64 * mobius(k / d)? as i64);
        }
        tot += c;
        Ok(())
    })?;
    Ok(tot)
}

/// Bernoulli closed form of S_r for r >= 1; S_0 is the divisor-form mean.
pub fn s_r_closed(ks: &[u64], r: u32) -> Result<Rat> {
    if r == 0 {
        return e_toth(ks);
    }
    let k_lcm = lcm_list(ks)?;
    let mut lead = Rat::new(BigInt::one(), BigInt::from(2 * k_lcm as u128));
    for &k in ks {
        lead *= rat_u64(euler_phi(k)?);
    }
    let mut tail = Rat::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        tail += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64))
            * b
            * g_m_helper(ks, m)?
            * crate::arith::big_rational_pow(k_lcm, -2 * m as i64)?;
    }
    Ok(lead + tail / rat_u64(r as u64 + 1))
}

/// Generalized mean with per-slot (f_i, g_i) replacing (id, mu), a = 1,
/// computed on the direct route.
pub fn s_tilde_r_direct(
    ks: &[u64],
    fgs: &[(ArithFn, ArithFn)],
    r: u32,
    budget: &Budget,
) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    let moment = u_tilde_direct(1, ks, fgs, r, budget)?;
    Ok(moment / Rat::from_integer(BigInt::from(k_lcm).pow(r + 1)))
}

/// Divisor-form helper with general (f_i, g_i) in place of (id, mu).
pub fn g_tilde_m_helper(ks: &[u64], fgs: &[(ArithFn, ArithFn)], m: u32) -> Result<Rat> {
    let tables = fg_tables(ks, fgs)?;
    let mut tot = Rat::zero();
    for_each_divisor_tuple(ks, |ds, idx| {
        let dl = lcm_list(ds)?;
        let mut c = crate::arith::big_rational_pow(dl, 2 * m as i64 - 1)?;
        for (i, &pos) in idx.iter().enumerate() {
            c *= &tables[i][pos];
        }
        tot += c;
        Ok(())
    })?;
    Ok(tot)
}

/// Closed form of the generalized mean; r = 0 is the divisor-form mean.
pub fn s_tilde_r_closed(ks: &[u64], fgs: &[(ArithFn, ArithFn)], r: u32) -> Result<Rat> {
    let k_lcm = lcm_list(ks)?;
    if r == 0 {
        let tables = fg_tables(ks, fgs)?;
        let mut tot = Rat::zero();
        for_each_divisor_tuple(ks, |ds, idx| {
            let dl = lcm_list(ds)?;
            let mut c = crate::arith::big_rational_pow(dl, -1)?;
            for (i, &pos) in idx.iter().enumerate() {
                c *= &tables[i][pos];
            }
            tot += c;
            Ok(())
        })?;
        return Ok(tot);
    }
    let tables = fg_tables(ks, fgs)?;
    let mut lead = Rat::new(BigInt::one(), BigInt::from(2 * k_lcm as u128));
    for table in &tables {
        lead *= table.iter().cloned().sum::<Rat>();
    }
    let mut tail = Rat::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m);
        if b.is_zero() {
            continue;
        }
        tail += Rat::from_integer(binomial(r as u64 + 1, 2 * m as u64))
            * b
            * g_tilde_m_helper(ks, fgs, m)?
            * crate::arith::big_rational_pow(k_lcm, -2 * m as i64)?;
    }
    Ok(lead + tail / rat_u64(r as u64 + 1))
}

/// Generalized mean value (the r = 0 moment), direct route.
pub fn e_tilde(ks: &[u64], fgs: &[(ArithFn, ArithFn)], budget: &Budget) -> Result<Rat> {
    s_tilde_r_direct(ks, fgs, 0, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rat, rat_i64};

    fn fgs_phi_one(n: usize) -> Vec<(ArithFn, ArithFn)> {
        (0..n).map(|_| (ArithFn::euler_phi(), ArithFn::one())).collect()
    }

    fn fgs_id_mu(n: usize) -> Vec<(ArithFn, ArithFn)> {
        (0..n).map(|_| (ArithFn::id(), ArithFn::mobius())).collect()
    }

    fn mixed_slots(n: usize, h: &ArithFn) -> Vec<Slot> {
        let menu = [
            (ArithFn::euler_phi(), ArithFn::one()),
            (ArithFn::id(), ArithFn::mobius()),
            (ArithFn::one(), ArithFn::one()),
        ];
        (0..n)
            .map(|i| Slot::new(menu[i % 3].0.clone(), menu[i % 3].1.clone(), h.clone()))
            .collect()
    }

    #[test]
    fn u_direct_examples() {
        let b = Budget::default();
        let t = TupleInstance::new(
            1,
            vec![2],
            vec![Slot::fg(ArithFn::euler_phi(), ArithFn::one())],
            ArithFn::id(),
        )
        .unwrap();
        assert_eq!(u_direct(&t, &b).unwrap().into_exact().unwrap(), rat_u64(5));

        // constant weight over Ramanujan-product slots gives K * E
        let t2 = TupleInstance::new(
            1,
            vec![2, 2],
            vec![
                Slot::fg(ArithFn::id(), ArithFn::mobius()),
                Slot::fg(ArithFn::id(), ArithFn::mobius()),
            ],
            ArithFn::one(),
        )
        .unwrap();
        assert_eq!(u_direct(&t2, &b).unwrap().into_exact().unwrap(), rat_u64(2));

        // a slot with k = 1 and all-one functions contributes factor 1
        let t3 = TupleInstance::new(
            1,
            vec![2, 1],
            vec![
                Slot::fg(ArithFn::euler_phi(), ArithFn::one()),
                Slot::new(ArithFn::one(), ArithFn::one(), ArithFn::one()),
            ],
            ArithFn::id(),
        )
        .unwrap();
        assert_eq!(u_direct(&t3, &b).unwrap().into_exact().unwrap(), rat_u64(5));
    }

    #[test]
    fn u_direct_budget() {
        let t = TupleInstance::new(
            2,
            vec![720720],
            vec![Slot::fg(ArithFn::one(), ArithFn::one())],
            ArithFn::one(),
        )
        .unwrap();
        match u_direct(&t, &Budget::default()) {
            Err(Error::Budget { needed, limit }) => {
                assert_eq!(needed, (720720u128).pow(2));
                assert_eq!(limit, 1_000_000);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn thm1_forms_match_direct() {
        let b = Budget::default();
        for a in 1..=2u32 {
            for ks in [vec![2u64], vec![4, 6], vec![2, 3], vec![8, 8]] {
                for h in [ArithFn::one(), ArithFn::id()] {
                    for w in [ArithFn::id(), ArithFn::id_power(2)] {
                        let t = TupleInstance::new(
                            a,
                            ks.clone(),
                            mixed_slots(ks.len(), &h),
                            w,
                        )
                        .unwrap();
                        let direct = u_direct(&t, &b).unwrap();
                        assert_eq!(u_thm1_rhs(&t).unwrap(), direct, "a={a} ks={ks:?}");
                        assert_eq!(u_thm1_cm_rhs(&t).unwrap(), direct, "a={a} ks={ks:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn thm1_preconditions() {
        let t = TupleInstance::new(
            1,
            vec![2],
            vec![Slot::fg(ArithFn::euler_phi(), ArithFn::one())],
            ArithFn::euler_phi(), // multiplicative, not completely
        )
        .unwrap();
        assert!(matches!(u_thm1_rhs(&t), Err(Error::Precondition(_))));
        let t2 = TupleInstance::new(
            1,
            vec![2],
            vec![Slot::new(ArithFn::euler_phi(), ArithFn::one(), ArithFn::euler_phi())],
            ArithFn::id(),
        )
        .unwrap();
        assert!(matches!(u_thm1_cm_rhs(&t2), Err(Error::Precondition(_))));
        assert!(u_thm1_rhs(&t2).is_ok()); // general-h form has no h constraint
    }

    #[test]
    fn thm2_forms_match_direct() {
        let b = Budget::default();
        // k = 1: only j = 1 and Omega(1) = 0
        let t0 = TupleInstance::new(
            1,
            vec![1],
            vec![Slot::fg(ArithFn::one(), ArithFn::one())],
            ArithFn::big_omega(),
        )
        .unwrap();
        assert!(u_direct(&t0, &b).unwrap().is_zero());
        assert!(u_thm2_rhs(&t0).unwrap().is_zero());

        for a in 1..=2u32 {
            for ks in [vec![4u64], vec![4, 6], vec![2, 3], vec![9]] {
                for h in [ArithFn::one(), ArithFn::id()] {
                    let t = TupleInstance::new(
                        a,
                        ks.clone(),
                        mixed_slots(ks.len(), &h),
                        ArithFn::big_omega(),
                    )
                    .unwrap();
                    let direct = u_direct(&t, &b).unwrap();
                    assert_eq!(u_thm2_rhs(&t).unwrap(), direct, "a={a} ks={ks:?}");
                    assert_eq!(u_thm2_cm_rhs(&t).unwrap(), direct, "a={a} ks={ks:?}");
                }
            }
        }

        // real pipeline with the log weight
        let t = TupleInstance::new(
            1,
            vec![2, 3],
            mixed_slots(2, &ArithFn::one()),
            ArithFn::log(),
        )
        .unwrap();
        let direct = u_direct(&t, &b).unwrap().to_f64();
        let rhs = u_thm2_rhs(&t).unwrap().to_f64();
        assert!((direct - rhs).abs() <= 1e-9 * direct.abs().max(1.0));

        let bad = TupleInstance::new(
            1,
            vec![2],
            vec![Slot::fg(ArithFn::euler_phi(), ArithFn::one())],
            ArithFn::id(),
        )
        .unwrap();
        assert!(matches!(u_thm2_rhs(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn idr_closed_form_matches_moments() {
        let b = Budget::default();
        assert_eq!(
            u_tilde_idr_closed(1, &[2], &fgs_phi_one(1), 1).unwrap(),
            rat_u64(5)
        );
        // r = 0 collapse: ks = (2,2) with (id, mu) slots gives K * E = 2
        assert_eq!(
            u_tilde_idr_closed(1, &[2, 2], &fgs_id_mu(2), 0).unwrap(),
            rat_u64(2)
        );
        for a in 1..=2u32 {
            for ks in [vec![2u64], vec![4, 6], vec![2, 3, 4]] {
                for fgs in [fgs_phi_one(ks.len()), fgs_id_mu(ks.len())] {
                    let moments = u_tilde_power_moments(a, &ks, &fgs, 3, &b).unwrap();
                    for r in 0..=3u32 {
                        assert_eq!(
                            u_tilde_idr_closed(a, &ks, &fgs, r).unwrap(),
                            moments[r as usize],
                            "a={a} ks={ks:?} r={r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn moments_generic_path_matches_fast_path() {
        let b = Budget::default();
        // jordan[-1] produces non-integer table values, forcing the generic
        // path; the closed form must still agree.
        let fgs = vec![(ArithFn::jordan(-1), ArithFn::one())];
        for r in 0..=2u32 {
            assert_eq!(
                u_tilde_power_moments(1, &[6], &fgs, r, &b).unwrap()[r as usize],
                u_tilde_idr_closed(1, &[6], &fgs, r).unwrap(),
                "r={r}"
            );
        }
    }

    #[test]
    fn gcdsum_values() {
        let b = Budget::default();
        assert_eq!(
            gcdsum_weighted(1, &[2], &[ArithFn::id()], 1).unwrap(),
            parse_rat("5/2").unwrap()
        );
        assert_eq!(
            gcdsum_weighted(1, &[2, 3], &[ArithFn::id(), ArithFn::id()], 2).unwrap(),
            parse_rat("103/12").unwrap()
        );
        // k_i all 1: the average is just prod f_i(1)
        assert_eq!(
            gcdsum_weighted(1, &[1, 1], &[ArithFn::id(), ArithFn::id()], 3).unwrap(),
            rat_u64(1)
        );
        for r in 0..=3u32 {
            for ks in [vec![2u64], vec![2, 3], vec![4, 6]] {
                let fs = vec![ArithFn::id(); ks.len()];
                assert_eq!(
                    gcdsum_weighted(1, &ks, &fs, r).unwrap(),
                    gcdsum_direct_a1(&ks, &fs, r, &b).unwrap(),
                    "ks={ks:?} r={r}"
                );
            }
        }
    }

    #[test]
    fn one_modulus_moment_closed_matches_moments() {
        let b = Budget::default();
        for a in 1..=2u32 {
            for k in [2u64, 6, 12] {
                for r in 1..=4u32 {
                    let fgs = fgs_phi_one(1);
                    let lhs = u_tilde_direct(a, &[k], &fgs, r, &b).unwrap()
                        / Rat::from_integer(bigint_pow(k, a).pow(r));
                    assert_eq!(
                        one_modulus_moment_closed(a, k, &ArithFn::euler_phi(), &ArithFn::one(), r).unwrap(),
                        lhs,
                        "a={a} k={k} r={r}"
                    );
                }
            }
        }
        assert!(matches!(
            one_modulus_moment_closed(1, 4, &ArithFn::id(), &ArithFn::mobius(), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gcdsum_dual_matches_direct_slots() {
        let b = Budget::default();
        for r in 0..=3u32 {
            for ks in [vec![2u64], vec![2, 3], vec![4, 6]] {
                let gs = vec![ArithFn::id(); ks.len()];
                let fgs: Vec<_> = gs
                    .iter()
                    .map(|g| {
                        (
                            ArithFn::one(),
                            ArithFn::dirichlet(g, &ArithFn::mobius()),
                        )
                    })
                    .collect();
                let k_lcm = lcm_list(&ks).unwrap();
                let direct = u_tilde_direct(1, &ks, &fgs, r, &b).unwrap()
                    / Rat::from_integer(BigInt::from(k_lcm).pow(r));
                assert_eq!(
                    gcdsum_weighted_dual(1, &ks, &gs, r).unwrap(),
                    direct,
                    "ks={ks:?} r={r}"
                );
            }
        }
    }

    #[test]
    fn log_bracket_theta() {
        let b = Budget::default();
        // K = 1: direct sum is 0, theta(1) = 12 (1 - log sqrt(2 pi))
        let br = u_tilde_log_bracket(1, &[1], &fgs_phi_one(1)).unwrap();
        let th = br.theta(0.0);
        assert!((th - 0.972_737_601_543_928).abs() < 1e-12);

        for a in 1..=2u32 {
            for ks in [vec![2u64, 3], vec![4, 6], vec![8]] {
                let fgs = fgs_phi_one(ks.len());
                let direct = u_tilde_log_direct(a, &ks, &fgs, &b).unwrap();
                let br = u_tilde_log_bracket(a, &ks, &fgs).unwrap();
                assert!(br.width > 0.0);
                let th = br.theta(direct);
                assert!(th > 0.0 && th < 1.0, "a={a} ks={ks:?} theta={th}");
            }
        }

        // width 0 via identically-zero f: main must equal the direct sum
        let zero_f = ArithFn::scale(Rat::zero(), &ArithFn::one());
        let fgs = vec![(zero_f, ArithFn::one())];
        let br = u_tilde_log_bracket(1, &[4], &fgs).unwrap();
        let direct = u_tilde_log_direct(1, &[4], &fgs, &b).unwrap();
        assert_eq!(br.width, 0.0);
        assert_eq!(br.main, direct);
    }

    #[test]
    fn conv_repr_matches_direct() {
        let b = Budget::default();
        for a in 1..=2u32 {
            for ks in [vec![2u64, 2], vec![4, 6], vec![2, 3], vec![5]] {
                let n = ks.len();
                let menu = [fgs_phi_one(n), fgs_id_mu(n)];
                for fgs in menu {
                    let slots: Vec<Slot> =
                        fgs.iter().map(|(f, g)| Slot::fg(f.clone(), g.clone())).collect();
                    for w in [ArithFn::one(), ArithFn::id(), ArithFn::id_power(2)] {
                        let t =
                            TupleInstance::new(a, ks.clone(), slots.clone(), w).unwrap();
                        let direct = u_direct(&t, &b).unwrap();
                        assert_eq!(conv_repr(&t).unwrap(), direct, "cm a={a} ks={ks:?}");
                        assert_eq!(
                            conv_repr_remark(&t).unwrap(),
                            direct,
                            "cm remark a={a} ks={ks:?}"
                        );
                    }
                    let t = TupleInstance::new(
                        a,
                        ks.clone(),
                        slots.clone(),
                        ArithFn::big_omega(),
                    )
                    .unwrap();
                    let direct = u_direct(&t, &b).unwrap();
                    assert_eq!(conv_repr(&t).unwrap(), direct, "ca a={a} ks={ks:?}");
                    assert_eq!(
                        conv_repr_remark(&t).unwrap(),
                        direct,
                        "ca remark a={a} ks={ks:?}"
                    );
                }
            }
        }
        // weight of mixed class is rejected
        let t = TupleInstance::new(
            1,
            vec![2],
            vec![Slot::fg(ArithFn::id(), ArithFn::one())],
            ArithFn::euler_phi(),
        )
        .unwrap();
        assert!(matches!(conv_repr(&t), Err(Error::Precondition(_))));
    }

    #[test]
    fn idr_conv_closed_corrected_vs_printed() {
        let b = Budget::default();
        // witness: k=2, a=1, r=1, f=phi, g=one. Direct 5; normalized 5/2.
        let fgs = fgs_phi_one(1);
        let corrected = u_tilde_idr_conv_closed(1, &[2], &fgs, 1, false).unwrap();
        assert_eq!(corrected, rat_u64(5));
        assert_eq!(corrected / rat_u64(2), parse_rat("5/2").unwrap());
        let printed = u_tilde_idr_conv_closed(1, &[2], &fgs, 1, true).unwrap();
        assert_eq!(printed / rat_u64(2), rat_u64(3));

        for a in 1..=2u32 {
            for ks in [vec![2u64], vec![2, 3], vec![4, 6], vec![9, 10]] {
                for fgs in [fgs_phi_one(ks.len()), fgs_id_mu(ks.len())] {
                    let moments = u_tilde_power_moments(a, &ks, &fgs, 3, &b).unwrap();
                    for r in 0..=3u32 {
                        assert_eq!(
                            u_tilde_idr_conv_closed(a, &ks, &fgs, r, false).unwrap(),
                            moments[r as usize],
                            "a={a} ks={ks:?} r={r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn log_conv_matches_direct() {
        let b = Budget::default();
        assert_eq!(u_tilde_log_conv(1, &[1], &fgs_phi_one(1)).unwrap(), 0.0);
        let two_log_two = u_tilde_log_conv(1, &[2], &fgs_phi_one(1)).unwrap();
        assert!((two_log_two - 2.0 * 2f64.ln()).abs() < 1e-10);
        for a in 1..=2u32 {
            for ks in [vec![2u64], vec![2, 3], vec![4, 6]] {
                for fgs in [fgs_phi_one(ks.len()), fgs_id_mu(ks.len())] {
                    let direct = u_tilde_log_direct(a, &ks, &fgs, &b).unwrap();
                    let conv = u_tilde_log_conv(a, &ks, &fgs).unwrap();
                    assert!(
                        (direct - conv).abs() <= 1e-9 * direct.abs().max(1.0),
                        "a={a} ks={ks:?} {direct} vs {conv}"
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_weight_examples() {
        let b = Budget::default();
        // K = 1: lhs = log Gamma(1) = 0, rhs = 0.
        let (lhs, rhs) = gamma_weight_check(2, &[1], &fgs_phi_one(1), false, &b).unwrap();
        assert!(lhs.abs() < 1e-12 && rhs.abs() < 1e-12);
        let (lhs, rhs) = gamma_weight_check(2, &[2], &fgs_phi_one(1), false, &b).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()));
        // a = 1 is gated
        assert!(matches!(
            gamma_weight_check(1, &[2], &fgs_phi_one(1), false, &b),
            Err(Error::Precondition(_))
        ));
        // ... but holds experimentally when opted in
        let (lhs, rhs) = gamma_weight_check(1, &[2, 3], &fgs_phi_one(2), true, &b).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()));
    }

    #[test]
    fn binom_weight_examples() {
        // ks = (1): lhs = 2 * prod (f*g)(1)
        let (lhs, _) = binom_weight_check(1, &[1], &fgs_phi_one(1)).unwrap();
        assert_eq!(lhs, rat_u64(2));
        // ks = (2), a = 1: s(2,0)=2, s(2,1)=1, s(2,2)=2 -> 2 + 2 + 2 = 6
        let (lhs, rhs) = binom_weight_check(1, &[2], &fgs_phi_one(1)).unwrap();
        assert_eq!(lhs, rat_u64(6));
        let l = crate::exact::rat_to_f64(&lhs);
        assert!((l - rhs).abs() <= 1e-9 * l.abs().max(1.0));
        for a in 1..=2u32 {
            for ks in [vec![2u64], vec![2, 3], vec![2, 2], vec![6]] {
                let k_lcm = lcm_list(&ks).unwrap();
                if k_lcm.pow(a) > 36 {
                    continue;
                }
                for fgs in [fgs_phi_one(ks.len()), fgs_id_mu(ks.len())] {
                    let (lhs, rhs) = binom_weight_check(a, &ks, &fgs).unwrap();
                    let l = crate::exact::rat_to_f64(&lhs);
                    assert!(
                        (l - rhs).abs() <= 1e-9 * l.abs().max(1.0),
                        "a={a} ks={ks:?}"
                    );
                }
            }
        }
        assert!(matches!(
            binom_weight_check(1, &[37], &fgs_phi_one(1)),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn bernoulli_weight_examples() {
        let b = Budget::default();
        // m = 1 with (phi, one) slots: -(k_1 ... k_n)/2
        for ks in [vec![2u64], vec![2, 3], vec![4, 6]] {
            let fgs = fgs_phi_one(ks.len());
            let prod: u64 = ks.iter().product();
            assert_eq!(
                bernoulli_weight_closed(1, &ks, &fgs, 1).unwrap(),
                rat_i64(-((prod as i64))) / rat_u64(2),
                "ks={ks:?}"
            );
        }
        // m = 1, n = 1, k = 2, a = 2: direct sum is -1
        assert_eq!(
            bernoulli_weight_direct(2, &[2], &fgs_phi_one(1), 1, &b).unwrap(),
            rat_i64(-1)
        );
        for a in 1..=2u32 {
            for ks in [vec![2u64], vec![2, 3], vec![2, 2]] {
                for fgs in [fgs_phi_one(ks.len()), fgs_id_mu(ks.len())] {
                    for m in 0..=6u32 {
                        assert_eq!(
                            bernoulli_weight_direct(a, &ks, &fgs, m, &b).unwrap(),
                            bernoulli_weight_closed(a, &ks, &fgs, m).unwrap(),
                            "a={a} ks={ks:?} m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn e_values_and_routes() {
        assert_eq!(e_direct(&[2, 2]).unwrap(), rat_u64(1));
        assert_eq!(e_direct(&[2, 3]).unwrap(), rat_u64(0));
        assert_eq!(e_direct(&[1]).unwrap(), rat_u64(1));
        assert_eq!(e_direct(&[2, 1]).unwrap(), rat_u64(0));
        for ks in [
            vec![2u64, 2],
            vec![2, 3],
            vec![4, 6],
            vec![2, 4, 8],
            vec![3, 5, 15],
            vec![12, 9],
        ] {
            let e = e_direct(&ks).unwrap();
            assert_eq!(e, e_toth(&ks).unwrap(), "ks={ks:?}");
            assert!(e.is_integer() && !e.is_negative(), "ks={ks:?}");
        }
        // componentwise multiplicativity across coprime tuples
        assert_eq!(
            e_direct(&[6, 20]).unwrap(),
            e_direct(&[2, 4]).unwrap() * e_direct(&[3, 5]).unwrap()
        );
    }

    #[test]
    fn s_r_closed_matches_direct() {
        for ks in [vec![2u64], vec![2, 3], vec![4, 6], vec![12], vec![2, 2]] {
            for r in 0..=4u32 {
                assert_eq!(
                    s_r_direct(&ks, r).unwrap(),
                    s_r_closed(&ks, r).unwrap(),
                    "ks={ks:?} r={r}"
                );
            }
        }
        // S_1 = phi-product/(2K) + E/2
        for k in 1..=50u64 {
            let expect = rat_u64(euler_phi(k).unwrap()) / rat_u64(2 * k)
                + e_direct(&[k]).unwrap() / rat_u64(2);
            assert_eq!(s_r_direct(&[k], 1).unwrap(), expect, "k={k}");
        }
    }

    #[test]
    fn s_tilde_closed_matches_direct() {
        let b = Budget::default();
        for ks in [vec![2u64, 2], vec![4, 6], vec![3]] {
            for fgs in [fgs_phi_one(ks.len()), fgs_id_mu(ks.len())] {
                for r in 0..=3u32 {
                    assert_eq!(
                        s_tilde_r_direct(&ks, &fgs, r, &b).unwrap(),
                        s_tilde_r_closed(&ks, &fgs, r).unwrap(),
                        "ks={ks:?} r={r}"
                    );
                }
            }
        }
        // with (id, mu) slots the generalized mean is the classical one
        for ks in [vec![2u64, 3], vec![4, 6], vec![2, 2]] {
            assert_eq!(
                e_tilde(&ks, &fgs_id_mu(ks.len()), &b).unwrap(),
                e_direct(&ks).unwrap()
            );
        }
    }
}
