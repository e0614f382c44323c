//! Identity verification: pinned parameter grids per suite, dual-route
//! evaluation (direct summation vs closed forms), exact or tolerance-based
//! comparison, and deterministic machine-readable reports.

mod report;

pub use report::{CaseResult, ConfigEcho, SuiteReport, VerificationReport, SCHEMA_VERSION};

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{euler_phi, gcd, jordan_totient, lcm_list};
use crate::averages::{
    bernoulli_weight_closed, bernoulli_weight_direct, binom_weight_check, conv_repr,
    conv_repr_remark, e_direct, e_tilde, e_toth, gamma_weight_check, gcdsum_direct_a1,
    gcdsum_weighted, gcdsum_weighted_dual, one_modulus_moment_closed, s_r_closed, s_r_direct, u_direct,
    u_thm1_cm_rhs, u_thm1_rhs, u_thm2_cm_rhs, u_thm2_rhs, u_tilde_idr_closed,
    u_tilde_idr_conv_closed, u_tilde_log_bracket, u_tilde_log_conv, u_tilde_log_direct,
    u_tilde_power_moments, Budget, Slot, TupleInstance,
};
use crate::error::{Error, Result};
use crate::exact::{
    bernoulli_number, bernoulli_poly, binom_multisection, binom_multisection_cos, binomial,
    coprime_log_sum, coprime_power_sum, faulhaber_sum, format_rat, format_real,
    log_gamma_product, log_gamma_product_closed, parse_rat, rat_to_f64, rat_u64,
    sum_binom_bernoulli, within_relative, within_scaled, Rat,
};
use crate::func::ArithFn;
use crate::value::Value;

/// The coverage ledger: one suite per verified identity or identity family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuiteId {
    Thm1Eq1,
    Thm1Eq2,
    Thm2Eq3,
    Thm2Eq4,
    CorEq5,
    CorEq8,
    CorEq10Theta,
    Thm4Eq16,
    Thm4Eq17,
    RemarkVariants,
    CorEq18Corrected,
    CorEq18PrintedRegression,
    CorEq19,
    Thm3Eq13,
    Thm3Eq14,
    Thm3Eq15,
    EIntegrality,
    EMultiplicativity,
    TothS1,
    LemmaPool,
}

impl SuiteId {
    pub const ALL: [SuiteId; 20] = [
        SuiteId::Thm1Eq1,
        SuiteId::Thm1Eq2,
        SuiteId::Thm2Eq3,
        SuiteId::Thm2Eq4,
        SuiteId::CorEq5,
        SuiteId::CorEq8,
        SuiteId::CorEq10Theta,
        SuiteId::Thm4Eq16,
        SuiteId::Thm4Eq17,
        SuiteId::RemarkVariants,
        SuiteId::CorEq18Corrected,
        SuiteId::CorEq18PrintedRegression,
        SuiteId::CorEq19,
        SuiteId::Thm3Eq13,
        SuiteId::Thm3Eq14,
        SuiteId::Thm3Eq15,
        SuiteId::EIntegrality,
        SuiteId::EMultiplicativity,
        SuiteId::TothS1,
        SuiteId::LemmaPool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Thm1Eq1 => "thm1_eq1",
            SuiteId::Thm1Eq2 => "thm1_eq2",
            SuiteId::Thm2Eq3 => "thm2_eq3",
            SuiteId::Thm2Eq4 => "thm2_eq4",
            SuiteId::CorEq5 => "cor_eq5",
            SuiteId::CorEq8 => "cor_eq8",
            SuiteId::CorEq10Theta => "cor_eq10_theta",
            SuiteId::Thm4Eq16 => "thm4_eq16",
            SuiteId::Thm4Eq17 => "thm4_eq17",
            SuiteId::RemarkVariants => "remark_variants",
            SuiteId::CorEq18Corrected => "cor_eq18_corrected",
            SuiteId::CorEq18PrintedRegression => "cor_eq18_printed_regression",
            SuiteId::CorEq19 => "cor_eq19",
            SuiteId::Thm3Eq13 => "thm3_eq13",
            SuiteId::Thm3Eq14 => "thm3_eq14",
            SuiteId::Thm3Eq15 => "thm3_eq15",
            SuiteId::EIntegrality => "e_integrality",
            SuiteId::EMultiplicativity => "e_multiplicativity",
            SuiteId::TothS1 => "toth_s1",
            SuiteId::LemmaPool => "lemma_pool",
        }
    }

    pub fn parse(s: &str) -> Result<SuiteId> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub suites: Vec<SuiteId>,
    /// Optional cap shrinking every per-suite modulus bound.
    pub max_k: Option<u64>,
    pub budget: Budget,
    /// 0 = shared global pool, 1 = strictly serial, n = dedicated n-thread pool.
    pub workers: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: SuiteId::ALL.to_vec(),
            max_k: None,
            budget: Budget::default(),
            workers: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Case plumbing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Outcome {
    mode: String,
    lhs: String,
    rhs: String,
    err: f64,
    pass: bool,
    skipped: bool,
    extras: BTreeMap<String, String>,
}

type Case = (String, Outcome);

struct CaseJob {
    run: Box<dyn Fn() -> Vec<Case> + Send + Sync>,
}

fn job<F>(f: F) -> CaseJob
where
    F: Fn() -> Vec<Case> + Send + Sync + 'static,
{
    CaseJob { run: Box::new(f) }
}

fn exact_rats(lhs: &Rat, rhs: &Rat) -> Outcome {
    let pass = lhs == rhs;
    let err = if pass {
        0.0
    } else {
        rat_to_f64(&(lhs - rhs)).abs()
    };
    Outcome {
        mode: "exact".into(),
        lhs: format_rat(lhs),
        rhs: format_rat(rhs),
        err,
        pass,
        skipped: false,
        extras: BTreeMap::new(),
    }
}

fn exact_values(lhs: &Value, rhs: &Value) -> Outcome {
    let pass = lhs == rhs;
    let err = if pass {
        0.0
    } else {
        (lhs.to_f64() - rhs.to_f64()).abs()
    };
    Outcome {
        mode: "exact".into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        err,
        pass,
        skipped: false,
        extras: BTreeMap::new(),
    }
}

fn relative(lhs: f64, rhs: f64, tol: f64) -> Outcome {
    Outcome {
        mode: format!("relative({tol:e})"),
        lhs: format_real(lhs),
        rhs: format_real(rhs),
        err: (lhs - rhs).abs(),
        pass: within_relative(lhs, rhs, tol),
        skipped: false,
        extras: BTreeMap::new(),
    }
}

fn scaled_abs(lhs: f64, rhs: f64, tol: f64) -> Outcome {
    Outcome {
        mode: format!("absolute({tol:e},scaled)"),
        lhs: format_real(lhs),
        rhs: format_real(rhs),
        err: (lhs - rhs).abs(),
        pass: within_scaled(lhs, rhs, tol),
        skipped: false,
        extras: BTreeMap::new(),
    }
}

/// Budget exceedance is a skip, anything else is an unexpected failure.
fn outcome_of_error(e: &Error) -> Outcome {
    let skipped = matches!(e, Error::Budget { .. });
    let mut extras = BTreeMap::new();
    extras.insert("note".into(), e.to_string());
    Outcome {
        mode: "error".into(),
        lhs: String::new(),
        rhs: String::new(),
        err: 0.0,
        pass: false,
        skipped,
        extras,
    }
}

// ---------------------------------------------------------------------------
// Grid helpers
// ---------------------------------------------------------------------------

fn cap(default_cap: u64, cfg: &VerifyConfig) -> u64 {
    cfg.max_k.map_or(default_cap, |m| m.min(default_cap)).max(1)
}

/// All nondecreasing tuples (k_1 <= ... <= k_n), 1 <= k_i <= k_cap,
/// for every n in 1..=n_max.
fn k_tuples(n_max: usize, k_cap: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, lo: u64, k_cap: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in lo..=k_cap {
            cur.push(k);
            rec(n - 1, k, k_cap, cur, out);
            cur.pop();
        }
    }
    for n in 1..=n_max {
        rec(n, 1, k_cap, &mut cur, &mut out);
    }
    out
}

#[derive(Clone)]
struct FgItem {
    label: &'static str,
    f: ArithFn,
    g: ArithFn,
}

fn menu_full() -> Vec<FgItem> {
    vec![
        FgItem {
            label: "phi,one",
            f: ArithFn::euler_phi(),
            g: ArithFn::one(),
        },
        FgItem {
            label: "id,mu",
            f: ArithFn::id(),
            g: ArithFn::mobius(),
        },
        FgItem {
            label: "one,one",
            f: ArithFn::one(),
            g: ArithFn::one(),
        },
    ]
}

fn menu_pair() -> Vec<FgItem> {
    menu_full().into_iter().take(2).collect()
}

/// Every assignment of menu indices to n slots.
fn assignments(n: usize, menu_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * menu_len);
        for base in &out {
            for i in 0..menu_len {
                let mut v = base.clone();
                v.push(i);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn fmt_ks(ks: &[u64]) -> String {
    let inner: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
    format!("({})", inner.join(","))
}

fn fmt_assign(menu: &[FgItem], assign: &[usize]) -> String {
    let inner: Vec<&str> = assign.iter().map(|&i| menu[i].label).collect();
    format!("[{}]", inner.join(";"))
}

fn fgs_of(menu: &[FgItem], assign: &[usize]) -> Vec<(ArithFn, ArithFn)> {
    assign
        .iter()
        .map(|&i| (menu[i].f.clone(), menu[i].g.clone()))
        .collect()
}

fn slots_of(menu: &[FgItem], assign: &[usize], h: &ArithFn) -> Vec<Slot> {
    assign
        .iter()
        .map(|&i| Slot::new(menu[i].f.clone(), menu[i].g.clone(), h.clone()))
        .collect()
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn jobs_thm1(cfg: &VerifyConfig, cm_variant: bool) -> Vec<CaseJob> {
    let menu = menu_full();
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let weights = [("id", ArithFn::id()), ("id^2", ArithFn::id_power(2))];
    let hs = [("one", ArithFn::one()), ("id", ArithFn::id())];
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                for (wl, w) in &weights {
                    for (hl, h) in &hs {
                        let params = format!(
                            "a={a} k={} fg={} h={hl} w={wl}",
                            fmt_ks(&ks),
                            fmt_assign(&menu, &assign)
                        );
                        let slots = slots_of(&menu, &assign, h);
                        let (ks, w) = (ks.clone(), w.clone());
                        jobs.push(job(move || {
                            let t = match TupleInstance::new(a, ks.clone(), slots.clone(), w.clone())
                            {
                                Ok(t) => t,
                                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                            };
                            let direct = match u_direct(&t, &budget) {
                                Ok(v) => v,
                                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                            };
                            let rhs = if cm_variant {
                                u_thm1_cm_rhs(&t)
                            } else {
                                u_thm1_rhs(&t)
                            };
                            match rhs {
                                Ok(v) => vec![(params.clone(), exact_values(&direct, &v))],
                                Err(e) => vec![(params.clone(), outcome_of_error(&e))],
                            }
                        }));
                    }
                }
            }
        }
    }
    jobs
}

fn jobs_thm2(cfg: &VerifyConfig, cm_variant: bool) -> Vec<CaseJob> {
    let menu = menu_full();
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let hs = [("one", ArithFn::one()), ("id", ArithFn::id())];
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                for (wl, w, exact) in [
                    ("bigomega", ArithFn::big_omega(), true),
                    ("log", ArithFn::log(), false),
                ] {
                    for (hl, h) in &hs {
                        let params = format!(
                            "a={a} k={} fg={} h={hl} w={wl}",
                            fmt_ks(&ks),
                            fmt_assign(&menu, &assign)
                        );
                        let slots = slots_of(&menu, &assign, h);
                        let (ks, w) = (ks.clone(), w.clone());
                        jobs.push(job(move || {
                            let t = match TupleInstance::new(a, ks.clone(), slots.clone(), w.clone())
                            {
                                Ok(t) => t,
                                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                            };
                            let direct = match u_direct(&t, &budget) {
                                Ok(v) => v,
                                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                            };
                            let rhs = if cm_variant {
                                u_thm2_cm_rhs(&t)
                            } else {
                                u_thm2_rhs(&t)
                            };
                            let out = match rhs {
                                Ok(v) if exact => exact_values(&direct, &v),
                                Ok(v) => relative(direct.to_f64(), v.to_f64(), 1e-9),
                                Err(e) => outcome_of_error(&e),
                            };
                            vec![(params.clone(), out)]
                        }));
                    }
                }
            }
        }
    }
    jobs
}

const EQ5_R_MAX: u32 = 5;

fn jobs_eq5(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(12, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(3, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                let base = format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let fgs = fgs_of(&menu, &assign);
                let ks = ks.clone();
                jobs.push(job(move || {
                    let mut out = Vec::new();
                    match u_tilde_power_moments(a, &ks, &fgs, EQ5_R_MAX, &budget) {
                        Err(e) => {
                            let oc = outcome_of_error(&e);
                            for r in 0..=EQ5_R_MAX {
                                out.push((format!("{base} r={r}"), oc.clone()));
                            }
                        }
                        Ok(moments) => {
                            for r in 0..=EQ5_R_MAX {
                                let params = format!("{base} r={r}");
                                match u_tilde_idr_closed(a, &ks, &fgs, r) {
                                    Ok(c) => {
                                        out.push((params, exact_rats(&moments[r as usize], &c)))
                                    }
                                    Err(e) => out.push((params, outcome_of_error(&e))),
                                }
                            }
                        }
                    }
                    out
                }));
            }
        }
    }
    jobs
}

fn jobs_eq8(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let k_cap = cap(12, cfg);
    let budget = cfg.budget;
    let subs = [
        ("id", ArithFn::id()),
        ("phi", ArithFn::euler_phi()),
    ];
    let mut jobs = Vec::new();

    // f-side substitution: slots (f_i * mu, one); g-side: slots (one, g_i * mu).
    for side in ["f", "g"] {
        for a in 1..=2u32 {
            for ks in k_tuples(3, k_cap) {
                for assign in assignments(ks.len(), subs.len()) {
                    let labels: Vec<&str> = assign.iter().map(|&i| subs[i].0).collect();
                    let base = format!(
                        "side={side} a={a} k={} fn=[{}]",
                        fmt_ks(&ks),
                        labels.join(";")
                    );
                    let fns: Vec<ArithFn> =
                        assign.iter().map(|&i| subs[i].1.clone()).collect();
                    let fgs: Vec<(ArithFn, ArithFn)> = fns
                        .iter()
                        .map(|f| {
                            if side == "f" {
                                (ArithFn::dirichlet(f, &ArithFn::mobius()), ArithFn::one())
                            } else {
                                (ArithFn::one(), ArithFn::dirichlet(f, &ArithFn::mobius()))
                            }
                        })
                        .collect();
                    let ks = ks.clone();
                    let side_is_f = side == "f";
                    jobs.push(job(move || {
                        let mut out = Vec::new();
                        let k_lcm = match lcm_list(&ks) {
                            Ok(k) => k,
                            Err(e) => return vec![(base.clone(), outcome_of_error(&e))],
                        };
                        match u_tilde_power_moments(a, &ks, &fgs, EQ5_R_MAX, &budget) {
                            Err(e) => {
                                let oc = outcome_of_error(&e);
                                for r in 0..=EQ5_R_MAX {
                                    out.push((format!("{base} r={r}"), oc.clone()));
                                }
                            }
                            Ok(moments) => {
                                for r in 0..=EQ5_R_MAX {
                                    let params = format!("{base} r={r}");
                                    let norm = Rat::from_integer(
                                        crate::arith::bigint_pow(k_lcm, a).pow(r),
                                    );
                                    let direct = &moments[r as usize] / norm;
                                    let closed = if side_is_f {
                                        gcdsum_weighted(a, &ks, &fns, r)
                                    } else {
                                        gcdsum_weighted_dual(a, &ks, &fns, r)
                                    };
                                    match closed {
                                        Ok(c) => out.push((params, exact_rats(&direct, &c))),
                                        Err(e) => out.push((params, outcome_of_error(&e))),
                                    }
                                    // a = 1 f-side admits a third, gcd-product route
                                    if side_is_f && a == 1 {
                                        let params = format!("{base} r={r} route=gcd-direct");
                                        match gcdsum_direct_a1(&ks, &fns, r, &budget) {
                                            Ok(gd) => {
                                                out.push((params, exact_rats(&direct, &gd)))
                                            }
                                            Err(e) => out.push((params, outcome_of_error(&e))),
                                        }
                                    }
                                }
                            }
                        }
                        out
                    }));
                }
            }
        }
    }

    // One-modulus closed form over the fg menu, r >= 1.
    let menu = menu_full();
    for a in 1..=2u32 {
        for k in 1..=k_cap {
            for (mi, item) in menu.iter().enumerate() {
                let base = format!("side=one-modulus a={a} k=({k}) fg=[{}]", item.label);
                let (f, g) = (item.f.clone(), item.g.clone());
                let _ = mi;
                jobs.push(job(move || {
                    let mut out = Vec::new();
                    let fgs = vec![(f.clone(), g.clone())];
                    match u_tilde_power_moments(a, &[k], &fgs, EQ5_R_MAX, &budget) {
                        Err(e) => {
                            let oc = outcome_of_error(&e);
                            for r in 1..=EQ5_R_MAX {
                                out.push((format!("{base} r={r}"), oc.clone()));
                            }
                        }
                        Ok(moments) => {
                            for r in 1..=EQ5_R_MAX {
                                let params = format!("{base} r={r}");
                                let norm =
                                    Rat::from_integer(crate::arith::bigint_pow(k, a).pow(r));
                                let direct = &moments[r as usize] / norm;
                                match one_modulus_moment_closed(a, k, &f, &g, r) {
                                    Ok(c) => out.push((params, exact_rats(&direct, &c))),
                                    Err(e) => out.push((params, outcome_of_error(&e))),
                                }
                            }
                        }
                    }
                    out
                }));
            }
        }
    }
    jobs
}

fn jobs_eq10(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            let params = format!("a={a} k={} fg=[phi,one*]", fmt_ks(&ks));
            let ks = ks.clone();
            jobs.push(job(move || {
                let fgs: Vec<(ArithFn, ArithFn)> = ks
                    .iter()
                    .map(|_| (ArithFn::euler_phi(), ArithFn::one()))
                    .collect();
                let direct = match u_tilde_log_direct(a, &ks, &fgs, &budget) {
                    Ok(v) => v,
                    Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                };
                let br = match u_tilde_log_bracket(a, &ks, &fgs) {
                    Ok(v) => v,
                    Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                };
                let mut extras = BTreeMap::new();
                extras.insert("main".into(), format_real(br.main));
                extras.insert("width".into(), format_real(br.width));
                let out = if br.width == 0.0 {
                    Outcome {
                        mode: "bracket(width=0)".into(),
                        lhs: format_real(direct),
                        rhs: format_real(br.main),
                        err: (direct - br.main).abs(),
                        pass: direct == br.main,
                        skipped: false,
                        extras,
                    }
                } else {
                    let theta = br.theta(direct);
                    extras.insert("theta".into(), format_real(theta));
                    Outcome {
                        mode: "bracket(0,1)".into(),
                        lhs: format_real(direct),
                        rhs: format_real(br.main),
                        err: (-theta).max(theta - 1.0).max(0.0),
                        pass: theta > 0.0 && theta < 1.0,
                        skipped: false,
                        extras,
                    }
                };
                vec![(params.clone(), out)]
            }));
        }
    }
    jobs
}

const EQ16_R_MAX: u32 = 3;

fn jobs_eq16(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                let base = format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let fgs = fgs_of(&menu, &assign);
                let slots = slots_of(&menu, &assign, &ArithFn::one());
                let ks = ks.clone();
                jobs.push(job(move || {
                    let mut out = Vec::new();
                    let moments = match u_tilde_power_moments(a, &ks, &fgs, EQ16_R_MAX, &budget) {
                        Ok(m) => m,
                        Err(e) => {
                            let oc = outcome_of_error(&e);
                            for r in 0..=EQ16_R_MAX {
                                out.push((format!("{base} r={r}"), oc.clone()));
                            }
                            return out;
                        }
                    };
                    for r in 0..=EQ16_R_MAX {
                        let params = format!("{base} r={r}");
                        let t = match TupleInstance::new(
                            a,
                            ks.clone(),
                            slots.clone(),
                            ArithFn::id_power(r),
                        ) {
                            Ok(t) => t,
                            Err(e) => {
                                out.push((params, outcome_of_error(&e)));
                                continue;
                            }
                        };
                        let conv = match conv_repr(&t).and_then(Value::into_exact) {
                            Ok(v) => v,
                            Err(e) => {
                                out.push((params, outcome_of_error(&e)));
                                continue;
                            }
                        };
                        let closed = match u_tilde_idr_closed(a, &ks, &fgs, r) {
                            Ok(v) => v,
                            Err(e) => {
                                out.push((params, outcome_of_error(&e)));
                                continue;
                            }
                        };
                        // three-way: direct moment, Bernoulli closed form,
                        // convolution representation
                        let mut oc = exact_rats(&moments[r as usize], &conv);
                        oc.extras
                            .insert("closed_bernoulli".into(), format_rat(&closed));
                        oc.pass = oc.pass && closed == moments[r as usize];
                        out.push((params, oc));
                    }
                    out
                }));
            }
        }
    }
    jobs
}

fn jobs_eq17(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                let params = format!(
                    "a={a} k={} fg={} w=bigomega",
                    fmt_ks(&ks),
                    fmt_assign(&menu, &assign)
                );
                let slots = slots_of(&menu, &assign, &ArithFn::one());
                let ks = ks.clone();
                jobs.push(job(move || {
                    let t = match TupleInstance::new(
                        a,
                        ks.clone(),
                        slots.clone(),
                        ArithFn::big_omega(),
                    ) {
                        Ok(t) => t,
                        Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                    };
                    let direct = match u_direct(&t, &budget) {
                        Ok(v) => v,
                        Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                    };
                    match conv_repr(&t) {
                        Ok(v) => vec![(params.clone(), exact_values(&direct, &v))],
                        Err(e) => vec![(params.clone(), outcome_of_error(&e))],
                    }
                }));
            }
        }
    }
    jobs
}

fn jobs_remark(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let weights = [
        ("one", ArithFn::one()),
        ("id", ArithFn::id()),
        ("id^2", ArithFn::id_power(2)),
        ("bigomega", ArithFn::big_omega()),
    ];
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                for (wl, w) in &weights {
                    let params = format!(
                        "a={a} k={} fg={} w={wl}",
                        fmt_ks(&ks),
                        fmt_assign(&menu, &assign)
                    );
                    let slots = slots_of(&menu, &assign, &ArithFn::one());
                    let (ks, w) = (ks.clone(), w.clone());
                    jobs.push(job(move || {
                        let t = match TupleInstance::new(a, ks.clone(), slots.clone(), w.clone())
                        {
                            Ok(t) => t,
                            Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                        };
                        let direct = match u_direct(&t, &budget) {
                            Ok(v) => v,
                            Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                        };
                        match conv_repr_remark(&t) {
                            Ok(v) => vec![(params.clone(), exact_values(&direct, &v))],
                            Err(e) => vec![(params.clone(), outcome_of_error(&e))],
                        }
                    }));
                }
            }
        }
    }
    jobs
}

const EQ18_R_MAX: u32 = 4;

fn jobs_eq18_corrected(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(10, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                let base = format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let fgs = fgs_of(&menu, &assign);
                let ks = ks.clone();
                jobs.push(job(move || {
                    let mut out = Vec::new();
                    match u_tilde_power_moments(a, &ks, &fgs, EQ18_R_MAX, &budget) {
                        Err(e) => {
                            let oc = outcome_of_error(&e);
                            for r in 0..=EQ18_R_MAX {
                                out.push((format!("{base} r={r}"), oc.clone()));
                            }
                        }
                        Ok(moments) => {
                            for r in 0..=EQ18_R_MAX {
                                let params = format!("{base} r={r}");
                                match u_tilde_idr_conv_closed(a, &ks, &fgs, r, false) {
                                    Ok(c) => {
                                        out.push((params, exact_rats(&moments[r as usize], &c)))
                                    }
                                    Err(e) => out.push((params, outcome_of_error(&e))),
                                }
                            }
                        }
                    }
                    out
                }));
            }
        }
    }
    jobs
}

fn jobs_eq18_printed(_cfg: &VerifyConfig) -> Vec<CaseJob> {
    vec![job(move || {
        // witness point k=2, a=1, r=1, (f,g) = (phi, one); values normalized
        // by K^{ar} = 2 to the published scale.
        let fgs = vec![(ArithFn::euler_phi(), ArithFn::one())];
        let two = rat_u64(2);
        let corrected = match u_tilde_idr_conv_closed(1, &[2], &fgs, 1, false) {
            Ok(v) => v / &two,
            Err(e) => return vec![("witness".into(), outcome_of_error(&e))],
        };
        let printed = match u_tilde_idr_conv_closed(1, &[2], &fgs, 1, true) {
            Ok(v) => v / &two,
            Err(e) => return vec![("witness".into(), outcome_of_error(&e))],
        };
        let truth = parse_rat("5/2").expect("literal");
        let three = rat_u64(3);
        let mut out = Vec::new();
        out.push((
            "witness corrected-value".to_string(),
            exact_rats(&corrected, &truth),
        ));
        out.push((
            "witness printed-value".to_string(),
            exact_rats(&printed, &three),
        ));
        // inverted assertion: the printed form must NOT match the truth
        let mut extras = BTreeMap::new();
        extras.insert(
            "note".into(),
            "printed coefficient carries a spurious factor d; mismatch is the expected outcome"
                .into(),
        );
        let mismatch = printed != corrected;
        out.push((
            "witness printed-vs-corrected".to_string(),
            Outcome {
                mode: "exact(inverted)".into(),
                lhs: format_rat(&printed),
                rhs: format_rat(&corrected),
                err: rat_to_f64(&(&printed - &corrected)).abs(),
                pass: mismatch,
                skipped: false,
                extras,
            },
        ));
        out
    })]
}

fn jobs_eq19(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(10, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                let params =
                    format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let fgs = fgs_of(&menu, &assign);
                let ks = ks.clone();
                jobs.push(job(move || {
                    let direct = match u_tilde_log_direct(a, &ks, &fgs, &budget) {
                        Ok(v) => v,
                        Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
                    };
                    match u_tilde_log_conv(a, &ks, &fgs) {
                        Ok(v) => vec![(params.clone(), relative(direct, v, 1e-9))],
                        Err(e) => vec![(params.clone(), outcome_of_error(&e))],
                    }
                }));
            }
        }
    }
    jobs
}

fn jobs_eq13(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(10, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 2..=3u32 {
        for ks in k_tuples(2, k_cap) {
            let k_lcm = match lcm_list(&ks) {
                Ok(k) => k,
                Err(_) => continue,
            };
            match (k_lcm as u128).checked_pow(a) {
                Some(ka) if ka <= 10_000 => {}
                _ => continue,
            }
            for assign in assignments(ks.len(), menu.len()) {
                let params =
                    format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let fgs = fgs_of(&menu, &assign);
                let ks = ks.clone();
                jobs.push(job(move || {
                    match gamma_weight_check(a, &ks, &fgs, false, &budget) {
                        Ok((lhs, rhs)) => vec![(params.clone(), scaled_abs(lhs, rhs, 1e-8))],
                        Err(e) => vec![(params.clone(), outcome_of_error(&e))],
                    }
                }));
            }
        }
    }
    jobs
}

fn jobs_eq14(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(36, cfg);
    let mut jobs = Vec::new();
    for a in 1..=3u32 {
        for ks in k_tuples(2, k_cap) {
            let k_lcm = match lcm_list(&ks) {
                Ok(k) => k,
                Err(_) => continue,
            };
            match (k_lcm as u128).checked_pow(a) {
                Some(ka) if ka <= 36 => {}
                _ => continue,
            }
            for assign in assignments(ks.len(), menu.len()) {
                let params =
                    format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let fgs = fgs_of(&menu, &assign);
                let ks = ks.clone();
                jobs.push(job(move || match binom_weight_check(a, &ks, &fgs) {
                    Ok((lhs, rhs)) => {
                        vec![(params.clone(), relative(rat_to_f64(&lhs), rhs, 1e-9))]
                    }
                    Err(e) => vec![(params.clone(), outcome_of_error(&e))],
                }));
            }
        }
    }
    jobs
}

fn jobs_eq15(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let menu = menu_pair();
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for a in 1..=2u32 {
        for ks in k_tuples(2, k_cap) {
            for assign in assignments(ks.len(), menu.len()) {
                let base = format!("a={a} k={} fg={}", fmt_ks(&ks), fmt_assign(&menu, &assign));
                let all_phi = assign.iter().all(|&i| i == 0);
                let fgs = fgs_of(&menu, &assign);
                let ks = ks.clone();
                jobs.push(job(move || {
                    let mut out = Vec::new();
                    for m in 0..=6u32 {
                        let params = format!("{base} m={m}");
                        let direct = match bernoulli_weight_direct(a, &ks, &fgs, m, &budget) {
                            Ok(v) => v,
                            Err(e) => {
                                out.push((params, outcome_of_error(&e)));
                                continue;
                            }
                        };
                        let closed = match bernoulli_weight_closed(a, &ks, &fgs, m) {
                            Ok(v) => v,
                            Err(e) => {
                                out.push((params, outcome_of_error(&e)));
                                continue;
                            }
                        };
                        let mut oc = exact_rats(&direct, &closed);
                        if m == 1 && all_phi {
                            // pinned value: -(k_1 ... k_n)/2 on the phi menu
                            let prod: u64 = ks.iter().product();
                            let pin = crate::exact::rat_i64(-(prod as i64)) / rat_u64(2);
                            oc.pass = oc.pass && direct == pin;
                            oc.extras.insert("pinned".into(), format_rat(&pin));
                        }
                        out.push((params, oc));
                    }
                    out
                }));
            }
        }
    }
    // single pinned direct value: m=1, n=1, k=2, a=2 gives -1
    let budget = cfg.budget;
    jobs.push(job(move || {
        let fgs = vec![(ArithFn::euler_phi(), ArithFn::one())];
        let params = "pin a=2 k=(2) fg=[phi,one] m=1".to_string();
        match bernoulli_weight_direct(2, &[2], &fgs, 1, &budget) {
            Ok(v) => vec![(params, exact_rats(&v, &crate::exact::rat_i64(-1)))],
            Err(e) => vec![(params, outcome_of_error(&e))],
        }
    }));
    jobs
}

fn jobs_e_integrality(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let k_cap = cap(12, cfg);
    let mut jobs = Vec::new();
    for ks in k_tuples(3, k_cap) {
        let params = format!("k={}", fmt_ks(&ks));
        jobs.push(job(move || {
            let direct = match e_direct(&ks) {
                Ok(v) => v,
                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
            };
            let toth = match e_toth(&ks) {
                Ok(v) => v,
                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
            };
            let mut oc = exact_rats(&direct, &toth);
            let integral = direct.is_integer();
            let nonneg = !direct.is_negative();
            oc.pass = oc.pass && integral && nonneg;
            oc.extras.insert("integer".into(), integral.to_string());
            oc.extras.insert("nonnegative".into(), nonneg.to_string());
            vec![(params.clone(), oc)]
        }));
    }
    jobs
}

fn jobs_e_multiplicativity(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let k_cap = cap(8, cfg);
    let budget = cfg.budget;
    let mut jobs = Vec::new();
    for n in 1..=2usize {
        let tuples = k_tuples(n, k_cap)
            .into_iter()
            .filter(|t| t.len() == n)
            .collect::<Vec<_>>();
        for (i, ks) in tuples.iter().enumerate() {
            for ms in tuples.iter().skip(i) {
                let (kl, ml) = match (lcm_list(ks), lcm_list(ms)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => continue,
                };
                if gcd(kl, ml) != 1 {
                    continue;
                }
                let prod: Vec<u64> = ks.iter().zip(ms).map(|(&k, &m)| k * m).collect();
                for fname in ["E", "Etilde"] {
                    let params = format!(
                        "fn={fname} k={} m={}",
                        fmt_ks(ks),
                        fmt_ks(ms)
                    );
                    let (ks, ms, prod) = (ks.clone(), ms.clone(), prod.clone());
                    jobs.push(job(move || {
                        let res = if fname == "E" {
                            (e_direct(&prod), e_direct(&ks), e_direct(&ms))
                        } else {
                            let fgs = |n: usize| -> Vec<(ArithFn, ArithFn)> {
                                (0..n)
                                    .map(|_| (ArithFn::euler_phi(), ArithFn::one()))
                                    .collect()
                            };
                            (
                                e_tilde(&prod, &fgs(prod.len()), &budget),
                                e_tilde(&ks, &fgs(ks.len()), &budget),
                                e_tilde(&ms, &fgs(ms.len()), &budget),
                            )
                        };
                        match res {
                            (Ok(joint), Ok(left), Ok(right)) => {
                                vec![(params.clone(), exact_rats(&joint, &(left * right)))]
                            }
                            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                                vec![(params.clone(), outcome_of_error(&e))]
                            }
                        }
                    }));
                }
            }
        }
    }
    jobs
}

fn jobs_toth_s1(cfg: &VerifyConfig) -> Vec<CaseJob> {
    let mut jobs = Vec::new();
    // S_1(k) = phi(k)/(2k) + E(k)/2 for k <= 50
    let s1_cap = cap(50, cfg);
    for k in 1..=s1_cap {
        let params = format!("form=s1 k=({k})");
        jobs.push(job(move || {
            let lhs = match s_r_direct(&[k], 1) {
                Ok(v) => v,
                Err(e) => return vec![(params.clone(), outcome_of_error(&e))],
            };
            let rhs = match (euler_phi(k), e_direct(&[k])) {
                (Ok(phi), Ok(e)) => rat_u64(phi) / rat_u64(2 * k) + e / rat_u64(2),
                (Err(e), _) | (_, Err(e)) => {
                    return vec![(params.clone(), outcome_of_error(&e))]
                }
            };
            vec![(params.clone(), exact_rats(&lhs, &rhs))]
        }));
    }
    // closed form vs direct moments on tuples
    let k_cap = cap(12, cfg);
    for ks in k_tuples(3, k_cap) {
        let base = format!("form=sr k={}", fmt_ks(&ks));
        jobs.push(job(move || {
            let mut out = Vec::new();
            for r in 0..=5u32 {
                let params = format!("{base} r={r}");
                match (s_r_direct(&ks, r), s_r_closed(&ks, r)) {
                    (Ok(d), Ok(c)) => out.push((params, exact_rats(&d, &c))),
                    (Err(e), _) | (_, Err(e)) => out.push((params, outcome_of_error(&e))),
                }
            }
            out
        }));
    }
    jobs
}

fn jobs_lemma_pool(_cfg: &VerifyConfig) -> Vec<CaseJob> {
    let mut jobs = Vec::new();

    // Faulhaber power sums, exact, N <= 100, r <= 8
    for n in 1..=100u64 {
        jobs.push(job(move || {
            let mut out = Vec::new();
            for r in 0..=8u32 {
                let params = format!("family=faulhaber N={n:03} r={r}");
                let mut direct = BigInt::zero();
                for j in 1..=n {
                    direct += BigInt::from(j).pow(r);
                }
                let direct = Rat::from_integer(direct);
                out.push((params, exact_rats(&direct, &faulhaber_sum(n, r))));
            }
            out
        }));
    }

    // corrected coprime power sums, exact, N <= 200, r <= 6
    for n in 1..=200u64 {
        jobs.push(job(move || {
            let mut out = Vec::new();
            let coprime: Vec<u64> = (1..=n).filter(|&j| gcd(j, n) == 1).collect();
            for r in 0..=6u32 {
                let params = format!("family=coprime-power N={n:03} r={r}");
                let mut direct = BigInt::zero();
                for &j in &coprime {
                    direct += BigInt::from(j).pow(r);
                }
                let direct = Rat::from_integer(direct);
                match coprime_power_sum(n, r) {
                    Ok(c) => out.push((params, exact_rats(&direct, &c))),
                    Err(e) => out.push((params, outcome_of_error(&e))),
                }
            }
            out
        }));
    }

    // printed-prefactor witness: N=6, r=1 gives 36 instead of the true 6
    jobs.push(job(move || {
        let params = "family=coprime-power witness N=006 r=1 printed".to_string();
        // the flawed prefactor N^{r+1} in place of N^r
        let printed = (|| -> Result<Rat> {
            let mut acc = Rat::zero();
            for m in 0..=0u32 {
                acc += Rat::from_integer(binomial(2, 2 * m as u64))
                    * bernoulli_number(2 * m)
                    * jordan_totient(1 - 2 * m as i64, 6)?;
            }
            Ok(Rat::from_integer(crate::arith::bigint_pow(6, 2)) * acc / rat_u64(2))
        })();
        let truth = rat_u64(6);
        match printed {
            Ok(p) => {
                let mut extras = BTreeMap::new();
                extras.insert(
                    "note".into(),
                    "printed prefactor N^{r+1}; mismatch is the expected outcome".into(),
                );
                let oc = Outcome {
                    mode: "exact(inverted)".into(),
                    lhs: format_rat(&p),
                    rhs: format_rat(&truth),
                    err: rat_to_f64(&(&p - &truth)).abs(),
                    pass: p == rat_u64(36) && p != truth,
                    skipped: false,
                    extras,
                };
                vec![(params, oc)]
            }
            Err(e) => vec![(params, outcome_of_error(&e))],
        }
    }));

    // coprime log sums, relative 1e-10, N <= 500
    for block in 0..5u64 {
        jobs.push(job(move || {
            let mut out = Vec::new();
            for n in (block * 100 + 1)..=(block * 100 + 100) {
                let params = format!("family=coprime-log N={n:03}");
                let direct: f64 = (1..=n)
                    .filter(|&j| gcd(j, n) == 1)
                    .map(|j| (j as f64).ln())
                    .sum();
                match coprime_log_sum(n) {
                    Ok(c) => out.push((params, relative(direct, c, 1e-10))),
                    Err(e) => out.push((params, outcome_of_error(&e))),
                }
            }
            out
        }));
    }

    // Gauss-Legendre log Gamma products, relative 1e-9, n <= 200
    for block in 0..4u64 {
        jobs.push(job(move || {
            let mut out = Vec::new();
            for n in (block * 50 + 1)..=(block * 50 + 50) {
                let params = format!("family=gauss-legendre n={n:03}");
                match log_gamma_product(n) {
                    Ok(d) => out.push((
                        params,
                        relative(d, log_gamma_product_closed(n), 1e-9),
                    )),
                    Err(e) => out.push((params, outcome_of_error(&e))),
                }
            }
            out
        }));
    }

    // binomial multisection vs cosine form, relative 1e-9, n <= 40, r <= 12
    for n in 1..=40u64 {
        jobs.push(job(move || {
            let mut out = Vec::new();
            for r in 1..=12u64 {
                let params = format!("family=binom-cosine n={n:02} r={r:02}");
                let exact = binom_multisection(n, r);
                let exact_f = exact.to_f64().unwrap_or(f64::INFINITY);
                out.push((
                    params,
                    relative(exact_f, binom_multisection_cos(n, r), 1e-9),
                ));
            }
            out
        }));
    }

    // sum of binom(r+1, 2m) B_{2m} = (r+1)/2 for r >= 1
    jobs.push(job(move || {
        let mut out = Vec::new();
        for r in 1..=40u32 {
            let params = format!("family=binom-bernoulli r={r:02}");
            let rhs = rat_u64(r as u64 + 1) / rat_u64(2);
            out.push((params, exact_rats(&sum_binom_bernoulli(r), &rhs)));
        }
        // r = 0: the literal sum is B_0 = 1, not 1/2 -- pinned boundary value
        let mut oc = exact_rats(&sum_binom_bernoulli(0), &Rat::one());
        oc.extras
            .insert("note".into(), "identity starts at r=1; r=0 value pinned".into());
        out.push(("family=binom-bernoulli r=00 boundary".to_string(), oc));
        out
    }));

    // Bernoulli polynomial sums over l/k, exact, k <= 30, m <= 8
    for k in 1..=30u64 {
        jobs.push(job(move || {
            let mut out = Vec::new();
            for m in 0..=8u32 {
                let params = format!("family=bernoulli-poly-sum k={k:02} m={m}");
                let mut direct = Rat::zero();
                for l in 0..k {
                    direct += bernoulli_poly(m, &Rat::new(BigInt::from(l), BigInt::from(k)));
                }
                let rhs = bernoulli_number(m)
                    * crate::arith::big_rational_pow(k, 1 - m as i64).expect("k >= 1");
                out.push((params, exact_rats(&direct, &rhs)));
            }
            out
        }));
    }

    jobs
}

fn jobs_for(id: SuiteId, cfg: &VerifyConfig) -> Vec<CaseJob> {
    match id {
        SuiteId::Thm1Eq1 => jobs_thm1(cfg, false),
        SuiteId::Thm1Eq2 => jobs_thm1(cfg, true),
        SuiteId::Thm2Eq3 => jobs_thm2(cfg, false),
        SuiteId::Thm2Eq4 => jobs_thm2(cfg, true),
        SuiteId::CorEq5 => jobs_eq5(cfg),
        SuiteId::CorEq8 => jobs_eq8(cfg),
        SuiteId::CorEq10Theta => jobs_eq10(cfg),
        SuiteId::Thm4Eq16 => jobs_eq16(cfg),
        SuiteId::Thm4Eq17 => jobs_eq17(cfg),
        SuiteId::RemarkVariants => jobs_remark(cfg),
        SuiteId::CorEq18Corrected => jobs_eq18_corrected(cfg),
        SuiteId::CorEq18PrintedRegression => jobs_eq18_printed(cfg),
        SuiteId::CorEq19 => jobs_eq19(cfg),
        SuiteId::Thm3Eq13 => jobs_eq13(cfg),
        SuiteId::Thm3Eq14 => jobs_eq14(cfg),
        SuiteId::Thm3Eq15 => jobs_eq15(cfg),
        SuiteId::EIntegrality => jobs_e_integrality(cfg),
        SuiteId::EMultiplicativity => jobs_e_multiplicativity(cfg),
        SuiteId::TothS1 => jobs_toth_s1(cfg),
        SuiteId::LemmaPool => jobs_lemma_pool(cfg),
    }
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

pub fn run_suite(id: SuiteId, cfg: &VerifyConfig) -> SuiteReport {
    let jobs = jobs_for(id, cfg);
    let run_one = |j: &CaseJob| (j.run)();
    let nested: Vec<Vec<Case>> = match cfg.workers {
        1 => jobs.iter().map(run_one).collect(),
        0 => jobs.par_iter().map(run_one).collect(),
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(|| jobs.par_iter().map(run_one).collect())
        }
    };
    let mut cases: Vec<Case> = nested.into_iter().flatten().collect();
    cases.sort_by(|x, y| x.0.cmp(&y.0));
    let mut max_err = 0.0f64;
    let results: Vec<CaseResult> = cases
        .into_iter()
        .map(|(params, o)| {
            if !o.skipped && o.err.is_finite() {
                max_err = max_err.max(o.err);
            }
            CaseResult {
                params,
                mode: o.mode,
                lhs: o.lhs,
                rhs: o.rhs,
                error: format_real(o.err),
                pass: o.pass,
                skipped: o.skipped,
                extras: o.extras,
            }
        })
        .collect();
    SuiteReport::from_cases(id.name(), results, max_err)
}

pub fn run_all(cfg: &VerifyConfig) -> Result<VerificationReport> {
    if cfg.suites.is_empty() {
        return Err(Error::Config("no suites selected".into()));
    }
    // ledger order, deduplicated
    let selected: Vec<SuiteId> = SuiteId::ALL
        .into_iter()
        .filter(|id| cfg.suites.contains(id))
        .collect();
    let suites: Vec<SuiteReport> = selected.iter().map(|&id| run_suite(id, cfg)).collect();
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        generator: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        timestamp,
        config: ConfigEcho {
            suites: selected.iter().map(|id| id.name().to_string()).collect(),
            max_k: cfg.max_k,
            budget: cfg.budget.max_terms(),
            workers: cfg.workers,
        },
        suites,
    })
}
