//! Acceptance gate: one test per release criterion. Each test prints a single
//! `criterion NN <label>: PASS|FAIL` line (visible with `--nocapture`) and
//! fails the build if the criterion does not hold.

use apostol::arith::euler_phi;
use apostol::averages::e_direct;
use apostol::exact::{rat_i64, rat_u64};
use apostol::sums::{cohen, cohen_exp, ramanujan, ramanujan_exp};
use apostol::verify::{run_all, SuiteId, VerificationReport, VerifyConfig};

fn criterion(num: u32, label: &str, ok: bool, detail: String) {
    println!(
        "criterion {num:02} {label}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {num:02} {label} failed: {detail}");
}

/// Run the named suites on their full default grids; green means every case
/// ran (no skips) and every assertion held.
fn suites_green(ids: &[SuiteId]) -> (bool, String) {
    let cfg = VerifyConfig {
        suites: ids.to_vec(),
        ..VerifyConfig::default()
    };
    let report = run_all(&cfg).expect("suite selection is valid");
    let ok = report.total_failed() == 0
        && report.total_skipped() == 0
        && report.total_cases_run() > 0;
    let detail = format!(
        "{} cases, {} failed, {} skipped",
        report.total_cases_run(),
        report.total_failed(),
        report.total_skipped()
    );
    (ok, detail)
}

#[test]
fn criterion_01_cross_form_sums() {
    let mut ok = true;
    let mut checked = 0u64;

    // divisor form vs exponential form of the classical sum
    for k in 1..=50u64 {
        for j in 0..=50u64 {
            let d = ramanujan(k, j).unwrap() as f64;
            let e = ramanujan_exp(k, j).unwrap();
            ok &= (d - e).abs() < 1e-6;
            checked += 1;
        }
    }

    // order-a generalization vs its exponential form; the a = 1 instance is
    // the classical sum above, so the exponential sweep starts at a = 2
    for a in 2..=13u32 {
        for k in 1..=100u64 {
            match (k as u128).checked_pow(a) {
                Some(ka) if ka <= 10_000 => {}
                _ => continue,
            }
            for j in 0..=50u64 {
                let d = cohen(a, k, j).unwrap() as f64;
                let e = cohen_exp(a, k, j).unwrap();
                ok &= (d - e).abs() < 1e-6;
                checked += 1;
            }
        }
    }

    // the a = 1 instance collapses to the classical sum, exactly
    for k in 1..=300u64 {
        for j in 0..=50u64 {
            ok &= cohen(1, k, j).unwrap() == ramanujan(k, j).unwrap();
            checked += 1;
        }
    }

    // c_k(k) equals the totient, exactly
    for k in 1..=100u64 {
        ok &= ramanujan(k, k).unwrap() == euler_phi(k).unwrap() as i64;
        checked += 1;
    }

    criterion(1, "cross-form sums", ok, format!("{checked} comparisons"));
}

#[test]
fn criterion_02_weighted_average_splitting_multiplicative() {
    let (ok, detail) = suites_green(&[SuiteId::Thm1Eq1, SuiteId::Thm1Eq2]);
    criterion(2, "multiplicative-weight splitting", ok, detail);
}

#[test]
fn criterion_03_weighted_average_splitting_additive() {
    let (ok, detail) = suites_green(&[SuiteId::Thm2Eq3, SuiteId::Thm2Eq4]);
    criterion(3, "additive-weight splitting", ok, detail);
}

#[test]
fn criterion_04_power_weight_closed_forms_and_gcd_sums() {
    let (ok, detail) = suites_green(&[SuiteId::CorEq5, SuiteId::CorEq8, SuiteId::TothS1]);
    criterion(4, "power-weight closed forms", ok, detail);
}

#[test]
fn criterion_05_log_weight_bracket() {
    let (ok, detail) = suites_green(&[SuiteId::CorEq10Theta]);
    criterion(5, "log-weight bracket bound", ok, detail);
}

#[test]
fn criterion_06_convolution_representation() {
    let (ok, detail) = suites_green(&[
        SuiteId::Thm4Eq16,
        SuiteId::Thm4Eq17,
        SuiteId::RemarkVariants,
    ]);
    criterion(6, "convolution representation", ok, detail);
}

#[test]
fn criterion_07_corrected_closed_form_and_log_variant() {
    let (ok, detail) = suites_green(&[
        SuiteId::CorEq18Corrected,
        SuiteId::CorEq18PrintedRegression,
        SuiteId::CorEq19,
    ]);
    criterion(7, "corrected closed form + regression witness", ok, detail);
}

#[test]
fn criterion_08_gamma_binomial_bernoulli_weights() {
    let (ok, detail) = suites_green(&[SuiteId::Thm3Eq13, SuiteId::Thm3Eq14, SuiteId::Thm3Eq15]);
    criterion(8, "log-gamma/binomial/Bernoulli weights", ok, detail);
}

#[test]
fn criterion_09_lemma_pool() {
    let (ok, detail) = suites_green(&[SuiteId::LemmaPool]);
    criterion(9, "supporting lemma pool", ok, detail);
}

#[test]
fn criterion_10_mean_value_function() {
    let mut ok = true;
    ok &= e_direct(&[2, 2]).unwrap() == rat_u64(1);
    ok &= e_direct(&[2, 3]).unwrap() == rat_i64(0);
    ok &= e_direct(&[1]).unwrap() == rat_u64(1);
    let (suites_ok, detail) =
        suites_green(&[SuiteId::EIntegrality, SuiteId::EMultiplicativity]);
    ok &= suites_ok;
    criterion(10, "mean-value function", ok, format!("3 pinned values; {detail}"));
}

#[test]
fn criterion_11_determinism() {
    // Full ledger, shrunk moduli: determinism is about reproducibility, not
    // grid size.
    let cfg = VerifyConfig {
        suites: SuiteId::ALL.to_vec(),
        max_k: Some(6),
        ..VerifyConfig::default()
    };
    let r1 = run_all(&cfg).expect("run");
    let r2 = run_all(&cfg).expect("run");
    let serial_cfg = VerifyConfig {
        workers: 1,
        ..cfg.clone()
    };
    let r3 = run_all(&serial_cfg).expect("run");

    // byte-identical reports modulo the timestamp (and the echoed worker
    // count for the serial run)
    fn canonical(r: &VerificationReport) -> String {
        let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v["timestamp"] = 0.into();
        v["config"]["workers"] = 0.into();
        serde_json::to_string_pretty(&v).unwrap()
    }
    let ok = r1.total_failed() == 0
        && canonical(&r1) == canonical(&r2)
        && canonical(&r1) == canonical(&r3);
    criterion(
        11,
        "deterministic reports, serial == parallel",
        ok,
        format!("{} cases x 3 runs", r1.total_cases_run()),
    );
}
