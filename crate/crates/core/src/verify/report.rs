//! Report data model and serialization: JSON (schema-versioned) and CSV.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::exact::format_real;

pub const SCHEMA_VERSION: u32 = 1;

/// One evaluated grid point.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub params: String,
    pub mode: String,
    pub lhs: String,
    pub rhs: String,
    pub error: String,
    pub pass: bool,
    pub skipped: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, String>,
}

/// All cases of one identity suite plus summary counters.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases_run: usize,
    pub failed: usize,
    pub skipped: usize,
    pub max_error: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn from_cases(suite: &str, cases: Vec<CaseResult>, max_error: f64) -> Self {
        let skipped = cases.iter().filter(|c| c.skipped).count();
        let failed = cases.iter().filter(|c| !c.pass && !c.skipped).count();
        SuiteReport {
            suite: suite.to_string(),
            cases_run: cases.len() - skipped,
            failed,
            skipped,
            max_error: format_real(max_error),
            cases,
        }
    }
}

/// Echo of the configuration that produced a report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub suites: Vec<String>,
    pub max_k: Option<u64>,
    pub budget: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub generator: String,
    pub timestamp: u64,
    pub config: ConfigEcho,
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn total_failed(&self) -> usize {
        self.suites.iter().map(|s| s.failed).sum()
    }

    pub fn total_skipped(&self) -> usize {
        self.suites.iter().map(|s| s.skipped).sum()
    }

    pub fn total_cases_run(&self) -> usize {
        self.suites.iter().map(|s| s.cases_run).sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Flat CSV: one row per case.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,params,mode,lhs,rhs,error,pass,skipped\n");
        for suite in &self.suites {
            for c in &suite.cases {
                let row = [
                    suite.suite.as_str(),
                    c.params.as_str(),
                    c.mode.as_str(),
                    c.lhs.as_str(),
                    c.rhs.as_str(),
                    c.error.as_str(),
                    if c.pass { "true" } else { "false" },
                    if c.skipped { "true" } else { "false" },
                ];
                let mut first = true;
                for field in row {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    out.push_str(&csv_escape(field));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_escaping() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("k=(2,3)"), "\"k=(2,3)\"");
        assert_eq!(csv_escape("a\"b"), "\"a\"\"b\"");
    }

    #[test]
    fn summary_counts() {
        let mk = |pass, skipped| CaseResult {
            params: "p".into(),
            mode: "exact".into(),
            lhs: "1/1".into(),
            rhs: "1/1".into(),
            error: "0".into(),
            pass,
            skipped,
            extras: BTreeMap::new(),
        };
        let sr = SuiteReport::from_cases(
            "demo",
            vec![mk(true, false), mk(false, false), mk(false, true)],
            0.0,
        );
        assert_eq!(sr.cases_run, 2);
        assert_eq!(sr.failed, 1);
        assert_eq!(sr.skipped, 1);
    }
}
