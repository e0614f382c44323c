//! `apostol` — exact gcd-weighted divisor sums, their weighted averages, and
//! identity verification against closed forms.
//!
//! Exit codes: 0 success, 1 verification/equality failure, 2 usage or
//! configuration error, 3 computation budget exceeded.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use apostol::averages::{
    e_direct, s_r_direct, u_tilde_direct, u_tilde_idr_closed, u_tilde_idr_conv_closed, Budget,
};
use apostol::exact::{format_rat, format_real, Rat};
use apostol::func::{parse_expr, ArithFn};
use apostol::sums::{cohen, gen_aa, ramanujan, SumSpec};
use apostol::verify::{run_all, SuiteId, VerifyConfig};
use apostol::{Error, Value};

/// Name of the environment variable supplying the default term budget.
const BUDGET_ENV: &str = "APOSTOL_BUDGET";

#[derive(Parser)]
#[command(
    name = "apostol",
    version,
    about = "Exact gcd-weighted divisor sums, weighted averages, and identity verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a single quantity and print it
    Compute(ComputeArgs),
    /// Run verification suites and emit a machine-readable report
    Verify(VerifyArgs),
    /// Time direct summation against closed forms (equality asserted)
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ComputeFormat {
    Plain,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(subcommand)]
    which: ComputeCmd,
}

#[derive(Subcommand)]
enum ComputeCmd {
    /// Ramanujan sum c_k(j)
    Ramanujan {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u64,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
    /// Cohen sum c^(a)_k(j)
    Cohen {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u64,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
    /// Generalized sum s^(a)_{f,g,h}(k, j)
    GenAa {
        #[arg(long, default_value_t = 1)]
        a: u32,
        /// Function expression, e.g. `phi`, `id*mu`, `jordan[2]`
        #[arg(long, default_value = "id")]
        f: String,
        #[arg(long, default_value = "one")]
        g: String,
        #[arg(long, default_value = "one")]
        h: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u64,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
    /// Mean of a product of Ramanujan sums over one period
    E {
        /// Comma-separated moduli, e.g. 2,3,4
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<u64>,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
    /// Normalized r-th power-weighted mean of a Ramanujan-sum product
    #[command(name = "s-r")]
    SR {
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
    /// Power-weighted sum of a product of generalized sums over one period
    Moment {
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<u64>,
        /// Function expression applied to every slot
        #[arg(long, default_value = "phi")]
        f: String,
        #[arg(long, default_value = "one")]
        g: String,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Term budget for the direct sweep (default from APOSTOL_BUDGET or 10^6)
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
    /// Evaluate a function expression at a point
    Eval {
        /// Expression over {one, id, id^r, pow^s, mu, phi, jordan[m], log,
        /// bigomega} with `*` (Dirichlet), `.` (pointwise), `c:` (scaling)
        #[arg(long)]
        expr: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Plain)]
        format: ComputeFormat,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated suite names, or `all`
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,
    /// Shrink every per-suite modulus bound to at most this value
    #[arg(long)]
    max_k: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// 0 = shared thread pool, 1 = strictly serial, n = dedicated n-thread pool
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Term budget for direct sweeps (default from APOSTOL_BUDGET or 10^6)
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Function expression applied to every slot
    #[arg(long, default_value = "phi")]
    f: String,
    #[arg(long, default_value = "one")]
    g: String,
    #[arg(long)]
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

/// Integers plainly, other rationals as p/q.
fn human_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rat(r)
    }
}

fn human_value(v: &Value) -> String {
    match v {
        Value::Exact(r) => human_rat(r),
        Value::Real(x) => format_real(*x),
    }
}

fn emit(kind: &str, text: String, format: ComputeFormat) {
    match format {
        ComputeFormat::Plain => println!("{text}"),
        ComputeFormat::Json => {
            let obj = serde_json::json!({ "kind": kind, "value": text });
            println!("{obj}");
        }
    }
}

fn resolve_budget(flag: Option<u64>) -> Result<Budget, Error> {
    if let Some(b) = flag {
        return Ok(Budget::new(b));
    }
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Budget::new)
            .map_err(|_| Error::Config(format!("{BUDGET_ENV} must be an integer, got `{s}`"))),
        Err(_) => Ok(Budget::default()),
    }
}

fn parse_fn(label: &str, src: &str) -> Result<ArithFn, Error> {
    parse_expr(src).map_err(|e| match e {
        Error::Parse { pos, msg } => {
            Error::Config(format!("--{label} `{src}`: parse error at {pos}: {msg}"))
        }
        other => other,
    })
}

fn cmd_compute(args: ComputeArgs) -> Result<ExitCode, Error> {
    match args.which {
        ComputeCmd::Ramanujan { k, j, format } => {
            let v = ramanujan(k, j)?;
            emit("ramanujan", v.to_string(), format);
        }
        ComputeCmd::Cohen { a, k, j, format } => {
            let v = cohen(a, k, j)?;
            emit("cohen", v.to_string(), format);
        }
        ComputeCmd::GenAa {
            a,
            f,
            g,
            h,
            k,
            j,
            format,
        } => {
            let spec = SumSpec::new(
                a,
                parse_fn("f", &f)?,
                parse_fn("g", &g)?,
                parse_fn("h", &h)?,
                k,
            )?;
            let v = gen_aa(&spec, j)?;
            emit("gen-aa", human_value(&v), format);
        }
        ComputeCmd::E { ks, format } => {
            let v = e_direct(&ks)?;
            emit("E", human_rat(&v), format);
        }
        ComputeCmd::SR { ks, r, format } => {
            let v = s_r_direct(&ks, r)?;
            emit("s-r", human_rat(&v), format);
        }
        ComputeCmd::Moment {
            a,
            ks,
            f,
            g,
            r,
            budget,
            format,
        } => {
            let budget = resolve_budget(budget)?;
            let f = parse_fn("f", &f)?;
            let g = parse_fn("g", &g)?;
            let fgs: Vec<(ArithFn, ArithFn)> =
                ks.iter().map(|_| (f.clone(), g.clone())).collect();
            let v = u_tilde_direct(a, &ks, &fgs, r, &budget)?;
            emit("moment", human_rat(&v), format);
        }
        ComputeCmd::Eval { expr, n, format } => {
            let f = parse_fn("expr", &expr)?;
            let v = f.eval(n)?;
            emit("eval", human_value(&v), format);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let suites = if args.suite.iter().any(|s| s == "all") {
        SuiteId::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|s| SuiteId::parse(s))
            .collect::<Result<Vec<_>, _>>()?
    };
    let cfg = VerifyConfig {
        suites,
        max_k: args.max_k,
        budget: resolve_budget(args.budget)?,
        workers: args.workers,
    };
    let report = run_all(&cfg)?;
    for s in &report.suites {
        eprintln!(
            "{}: {} cases, {} failed, {} skipped, max error {}",
            s.suite, s.cases_run, s.failed, s.skipped, s.max_error
        );
    }
    let body = match args.format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| Error::Config(format!("cannot write report: {e}")))?;
        }
    }
    if report.total_failed() > 0 {
        eprintln!("FAILED: {} case(s)", report.total_failed());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let budget = resolve_budget(args.budget)?;
    let f = parse_fn("f", &args.f)?;
    let g = parse_fn("g", &args.g)?;
    let fgs: Vec<(ArithFn, ArithFn)> = args
        .ks
        .iter()
        .map(|_| (f.clone(), g.clone()))
        .collect();
    let (a, r, ks) = (args.a, args.r, args.ks);

    println!("{:<24} {:>12} {:>12}  {}", "identity", "direct_ms", "closed_ms", "status");

    let t0 = Instant::now();
    let direct = match u_tilde_direct(a, &ks, &fgs, r, &budget) {
        Ok(v) => Some(v),
        Err(Error::Budget { needed, limit }) => {
            eprintln!("note: direct sweep needs {needed} terms, budget {limit}; skipping direct");
            None
        }
        Err(e) => return Err(e),
    };
    let direct_ms = t0.elapsed().as_secs_f64() * 1e3;

    let mut failed = false;
    let mut row = |name: &str, closed: Result<Rat, Error>| -> Result<(), Error> {
        let t1 = Instant::now();
        let closed = closed?;
        let closed_ms = t1.elapsed().as_secs_f64() * 1e3;
        let (direct_col, status) = match &direct {
            Some(d) if *d == closed => (format!("{direct_ms:.3}"), "equal".to_string()),
            Some(d) => {
                failed = true;
                (
                    format!("{direct_ms:.3}"),
                    format!("MISMATCH direct={} closed={}", human_rat(d), human_rat(&closed)),
                )
            }
            None => ("skipped".to_string(), format!("closed={}", human_rat(&closed))),
        };
        println!("{name:<24} {direct_col:>12} {closed_ms:>12.3}  {status}");
        Ok(())
    };

    row("power-weight closed", u_tilde_idr_closed(a, &ks, &fgs, r))?;
    row(
        "convolution closed",
        u_tilde_idr_conv_closed(a, &ks, &fgs, r, false),
    )?;

    if failed {
        eprintln!("FAILED: closed form disagrees with direct summation");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
