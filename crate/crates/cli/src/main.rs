mod io;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use tricount::oracle::{brute_force_count, charsum_nstar, DEFAULT_BUDGET};
use tricount::selftest::{self, SelftestOptions};
use tricount::starequiv::{
    diagonal_equivalence, star_equivalent_general, totally_star_equivalent_general,
    verify_certificate,
};
use tricount::{count_roots, CountOptions, EquivStatus, Method};

use io::{
    certificate_json, field_json, parse_matrix, parse_poly, read_source, CliResult, Failure, Poly,
};

/// Root counts of triangular polynomials over finite fields.
#[derive(Parser)]
#[command(name = "tricount", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Polynomial JSON: a file path, inline JSON, or `-` for stdin.
    #[arg(long, short, global = true)]
    input: Option<String>,
    /// Machine-readable output (selftest only; other commands always emit JSON).
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of points the enumeration oracles may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for enumeration; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Count roots through the closed forms, falling back to enumeration.
    Count {
        /// Exit with status 2 instead of enumerating.
        #[arg(long)]
        no_oracle: bool,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Count roots by exhaustive enumeration.
    Oracle,
    /// Decide *-equivalence against another polynomial or a diagonal target.
    Equiv {
        /// The second polynomial.
        #[arg(long, conflicts_with = "diagonal")]
        other: Option<String>,
        /// Diagonal exponents e1,e2,... for the target.
        #[arg(long, value_delimiter = ',')]
        diagonal: Option<Vec<u64>>,
        /// Certificate matrix to verify (needs --other).
        #[arg(long, requires = "other")]
        certificate: Option<String>,
    },
    /// N* through the Gauss-sum character formula.
    Charsum,
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion.
        criterion: Option<u8>,
        #[arg(long, hide = true)]
        mutate_zeta2: bool,
    },
}

enum Outcome {
    Json(Value, u8),
    Text(String, u8),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Json(v, code)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("serializable")
            );
            ExitCode::from(code)
        }
        Ok(Outcome::Text(s, code)) => {
            print!("{s}");
            ExitCode::from(code)
        }
        Err(failure) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&failure.to_json()).expect("serializable")
            );
            ExitCode::from(1)
        }
    }
}

fn input(global: &Global) -> CliResult<Poly> {
    let source = global
        .input
        .as_deref()
        .ok_or_else(|| Failure::new("parse_error", "--input is required"))?;
    parse_poly(read_source(source)?)
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Count { no_oracle, timings } => {
            let f = input(g)?.triangular()?;
            let opts = CountOptions {
                allow_oracle: !no_oracle,
                budget: g.budget,
                threads: g.threads,
            };
            let report = count_roots(&f, &opts)?;
            let code = if report.n_roots.is_none() { 2 } else { 0 };
            Ok(Outcome::Json(io::report_json(&f, &report, *timings), code))
        }
        Command::Oracle => {
            let f = input(g)?.to_sparse();
            let counts = brute_force_count(&f, g.budget, g.threads)?;
            Ok(Outcome::Json(
                json!({
                    "field": field_json(f.field()),
                    "n": f.n_vars(),
                    "N": counts.n.to_string(),
                    "N_star": counts.n_star.to_string(),
                    "method": Method::Oracle.as_str(),
                }),
                0,
            ))
        }
        Command::Charsum => {
            let f = input(g)?.to_sparse();
            let nstar = charsum_nstar(&f, g.budget)?;
            Ok(Outcome::Json(
                json!({
                    "field": field_json(f.field()),
                    "n": f.n_vars(),
                    "N_star": nstar.to_string(),
                    "method": Method::Charsum.as_str(),
                }),
                0,
            ))
        }
        Command::Equiv {
            other,
            diagonal,
            certificate,
        } => equiv(
            g,
            other.as_deref(),
            diagonal.as_deref(),
            certificate.as_deref(),
        ),
        Command::Selftest {
            criterion,
            mutate_zeta2,
        } => selftest_cmd(g, *criterion, *mutate_zeta2),
    }
}

fn status_json(status: &str, method: &str, certificate: Value) -> Value {
    json!({ "status": status, "method": method, "certificate": certificate })
}

fn equiv(
    g: &Global,
    other: Option<&str>,
    diagonal: Option<&[u64]>,
    certificate: Option<&str>,
) -> CliResult<Outcome> {
    let f = input(g)?;
    if let Some(e) = diagonal {
        let ft = f.triangular()?;
        let target = tricount::starequiv::diagonal_target(&ft, e)?;
        if let Some(cert) = diagonal_equivalence(&ft, e)? {
            let mut out = status_json(
                EquivStatus::TotallyStarEquivalent.as_str(),
                "diagonal_criterion",
                certificate_json(&cert),
            );
            out["criterion"] = json!("satisfied");
            return Ok(Outcome::Json(out, 0));
        }
        let mut out = howell(&Poly::Triangular(ft), &Poly::Triangular(target))?;
        out["criterion"] = json!("inconclusive");
        return Ok(Outcome::Json(out, 0));
    }
    let other =
        other.ok_or_else(|| Failure::new("parse_error", "equiv needs --other or --diagonal"))?;
    let h = parse_poly(read_source(other)?)?;
    if let Some(source) = certificate {
        let (ft, ht) = (f.triangular()?, h.triangular()?);
        let m = parse_matrix(read_source(source)?, ft.field().order())?;
        let status = verify_certificate(&ft, &ht, &m)?;
        let cert = match status {
            EquivStatus::NotValid => Value::Null,
            s => json!({
                "M": m.to_rows(),
                "total": s == EquivStatus::TotallyStarEquivalent,
            }),
        };
        return Ok(Outcome::Json(
            status_json(status.as_str(), "certificate", cert),
            0,
        ));
    }
    Ok(Outcome::Json(howell(&f, &h)?, 0))
}

/// Exact decision through row-span comparison; per truncation level when
/// both sides are triangular.
fn howell(f: &Poly, g: &Poly) -> CliResult<Value> {
    let (fs, gs) = (f.to_sparse(), g.to_sparse());
    if fs.n_vars() != gs.n_vars() || fs.terms().len() != gs.terms().len() {
        return Err(tricount::Error::DimensionMismatch(format!(
            "{} vs {} variables, {} vs {} terms",
            fs.n_vars(),
            gs.n_vars(),
            fs.terms().len(),
            gs.terms().len()
        ))
        .into());
    }
    if fs.field().q() != gs.field().q() || fs.field().modulus() != gs.field().modulus() {
        return Err(tricount::Error::FieldMismatch.into());
    }
    if fs.coefficient_vector() != gs.coefficient_vector() {
        return Ok(status_json(
            EquivStatus::NotValid.as_str(),
            "howell",
            Value::Null,
        ));
    }
    if !star_equivalent_general(&fs, &gs) {
        return Ok(status_json("not_star_equivalent", "howell", Value::Null));
    }
    let total = match (f.triangular(), g.triangular()) {
        (Ok(ft), Ok(gt)) => totally_star_equivalent_general(&ft, &gt)?,
        _ => false,
    };
    let status = if total {
        EquivStatus::TotallyStarEquivalent
    } else {
        EquivStatus::StarEquivalent
    };
    Ok(status_json(status.as_str(), "howell", Value::Null))
}

fn selftest_cmd(g: &Global, criterion: Option<u8>, mutate_zeta2: bool) -> CliResult<Outcome> {
    let opts = SelftestOptions {
        flip_zeta2: mutate_zeta2,
        threads: g.threads,
    };
    let start = Instant::now();
    let outcomes = match criterion {
        Some(id) => vec![selftest::run_criterion(id, &opts)
            .ok_or_else(|| Failure::new("parse_error", format!("no criterion {id}")))?],
        None => selftest::run_all(&opts),
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let code = u8::from(failed > 0);
    if g.json {
        let rows: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "id": o.id,
                    "name": o.name,
                    "passed": o.passed,
                    "detail": o.detail,
                    "elapsed_ms": o.elapsed.as_millis() as u64,
                    "limit_ms": o.limit.map(|l| l.as_millis() as u64),
                })
            })
            .collect();
        return Ok(Outcome::Json(
            json!({
                "passed": failed == 0,
                "failed": failed,
                "criteria": rows,
                "elapsed_ms": start.elapsed().as_millis() as u64,
            }),
            code,
        ));
    }
    let mut text = String::new();
    for o in &outcomes {
        let limit = o.limit.map(|l| format!(" / {:.0?}", l)).unwrap_or_default();
        text.push_str(&format!(
            "criterion {:>2} {} {} ({:.2?}{limit}) {}\n",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.elapsed,
            o.detail
        ));
    }
    text.push_str(&format!(
        "{} of {} passed in {:.2?}\n",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed()
    ));
    Ok(Outcome::Text(text, code))
}
