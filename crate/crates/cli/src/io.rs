//! JSON input parsing and report rendering.

use std::fs;
use std::io::Read;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Deserialize;
use serde_json::{json, Value};
use tricount::counting::CountReport;
use tricount::starequiv::Target;
use tricount::{
    Certificate, Error, Fe, FieldSpec, ResidueMatrix, SparsePoly, Term, TriangularPoly,
};

/// A CLI failure: an error code plus message, reported as JSON.
#[derive(Debug)]
pub struct Failure {
    pub code: String,
    pub message: String,
}

impl Failure {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Failure {
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "code": self.code, "message": self.message })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Reads `-` (stdin), inline JSON starting with `{` or `[`, or a file path.
pub fn read_source(source: &str) -> CliResult<Value> {
    let text = if source == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::new("io_error", format!("stdin: {e}")))?;
        s
    } else if source.trim_start().starts_with(['{', '[']) {
        source.to_string()
    } else {
        fs::read_to_string(source)
            .map_err(|e| Failure::new("io_error", format!("{source}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::new("parse_error", e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    p: u64,
    #[serde(default = "one")]
    m: u32,
    modulus: Option<Vec<u64>>,
}

fn one() -> u32 {
    1
}

/// A field element: an integer, or an LSB-first coefficient list.
#[derive(Deserialize)]
#[serde(untagged)]
enum ElemJson {
    Int(i64),
    Big(u64),
    Coeffs(Vec<u64>),
}

/// An exponent: a machine integer or a decimal string of any size.
#[derive(Deserialize)]
#[serde(untagged)]
enum ExpJson {
    Int(u64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    coeff: ElemJson,
    expo: Vec<ExpJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    field: FieldJson,
    n: Option<usize>,
    coeffs: Option<Vec<ElemJson>>,
    #[serde(default)]
    b: Option<ElemJson>,
    exponents: Option<Vec<Vec<ExpJson>>>,
    terms: Option<Vec<TermJson>>,
}

/// A parsed polynomial, in whichever form the input used.
pub enum Poly {
    Triangular(TriangularPoly),
    Sparse(SparsePoly),
}

impl Poly {
    pub fn to_sparse(&self) -> SparsePoly {
        match self {
            Poly::Triangular(t) => t.to_sparse(),
            Poly::Sparse(s) => s.clone(),
        }
    }

    /// The triangular view, classifying sparse input if needed.
    pub fn triangular(&self) -> CliResult<TriangularPoly> {
        match self {
            Poly::Triangular(t) => Ok(t.clone()),
            Poly::Sparse(s) => match tricount::classify(s) {
                (_, Some(t)) => Ok(t),
                (_, None) => Err(Error::NotTriangular(
                    "terms cannot be ordered into a triangular shape".into(),
                )
                .into()),
            },
        }
    }
}

fn parse_field(f: &FieldJson) -> CliResult<Arc<FieldSpec>> {
    let field = match &f.modulus {
        Some(modulus) => {
            if modulus.len() != f.m as usize + 1 {
                return Err(Failure::new(
                    "invalid_field",
                    format!(
                        "modulus has {} coefficients, expected {}",
                        modulus.len(),
                        f.m + 1
                    ),
                ));
            }
            FieldSpec::with_modulus(f.p, modulus)?
        }
        None => FieldSpec::new(f.p, f.m)?,
    };
    Ok(field)
}

fn parse_elem(field: &FieldSpec, e: &ElemJson) -> CliResult<Fe> {
    Ok(match e {
        ElemJson::Int(v) if *v < 0 || field.m() == 1 => field.from_int(*v),
        ElemJson::Int(v) => field.element(*v as u64)?,
        ElemJson::Big(v) if field.m() == 1 => field.element(v % field.p())?,
        ElemJson::Big(v) => field.element(*v)?,
        ElemJson::Coeffs(c) => field.from_coeffs(c)?,
    })
}

fn parse_exp(e: &ExpJson) -> CliResult<BigUint> {
    match e {
        ExpJson::Int(v) => Ok(BigUint::from(*v)),
        ExpJson::Text(s) => s.trim().parse().map_err(|_| {
            Failure::new(
                "parse_error",
                format!("exponent {s:?} is not a nonnegative integer"),
            )
        }),
    }
}

pub fn parse_poly(value: Value) -> CliResult<Poly> {
    let raw: PolyJson =
        serde_json::from_value(value).map_err(|e| Failure::new("parse_error", e.to_string()))?;
    let field = parse_field(&raw.field)?;
    let b = match &raw.b {
        Some(e) => parse_elem(&field, e)?,
        None => Fe::ZERO,
    };
    match (&raw.exponents, &raw.terms) {
        (Some(cols), None) => {
            let coeffs = raw
                .coeffs
                .as_ref()
                .ok_or_else(|| Failure::new("parse_error", "triangular input needs \"coeffs\""))?
                .iter()
                .map(|c| parse_elem(&field, c))
                .collect::<CliResult<Vec<_>>>()?;
            if let Some(n) = raw.n {
                if n != coeffs.len() || n != cols.len() {
                    return Err(Error::NotTriangular(format!(
                        "n = {n} but {} coefficients and {} exponent columns",
                        coeffs.len(),
                        cols.len()
                    ))
                    .into());
                }
            }
            let expo = cols
                .iter()
                .map(|col| col.iter().map(parse_exp).collect())
                .collect::<CliResult<Vec<Vec<_>>>>()?;
            Ok(Poly::Triangular(TriangularPoly::new(
                &field, coeffs, b, expo,
            )?))
        }
        (None, Some(terms)) => {
            if raw.coeffs.is_some() {
                return Err(Failure::new(
                    "parse_error",
                    "sparse input takes coefficients inside \"terms\"",
                ));
            }
            let n = match (raw.n, terms.first()) {
                (Some(n), _) => n,
                (None, Some(t)) => t.expo.len(),
                (None, None) => {
                    return Err(Failure::new(
                        "parse_error",
                        "empty \"terms\" needs an explicit \"n\"",
                    ))
                }
            };
            let terms = terms
                .iter()
                .map(|t| {
                    let expo = t
                        .expo
                        .iter()
                        .map(parse_exp)
                        .collect::<CliResult<Vec<_>>>()?;
                    Ok(Term {
                        coeff: parse_elem(&field, &t.coeff)?,
                        expo,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Poly::Sparse(SparsePoly::new(&field, n, terms, b)?))
        }
        _ => Err(Failure::new(
            "parse_error",
            "input needs exactly one of \"exponents\" (triangular) or \"terms\" (sparse)",
        )),
    }
}

/// A certificate matrix given as `{"M": [[...]]}` or a bare nested array.
pub fn parse_matrix(value: Value, modulus: u64) -> CliResult<ResidueMatrix> {
    let rows = match value {
        Value::Object(mut map) => map
            .remove("M")
            .ok_or_else(|| Failure::new("parse_error", "certificate object needs \"M\""))?,
        other => other,
    };
    let rows: Vec<Vec<i64>> =
        serde_json::from_value(rows).map_err(|e| Failure::new("parse_error", e.to_string()))?;
    Ok(ResidueMatrix::from_signed_rows(modulus, &rows)?)
}

pub fn field_json(field: &FieldSpec) -> Value {
    if field.m() == 1 {
        json!({ "p": field.p(), "m": 1 })
    } else {
        json!({ "p": field.p(), "m": field.m(), "modulus": field.modulus() })
    }
}

pub fn certificate_json(cert: &Certificate) -> Value {
    let target = match &cert.target {
        Target::Diagonal(e) => json!({ "diagonal": e }),
        Target::Explicit => json!("explicit"),
    };
    json!({ "M": cert.matrix.to_rows(), "total": cert.total, "target": target })
}

pub fn report_json(f: &TriangularPoly, report: &CountReport, timings: bool) -> Value {
    let mut out = json!({
        "field": field_json(f.field()),
        "n": f.n(),
        "N": report.n_roots.as_ref().map(|v| v.to_string()),
        "N_star_per_k": report.nstar_per_k.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "method": report.method.as_str(),
        "certificate": report.certificate.as_ref().map(certificate_json),
        "note": report.note,
    });
    if timings {
        out["timings_us"] = json!({
            "criterion": report.timings.criterion.as_micros() as u64,
            "counting": report.timings.counting.as_micros() as u64,
        });
    }
    out
}
