//! Closed-form root counts for fully triangular polynomials that are
//! totally *-equivalent to a linear or quadratic diagonal polynomial.
//!
//! Every count is assembled from the per-level values `N*(g_k)` through
//!
//! ```text
//! N(f) = [b = 0]·q^{n-1} + N*(g_n) + Σ_{k<n} N*(g_k)·q^{n-k-1}
//! ```
//!
//! and, independently, from the single-shot formulas for the whole
//! polynomial; the two must agree. Quadratic formulas are evaluated in
//! `Q[τ]/(τ² - η(-1)q)` so that no floating point is involved.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ffield::{Fe, FieldSpec};
use crate::oracle::{brute_force_count, DEFAULT_BUDGET};
use crate::polyform::TriangularPoly;
use crate::quadring::{discriminant, QuadRing, Zetas};
use crate::starequiv::{diagonal_equivalence, linear_criterion, quadratic_criterion, Certificate};

type Exact = QuadRing<BigRational>;

/// Quadratic class of the constant `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BClass {
    Zero,
    Square,
    NonSquare,
}

impl BClass {
    pub const ALL: [BClass; 3] = [BClass::Zero, BClass::Square, BClass::NonSquare];

    pub fn of(field: &FieldSpec, b: Fe) -> Result<BClass> {
        Ok(match field.quadratic_character(b)? {
            0 => BClass::Zero,
            1 => BClass::Square,
            _ => BClass::NonSquare,
        })
    }

    /// `η(b)`.
    pub fn eta(self) -> i64 {
        match self {
            BClass::Zero => 0,
            BClass::Square => 1,
            BClass::NonSquare => -1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == BClass::Zero
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BClass::Zero => "zero",
            BClass::Square => "square",
            BClass::NonSquare => "nonsquare",
        }
    }
}

fn require_odd(q: u64) -> Result<()> {
    if q.is_multiple_of(2) {
        Err(Error::EvenCharacteristic)
    } else {
        Ok(())
    }
}

fn big(q: u64) -> BigInt {
    BigInt::from(q)
}

fn pow(q: u64, e: usize) -> BigInt {
    big(q).pow(e as u32)
}

fn sign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

/// `q^e` for a possibly negative exponent.
fn qpow(q: u64, e: i64) -> BigRational {
    let p = BigRational::from_integer(big(q).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `N*(g_k)` for `g = a_1 x_1 + ... + a_n x_n - b`:
/// `((q-1)^k - (-1)^k)/q`, plus `(-1)^k` when `b = 0`.
pub fn nstar_linear_gk(k: u32, q: u64, b_zero: bool) -> BigInt {
    let alt = BigInt::from(sign(k % 2 == 1));
    let mut v = (big(q - 1).pow(k) - &alt) / big(q);
    if b_zero {
        v += alt;
    }
    v
}

/// `N(g)` for `g = Σ a_j x_j² - b` from the values `η(a_j) = ±1`.
pub fn quadratic_form_count(q: u64, classes: &[i8], b: BClass) -> Result<BigInt> {
    require_odd(q)?;
    if classes.is_empty() {
        return Err(Error::InvalidPolynomial("empty quadratic form".into()));
    }
    if let Some(c) = classes.iter().find(|&&c| c != 1 && c != -1) {
        return Err(Error::InvalidElement(format!("class {c} is not ±1")));
    }
    let n = classes.len();
    let eta_m1 = sign(q % 4 == 3);
    let eta_prod: i64 = classes.iter().map(|&c| i64::from(c)).product();
    let lead = pow(q, n - 1);
    Ok(if n.is_multiple_of(2) {
        let eta = eta_prod * sign(eta_m1 == -1 && (n / 2) % 2 == 1);
        let half = pow(q, (n - 2) / 2);
        if b.is_zero() {
            lead + eta * (pow(q, n / 2) - half)
        } else {
            lead - eta * half
        }
    } else if b.is_zero() {
        lead
    } else {
        let eta = eta_prod * b.eta() * sign(eta_m1 == -1 && ((n - 1) / 2) % 2 == 1);
        lead + eta * pow(q, (n - 1) / 2)
    })
}

/// `N(g_{i,j})`: roots in `F_q^{i+j}` of a diagonal quadratic form with `i`
/// square and `j` nonsquare coefficients, by the explicit sign formula.
pub fn n_gij(i: usize, j: usize, q: u64, b: BClass) -> Result<BigInt> {
    require_odd(q)?;
    let t = i + j;
    if t == 0 {
        return Err(Error::InvalidPolynomial("empty quadratic form".into()));
    }
    let half = (q - 1) / 2;
    let lead = pow(q, t - 1);
    let sj = sign(j % 2 == 1);
    Ok(if t.is_multiple_of(2) {
        // (-1)^{(q-1)t/4} = (-1)^{((q-1)/2)·(t/2)}
        let s = sj * sign((half * (t as u64 / 2)) % 2 == 1);
        if b.is_zero() {
            lead + s * (pow(q, t / 2) - pow(q, (t - 2) / 2))
        } else {
            lead - s * pow(q, (t - 2) / 2)
        }
    } else if b.is_zero() {
        lead
    } else {
        let s = sj * sign((half * ((t as u64 - 1) / 2)) % 2 == 1) * b.eta();
        lead + s * pow(q, (t - 1) / 2)
    })
}

/// `N(g_{0,0})`: the empty equation `0 = b`.
fn n_g00(b: BClass) -> BigInt {
    if b.is_zero() {
        BigInt::one()
    } else {
        BigInt::zero()
    }
}

/// `N*(g_{r,s})` by double binomial inversion of the `N(g_{i,j})`.
pub fn nstar_gk_inversion(r: usize, s: usize, q: u64, b: BClass) -> Result<BigInt> {
    require_odd(q)?;
    if r + s == 0 {
        return Err(Error::InvalidPolynomial("empty quadratic form".into()));
    }
    let mut acc = BigInt::zero();
    for i in 0..=r {
        for j in 0..=s {
            let n = if i + j == 0 {
                n_g00(b)
            } else {
                n_gij(i, j, q, b)?
            };
            let term =
                binomial(big(r as u64), big(i as u64)) * binomial(big(s as u64), big(j as u64)) * n;
            if (r + s + i + j).is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    Ok(acc)
}

/// The ζ-expression for `N*(g_{r,s})` as an element of `Q[τ]`, before any
/// integrality check.
///
/// For `b ≠ 0`:
/// `(q-1)^k/q - (ζ₁^rζ₂^s + ζ₂^rζ₁^s)/(2q) + η(b)(ζ₁^rζ₂^s - ζ₂^rζ₁^s)/(2τ)`;
/// for `b = 0`: `(q-1)^k/q + (q-1)(ζ₁^rζ₂^s + ζ₂^rζ₁^s)/(2q)`.
pub fn nstar_gk_closed_value(
    r: usize,
    s: usize,
    q: u64,
    b: BClass,
    zetas: &Zetas<BigRational>,
) -> Result<Exact> {
    require_odd(q)?;
    if r + s == 0 {
        return Err(Error::InvalidPolynomial("empty quadratic form".into()));
    }
    let disc = zetas.disc();
    let (sym, anti) = zetas.symmetric_pair(r as u32, s as u32);
    let base = Exact::from_scalar(ratio(big(q - 1).pow((r + s) as u32), big(q)), disc);
    let two_q = BigRational::from_integer(big(2 * q));
    Ok(if b.is_zero() {
        base + sym.scale(&ratio(big(q - 1), big(2 * q)))
    } else {
        let eta = BigRational::from_integer(BigInt::from(b.eta()));
        base - sym.div_scalar(&two_q)
            + anti
                .div_tau()
                .scale(&(eta / BigRational::from_integer(big(2))))
    })
}

fn integral(value: &Exact, what: impl FnOnce() -> String) -> Result<BigInt> {
    value
        .integral_value()
        .ok_or_else(|| Error::NonIntegralResult(format!("{}: {value:?}", what())))
}

/// `N*(g_{r,s})` from the ζ-expression, required to be an integer.
pub fn nstar_gk_closed(r: usize, s: usize, q: u64, b: BClass) -> Result<BigInt> {
    nstar_gk_closed_with(r, s, q, b, &Zetas::new(q))
}

/// [`nstar_gk_closed`] with caller-supplied constants.
pub fn nstar_gk_closed_with(
    r: usize,
    s: usize,
    q: u64,
    b: BClass,
    zetas: &Zetas<BigRational>,
) -> Result<BigInt> {
    let v = nstar_gk_closed_value(r, s, q, b, zetas)?;
    integral(&v, || format!("N*(g_{{{r},{s}}}) over q = {q}"))
}

/// Prefix counts of square and nonsquare coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsProfile {
    /// `r[k-1] = r(k)`
    pub r: Vec<usize>,
    /// `s[k-1] = s(k)`
    pub s: Vec<usize>,
    pub b_class: BClass,
}

impl RsProfile {
    /// Builds the profile from the classes `η(a_j)` directly.
    pub fn from_classes(classes: &[i8], b_class: BClass) -> Self {
        let (mut r, mut s) = (Vec::new(), Vec::new());
        let (mut rr, mut ss) = (0, 0);
        for &c in classes {
            if c == 1 {
                rr += 1;
            } else {
                ss += 1;
            }
            r.push(rr);
            s.push(ss);
        }
        RsProfile { r, s, b_class }
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }
}

pub fn rs_profile(f: &TriangularPoly) -> Result<RsProfile> {
    let field = f.field();
    require_odd(field.q())?;
    let classes = f
        .coeffs()
        .iter()
        .map(|&a| field.quadratic_character(a))
        .collect::<Result<Vec<i8>>>()?;
    Ok(RsProfile::from_classes(&classes, BClass::of(field, f.b())?))
}

/// `[b = 0]·q^{n-1} + N*_n + Σ_{k<n} N*_k·q^{n-k-1}` from known `N*_k`.
pub fn decomposition_sum(q: u64, b_zero: bool, nstar: &[BigInt]) -> BigInt {
    let n = nstar.len();
    let mut acc = if b_zero {
        pow(q, n - 1)
    } else {
        BigInt::zero()
    };
    for (idx, v) in nstar.iter().enumerate() {
        let k = idx + 1;
        acc += if k == n {
            v.clone()
        } else {
            v * pow(q, n - k - 1)
        };
    }
    acc
}

/// `N(f)` for fully triangular `f` from a source of `N*(g_k)`, `k = 1..=n`.
pub fn assemble_n(
    f: &TriangularPoly,
    mut nstar: impl FnMut(usize) -> Result<BigInt>,
) -> Result<BigInt> {
    if !f.is_fully_triangular() {
        return Err(Error::NotFullyTriangular);
    }
    let values = (1..=f.n()).map(&mut nstar).collect::<Result<Vec<_>>>()?;
    Ok(decomposition_sum(f.field().q(), f.b().is_zero(), &values))
}

/// `N(f)` when `f` is totally *-equivalent to a linear diagonal polynomial:
/// `(q^n - (-1)^n)/(q+1)` for `b ≠ 0`, `(2q^n + (-1)^n(q-1))/(q+1)` for `b = 0`.
pub fn linear_main_count(n: usize, q: u64, b_zero: bool) -> BigInt {
    let alt = BigInt::from(sign(n % 2 == 1));
    let qn = pow(q, n);
    let num = if b_zero {
        2 * qn + alt * big(q - 1)
    } else {
        qn - alt
    };
    num / big(q + 1)
}

/// The per-level ζ-values for a profile, `k = 1..=n`.
fn closed_values(profile: &RsProfile, q: u64, zetas: &Zetas<BigRational>) -> Result<Vec<Exact>> {
    (0..profile.n())
        .map(|i| nstar_gk_closed_value(profile.r[i], profile.s[i], q, profile.b_class, zetas))
        .collect()
}

/// The single-shot quadratic formula, written out term by term.
fn quadratic_display(profile: &RsProfile, q: u64, zetas: &Zetas<BigRational>) -> Exact {
    let n = profile.n() as i64;
    let disc = zetas.disc();
    let qm1 = BigRational::from_integer(big(q - 1));
    let pairs: Vec<(Exact, Exact)> = (0..profile.n())
        .map(|i| zetas.symmetric_pair(profile.r[i] as u32, profile.s[i] as u32))
        .collect();
    let head = qpow(q, n - 2) * &qm1;
    if profile.b_class.is_zero() {
        let mut acc = Exact::from_scalar(qpow(q, n - 1) + head, disc);
        let (sym_n, _) = &pairs[profile.n() - 1];
        acc = acc + sym_n.scale(&(qm1.clone() / BigRational::from_integer(big(2 * q))));
        let half = qm1 / BigRational::from_integer(big(2));
        for (k, (sym, _)) in pairs[..profile.n() - 1].iter().enumerate() {
            let k = k as i64 + 1;
            acc = acc + sym.scale(&(qpow(q, n - k - 2) * &half));
        }
        acc
    } else {
        let eta_half = ratio(BigInt::from(profile.b_class.eta()), big(2));
        let two_q = BigRational::from_integer(big(2 * q));
        let level =
            |(sym, anti): &(Exact, Exact)| anti.div_tau().scale(&eta_half) - sym.div_scalar(&two_q);
        let mut acc = Exact::from_scalar(head, disc) + level(&pairs[profile.n() - 1]);
        for (k, pair) in pairs[..profile.n() - 1].iter().enumerate() {
            let k = k as i64 + 1;
            acc = acc + level(pair).scale(&qpow(q, n - k - 1));
        }
        acc
    }
}

/// `N(f)` when `f` is totally *-equivalent to `Σ a_j x_j² - b` with the given
/// profile. The single-shot formula is cross-checked against the sum of the
/// per-level closed forms.
pub fn quadratic_main_count(profile: &RsProfile, q: u64) -> Result<BigInt> {
    quadratic_main_count_with(profile, q, &Zetas::new(q))
}

pub fn quadratic_main_count_with(
    profile: &RsProfile,
    q: u64,
    zetas: &Zetas<BigRational>,
) -> Result<BigInt> {
    require_odd(q)?;
    if profile.n() == 0 {
        return Err(Error::InvalidPolynomial("empty profile".into()));
    }
    let n = profile.n();
    let disc = zetas.disc();
    let levels = closed_values(profile, q, zetas)?;
    let mut summed = if profile.b_class.is_zero() {
        Exact::from_bigint(&pow(q, n - 1), disc)
    } else {
        Exact::zero(disc)
    };
    for (idx, v) in levels.into_iter().enumerate() {
        let k = idx + 1;
        summed = summed
            + if k == n {
                v
            } else {
                v.scale(&qpow(q, (n - k - 1) as i64))
            };
    }
    let displayed = quadratic_display(profile, q, zetas);
    if displayed != summed {
        return Err(Error::FormulaMismatch(format!(
            "single-shot {displayed:?} vs summed {summed:?}"
        )));
    }
    integral(&displayed, || format!("quadratic N(f) over q = {q}"))
}

/// `N(f)` when all coefficients share one quadratic class `ε`, through the
/// geometric-sum form `G(ζ) = (ζ^{n+1} - (q-1)ζ^n - ζq^{n-1})/(ζ - q)`.
pub fn all_squares_count(n: usize, q: u64, eps: i8, b: BClass) -> Result<BigInt> {
    require_odd(q)?;
    if n == 0 {
        return Err(Error::InvalidPolynomial("no variables".into()));
    }
    let disc = discriminant(q);
    let z = Zetas::<BigRational>::new(q);
    let qn1 = Exact::from_bigint(&pow(q, n - 1), disc);
    let qq = Exact::from_int(q as i64, disc);
    let g = |zeta: &Exact| -> Result<Exact> {
        let num = zeta.pow(n as u32 + 1)
            - zeta
                .pow(n as u32)
                .scale(&BigRational::from_integer(big(q - 1)))
            - zeta.clone() * qn1.clone();
        num.checked_div(&(zeta.clone() - qq.clone()))
            .ok_or(Error::DivisionByZero)
    };
    let (g1, g2) = (g(&z.z1)?, g(&z.z2)?);
    let nn = n as i64;
    let value = if b.is_zero() {
        let lead = BigRational::from_integer(2 * pow(q, n - 1)) - qpow(q, nn - 2);
        Exact::from_scalar(lead, disc) + (g1 + g2).scale(&ratio(big(q - 1), big(2 * q)))
    } else {
        let lead = qpow(q, nn - 2) * BigRational::from_integer(big(q - 1));
        let eta = ratio(BigInt::from(i64::from(eps) * b.eta()), big(2));
        Exact::from_scalar(lead, disc)
            - (g1.clone() + g2.clone()).div_scalar(&BigRational::from_integer(big(2 * q)))
            + (g1 - g2).div_tau().scale(&eta)
    };
    integral(&value, || format!("single-class N(f) over q = {q}"))
}

/// How a [`CountReport`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    LinearClosed,
    QuadraticClosed,
    Oracle,
    Charsum,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::LinearClosed => "linear_closed",
            Method::QuadraticClosed => "quadratic_closed",
            Method::Oracle => "oracle",
            Method::Charsum => "charsum",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub criterion: Duration,
    pub counting: Duration,
}

#[derive(Clone, Debug)]
pub struct CountReport {
    /// `None` only when the oracle was needed but not allowed.
    pub n_roots: Option<BigInt>,
    /// `N*(f_k)` for `k = 1..=n`.
    pub nstar_per_k: Vec<BigInt>,
    pub method: Method,
    pub certificate: Option<Certificate>,
    pub note: Option<String>,
    pub timings: Timings,
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub allow_oracle: bool,
    pub budget: u64,
    pub threads: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            allow_oracle: true,
            budget: DEFAULT_BUDGET,
            threads: 0,
        }
    }
}

/// Counts the roots of a fully triangular `f`, trying the linear closed
/// form, then the quadratic one, then exhaustive enumeration.
pub fn count_roots(f: &TriangularPoly, opts: &CountOptions) -> Result<CountReport> {
    if !f.is_fully_triangular() {
        return Err(Error::NotFullyTriangular);
    }
    let field = f.field();
    let q = field.q();
    let n = f.n();
    let b_zero = f.b().is_zero();
    let started = Instant::now();

    if linear_criterion(f) {
        let cert = diagonal_equivalence(f, &vec![1; n])?;
        let criterion = started.elapsed();
        let t0 = Instant::now();
        let per_k: Vec<BigInt> = (1..=n as u32)
            .map(|k| nstar_linear_gk(k, q, b_zero))
            .collect();
        let total = decomposition_sum(q, b_zero, &per_k);
        let direct = linear_main_count(n, q, b_zero);
        if total != direct {
            return Err(Error::FormulaMismatch(format!(
                "linear: summed {total} vs single-shot {direct}"
            )));
        }
        return Ok(CountReport {
            n_roots: Some(total),
            nstar_per_k: per_k,
            method: Method::LinearClosed,
            certificate: cert,
            note: None,
            timings: Timings {
                criterion,
                counting: t0.elapsed(),
            },
        });
    }

    if quadratic_criterion(f) {
        let cert = diagonal_equivalence(f, &vec![2; n])?;
        let criterion = started.elapsed();
        let t0 = Instant::now();
        let profile = rs_profile(f)?;
        let per_k = (0..n)
            .map(|i| nstar_gk_closed(profile.r[i], profile.s[i], q, profile.b_class))
            .collect::<Result<Vec<_>>>()?;
        let total = decomposition_sum(q, b_zero, &per_k);
        let direct = quadratic_main_count(&profile, q)?;
        if total != direct {
            return Err(Error::FormulaMismatch(format!(
                "quadratic: summed {total} vs single-shot {direct}"
            )));
        }
        return Ok(CountReport {
            n_roots: Some(total),
            nstar_per_k: per_k,
            method: Method::QuadraticClosed,
            certificate: cert,
            note: None,
            timings: Timings {
                criterion,
                counting: t0.elapsed(),
            },
        });
    }

    let criterion = started.elapsed();
    let reason = "neither the linear nor the quadratic criterion holds";
    if !opts.allow_oracle {
        return Ok(CountReport {
            n_roots: None,
            nstar_per_k: Vec::new(),
            method: Method::Oracle,
            certificate: None,
            note: Some(format!("{reason}; enumeration disabled")),
            timings: Timings {
                criterion,
                counting: Duration::ZERO,
            },
        });
    }
    let t0 = Instant::now();
    let total = brute_force_count(&f.to_sparse(), opts.budget, opts.threads)?.n;
    let per_k = (1..=n)
        .map(|k| {
            let fk = f.truncate(k)?.to_sparse();
            Ok(BigInt::from(
                brute_force_count(&fk, opts.budget, opts.threads)?.n_star,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountReport {
        n_roots: Some(BigInt::from(total)),
        nstar_per_k: per_k,
        method: Method::Oracle,
        certificate: None,
        note: Some(format!("{reason}; counted by enumeration")),
        timings: Timings {
            criterion,
            counting: t0.elapsed(),
        },
    })
}

/// True when `v` lies in `[0, hi]`.
pub fn in_range(v: &BigInt, hi: &BigInt) -> bool {
    !v.is_negative() && v <= hi
}
