//! The reproduction suite: ten numbered checks with runtime limits, run by
//! the `acceptance` test target and by `tricount selftest`.
//!
//! Random corpora come from fixed ChaCha seeds so every run sees the same
//! polynomials.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counting::{
    count_roots, linear_main_count, nstar_gk_closed_value, nstar_gk_inversion,
    quadratic_form_count, BClass, CountOptions, Method,
};
use crate::error::Result;
use crate::ffield::{Fe, FieldSpec};
use crate::modring::{gcd, ResidueMatrix};
use crate::oracle::{
    brute_force_count, charsum_nstar, decomposition_rhs, root_set, DEFAULT_BUDGET,
};
use crate::polyform::{SparsePoly, Term, TriangularPoly};
use crate::quadring::Zetas;
use crate::starequiv::{
    star_equivalent_general, upper_triangular_certificates, verify_certificate, EquivStatus,
};

#[derive(Clone, Copy, Debug, Default)]
pub struct SelftestOptions {
    /// Replace `ζ₂` by `-ζ₂` in the closed forms under test.
    pub flip_zeta2: bool,
    /// Worker threads for enumeration; 0 means rayon's default.
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

type Check = fn(&SelftestOptions) -> std::result::Result<String, String>;

const CRITERIA: [(u8, &str, Option<u64>, Check); 10] = [
    (1, "F31 reproduction", Some(5), f31_reproduction),
    (2, "F10007 reproduction", None, f10007_reproduction),
    (3, "F5 star-equivalent pair", None, f5_pair),
    (4, "F7 certificate", Some(1), f7_certificate),
    (5, "dual-path identity", Some(1), dual_path),
    (6, "closed form vs enumeration", Some(60), closed_vs_oracle),
    (7, "character-sum oracle", Some(60), charsum_suite),
    (8, "quadratic-form counts", Some(30), quadratic_forms),
    (9, "integrality and ranges", None, integrality),
    (10, "decomposition identity", Some(30), decomposition),
];

pub fn criterion_ids() -> impl Iterator<Item = u8> {
    CRITERIA.iter().map(|c| c.0)
}

pub fn run_criterion(id: u8, opts: &SelftestOptions) -> Option<Outcome> {
    let &(id, name, limit, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let limit = limit.map(Duration::from_secs);
    let start = Instant::now();
    let result = check(opts);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(l) = limit {
        if elapsed > l {
            passed = false;
            detail = format!("{detail}; exceeded {:.0?} limit", l);
        }
    }
    Some(Outcome {
        id,
        name,
        passed,
        detail,
        elapsed,
        limit,
    })
}

pub fn run_all(opts: &SelftestOptions) -> Vec<Outcome> {
    criterion_ids()
        .filter_map(|id| run_criterion(id, opts))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// The field of order `q`, for prime powers `q`.
pub fn field_of_order(q: u64) -> Arc<FieldSpec> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2");
    let mut m = 0;
    let mut r = q;
    while r > 1 {
        assert!(r.is_multiple_of(p), "{q} is not a prime power");
        r /= p;
        m += 1;
    }
    FieldSpec::new(p, m).expect("valid prime power")
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x7269_6361_6e67_6c65 ^ stream)
}

fn nonzero(rng: &mut ChaCha8Rng, q: u64) -> Fe {
    Fe::from_raw(rng.gen_range(1..q))
}

fn sparse(field: &Arc<FieldSpec>, terms: &[(u64, &[u64])], b: u64) -> SparsePoly {
    let n = terms[0].1.len();
    let terms = terms
        .iter()
        .map(|&(c, e)| Term::new(field.element(c).expect("in field"), e))
        .collect();
    SparsePoly::new(field, n, terms, field.element(b).expect("in field")).expect("valid")
}

/// Fully triangular polynomials satisfying the linear criterion.
pub fn linear_corpus(count: usize, seed: u64) -> Vec<TriangularPoly> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let q = [3, 5, 7, 9, 11, 13][r.gen_range(0..6)];
            random_fully_triangular(&mut r, &field_of_order(q), |r, order, diag| loop {
                let d = r.gen_range(1..=50u64);
                if !diag || gcd(d % order, order) == 1 {
                    return d;
                }
            })
        })
        .collect()
}

/// Fully triangular polynomials satisfying the quadratic criterion.
pub fn quadratic_corpus(count: usize, seed: u64) -> Vec<TriangularPoly> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let q = [3, 5, 7, 9, 11, 13][r.gen_range(0..6)];
            random_fully_triangular(&mut r, &field_of_order(q), |r, order, diag| loop {
                let d = 2 * r.gen_range(1..=25u64);
                if !diag || gcd(d % order, order) == 2 {
                    return d;
                }
            })
        })
        .collect()
}

/// Arbitrary fully triangular polynomials over the fields of order ≤ 9.
pub fn decomposition_corpus(per_field: usize, seed: u64) -> Vec<TriangularPoly> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let field = field_of_order(q);
        for i in 0..per_field {
            let mut f = random_fully_triangular(&mut r, &field, |r, _, _| r.gen_range(1..=20));
            // alternate the constant between zero and nonzero
            let b = if i % 2 == 0 {
                Fe::ZERO
            } else {
                nonzero(&mut r, q)
            };
            let cols = f.columns().to_vec();
            f = TriangularPoly::new(&field, f.coeffs().to_vec(), b, cols).expect("valid");
            out.push(f);
        }
    }
    out
}

fn random_fully_triangular(
    r: &mut ChaCha8Rng,
    field: &Arc<FieldSpec>,
    mut exponent: impl FnMut(&mut ChaCha8Rng, u64, bool) -> u64,
) -> TriangularPoly {
    let q = field.q();
    let order = field.order();
    let n = r.gen_range(1..=3usize);
    let coeffs = (0..n).map(|_| nonzero(r, q)).collect();
    let b = if r.gen_bool(0.3) {
        Fe::ZERO
    } else {
        nonzero(r, q)
    };
    let expo = (0..n)
        .map(|j| {
            (0..=j)
                .map(|i| BigUint::from(exponent(r, order, i == j)))
                .collect()
        })
        .collect();
    TriangularPoly::new(field, coeffs, b, expo).expect("positive exponents")
}

/// Sparse polynomials with `n ≤ 3` variables and `m ≤ 4` nonconstant terms.
pub fn sparse_corpus(q: u64, count: usize, seed: u64) -> Vec<SparsePoly> {
    let field = field_of_order(q);
    let mut r = rng(seed ^ q.rotate_left(17));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = r.gen_range(1..=3usize);
        let m = r.gen_range(1..=4usize);
        let mut seen = Vec::new();
        let mut terms = Vec::new();
        for _ in 0..m {
            let e: Vec<u64> = (0..n).map(|_| r.gen_range(0..=2 * q)).collect();
            if e.iter().all(|&x| x == 0) || seen.contains(&e) {
                continue;
            }
            seen.push(e.clone());
            terms.push(Term::new(nonzero(&mut r, q), &e));
        }
        if terms.is_empty() {
            continue;
        }
        let b = if r.gen_bool(0.3) {
            Fe::ZERO
        } else {
            nonzero(&mut r, q)
        };
        out.push(SparsePoly::new(&field, n, terms, b).expect("distinct exponents"));
    }
    out
}

fn f31_reproduction(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let k = FieldSpec::new(31, 1).map_err(|e| e.to_string())?;
    let f = sparse(
        &k,
        &[(11, &[13, 0, 0]), (5, &[21, 19, 0]), (12, &[2, 3, 17])],
        0,
    );
    let g = sparse(
        &k,
        &[(11, &[1, 0, 0]), (5, &[0, 1, 0]), (12, &[0, 0, 1])],
        0,
    );
    let bf = ok(brute_force_count(&f, DEFAULT_BUDGET, opts.threads))?;
    let bg = ok(brute_force_count(&g, DEFAULT_BUDGET, opts.threads))?;
    ensure((bf.n, bf.n_star) == (1861, 870), || {
        format!("N(f), N*(f) = {}, {}", bf.n, bf.n_star)
    })?;
    ensure((bg.n, bg.n_star) == (961, 870), || {
        format!("N(g), N*(g) = {}, {}", bg.n, bg.n_star)
    })?;
    let cs = ok(charsum_nstar(&f, DEFAULT_BUDGET))?;
    ensure(cs == 870, || format!("character sum gave {cs}"))?;
    let tri = TriangularPoly::from_u64(&k, &[11, 5, 12], 0, &[&[13], &[21, 19], &[2, 3, 17]])
        .map_err(|e| e.to_string())?;
    let report = ok(count_roots(&tri, &CountOptions::default()))?;
    ensure(report.method == Method::LinearClosed, || {
        format!("dispatched to {}", report.method.as_str())
    })?;
    ensure(report.n_roots == Some(1861.into()), || {
        format!("closed form gave {:?}", report.n_roots)
    })?;
    Ok("N(f)=1861 N*(f)=870 N(g)=961 N*(g)=870 charsum=870 linear_closed=1861".into())
}

fn f10007_reproduction(_: &SelftestOptions) -> std::result::Result<String, String> {
    let k = FieldSpec::new(10007, 1).map_err(|e| e.to_string())?;
    // x^1001 + x^2001 y^3001 + x^4001 y^5001 z^6001 + 7001
    let b = k.neg(k.element(7001).map_err(|e| e.to_string())?);
    let f = TriangularPoly::new(
        &k,
        vec![Fe::ONE; 3],
        b,
        [vec![1001u64], vec![2001, 3001], vec![4001, 5001, 6001]]
            .into_iter()
            .map(|c| c.into_iter().map(BigUint::from).collect())
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let report = ok(count_roots(&f, &CountOptions::default()))?;
    ensure(report.method == Method::LinearClosed, || {
        format!("dispatched to {}", report.method.as_str())
    })?;
    let want: Vec<BigInt> = vec![1.into(), 10005.into(), 100110031.into()];
    ensure(report.nstar_per_k == want, || {
        format!("N*(g_k) = {:?}", report.nstar_per_k)
    })?;
    let single = linear_main_count(3, 10007, false);
    ensure(report.n_roots.as_ref() == Some(&single), || {
        format!("summed {:?} vs single-shot {single}", report.n_roots)
    })?;
    ensure(single == 100130043.into(), || format!("N(f) = {single}"))?;
    Ok("N*(g_1..3) = 1, 10005, 100110031; N(f) = 100130043 both ways".into())
}

fn f5_pair(_: &SelftestOptions) -> std::result::Result<String, String> {
    let k = FieldSpec::new(5, 1).map_err(|e| e.to_string())?;
    let f = sparse(&k, &[(1, &[2, 3]), (1, &[1, 2])], 0);
    let g = sparse(&k, &[(1, &[1, 1]), (1, &[3, 2])], 0);
    ensure(star_equivalent_general(&f, &g), || {
        "Howell test says not equivalent".into()
    })?;
    let rf = ok(root_set(&f, true, DEFAULT_BUDGET))?;
    let rg = ok(root_set(&g, true, DEFAULT_BUDGET))?;
    ensure(rf.len() == rg.len(), || {
        format!("{} vs {} roots", rf.len(), rg.len())
    })?;
    ensure(rf != rg, || "root sets coincide".into())?;
    Ok(format!(
        "star-equivalent; {} roots each, sets differ",
        rf.len()
    ))
}

fn f7_certificate(_: &SelftestOptions) -> std::result::Result<String, String> {
    let k = FieldSpec::new(7, 1).map_err(|e| e.to_string())?;
    let f =
        TriangularPoly::from_u64(&k, &[1, 1], 0, &[&[1], &[3, 5]]).map_err(|e| e.to_string())?;
    let g =
        TriangularPoly::from_u64(&k, &[1, 1], 0, &[&[2], &[4, 1]]).map_err(|e| e.to_string())?;
    let m = ok(ResidueMatrix::from_rows(
        6,
        &[[1, 0, 0], [1, 1, 0], [0, 0, 5]],
    ))?;
    let status = ok(verify_certificate(&f, &g, &m))?;
    ensure(status == EquivStatus::TotallyStarEquivalent, || {
        format!("known matrix gives {}", status.as_str())
    })?;
    let found = ok(upper_triangular_certificates(&f, &g, 1 << 20))?;
    ensure(found.is_empty(), || {
        format!("{} upper-triangular certificates exist", found.len())
    })?;
    Ok("known M verifies; no upper-triangular certificate among 6^6 candidates".into())
}

fn zetas(q: u64, opts: &SelftestOptions) -> Zetas<BigRational> {
    if opts.flip_zeta2 {
        Zetas::with_flipped_zeta2(q)
    } else {
        Zetas::new(q)
    }
}

const DUAL_FIELDS: [u64; 6] = [3, 5, 7, 9, 11, 13];

fn dual_path(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let mut checked = 0;
    for q in DUAL_FIELDS {
        let z = zetas(q, opts);
        for k in 1..=8usize {
            for r in 0..=k {
                for b in BClass::ALL {
                    let s = k - r;
                    let closed = ok(nstar_gk_closed_value(r, s, q, b, &z))?;
                    let inv = ok(nstar_gk_inversion(r, s, q, b))?;
                    ensure(closed.integral_value() == Some(inv.clone()), || {
                        format!(
                            "q={q} r={r} s={s} b={}: closed {closed:?} vs inversion {inv}",
                            b.as_str()
                        )
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (q, r, s, b) cases agree exactly"))
}

const CORPUS_SIZE: usize = 200;
const LINEAR_SEED: u64 = 1;
const QUADRATIC_SEED: u64 = 2;
const SPARSE_SEED: u64 = 3;
const DECOMPOSITION_SEED: u64 = 4;

fn closed_vs_oracle(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let mut counts = [0usize; 2];
    for (slot, corpus, method) in [
        (
            0,
            linear_corpus(CORPUS_SIZE, LINEAR_SEED),
            Method::LinearClosed,
        ),
        (
            1,
            quadratic_corpus(CORPUS_SIZE, QUADRATIC_SEED),
            Method::QuadraticClosed,
        ),
    ] {
        for f in &corpus {
            let report = ok(count_roots(f, &CountOptions::default()))?;
            ensure(report.method == method, || {
                format!("{f:?} dispatched to {}", report.method.as_str())
            })?;
            let brute = ok(brute_force_count(
                &f.to_sparse(),
                DEFAULT_BUDGET,
                opts.threads,
            ))?
            .n;
            ensure(report.n_roots == Some(brute.into()), || {
                format!("{f:?}: closed {:?} vs enumeration {brute}", report.n_roots)
            })?;
            counts[slot] += 1;
        }
    }
    Ok(format!(
        "{} linear and {} quadratic instances match",
        counts[0], counts[1]
    ))
}

const CHARSUM_FIELDS: [u64; 5] = [3, 5, 7, 9, 13];

fn charsum_suite(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let mut total = 0;
    for q in CHARSUM_FIELDS {
        for f in sparse_corpus(q, 100, SPARSE_SEED) {
            let cs = ok(charsum_nstar(&f, DEFAULT_BUDGET))?;
            let brute = ok(brute_force_count(&f, DEFAULT_BUDGET, opts.threads))?.n_star;
            ensure(cs == brute, || {
                format!("q={q} {f:?}: character sum {cs} vs enumeration {brute}")
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} sparse polynomials agree"))
}

/// Every `±1` pattern of length `n`.
fn sign_patterns(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u32 << n).map(move |mask| {
        (0..n)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

fn quadratic_forms(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let mut checked = 0;
    for q in [3u64, 5, 7, 9] {
        let k = field_of_order(q);
        // the generator is a nonsquare
        let nonsq = k.generator();
        for n in 1..=4 {
            for pattern in sign_patterns(n) {
                for (b, class) in [
                    (Fe::ZERO, BClass::Zero),
                    (Fe::ONE, BClass::Square),
                    (nonsq, BClass::NonSquare),
                ] {
                    let terms = pattern
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| {
                            let mut e = vec![0u64; n];
                            e[i] = 2;
                            Term::new(if c == 1 { Fe::ONE } else { nonsq }, &e)
                        })
                        .collect();
                    let g = ok(SparsePoly::new(&k, n, terms, b))?;
                    let brute = ok(brute_force_count(&g, DEFAULT_BUDGET, opts.threads))?.n;
                    let formula = ok(quadratic_form_count(q, &pattern, class))?;
                    ensure(formula == brute.into(), || {
                        format!(
                            "q={q} {pattern:?} b={}: formula {formula} vs enumeration {brute}",
                            class.as_str()
                        )
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} sign patterns agree"))
}

fn integrality(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let mut values = 0;
    let in_range = |v: &BigInt, hi: BigInt| v.sign() != num_bigint::Sign::Minus && *v <= hi;
    // suite 5
    for q in DUAL_FIELDS {
        let z = zetas(q, opts);
        for k in 1..=8usize {
            for r in 0..=k {
                for b in BClass::ALL {
                    let v = ok(nstar_gk_closed_value(r, k - r, q, b, &z))?;
                    let int = v
                        .integral_value()
                        .ok_or_else(|| format!("q={q} r={r} s={}: {v:?}", k - r))?;
                    ensure(in_range(&int, BigInt::from(q - 1).pow(k as u32)), || {
                        format!("N*(g_{{{r},{}}}) = {int} out of range for q={q}", k - r)
                    })?;
                    values += 1;
                }
            }
        }
    }
    // suite 6
    for f in quadratic_corpus(CORPUS_SIZE, QUADRATIC_SEED) {
        let q = f.field().q();
        let profile = ok(crate::counting::rs_profile(&f))?;
        let z = zetas(q, opts);
        for k in 0..f.n() {
            let v = ok(nstar_gk_closed_value(
                profile.r[k],
                profile.s[k],
                q,
                profile.b_class,
                &z,
            ))?;
            let int = v
                .integral_value()
                .ok_or_else(|| format!("{f:?} level {}: {v:?}", k + 1))?;
            ensure(
                in_range(&int, BigInt::from(q - 1).pow(k as u32 + 1)),
                || format!("{f:?} level {}: {int} out of range", k + 1),
            )?;
            values += 1;
        }
        let total = ok(crate::counting::quadratic_main_count_with(&profile, q, &z))?;
        ensure(in_range(&total, BigInt::from(q).pow(f.n() as u32)), || {
            format!("{f:?}: N = {total} out of range")
        })?;
        values += 1;
    }
    for f in linear_corpus(CORPUS_SIZE, LINEAR_SEED) {
        let q = f.field().q();
        let report = ok(count_roots(&f, &CountOptions::default()))?;
        for (k, v) in report.nstar_per_k.iter().enumerate() {
            ensure(in_range(v, BigInt::from(q - 1).pow(k as u32 + 1)), || {
                format!("{f:?}: N*_{} = {v}", k + 1)
            })?;
        }
        let n = report.n_roots.unwrap_or_default();
        ensure(in_range(&n, BigInt::from(q).pow(f.n() as u32)), || {
            format!("{f:?}: N = {n}")
        })?;
        values += 1;
    }
    // suite 8
    for q in [3u64, 5, 7, 9] {
        for n in 1..=4 {
            for pattern in sign_patterns(n) {
                for b in BClass::ALL {
                    let v = ok(quadratic_form_count(q, &pattern, b))?;
                    ensure(in_range(&v, BigInt::from(q).pow(n as u32)), || {
                        format!("q={q} {pattern:?}: {v}")
                    })?;
                    values += 1;
                }
            }
        }
    }
    Ok(format!("{values} values integral and in range"))
}

fn decomposition(opts: &SelftestOptions) -> std::result::Result<String, String> {
    let corpus = decomposition_corpus(40, DECOMPOSITION_SEED);
    let (mut zero, mut nonzero) = (0, 0);
    for f in &corpus {
        let n = ok(brute_force_count(
            &f.to_sparse(),
            DEFAULT_BUDGET,
            opts.threads,
        ))?
        .n;
        let (rhs, _) = ok(decomposition_rhs(f, DEFAULT_BUDGET, opts.threads))?;
        ensure(rhs == n.into(), || {
            format!("{f:?}: N = {n}, decomposition = {rhs}")
        })?;
        if f.b().is_zero() {
            zero += 1;
        } else {
            nonzero += 1;
        }
    }
    ensure(zero > 0 && nonzero > 0, || "corpus misses a branch".into())?;
    Ok(format!(
        "{} polynomials ({zero} with b = 0, {nonzero} with b ≠ 0)",
        corpus.len()
    ))
}
