mod common;

use num_bigint::BigInt;
use num_integer::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricount::counting::{
    all_squares_count, count_roots, n_gij, nstar_gk_closed, nstar_gk_inversion,
    quadratic_main_count, BClass, CountOptions, Method, RsProfile,
};
use tricount::ffield::FieldSpec;
use tricount::polyform::TriangularPoly;
use tricount::quadring::Zetas;

fn nstar_gij(i: usize, j: usize, q: u64, b: BClass) -> BigInt {
    if i + j == 0 {
        BigInt::from(u8::from(b.is_zero()))
    } else {
        nstar_gk_closed(i, j, q, b).unwrap()
    }
}

#[test]
fn forward_identity() {
    for q in [3u64, 5, 7, 9, 11, 13] {
        for b in BClass::ALL {
            for r in 0..=6usize {
                for s in 0..=(6 - r) {
                    if r + s == 0 {
                        continue;
                    }
                    let mut sum = BigInt::from(0);
                    for i in 0..=r {
                        for j in 0..=s {
                            sum += binomial(BigInt::from(r), BigInt::from(i))
                                * binomial(BigInt::from(s), BigInt::from(j))
                                * nstar_gij(i, j, q, b);
                        }
                    }
                    assert_eq!(sum, n_gij(r, s, q, b).unwrap(), "q={q} r={r} s={s} {b:?}");
                }
            }
        }
    }
}

#[test]
fn closed_and_inverted_levels_match_enumeration() {
    for p in [3u64, 5, 7, 11, 13] {
        let nonsq = (2..p).find(|&a| common::legendre(a, p) == -1).unwrap();
        for r in 0..=2usize {
            for s in 0..=(3 - r) {
                if r + s == 0 {
                    continue;
                }
                let mut terms = Vec::new();
                for idx in 0..r + s {
                    let mut e = vec![0u64; r + s];
                    e[idx] = 2;
                    terms.push((if idx < r { 1 } else { nonsq }, e));
                }
                for (b, class) in [
                    (0, BClass::Zero),
                    (1, BClass::Square),
                    (nonsq, BClass::NonSquare),
                ] {
                    let want = BigInt::from(common::count(p, r + s, &terms, b, true));
                    assert_eq!(nstar_gk_closed(r, s, p, class).unwrap(), want);
                    assert_eq!(nstar_gk_inversion(r, s, p, class).unwrap(), want);
                }
            }
        }
    }
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    diag: impl Fn(&mut ChaCha8Rng) -> u64,
    off: impl Fn(&mut ChaCha8Rng) -> u64,
) -> Vec<Vec<u64>> {
    (0..n)
        .map(|j| {
            (0..=j)
                .map(|i| if i == j { diag(rng) } else { off(rng) })
                .collect()
        })
        .collect()
}

fn naive_n(p: u64, coeffs: &[u64], b: u64, cols: &[Vec<u64>]) -> u64 {
    common::count(
        p,
        coeffs.len(),
        &common::triangular_terms(coeffs, cols),
        b,
        false,
    )
}

fn tri(p: u64, coeffs: &[u64], b: u64, cols: &[Vec<u64>]) -> TriangularPoly {
    let k = FieldSpec::new(p, 1).unwrap();
    let refs: Vec<&[u64]> = cols.iter().map(Vec::as_slice).collect();
    TriangularPoly::from_u64(&k, coeffs, b, &refs).unwrap()
}

/// Linear-criterion instances with different coefficients have one count.
#[test]
fn linear_count_ignores_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p in [3u64, 5, 7, 11, 13] {
        for n in 1..=3 {
            let unit = |r: &mut ChaCha8Rng| loop {
                let d = r.gen_range(1..=40u64);
                if num_integer::gcd(d, p - 1) == 1 {
                    return d;
                }
            };
            let cols = random_instance(&mut rng, n, unit, |r| r.gen_range(1..=40));
            for b in [0u64, 1] {
                let c1: Vec<u64> = (0..n).map(|_| rng.gen_range(1..p)).collect();
                let c2: Vec<u64> = c1.iter().map(|c| c % (p - 1) + 1).collect();
                let n1 = naive_n(p, &c1, b, &cols);
                let n2 = naive_n(p, &c2, b, &cols);
                assert_eq!(n1, n2, "p={p} cols={cols:?}");
                let report = count_roots(&tri(p, &c1, b, &cols), &CountOptions::default()).unwrap();
                assert_eq!(report.method, Method::LinearClosed);
                assert_eq!(report.n_roots, Some(n1.into()));
            }
        }
    }
}

/// Quadratic-criterion instances only depend on the square classes.
#[test]
fn quadratic_count_depends_on_square_classes_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for p in [5u64, 7, 11, 13] {
        let squares: Vec<u64> = (1..p).filter(|&a| common::legendre(a, p) == 1).collect();
        let nonsquares: Vec<u64> = (1..p).filter(|&a| common::legendre(a, p) == -1).collect();
        for n in 1..=3 {
            let diag = |r: &mut ChaCha8Rng| loop {
                let d = 2 * r.gen_range(1..=20u64);
                if num_integer::gcd(d, p - 1) == 2 {
                    return d;
                }
            };
            let cols = random_instance(&mut rng, n, diag, |r| 2 * r.gen_range(1..=20));
            let classes: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let pick = |rng: &mut ChaCha8Rng| -> Vec<u64> {
                classes
                    .iter()
                    .map(|&sq| {
                        let pool = if sq { &squares } else { &nonsquares };
                        pool[rng.gen_range(0..pool.len())]
                    })
                    .collect()
            };
            let (c1, c2) = (pick(&mut rng), pick(&mut rng));
            for b in [0u64, squares[1 % squares.len()], nonsquares[0]] {
                let n1 = naive_n(p, &c1, b, &cols);
                assert_eq!(n1, naive_n(p, &c2, b, &cols), "p={p} cols={cols:?} b={b}");
                let f = tri(p, &c2, b, &cols);
                let report = count_roots(&f, &CountOptions::default()).unwrap();
                assert_eq!(report.method, Method::QuadraticClosed);
                assert_eq!(report.n_roots, Some(n1.into()));
            }
        }
    }
}

#[test]
fn single_class_formula_matches_enumeration() {
    for p in [3u64, 5, 7, 13] {
        let nonsq = (2..p).find(|&a| common::legendre(a, p) == -1).unwrap();
        for n in 1..=3 {
            // x_1² + x_1²x_2² + ..., every exponent 2
            let cols: Vec<Vec<u64>> = (0..n).map(|j| vec![2; j + 1]).collect();
            for (eps, c) in [(1i8, 1u64), (-1, nonsq)] {
                for (b, class) in [
                    (0, BClass::Zero),
                    (1, BClass::Square),
                    (nonsq, BClass::NonSquare),
                ] {
                    let want = naive_n(p, &vec![c; n], b, &cols);
                    assert_eq!(
                        all_squares_count(n, p, eps, class).unwrap(),
                        BigInt::from(want),
                        "p={p} n={n} eps={eps} b={b}"
                    );
                }
            }
        }
    }
}

#[test]
fn quadratic_single_shot_for_x2_plus_x2y2_minus_1() {
    let want = naive_n(5, &[1, 1], 1, &[vec![2], vec![2, 2]]);
    let p = RsProfile::from_classes(&[1, 1], BClass::Square);
    assert_eq!(quadratic_main_count(&p, 5).unwrap(), BigInt::from(want));
}

/// The same ζ-expressions in `f64` land within rounding of the exact values.
#[test]
fn float_ring_agrees_with_exact_ring() {
    for q in [5u64, 7, 9, 13] {
        let z = Zetas::<f64>::new(q);
        for r in 0..=4u32 {
            for s in 0..=4u32 {
                if r + s == 0 {
                    continue;
                }
                let (sym, _) = z.symmetric_pair(r, s);
                let k = (r + s) as i32;
                let approx = ((q - 1) as f64).powi(k) / q as f64
                    + (q - 1) as f64 * sym.rational_part() / (2 * q) as f64;
                let exact = nstar_gk_closed(r as usize, s as usize, q, BClass::Zero).unwrap();
                let exact: f64 = exact.to_string().parse().unwrap();
                assert!(
                    (approx - exact).abs() < 1e-6,
                    "q={q} r={r} s={s}: {approx} vs {exact}"
                );
                assert!(sym.tau_part().abs() < 1e-9);
            }
        }
    }
}
