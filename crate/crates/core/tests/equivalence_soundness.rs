mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricount::ffield::FieldSpec;
use tricount::polyform::TriangularPoly;
use tricount::starequiv::{
    diagonal_equivalence, diagonal_target, star_equivalent_general, totally_star_equivalent_general,
};

fn as_u64(f: &TriangularPoly) -> Vec<Vec<u64>> {
    f.columns()
        .iter()
        .map(|c| c.iter().map(|d| u64::try_from(d).unwrap()).collect())
        .collect()
}

/// Certified pairs have equal `N*` at every truncation level.
#[test]
fn certified_pairs_share_nonzero_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut certified = 0;
    for p in [5u64, 7, 11, 13] {
        let k = FieldSpec::new(p, 1).unwrap();
        for _ in 0..120 {
            let n = rng.gen_range(1..=3);
            let coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(1..p)).collect();
            let b = rng.gen_range(0..p);
            let cols: Vec<Vec<u64>> = (0..n)
                .map(|j| (0..=j).map(|_| rng.gen_range(1..=3 * p)).collect())
                .collect();
            let refs: Vec<&[u64]> = cols.iter().map(Vec::as_slice).collect();
            let f = TriangularPoly::from_u64(&k, &coeffs, b, &refs).unwrap();
            let e: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            let Some(cert) = diagonal_equivalence(&f, &e).unwrap() else {
                continue;
            };
            certified += 1;
            let g = diagonal_target(&f, &e).unwrap();
            assert!(cert.total);
            assert!(totally_star_equivalent_general(&f, &g).unwrap());
            let (fc, gc) = (as_u64(&f), as_u64(&g));
            for level in 1..=n {
                let ft = common::triangular_terms(&coeffs[..level], &fc[..level]);
                let gt = common::triangular_terms(&coeffs[..level], &gc[..level]);
                assert_eq!(
                    common::count(p, level, &ft, b, true),
                    common::count(p, level, &gt, b, true),
                    "f = {f:?}, e = {e:?}, level {level}"
                );
            }
        }
    }
    assert!(certified > 40, "only {certified} certified pairs");
}

/// Howell-equivalent random sparse pairs with equal coefficients agree on `N*`.
#[test]
fn howell_equivalence_implies_equal_nonzero_counts() {
    let k = FieldSpec::new(7, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut equivalent = 0;
    for _ in 0..400 {
        let c: Vec<u64> = (0..2).map(|_| rng.gen_range(1..7)).collect();
        let ex: Vec<Vec<u64>> = (0..4)
            .map(|_| (0..2).map(|_| rng.gen_range(0..7)).collect())
            .collect();
        if ex[0] == ex[1] || ex[2] == ex[3] || ex.iter().any(|e| e == &[0, 0]) {
            continue;
        }
        let mk = |a: &[u64], b: &[u64]| {
            tricount::SparsePoly::new(
                &k,
                2,
                vec![
                    tricount::Term::new(k.element(c[0]).unwrap(), a),
                    tricount::Term::new(k.element(c[1]).unwrap(), b),
                ],
                k.element(1).unwrap(),
            )
            .unwrap()
        };
        let (f, g) = (mk(&ex[0], &ex[1]), mk(&ex[2], &ex[3]));
        if !star_equivalent_general(&f, &g) {
            continue;
        }
        equivalent += 1;
        let ft = vec![(c[0], ex[0].clone()), (c[1], ex[1].clone())];
        let gt = vec![(c[0], ex[2].clone()), (c[1], ex[3].clone())];
        assert_eq!(
            common::count(7, 2, &ft, 1, true),
            common::count(7, 2, &gt, 1, true)
        );
    }
    assert!(equivalent > 5, "only {equivalent} equivalent pairs");
}
