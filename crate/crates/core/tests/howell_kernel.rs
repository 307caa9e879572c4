use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricount::modring::ResidueMatrix;

/// Solutions of `M·v ≡ 0 (mod n)` by trying every `v`.
fn kernel(rows: &[Vec<u64>], cols: usize, n: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut v = vec![0u64; cols];
    loop {
        if rows
            .iter()
            .all(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum::<u64>() % n == 0)
        {
            out.push(v.clone());
        }
        let mut d = cols;
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            v[d] += 1;
            if v[d] < n {
                break;
            }
            v[d] = 0;
        }
    }
}

#[test]
fn howell_form_keeps_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4u64, 6, 12, 30] {
        let cases = if n == 30 { 6 } else { 25 };
        for _ in 0..cases {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let m: Vec<Vec<u64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(0..n)).collect())
                .collect();
            let h = ResidueMatrix::from_rows(n, &m).unwrap().howell_form();
            assert_eq!(
                kernel(&m, cols, n),
                kernel(&h.to_rows(), cols, n),
                "n = {n}, M = {m:?}, H = {:?}",
                h.to_rows()
            );
        }
    }
}

#[test]
fn same_span_is_symmetric_and_detects_differences() {
    let a = ResidueMatrix::from_rows(12, &[[2, 4], [0, 6]]).unwrap();
    let b = ResidueMatrix::from_rows(12, &[[2, 4]]).unwrap();
    // 6·(2, 4) = (0, 0), and (0, 6) is not a multiple of (2, 4)
    assert!(!a.same_row_span(&b));
    let c = ResidueMatrix::from_rows(12, &[[2, 10], [0, 6]]).unwrap();
    assert_eq!(a.same_row_span(&c), c.same_row_span(&a));
    assert!(a.same_row_span(&c));
    let two = ResidueMatrix::from_rows(4, &[[2]]).unwrap();
    assert_eq!(two.howell_form().to_rows(), vec![vec![2]]);
}
