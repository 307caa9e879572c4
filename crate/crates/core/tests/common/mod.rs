#![allow(dead_code)]

//! Naive prime-field helpers shared by the integration tests. Nothing here
//! goes through the library's field or enumeration code.

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// `(coeff, exponents)` terms minus `b`, evaluated over `Z/p`.
pub fn eval(p: u64, terms: &[(u64, Vec<u64>)], b: u64, x: &[u64]) -> u64 {
    let s = terms.iter().fold(0, |acc, (c, e)| {
        let mono = e
            .iter()
            .zip(x)
            .fold(*c % p, |m, (&d, &xi)| m * pow_mod(xi, d, p) % p);
        (acc + mono) % p
    });
    (s + p - b % p) % p
}

/// Every point of `(Z/p)^n`, or of `((Z/p)^*)^n`.
pub fn points(p: u64, n: usize, nonzero: bool) -> Vec<Vec<u64>> {
    let lo = u64::from(nonzero);
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..p).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn count(p: u64, n: usize, terms: &[(u64, Vec<u64>)], b: u64, nonzero: bool) -> u64 {
    points(p, n, nonzero)
        .iter()
        .filter(|x| eval(p, terms, b, x) == 0)
        .count() as u64
}

/// Terms of a triangular polynomial from its exponent columns.
pub fn triangular_terms(coeffs: &[u64], cols: &[Vec<u64>]) -> Vec<(u64, Vec<u64>)> {
    let n = coeffs.len();
    coeffs
        .iter()
        .zip(cols)
        .map(|(&c, col)| {
            let mut e = col.clone();
            e.resize(n, 0);
            (c, e)
        })
        .collect()
}

pub fn legendre(a: u64, p: u64) -> i8 {
    match pow_mod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}
