//! Deciding and certifying *-equivalence.
//!
//! Two polynomials are *-equivalent when they share their coefficient
//! vector (positionally, with `-b` last when `b != 0`) and their augmented
//! degree matrices have the same null space modulo `q - 1`. An invertible
//! `M` with `M·D̃_f ≡ D̃_g` certifies this; if every leading block `M_k` of
//! size `k + 1` is invertible as well, the equivalence holds for every
//! truncation `f_k`, `g_k` (total *-equivalence).

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::ffield::same_field;
use crate::modring::{gcd, smallest_multiplier, unit_ratio, ResidueMatrix};
use crate::polyform::{SparsePoly, TriangularPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivStatus {
    NotValid,
    StarEquivalent,
    TotallyStarEquivalent,
}

impl EquivStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EquivStatus::NotValid => "not_valid",
            EquivStatus::StarEquivalent => "star_equivalent",
            EquivStatus::TotallyStarEquivalent => "totally_star_equivalent",
        }
    }
}

/// What a certificate maps onto.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// The diagonal polynomial `Σ a_j x_j^{e_j} - b`.
    Diagonal(Vec<u64>),
    /// An explicitly supplied polynomial.
    Explicit,
}

/// An invertible `M` over `Z_{q-1}` with `M·D̃_f = D̃_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub matrix: ResidueMatrix,
    /// Every leading block `M_k`, `k = 1..n-1`, is invertible.
    pub total: bool,
    pub target: Target,
}

fn check_pair(f: &TriangularPoly, g: &TriangularPoly) -> Result<()> {
    if !same_field(f.field(), g.field()) {
        return Err(Error::FieldMismatch);
    }
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} variables",
            f.n(),
            g.n()
        )));
    }
    Ok(())
}

fn leading_blocks_invertible(m: &ResidueMatrix, n: usize) -> Result<bool> {
    for k in 1..n {
        if !m.leading_block(k + 1).is_invertible()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks a claimed certificate `M·D̃_f ≡ D̃_g (mod q - 1)`.
pub fn verify_certificate(
    f: &TriangularPoly,
    g: &TriangularPoly,
    m: &ResidueMatrix,
) -> Result<EquivStatus> {
    check_pair(f, g)?;
    let size = f.n() + 1;
    if m.rows() != size || m.cols() != size {
        return Err(Error::DimensionMismatch(format!(
            "certificate is {}x{}, expected {size}x{size}",
            m.rows(),
            m.cols()
        )));
    }
    if m.modulus() != f.field().order() {
        return Err(Error::DimensionMismatch(format!(
            "certificate modulus {} but q - 1 = {}",
            m.modulus(),
            f.field().order()
        )));
    }
    if f.coefficient_vector() != g.coefficient_vector() {
        return Ok(EquivStatus::NotValid);
    }
    let df = f.augmented_degree_matrix().residues();
    let dg = g.augmented_degree_matrix().residues();
    if m.mul(&df)? != dg || !m.is_invertible()? {
        return Ok(EquivStatus::NotValid);
    }
    if leading_blocks_invertible(m, f.n())? {
        Ok(EquivStatus::TotallyStarEquivalent)
    } else {
        Ok(EquivStatus::StarEquivalent)
    }
}

/// The diagonal polynomial with `f`'s coefficients, constant and exponents `e`.
pub fn diagonal_target(f: &TriangularPoly, e: &[u64]) -> Result<TriangularPoly> {
    TriangularPoly::diagonal(f.field(), f.coeffs().to_vec(), f.b(), e)
}

/// Tries the sufficient criterion for total *-equivalence between `f` and
/// the diagonal polynomial with exponents `e`:
///
/// 1. `d_{j,j} ≡ m_{j,j}·e_j` for some unit `m_{j,j}` of `Z_{q-1}`;
/// 2. `gcd(d_{j,j}, q - 1)` divides `d_{i,j}` for all `i < j`.
///
/// On success the certificate maps `D̃_f` to the diagonal matrix; it is the
/// inverse of the upper-triangular `M` with `M·D̃_g = D̃_f` whose entries
/// are the smallest solutions of `d_{i,j} ≡ m_{i,j}·e_j`. `None` means the
/// criterion does not apply, not that the polynomials are inequivalent.
pub fn diagonal_equivalence(f: &TriangularPoly, e: &[u64]) -> Result<Option<Certificate>> {
    let n = f.n();
    if e.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} target exponents for {n} variables",
            e.len()
        )));
    }
    if let Some(&bad) = e.iter().find(|&&x| x == 0) {
        return Err(Error::BadTargetExponent(bad));
    }
    let modulus = f.field().order();
    let mut upper = ResidueMatrix::identity(modulus, n + 1);
    for j in 1..=n {
        let djj = f.exponent_residue(j, j);
        let ej = e[j - 1] % modulus;
        let Some(unit) = unit_ratio(djj, ej, modulus) else {
            return Ok(None);
        };
        upper.set(j, j, unit);
        let g = gcd(djj, modulus);
        for i in 1..j {
            let dij = f.exponent_residue(i, j);
            if !dij.is_multiple_of(g) {
                return Ok(None);
            }
            let mij = smallest_multiplier(dij, ej, modulus)
                .expect("gcd(e_j, q-1) = gcd(d_jj, q-1) divides d_ij");
            upper.set(i, j, mij);
        }
    }
    let g = diagonal_target(f, e)?;
    debug_assert_eq!(
        upper.mul(&g.augmented_degree_matrix().residues()).ok(),
        Some(f.augmented_degree_matrix().residues())
    );
    let matrix = upper.inverse()?;
    Ok(Some(Certificate {
        matrix,
        total: true,
        target: Target::Diagonal(e.to_vec()),
    }))
}

/// `gcd(d_{j,j}, q - 1) = 1` for every `j`: total *-equivalence to the
/// linear polynomial `Σ a_j x_j - b`.
pub fn linear_criterion(f: &TriangularPoly) -> bool {
    let modulus = f.field().order();
    (1..=f.n()).all(|j| gcd(f.exponent_residue(j, j), modulus) == 1)
}

/// `q` odd, `d_{j,j} ≡ 2·u_j` with `u_j` a unit, and `d_{i,j}` even for
/// `i < j`: total *-equivalence to `Σ a_j x_j^2 - b`.
pub fn quadratic_criterion(f: &TriangularPoly) -> bool {
    if !f.field().is_odd() {
        return false;
    }
    let modulus = f.field().order();
    (1..=f.n()).all(|j| {
        unit_ratio(f.exponent_residue(j, j), 2, modulus).is_some()
            && (1..j).all(|i| f.exponent(i, j).is_even())
    })
}

/// Exact *-equivalence test: equal coefficient vectors and equal row spans
/// of the augmented degree matrices over `Z_{q-1}`.
pub fn star_equivalent_general(f: &SparsePoly, g: &SparsePoly) -> bool {
    if !same_field(f.field(), g.field()) || f.terms().len() != g.terms().len() {
        return false;
    }
    if f.coefficient_vector() != g.coefficient_vector() {
        return false;
    }
    let df = f.augmented_degree_matrix().residues();
    let dg = g.augmented_degree_matrix().residues();
    df.same_row_span(&dg)
}

/// Exact total *-equivalence test, one Howell comparison per truncation.
pub fn totally_star_equivalent_general(f: &TriangularPoly, g: &TriangularPoly) -> Result<bool> {
    check_pair(f, g)?;
    for k in 1..=f.n() {
        let (fk, gk) = (f.truncate(k)?, g.truncate(k)?);
        if !star_equivalent_general(&fk.to_sparse(), &gk.to_sparse()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every invertible upper-triangular `N` over `Z_{q-1}` with
/// `N·D̃_f = D̃_g`, by exhaustive search. Refuses when more than `budget`
/// candidate matrices would have to be examined.
pub fn upper_triangular_certificates(
    f: &TriangularPoly,
    g: &TriangularPoly,
    budget: u64,
) -> Result<Vec<ResidueMatrix>> {
    check_pair(f, g)?;
    let modulus = f.field().order();
    let size = f.n() + 1;
    let free = size * (size + 1) / 2;
    let total = BigUint::from(modulus).pow(free as u32);
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            points: total.to_string(),
            budget,
        });
    }
    let df = f.augmented_degree_matrix().residues();
    let dg = g.augmented_degree_matrix().residues();
    let slots: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| (i..size).map(move |j| (i, j)))
        .collect();
    let mut digits = vec![0u64; free];
    let mut found = Vec::new();
    loop {
        let mut m = ResidueMatrix::zeros(modulus, size, size);
        for (&(i, j), &d) in slots.iter().zip(&digits) {
            m.set(i, j, d);
        }
        if m.mul(&df)? == dg && m.is_invertible()? {
            found.push(m);
        }
        // odometer, last slot fastest
        let mut pos = free;
        loop {
            if pos == 0 {
                return Ok(found);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < modulus {
                break;
            }
            digits[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldSpec;
    use std::sync::Arc;

    fn tri(field: &Arc<FieldSpec>, coeffs: &[u64], b: u64, expo: &[&[u64]]) -> TriangularPoly {
        TriangularPoly::from_u64(field, coeffs, b, expo).unwrap()
    }

    fn f7_pair() -> (TriangularPoly, TriangularPoly) {
        let k = FieldSpec::new(7, 1).unwrap();
        (
            tri(&k, &[1, 1], 0, &[&[1], &[3, 5]]),
            tri(&k, &[1, 1], 0, &[&[2], &[4, 1]]),
        )
    }

    #[test]
    fn f7_known_certificate() {
        let (f, g) = f7_pair();
        let m = ResidueMatrix::from_rows(6, &[[1, 0, 0], [1, 1, 0], [0, 0, 5]]).unwrap();
        assert_eq!(
            verify_certificate(&f, &g, &m).unwrap(),
            EquivStatus::TotallyStarEquivalent
        );
        let id = ResidueMatrix::identity(6, 3);
        assert_eq!(
            verify_certificate(&f, &g, &id).unwrap(),
            EquivStatus::NotValid
        );
        assert_eq!(
            verify_certificate(&f, &f, &id).unwrap(),
            EquivStatus::TotallyStarEquivalent
        );
        assert!(upper_triangular_certificates(&f, &g, 1 << 20)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn f7_diagonal_criterion_is_inconclusive() {
        let (f, _) = f7_pair();
        assert_eq!(diagonal_equivalence(&f, &[2, 1]).unwrap(), None);
        // oracle: no unit u of Z_6 with 2u ≡ 1
        assert!((0..6u64).all(|u| (2 * u) % 6 != 1));
    }

    #[test]
    fn certificate_wrong_shape() {
        let (f, g) = f7_pair();
        let m = ResidueMatrix::identity(6, 2);
        assert!(matches!(
            verify_certificate(&f, &g, &m),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn coefficient_mismatch_is_not_valid() {
        let k = FieldSpec::new(7, 1).unwrap();
        let f = tri(&k, &[1, 1], 0, &[&[1], &[3, 5]]);
        let g = tri(&k, &[1, 2], 0, &[&[1], &[3, 5]]);
        let id = ResidueMatrix::identity(6, 3);
        assert_eq!(
            verify_certificate(&f, &g, &id).unwrap(),
            EquivStatus::NotValid
        );
    }

    #[test]
    fn large_field_diagonal_certificates() {
        let k = FieldSpec::new(10007, 1).unwrap();
        let b = k.neg(k.from_int(7001)).raw();
        let f = tri(
            &k,
            &[1, 1, 1],
            b,
            &[&[1001], &[2001, 3001], &[4001, 5001, 6001]],
        );
        let cert = diagonal_equivalence(&f, &[1, 1, 1]).unwrap().unwrap();
        let g = diagonal_target(&f, &[1, 1, 1]).unwrap();
        assert_eq!(
            verify_certificate(&f, &g, &cert.matrix).unwrap(),
            EquivStatus::TotallyStarEquivalent
        );
        assert!(linear_criterion(&f));

        let k31 = FieldSpec::new(31, 1).unwrap();
        let f = tri(&k31, &[11, 5, 12], 0, &[&[13], &[21, 19], &[2, 3, 17]]);
        assert!(diagonal_equivalence(&f, &[1, 1, 1]).unwrap().is_some());
        assert!(linear_criterion(&f));
    }

    #[test]
    fn criteria_examples() {
        let k5 = FieldSpec::new(5, 1).unwrap();
        let f = tri(&k5, &[1, 1], 1, &[&[1], &[1, 2]]);
        assert!(!linear_criterion(&f));
        let q = tri(&k5, &[1, 1], 1, &[&[2], &[2, 2]]);
        assert!(quadratic_criterion(&q));
        let q4 = tri(&k5, &[1, 1], 1, &[&[4], &[2, 2]]);
        assert!(!quadratic_criterion(&q4));
        let odd_off = tri(&k5, &[1, 1], 1, &[&[2], &[3, 2]]);
        assert!(!quadratic_criterion(&odd_off));
        let k8 = FieldSpec::new(2, 3).unwrap();
        let e = tri(&k8, &[1, 1], 1, &[&[2], &[2, 2]]);
        assert!(!quadratic_criterion(&e));
    }

    #[test]
    fn bad_target_exponent() {
        let (f, _) = f7_pair();
        assert_eq!(
            diagonal_equivalence(&f, &[1, 0]).unwrap_err(),
            Error::BadTargetExponent(0)
        );
    }

    #[test]
    fn f5_howell_example() {
        use crate::ffield::Fe;
        use crate::polyform::Term;
        let k = FieldSpec::new(5, 1).unwrap();
        let f = SparsePoly::new(
            &k,
            2,
            vec![
                Term::new(Fe::ONE, &[2u64, 3]),
                Term::new(Fe::ONE, &[1u64, 2]),
            ],
            Fe::ZERO,
        )
        .unwrap();
        let g = SparsePoly::new(
            &k,
            2,
            vec![
                Term::new(Fe::ONE, &[1u64, 1]),
                Term::new(Fe::ONE, &[3u64, 2]),
            ],
            Fe::ZERO,
        )
        .unwrap();
        assert!(star_equivalent_general(&f, &g));
        assert!(star_equivalent_general(&f, &f));
        let x_y = SparsePoly::new(
            &k,
            2,
            vec![
                Term::new(Fe::ONE, &[1u64, 0]),
                Term::new(Fe::ONE, &[0u64, 1]),
            ],
            Fe::ZERO,
        )
        .unwrap();
        let x_2y = SparsePoly::new(
            &k,
            2,
            vec![
                Term::new(Fe::ONE, &[1u64, 0]),
                Term::new(k.element(2).unwrap(), &[0u64, 1]),
            ],
            Fe::ZERO,
        )
        .unwrap();
        assert!(!star_equivalent_general(&x_y, &x_2y));
    }
}
