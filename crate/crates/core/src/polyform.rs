//! Sparse and triangular polynomials `f = Σ a_j X^{D_j} - b` and their
//! augmented degree matrices.
//!
//! The constant is always stored as `b` (the polynomial subtracts it).
//! Exponents are arbitrary-precision and are only reduced modulo `q - 1`
//! inside degree matrices and evaluation, where a positive exponent maps to
//! the representative in `1..=q-1` so that `x^(q-1)` and `x^0` stay distinct.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ffield::{Fe, FieldSpec};
use crate::modring::ResidueMatrix;

/// Reduces an exponent modulo `n = q - 1`, keeping positive exponents
/// positive: `0 -> 0`, `d > 0 -> ((d - 1) mod n) + 1`.
pub fn reduce_exponent(d: &BigUint, n: u64) -> u64 {
    if d.is_zero() {
        0
    } else {
        ((d - 1u32) % n).to_u64().expect("reduced below n") + 1
    }
}

/// One monomial `coeff * x_1^{e_1} ... x_n^{e_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Fe,
    pub expo: Vec<BigUint>,
}

impl Term {
    pub fn new<E: Into<BigUint> + Copy>(coeff: Fe, expo: &[E]) -> Self {
        Term {
            coeff,
            expo: expo.iter().map(|&e| e.into()).collect(),
        }
    }
}

/// The augmented degree matrix: an all-ones row above the column-per-term
/// exponent matrix, with a trailing `(1, 0, ..., 0)` column when `b != 0`.
///
/// Entries follow the positive-representative convention of
/// [`reduce_exponent`]; use [`AugMatrix::residues`] for arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl AugMatrix {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.entries
            .chunks(self.cols.max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    /// Same matrix over `Z_{q-1}` with entries in `0..q-1`.
    pub fn residues(&self) -> ResidueMatrix {
        ResidueMatrix::new(self.modulus, self.rows, self.cols, self.entries.clone())
            .expect("shape is consistent")
    }

    /// Top-left `rows x cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> AugMatrix {
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        AugMatrix {
            modulus: self.modulus,
            rows,
            cols,
            entries,
        }
    }
}

fn build_aug(field: &FieldSpec, n_vars: usize, columns: &[&[BigUint]], b: Fe) -> AugMatrix {
    let modulus = field.order();
    let rows = n_vars + 1;
    let cols = columns.len() + usize::from(!b.is_zero());
    let mut entries = vec![0u64; rows * cols];
    for (j, col) in columns.iter().enumerate() {
        entries[j] = 1;
        for (i, d) in col.iter().enumerate() {
            entries[(i + 1) * cols + j] = reduce_exponent(d, modulus);
        }
    }
    if !b.is_zero() {
        entries[cols - 1] = 1;
    }
    AugMatrix {
        modulus,
        rows,
        cols,
        entries,
    }
}

/// A polynomial `Σ a_j X^{D_j} - b` with nonzero coefficients and distinct
/// exponent vectors.
#[derive(Clone, Debug)]
pub struct SparsePoly {
    field: Arc<FieldSpec>,
    n_vars: usize,
    terms: Vec<Term>,
    b: Fe,
}

impl SparsePoly {
    pub fn new(field: &Arc<FieldSpec>, n_vars: usize, terms: Vec<Term>, b: Fe) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidPolynomial("no variables".into()));
        }
        if b.raw() >= field.q() {
            return Err(Error::InvalidElement(format!(
                "b = {} not in field",
                b.raw()
            )));
        }
        let mut seen = HashSet::new();
        for t in &terms {
            if t.coeff.is_zero() {
                return Err(Error::InvalidPolynomial("zero coefficient".into()));
            }
            if t.coeff.raw() >= field.q() {
                return Err(Error::InvalidElement(format!(
                    "coefficient {} not in field",
                    t.coeff.raw()
                )));
            }
            if t.expo.len() != n_vars {
                return Err(Error::InvalidPolynomial(format!(
                    "term has {} exponents, expected {n_vars}",
                    t.expo.len()
                )));
            }
            if !seen.insert(&t.expo) {
                return Err(Error::InvalidPolynomial("repeated exponent vector".into()));
            }
        }
        Ok(SparsePoly {
            field: Arc::clone(field),
            n_vars,
            terms,
            b,
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn b(&self) -> Fe {
        self.b
    }

    /// `(a_1, ..., a_m)` followed by `-b` when `b != 0`.
    pub fn coefficient_vector(&self) -> Vec<Fe> {
        let mut v: Vec<Fe> = self.terms.iter().map(|t| t.coeff).collect();
        if !self.b.is_zero() {
            v.push(self.field.neg(self.b));
        }
        v
    }

    pub fn augmented_degree_matrix(&self) -> AugMatrix {
        let cols: Vec<&[BigUint]> = self.terms.iter().map(|t| t.expo.as_slice()).collect();
        build_aug(&self.field, self.n_vars, &cols, self.b)
    }

    /// `f(x_1, ..., x_k, 0, ..., 0)` as a polynomial in `k` variables.
    pub fn truncate(&self, k: usize) -> Result<SparsePoly> {
        if k == 0 || k > self.n_vars {
            return Err(Error::BadIndex { k, n: self.n_vars });
        }
        let terms = self
            .terms
            .iter()
            .filter(|t| t.expo[k..].iter().all(Zero::is_zero))
            .map(|t| Term {
                coeff: t.coeff,
                expo: t.expo[..k].to_vec(),
            })
            .collect();
        SparsePoly::new(&self.field, k, terms, self.b)
    }

    pub fn evaluate(&self, point: &[Fe]) -> Result<Fe> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        let k = &self.field;
        let mut acc = k.neg(self.b);
        for t in &self.terms {
            let mono = t
                .expo
                .iter()
                .zip(point)
                .fold(t.coeff, |m, (e, &x)| k.mul(m, k.pow(x, e)));
            acc = k.add(acc, mono);
        }
        Ok(acc)
    }
}

/// `Σ_{j=1}^n a_j x_1^{d_{1,j}} ... x_j^{d_{j,j}} - b` with every `d_{j,j} > 0`.
#[derive(Clone, Debug)]
pub struct TriangularPoly {
    field: Arc<FieldSpec>,
    coeffs: Vec<Fe>,
    b: Fe,
    /// `expo[j][i]` is `d_{i+1, j+1}`; column `j` has `j + 1` entries.
    expo: Vec<Vec<BigUint>>,
    fully: bool,
}

impl TriangularPoly {
    pub fn new(
        field: &Arc<FieldSpec>,
        coeffs: Vec<Fe>,
        b: Fe,
        expo: Vec<Vec<BigUint>>,
    ) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::NotTriangular("no terms".into()));
        }
        if expo.len() != n {
            return Err(Error::NotTriangular(format!(
                "{} exponent columns for {n} coefficients",
                expo.len()
            )));
        }
        for (j, col) in expo.iter().enumerate() {
            if col.len() != j + 1 {
                return Err(Error::NotTriangular(format!(
                    "column {} has {} entries, expected {}",
                    j + 1,
                    col.len(),
                    j + 1
                )));
            }
            if col[j].is_zero() {
                return Err(Error::NotTriangular(format!("d_{{{0},{0}}} = 0", j + 1)));
            }
        }
        if let Some(c) = coeffs.iter().find(|c| c.is_zero() || c.raw() >= field.q()) {
            return Err(Error::InvalidElement(format!(
                "coefficient {} must be a nonzero field element",
                c.raw()
            )));
        }
        if b.raw() >= field.q() {
            return Err(Error::InvalidElement(format!(
                "b = {} not in field",
                b.raw()
            )));
        }
        let fully = expo.iter().all(|col| col.iter().all(|d| !d.is_zero()));
        Ok(TriangularPoly {
            field: Arc::clone(field),
            coeffs,
            b,
            expo,
            fully,
        })
    }

    /// Convenience constructor from machine-word exponents.
    pub fn from_u64(
        field: &Arc<FieldSpec>,
        coeffs: &[u64],
        b: u64,
        expo: &[&[u64]],
    ) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|&c| field.element(c))
            .collect::<Result<_>>()?;
        let expo = expo
            .iter()
            .map(|col| col.iter().map(|&d| BigUint::from(d)).collect())
            .collect();
        Self::new(field, coeffs, field.element(b)?, expo)
    }

    /// The diagonal polynomial `Σ a_j x_j^{e_j} - b`.
    pub fn diagonal(field: &Arc<FieldSpec>, coeffs: Vec<Fe>, b: Fe, e: &[u64]) -> Result<Self> {
        let expo = e
            .iter()
            .enumerate()
            .map(|(j, &ej)| {
                let mut col = vec![BigUint::zero(); j + 1];
                col[j] = BigUint::from(ej);
                col
            })
            .collect();
        Self::new(field, coeffs, b, expo)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn b(&self) -> Fe {
        self.b
    }

    pub fn is_fully_triangular(&self) -> bool {
        self.fully
    }

    /// `d_{i,j}` with 1-based indices, `i <= j`.
    pub fn exponent(&self, i: usize, j: usize) -> &BigUint {
        &self.expo[j - 1][i - 1]
    }

    /// Exponent table by column: `columns()[j][i] = d_{i+1, j+1}`.
    pub fn columns(&self) -> &[Vec<BigUint>] {
        &self.expo
    }

    /// `d_{i,j}` reduced into `0..q-1`.
    pub fn exponent_residue(&self, i: usize, j: usize) -> u64 {
        (self.exponent(i, j) % self.field.order())
            .to_u64()
            .expect("reduced")
    }

    pub fn coefficient_vector(&self) -> Vec<Fe> {
        let mut v = self.coeffs.clone();
        if !self.b.is_zero() {
            v.push(self.field.neg(self.b));
        }
        v
    }

    pub fn augmented_degree_matrix(&self) -> AugMatrix {
        let cols: Vec<&[BigUint]> = self.expo.iter().map(Vec::as_slice).collect();
        build_aug(&self.field, self.n(), &cols, self.b)
    }

    /// The `k`-variable polynomial made of terms `1..=k` with the same `b`.
    pub fn truncate(&self, k: usize) -> Result<TriangularPoly> {
        if k == 0 || k > self.n() {
            return Err(Error::BadIndex { k, n: self.n() });
        }
        Self::new(
            &self.field,
            self.coeffs[..k].to_vec(),
            self.b,
            self.expo[..k].to_vec(),
        )
    }

    pub fn to_sparse(&self) -> SparsePoly {
        let n = self.n();
        let terms = self
            .expo
            .iter()
            .zip(&self.coeffs)
            .map(|(col, &coeff)| {
                let mut expo = col.clone();
                expo.resize(n, BigUint::zero());
                Term { coeff, expo }
            })
            .collect();
        SparsePoly::new(&self.field, n, terms, self.b).expect("triangular columns are distinct")
    }

    pub fn evaluate(&self, point: &[Fe]) -> Result<Fe> {
        self.to_sparse().evaluate(point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyClass {
    General,
    Triangular,
    FullyTriangular,
}

/// Classifies `f`, returning the triangular view when one exists.
///
/// Term `j` of a triangular polynomial is the unique term whose last
/// variable with a positive exponent is `x_j`, so the ordering is forced.
pub fn classify(f: &SparsePoly) -> (PolyClass, Option<TriangularPoly>) {
    let n = f.n_vars();
    if f.terms().len() != n {
        return (PolyClass::General, None);
    }
    let mut slot: Vec<Option<&Term>> = vec![None; n];
    for t in f.terms() {
        let Some(last) = t.expo.iter().rposition(|d| !d.is_zero()) else {
            return (PolyClass::General, None);
        };
        if slot[last].replace(t).is_some() {
            return (PolyClass::General, None);
        }
    }
    let ordered: Vec<&Term> = slot.into_iter().map(|t| t.expect("pigeonhole")).collect();
    let coeffs = ordered.iter().map(|t| t.coeff).collect();
    let expo = ordered
        .iter()
        .enumerate()
        .map(|(j, t)| t.expo[..=j].to_vec())
        .collect();
    let tri = TriangularPoly::new(f.field(), coeffs, f.b(), expo)
        .expect("ordering gives a positive diagonal");
    let class = if tri.is_fully_triangular() {
        PolyClass::FullyTriangular
    } else {
        PolyClass::Triangular
    };
    (class, Some(tri))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn sparse(field: &Arc<FieldSpec>, terms: &[(u64, &[u64])], b: u64) -> SparsePoly {
        let n = terms[0].1.len();
        let terms = terms
            .iter()
            .map(|&(c, e)| Term::new(Fe::ONE, e).with_coeff(field, c))
            .collect();
        SparsePoly::new(field, n, terms, field.element(b).unwrap()).unwrap()
    }

    impl Term {
        fn with_coeff(mut self, field: &Arc<FieldSpec>, c: u64) -> Self {
            self.coeff = field.element(c).unwrap();
            self
        }
    }

    /// Exhaustive oracle: some permutation of the terms is triangular.
    fn brute_classify(f: &SparsePoly) -> PolyClass {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = f.n_vars();
        if f.terms().len() != n {
            return PolyClass::General;
        }
        let mut best = PolyClass::General;
        for p in perms(n) {
            let ok = p.iter().enumerate().all(|(j, &t)| {
                let e = &f.terms()[t].expo;
                !e[j].is_zero() && e[j + 1..].iter().all(Zero::is_zero)
            });
            if ok {
                let fully = p
                    .iter()
                    .enumerate()
                    .all(|(j, &t)| f.terms()[t].expo[..=j].iter().all(|d| !d.is_zero()));
                best = if fully {
                    PolyClass::FullyTriangular
                } else {
                    PolyClass::Triangular
                };
            }
        }
        best
    }

    #[test]
    fn classify_examples() {
        let k3 = FieldSpec::new(3, 1).unwrap();
        let f = sparse(&k3, &[(1, &[1, 0]), (1, &[1, 1])], 0);
        assert_eq!(classify(&f).0, PolyClass::FullyTriangular);
        let g = sparse(&k3, &[(1, &[1, 0]), (1, &[0, 1])], 0);
        assert_eq!(classify(&g).0, PolyClass::Triangular);
        let h = sparse(&k3, &[(1, &[1, 1]), (1, &[0, 1])], 0);
        assert_eq!(classify(&h).0, PolyClass::General);
        assert_eq!(brute_classify(&h), PolyClass::General);
        // order of the input terms does not matter
        let r = sparse(&k3, &[(2, &[1, 1]), (1, &[2, 0])], 0);
        let (class, tri) = classify(&r);
        assert_eq!(class, PolyClass::FullyTriangular);
        assert_eq!(tri.unwrap().coeffs(), &[Fe::ONE, k3.element(2).unwrap()]);
    }

    #[test]
    fn classify_agrees_with_permutation_scan() {
        use rand::{Rng, SeedableRng};
        let k = FieldSpec::new(5, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.gen_range(1..=3);
            let mut terms: Vec<Term> = Vec::new();
            while terms.len() < n {
                let e: Vec<u64> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                let t = Term::new(Fe::ONE, &e);
                if !terms.contains(&t) {
                    terms.push(t);
                }
            }
            let f = SparsePoly::new(&k, n, terms, Fe::ZERO).unwrap();
            assert_eq!(classify(&f).0, brute_classify(&f), "{f:?}");
        }
    }

    #[test]
    fn augmented_matrix_f31_example() {
        let k = FieldSpec::new(31, 1).unwrap();
        let f = TriangularPoly::from_u64(&k, &[11, 5, 12], 0, &[&[13], &[21, 19], &[2, 3, 17]])
            .unwrap();
        assert_eq!(
            f.augmented_degree_matrix().to_rows(),
            vec![
                vec![1, 1, 1],
                vec![13, 21, 2],
                vec![0, 19, 3],
                vec![0, 0, 17]
            ]
        );
    }

    #[test]
    fn augmented_matrix_constant_column() {
        let k = FieldSpec::new(10007, 1).unwrap();
        let b = k.neg(k.from_int(7001));
        let g = TriangularPoly::diagonal(&k, vec![Fe::ONE; 3], b, &[1, 1, 1]).unwrap();
        let d = g.augmented_degree_matrix();
        assert_eq!(d.cols(), 4);
        assert_eq!(
            (0..4).map(|i| d.get(i, 3)).collect::<Vec<_>>(),
            vec![1, 0, 0, 0]
        );
    }

    #[test]
    fn exponent_convention() {
        let k = FieldSpec::new(7, 1).unwrap();
        assert_eq!(reduce_exponent(&BigUint::from(6u32), 6), 6);
        assert_eq!(reduce_exponent(&BigUint::from(12u32), 6), 6);
        assert_eq!(reduce_exponent(&BigUint::from(13u32), 6), 1);
        assert_eq!(reduce_exponent(&BigUint::zero(), 6), 0);
        let f = TriangularPoly::from_u64(&k, &[1], 0, &[&[6]]).unwrap();
        assert_eq!(f.augmented_degree_matrix().get(1, 0), 6);
        assert_eq!(f.augmented_degree_matrix().residues().get(1, 0), 0);
        assert_eq!(f.evaluate(&[Fe::ZERO]).unwrap(), Fe::ZERO);
        assert_eq!(f.evaluate(&[k.element(3).unwrap()]).unwrap(), Fe::ONE);
    }

    #[test]
    fn truncation() {
        let k = FieldSpec::new(7, 1).unwrap();
        let f = TriangularPoly::from_u64(&k, &[1, 1, 1], 3, &[&[1], &[2, 3], &[4, 5, 6]]).unwrap();
        let f2 = f.truncate(2).unwrap();
        assert_eq!(f2.n(), 2);
        assert_eq!(f2.columns(), &[big(&[1]), big(&[2, 3])]);
        assert_eq!(f2.b(), f.b());
        assert_eq!(f.truncate(3).unwrap().columns(), f.columns());
        assert_eq!(f.truncate(0).unwrap_err(), Error::BadIndex { k: 0, n: 3 });
        assert_eq!(f.truncate(4).unwrap_err(), Error::BadIndex { k: 4, n: 3 });
        // sparse truncation agrees
        let s2 = f.to_sparse().truncate(2).unwrap();
        assert_eq!(classify(&s2).1.unwrap().columns(), f2.columns());
    }

    #[test]
    fn truncated_matrix_is_leading_block() {
        let k = FieldSpec::new(11, 1).unwrap();
        let f = TriangularPoly::from_u64(&k, &[1, 2, 3], 0, &[&[3], &[5, 7], &[11, 2, 9]]).unwrap();
        let full = f.augmented_degree_matrix();
        for j in 1..=3 {
            assert_eq!(
                f.truncate(j).unwrap().augmented_degree_matrix(),
                full.block(j + 1, j)
            );
        }
    }

    #[test]
    fn evaluation_examples() {
        let k3 = FieldSpec::new(3, 1).unwrap();
        let f = sparse(&k3, &[(1, &[2, 0]), (1, &[0, 2])], 1);
        assert_eq!(f.evaluate(&[Fe::ZERO, Fe::ONE]).unwrap(), Fe::ZERO);
        assert_eq!(
            f.evaluate(&[Fe::ZERO]).unwrap_err(),
            Error::ArityMismatch {
                expected: 2,
                got: 1
            }
        );
        let k31 = FieldSpec::new(31, 1).unwrap();
        let g = TriangularPoly::from_u64(&k31, &[11, 5, 12], 0, &[&[13], &[21, 19], &[2, 3, 17]])
            .unwrap();
        assert_eq!(g.evaluate(&[Fe::ONE; 3]).unwrap(), k31.from_int(28));
    }

    #[test]
    fn invalid_inputs() {
        let k = FieldSpec::new(5, 1).unwrap();
        assert!(matches!(
            TriangularPoly::from_u64(&k, &[1, 1], 0, &[&[1], &[1, 0]]),
            Err(Error::NotTriangular(_))
        ));
        assert!(matches!(
            TriangularPoly::from_u64(&k, &[1, 1], 0, &[&[1], &[1]]),
            Err(Error::NotTriangular(_))
        ));
        assert!(matches!(
            SparsePoly::new(&k, 1, vec![Term::new(Fe::ZERO, &[1u64])], Fe::ZERO),
            Err(Error::InvalidPolynomial(_))
        ));
        assert!(matches!(
            SparsePoly::new(
                &k,
                1,
                vec![Term::new(Fe::ONE, &[1u64]), Term::new(Fe::ONE, &[1u64])],
                Fe::ZERO
            ),
            Err(Error::InvalidPolynomial(_))
        ));
    }
}
