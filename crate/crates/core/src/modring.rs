//! Arithmetic in `Z_n` and matrices over it.
//!
//! `Z_n` has zero divisors, so row spans are compared through the Howell
//! normal form rather than a Hermite form, and determinants are computed
//! exactly over the integers before reduction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[inline]
fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn is_unit(a: u64, n: u64) -> bool {
    assert!(n >= 1, "modulus must be positive");
    gcd(a % n, n) == 1
}

/// Inverse of `a` modulo `n`, in `0..n`.
pub fn inv_mod(a: u64, n: u64) -> Result<u64> {
    assert!(n >= 1, "modulus must be positive");
    if n == 1 {
        return Ok(0);
    }
    let e = (a as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return Err(Error::NotAUnit { a, n });
    }
    Ok(e.x.rem_euclid(n as i128) as u64)
}

/// Smallest `m` in `0..n` with `m * e ≡ d (mod n)`, if any.
pub fn smallest_multiplier(d: u64, e: u64, n: u64) -> Option<u64> {
    let (d, e) = (d % n, e % n);
    let g = gcd(e, n);
    if d % g != 0 {
        return None;
    }
    let n1 = n / g;
    if n1 == 1 {
        return Some(0);
    }
    let inv = inv_mod(e / g, n1).expect("e/g is coprime to n/g");
    Some(mulmod(d / g, inv, n1))
}

/// Smallest unit `u` of `Z_n` with `u * e ≡ d (mod n)`, if any.
///
/// A solution exists exactly when `gcd(d, n) = gcd(e, n)`.
pub fn unit_ratio(d: u64, e: u64, n: u64) -> Option<u64> {
    let base = smallest_multiplier(d, e, n)?;
    let g = gcd(e % n, n);
    let step = n / g;
    (0..g).map(|t| base + t * step).find(|&u| is_unit(u, n))
}

/// Smallest unit `u` with `u * a ≡ gcd(a, n) (mod n)`.
fn normalizing_unit(a: u64, n: u64) -> u64 {
    let g = gcd(a, n);
    unit_ratio(g, a, n).expect("gcd(a, n) and a generate the same ideal")
}

/// Integer extended gcd: `s*a + t*b = g`, `u = -b/g`, `v = a/g`, so that
/// `[[s, t], [u, v]]` has determinant 1.
fn gcdex(a: u64, b: u64) -> (u64, i128, i128, i128, i128) {
    let e = (a as i128).extended_gcd(&(b as i128));
    let g = e.gcd;
    (g as u64, e.x, e.y, -(b as i128) / g, a as i128 / g)
}

/// A dense matrix over `Z_n`, entries kept in `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ResidueMatrix(mod {}) {:?}",
            self.modulus,
            self.to_rows()
        )
    }
}

impl ResidueMatrix {
    pub fn new(modulus: u64, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::DimensionMismatch("modulus must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let entries = entries.into_iter().map(|x| x % modulus).collect();
        Ok(ResidueMatrix {
            modulus,
            rows,
            cols,
            entries,
        })
    }

    /// Builds from row vectors; all rows must share one length.
    pub fn from_rows<R: AsRef<[u64]>>(modulus: u64, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Self::new(modulus, rows.len(), cols, entries)
    }

    /// Builds from signed integers, reducing each into `0..n`.
    pub fn from_signed_rows<R: AsRef<[i64]>>(modulus: u64, rows: &[R]) -> Result<Self> {
        let unsigned: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .iter()
                    .map(|&x| x.rem_euclid(modulus as i64) as u64)
                    .collect()
            })
            .collect();
        Self::from_rows(modulus, &unsigned)
    }

    pub fn identity(modulus: u64, size: usize) -> Self {
        let mut entries = vec![0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1 % modulus;
        }
        ResidueMatrix {
            modulus,
            rows: size,
            cols: size,
            entries,
        }
    }

    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Self {
        ResidueMatrix {
            modulus,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.cols + j] = value % self.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Product `self * other` over `Z_n`.
    pub fn mul(&self, other: &ResidueMatrix) -> Result<ResidueMatrix> {
        if self.modulus != other.modulus {
            return Err(Error::DimensionMismatch(format!(
                "moduli {} and {}",
                self.modulus, other.modulus
            )));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = self.modulus;
        let mut out = ResidueMatrix::zeros(n, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = (out.entries[idx] + mulmod(a, other.get(k, j), n)) % n;
                }
            }
        }
        Ok(out)
    }

    /// Top-left `size x size` block.
    pub fn leading_block(&self, size: usize) -> ResidueMatrix {
        self.submatrix(size, size)
    }

    /// Top-left `rows x cols` block.
    pub fn submatrix(&self, rows: usize, cols: usize) -> ResidueMatrix {
        assert!(rows <= self.rows && cols <= self.cols);
        let entries = (0..rows)
            .flat_map(|i| self.row(i)[..cols].iter().copied())
            .collect();
        ResidueMatrix {
            modulus: self.modulus,
            rows,
            cols,
            entries,
        }
    }

    fn integer_det(rows: Vec<Vec<BigInt>>) -> BigInt {
        // Bareiss fraction-free elimination
        let k = rows.len();
        if k == 0 {
            return BigInt::from(1);
        }
        let mut a = rows;
        let mut sign = 1i32;
        let mut prev = BigInt::from(1);
        for c in 0..k - 1 {
            if a[c][c].is_zero() {
                match (c + 1..k).find(|&r| !a[r][c].is_zero()) {
                    Some(r) => {
                        a.swap(c, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in c + 1..k {
                for j in c + 1..k {
                    let v = &a[i][j] * &a[c][c] - &a[i][c] * &a[c][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[c][c].clone();
        }
        let d = a[k - 1][k - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Determinant in `0..n`.
    pub fn det_mod(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let rows = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let d = Self::integer_det(rows).mod_floor(&BigInt::from(self.modulus));
        Ok(d.to_u64().expect("reduced determinant fits"))
    }

    pub fn is_invertible(&self) -> Result<bool> {
        Ok(is_unit(self.det_mod()?, self.modulus))
    }

    /// Inverse via the adjugate; `NotAUnit` when the determinant is not a unit.
    pub fn inverse(&self) -> Result<ResidueMatrix> {
        let det = self.det_mod()?;
        let n = self.modulus;
        let det_inv = inv_mod(det, n)?;
        let k = self.rows;
        let mut out = ResidueMatrix::zeros(n, k, k);
        for i in 0..k {
            for j in 0..k {
                // cofactor C_{j,i} lands at (i, j)
                let minor: Vec<Vec<BigInt>> = (0..k)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..k)
                            .filter(|&c| c != i)
                            .map(|c| BigInt::from(self.get(r, c)))
                            .collect()
                    })
                    .collect();
                let mut c = Self::integer_det(minor);
                if (i + j) % 2 == 1 {
                    c = -c;
                }
                let c = c.mod_floor(&BigInt::from(n)).to_u64().expect("reduced");
                out.set(i, j, mulmod(c, det_inv, n));
            }
        }
        Ok(out)
    }

    /// Howell normal form: a canonical generating set of the row span.
    ///
    /// Two matrices with the same modulus and column count span the same
    /// submodule of `Z_n^cols` exactly when their Howell forms are equal.
    pub fn howell_form(&self) -> ResidueMatrix {
        let n = self.modulus;
        let cols = self.cols;
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| self.row(i).to_vec())
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let mut r = 0usize;
        for j in 0..cols {
            let Some(found) = (r..rows.len()).find(|&i| rows[i][j] != 0) else {
                continue;
            };
            rows.swap(r, found);
            for i in r + 1..rows.len() {
                if rows[i][j] == 0 {
                    continue;
                }
                let (_, s, t, u, v) = gcdex(rows[r][j], rows[i][j]);
                let top = combine(&rows[r], &rows[i], s, t, n);
                let bottom = combine(&rows[r], &rows[i], u, v, n);
                rows[r] = top;
                rows[i] = bottom;
            }
            let unit = normalizing_unit(rows[r][j], n);
            for x in rows[r].iter_mut() {
                *x = mulmod(*x, unit, n);
            }
            let pivot = rows[r][j];
            for i in 0..r {
                let quot = rows[i][j] / pivot;
                if quot != 0 {
                    let pivot_row = rows[r].clone();
                    for (x, &y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x = (*x + n - mulmod(quot, y, n)) % n;
                    }
                }
            }
            // pivot divides n; the annihilator row keeps the span closed
            let ann: Vec<u64> = rows[r].iter().map(|&x| mulmod(x, n / pivot, n)).collect();
            if ann.iter().any(|&x| x != 0) {
                rows.push(ann);
            }
            r += 1;
        }
        rows.truncate(r);
        debug_assert!(rows.iter().all(|row| row.iter().any(|&x| x != 0)));
        ResidueMatrix {
            modulus: n,
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Whether `self` and `other` generate the same row span.
    pub fn same_row_span(&self, other: &ResidueMatrix) -> bool {
        self.modulus == other.modulus
            && self.cols == other.cols
            && self.howell_form() == other.howell_form()
    }
}

fn combine(a: &[u64], b: &[u64], s: i128, t: i128, n: u64) -> Vec<u64> {
    let n128 = n as i128;
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let v = (s.rem_euclid(n128) * x as i128 + t.rem_euclid(n128) * y as i128) % n128;
            v as u64
        })
        .collect()
}
