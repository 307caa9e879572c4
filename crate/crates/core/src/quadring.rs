//! The ring `K[τ]/(τ² - D)` over a scalar field `K`, with `D = η(-1)·q`.
//!
//! Instantiated with exact rationals it evaluates the ζ-formulas for
//! quadratic root counts without any rounding; instantiated with `f64` it
//! gives a quick numerical cross-check.

use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Scalars the ring can be built over.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    fn from_bigint(n: &BigInt) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    /// The exact integer this scalar equals, if it is one.
    fn to_exact_integer(&self) -> Option<BigInt>;
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn to_exact_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.to_integer())
    }
}

impl Scalar for f64 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn to_exact_integer(&self) -> Option<BigInt> {
        (self.is_finite() && self.fract() == 0.0).then(|| BigInt::from(*self as i128))
    }
}

impl Scalar for f32 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }

    fn to_exact_integer(&self) -> Option<BigInt> {
        (self.is_finite() && self.fract() == 0.0).then(|| BigInt::from(*self as i128))
    }
}

/// `rat + tau·τ` with `τ² = disc`.
#[derive(Clone, PartialEq)]
pub struct QuadRing<T> {
    rat: T,
    tau: T,
    disc: i64,
}

impl<T: Debug> Debug for QuadRing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})·√{}", self.rat, self.tau, self.disc)
    }
}

/// `η(-1)·q`, i.e. `q` when `q ≡ 1 (mod 4)` and `-q` when `q ≡ 3 (mod 4)`.
pub fn discriminant(q: u64) -> i64 {
    assert!(q % 2 == 1, "quadratic ring needs odd q");
    if q % 4 == 1 {
        q as i64
    } else {
        -(q as i64)
    }
}

impl<T: Scalar> QuadRing<T> {
    pub fn new(rat: T, tau: T, disc: i64) -> Self {
        QuadRing { rat, tau, disc }
    }

    pub fn from_scalar(rat: T, disc: i64) -> Self {
        Self::new(rat, T::zero(), disc)
    }

    pub fn from_int(n: i64, disc: i64) -> Self {
        Self::from_scalar(T::from_i64(n), disc)
    }

    pub fn from_bigint(n: &BigInt, disc: i64) -> Self {
        Self::from_scalar(T::from_bigint(n), disc)
    }

    pub fn zero(disc: i64) -> Self {
        Self::from_scalar(T::zero(), disc)
    }

    pub fn one(disc: i64) -> Self {
        Self::from_scalar(T::one(), disc)
    }

    /// The generator `τ` itself.
    pub fn tau(disc: i64) -> Self {
        Self::new(T::zero(), T::one(), disc)
    }

    pub fn rational_part(&self) -> &T {
        &self.rat
    }

    pub fn tau_part(&self) -> &T {
        &self.tau
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.tau.is_zero()
    }

    /// Image under `τ ↦ -τ`.
    pub fn conj(&self) -> Self {
        Self::new(self.rat.clone(), -self.tau.clone(), self.disc)
    }

    /// `rat² - disc·tau²`.
    pub fn norm(&self) -> T {
        self.rat.clone() * self.rat.clone()
            - T::from_i64(self.disc) * self.tau.clone() * self.tau.clone()
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(
            self.rat.clone() * c.clone(),
            self.tau.clone() * c.clone(),
            self.disc,
        )
    }

    /// Division by a nonzero scalar.
    pub fn div_scalar(&self, c: &T) -> Self {
        assert!(!c.is_zero(), "division by zero scalar");
        Self::new(
            self.rat.clone() / c.clone(),
            self.tau.clone() / c.clone(),
            self.disc,
        )
    }

    /// Division by `τ`: `(x + yτ)/τ = y + (x/disc)·τ`.
    pub fn div_tau(&self) -> Self {
        Self::new(
            self.tau.clone(),
            self.rat.clone() / T::from_i64(self.disc),
            self.disc,
        )
    }

    /// Division in the ring; `None` when the divisor has zero norm.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.disc, other.disc, "mixed discriminants");
        let norm = other.norm();
        if norm.is_zero() {
            return None;
        }
        Some((self.clone() * other.conj()).div_scalar(&norm))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.disc);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// The integer value, when the τ-part vanishes and the rational part is
    /// an integer.
    pub fn integral_value(&self) -> Option<BigInt> {
        if !self.tau.is_zero() {
            return None;
        }
        self.rat.to_exact_integer()
    }
}

impl<T: Scalar> Add for QuadRing<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.disc, rhs.disc, "mixed discriminants");
        QuadRing::new(self.rat + rhs.rat, self.tau + rhs.tau, self.disc)
    }
}

impl<T: Scalar> Sub for QuadRing<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.disc, rhs.disc, "mixed discriminants");
        QuadRing::new(self.rat - rhs.rat, self.tau - rhs.tau, self.disc)
    }
}

impl<T: Scalar> Mul for QuadRing<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.disc, rhs.disc, "mixed discriminants");
        let d = T::from_i64(self.disc);
        let rat = self.rat.clone() * rhs.rat.clone() + d * self.tau.clone() * rhs.tau.clone();
        let tau = self.rat * rhs.tau + self.tau * rhs.rat;
        QuadRing::new(rat, tau, self.disc)
    }
}

impl<T: Scalar> Neg for QuadRing<T> {
    type Output = Self;
    fn neg(self) -> Self {
        QuadRing::new(-self.rat, -self.tau, self.disc)
    }
}

/// The pair `ζ₁ = τ - 1`, `ζ₂ = -τ - 1` for a given odd `q`.
#[derive(Clone, Debug)]
pub struct Zetas<T> {
    pub z1: QuadRing<T>,
    pub z2: QuadRing<T>,
}

impl<T: Scalar> Zetas<T> {
    pub fn new(q: u64) -> Self {
        let disc = discriminant(q);
        let tau = QuadRing::<T>::tau(disc);
        let one = QuadRing::<T>::one(disc);
        Zetas {
            z1: tau.clone() - one.clone(),
            z2: -tau - one,
        }
    }

    /// `ζ₂` with its sign flipped; exists only to check that the test
    /// suites notice a broken constant.
    pub fn with_flipped_zeta2(q: u64) -> Self {
        let z = Self::new(q);
        Zetas {
            z1: z.z1,
            z2: -z.z2,
        }
    }

    pub fn disc(&self) -> i64 {
        self.z1.disc()
    }

    /// `(ζ₁^r ζ₂^s + ζ₂^r ζ₁^s, ζ₁^r ζ₂^s - ζ₂^r ζ₁^s)`.
    pub fn symmetric_pair(&self, r: u32, s: u32) -> (QuadRing<T>, QuadRing<T>) {
        let x = self.z1.pow(r) * self.z2.pow(s);
        let y = self.z2.pow(r) * self.z1.pow(s);
        (x.clone() + y.clone(), x - y)
    }
}
