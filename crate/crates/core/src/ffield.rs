//! Finite fields `F_q`, `q = p^m`, at desk scale.
//!
//! Elements are stored packed as the integer `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`
//! of their coefficient vector over the prime field, so an element of `F_q` is
//! a value in `0..q` and prime-field elements are just their residues. All
//! arithmetic goes through the owning [`FieldSpec`]; [`FieldElement`] bundles
//! a value with its field for a checked, self-describing API.
//!
//! Construction is deterministic. The modulus for `m > 1` is the first monic
//! irreducible polynomial when monic polynomials are ordered by the packed
//! integer of their lower coefficients, and the generator is the smallest
//! packed value of multiplicative order `q - 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `q` accepted by [`FieldSpec::new`].
pub const DEFAULT_FIELD_BOUND: u64 = 1_000_000_000;

/// Fields below this size get full log/antilog tables.
pub const DLOG_TABLE_THRESHOLD: u64 = 1 << 20;

/// A packed field element. Only meaningful together with its [`FieldSpec`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Unchecked construction; callers guarantee `v < q`.
    #[inline]
    pub(crate) fn from_raw(v: u64) -> Fe {
        Fe(v)
    }
}

struct LogTables {
    // log[0] is unused
    log: Vec<u32>,
    exp: Vec<u64>,
}

struct BabySteps {
    step: u64,
    table: HashMap<u64, u64>,
    giant: Fe,
}

/// The field `F_q` together with its fixed modulus and generator.
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
    /// Monic modulus, least significant coefficient first, length `m + 1`.
    modulus: Vec<u64>,
    generator: Fe,
    order_primes: Vec<u64>,
    tables: Option<LogTables>,
    baby_steps: OnceLock<BabySteps>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator.0)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, least significant coefficient first.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod_p(a: u64, p: u64) -> u64 {
        super::pow_mod(a, p - 2, p)
    }

    /// Remainder of `a` modulo a nonzero `b`.
    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod_p(b[db], p);
        while r.len() > db {
            let top = r.len() - 1;
            let c = (r[top] as u128 * lead_inv as u128 % p as u128) as u64;
            if c != 0 {
                let shift = top - db;
                for (i, &bi) in b.iter().enumerate() {
                    let sub = (c as u128 * bi as u128 % p as u128) as u64;
                    r[shift + i] = (r[shift + i] + p - sub) % p;
                }
            }
            trim(&mut r);
        }
        r
    }

    /// Monic polynomial of the given degree whose lower coefficients are the
    /// base-`p` digits of `index`.
    pub fn monic_from_index(mut index: u64, degree: usize, p: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            out.push(index % p);
            index /= p;
        }
        out.push(1);
        out
    }

    /// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let deg = f.len() - 1;
        if deg == 0 || f[deg] != 1 {
            return false;
        }
        if deg == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let g = monic_from_index(idx, d, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % n as u128) as u64;
        }
        base = (base as u128 * base as u128 % n as u128) as u64;
        e >>= 1;
    }
    acc
}

impl FieldSpec {
    /// Builds `F_{p^m}` with the default size bound.
    pub fn new(p: u64, m: u32) -> Result<Arc<FieldSpec>> {
        Self::with_bound(p, m, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(p: u64, m: u32, bound: u64) -> Result<Arc<FieldSpec>> {
        let q = Self::check_size(p, m, bound)?;
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            let count = p.pow(m);
            (0..count)
                .map(|idx| fp_poly::monic_from_index(idx, m as usize, p))
                .find(|f| fp_poly::is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        Ok(Arc::new(Self::assemble(p, m, q, modulus)))
    }

    /// Builds `F_{p^m}` over a caller-supplied monic modulus of degree `m`
    /// (least significant coefficient first, leading 1 included).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Arc<FieldSpec>> {
        if modulus.len() < 2 {
            return Err(Error::DegreeZero);
        }
        let m = (modulus.len() - 1) as u32;
        let q = Self::check_size(p, m, DEFAULT_FIELD_BOUND)?;
        if m == 1 {
            // any monic linear polynomial defines the prime field itself
            if modulus[1] != 1 || modulus[0] >= p {
                return Err(Error::ReducibleModulus(m));
            }
            return Ok(Arc::new(Self::assemble(p, 1, q, vec![0, 1])));
        }
        if modulus.iter().any(|&c| c >= p) || !fp_poly::is_irreducible(modulus, p) {
            return Err(Error::ReducibleModulus(m));
        }
        Ok(Arc::new(Self::assemble(p, m, q, modulus.to_vec())))
    }

    fn check_size(p: u64, m: u32, bound: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::DegreeZero);
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        match p.checked_pow(m) {
            Some(q) if q <= bound => Ok(q),
            _ => Err(Error::BoundExceeded { p, m, bound }),
        }
    }

    fn assemble(p: u64, m: u32, q: u64, modulus: Vec<u64>) -> FieldSpec {
        let order_primes = prime_factors(q - 1);
        let mut field = FieldSpec {
            p,
            m,
            q,
            modulus,
            generator: Fe::ONE,
            order_primes,
            tables: None,
            baby_steps: OnceLock::new(),
        };
        field.generator = (1..q)
            .map(Fe)
            .find(|&g| field.has_full_order(g))
            .expect("the multiplicative group is cyclic");
        if q <= DLOG_TABLE_THRESHOLD {
            let mut log = vec![0u32; q as usize];
            let mut exp = Vec::with_capacity((q - 1) as usize);
            let mut x = Fe::ONE;
            for k in 0..q - 1 {
                exp.push(x.0);
                log[x.0 as usize] = k as u32;
                x = field.mul_slow(x, field.generator);
            }
            field.tables = Some(LogTables { log, exp });
        }
        field
    }

    fn has_full_order(&self, g: Fe) -> bool {
        let n = self.q - 1;
        self.order_primes
            .iter()
            .all(|&l| self.pow_slow(g, n / l) != Fe::ONE)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Order of the multiplicative group, `q - 1`.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// Monic modulus, least significant coefficient first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn has_log_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// All elements in packed order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q).map(Fe)
    }

    /// Validates a packed value.
    pub fn element(&self, packed: u64) -> Result<Fe> {
        if packed < self.q {
            Ok(Fe(packed))
        } else {
            Err(Error::InvalidElement(format!(
                "packed value {packed} not below q = {}",
                self.q
            )))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u64)
    }

    /// Element from its coefficient sequence, least significant first.
    /// Shorter sequences are zero-padded.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fe> {
        if coeffs.len() > self.m as usize {
            return Err(Error::InvalidElement(format!(
                "{} coefficients for an extension of degree {}",
                coeffs.len(),
                self.m
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::InvalidElement(format!(
                "coefficient {c} not reduced mod {}",
                self.p
            )));
        }
        Ok(self.encode(coeffs))
    }

    /// Coefficient sequence of length `m`, least significant first.
    pub fn coeffs(&self, a: Fe) -> Vec<u64> {
        self.decode(a)
    }

    fn decode(&self, a: Fe) -> Vec<u64> {
        let mut x = a.0;
        (0..self.m)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    fn encode(&self, coeffs: &[u64]) -> Fe {
        Fe(coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c))
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.m == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u64, 1u64);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.m == 1 {
            return Fe(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0u64, 1u64);
        while x > 0 {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let n = self.q - 1;
                let s = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
                Fe(t.exp[(if s >= n { s - n } else { s }) as usize])
            }
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p;
        if self.m == 1 {
            return Fe((a.0 as u128 * b.0 as u128 % p as u128) as u64);
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let mut prod = vec![0u64; x.len() + y.len() - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj % p) % p;
            }
        }
        let r = fp_poly::rem(&prod, &self.modulus, p);
        self.encode(&r)
    }

    fn pow_slow(&self, a: Fe, mut e: u64) -> Fe {
        let mut acc = Fe::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` for a machine-word exponent; `a^0 = 1` for every `a`.
    pub fn pow_u64(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let n = self.q - 1;
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u128 * (e % n) as u128 % n as u128;
                Fe(t.exp[l as usize])
            }
            None => self.pow_slow(a, e % n),
        }
    }

    /// `a^e` for an arbitrary-precision exponent.
    pub fn pow(&self, a: Fe, e: &BigUint) -> Fe {
        if e.is_zero() {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let r = (e % (self.q - 1)).to_u64().expect("reduced exponent fits");
        // a nonzero base with e ≡ 0 (mod q-1) yields 1 either way
        self.pow_u64(a, r)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow_u64(a, self.q - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `g^k` for the fixed generator `g`.
    pub fn exp_generator(&self, k: u64) -> Fe {
        let n = self.q - 1;
        match &self.tables {
            Some(t) => Fe(t.exp[(k % n) as usize]),
            None => self.pow_slow(self.generator, k % n),
        }
    }

    /// Discrete logarithm to the fixed generator, in `0..q-1`.
    pub fn dlog(&self, a: Fe) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::LogOfZero);
        }
        if let Some(t) = &self.tables {
            return Ok(t.log[a.0 as usize] as u64);
        }
        let bs = self.baby_steps.get_or_init(|| self.build_baby_steps());
        let mut gamma = a;
        for i in 0..bs.step {
            if let Some(&j) = bs.table.get(&gamma.0) {
                return Ok((i * bs.step + j) % (self.q - 1));
            }
            gamma = self.mul_slow(gamma, bs.giant);
        }
        unreachable!("generator has full order")
    }

    fn build_baby_steps(&self) -> BabySteps {
        let n = self.q - 1;
        let step = (n as f64).sqrt().ceil() as u64 + 1;
        let mut table = HashMap::with_capacity(step as usize);
        let mut x = Fe::ONE;
        for j in 0..step {
            table.entry(x.0).or_insert(j);
            x = self.mul_slow(x, self.generator);
        }
        // x = g^step now
        let giant = self.pow_slow(x, n - 1);
        BabySteps { step, table, giant }
    }

    /// Absolute trace to the prime field, returned as a residue in `0..p`.
    pub fn trace(&self, a: Fe) -> u64 {
        let mut acc = Fe::ZERO;
        let mut x = a;
        for _ in 0..self.m {
            acc = self.add(acc, x);
            x = self.pow_u64(x, self.p);
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    /// Quadratic character: 0 at zero, +1 on nonzero squares, -1 otherwise.
    pub fn quadratic_character(&self, a: Fe) -> Result<i8> {
        if !self.is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let parity = match &self.tables {
            Some(t) => t.log[a.0 as usize] % 2,
            None => {
                // Euler's criterion, equivalent to the parity of the log
                let h = self.pow_slow(a, (self.q - 1) / 2);
                if h == Fe::ONE {
                    0
                } else {
                    1
                }
            }
        };
        Ok(if parity == 0 { 1 } else { -1 })
    }
}

/// An element bundled with its field.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<FieldSpec>,
    value: Fe,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.m == 1 {
            write!(f, "{}", self.value.0)
        } else {
            write!(f, "{:?}", self.field.coeffs(self.value))
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && same_field(&self.field, &other.field)
    }
}

impl Eq for FieldElement {}

pub(crate) fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElement {
    pub fn new(field: &Arc<FieldSpec>, value: Fe) -> Self {
        debug_assert!(value.0 < field.q);
        FieldElement {
            field: Arc::clone(field),
            value,
        }
    }

    pub fn from_int(field: &Arc<FieldSpec>, n: i64) -> Self {
        Self::new(field, field.from_int(n))
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Self::new(field, Fe::ZERO)
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Self::new(field, Fe::ONE)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: Fe) -> Self {
        Self::new(&self.field, value)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.div(self.value, other.value)?))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        self.with(self.field.pow(self.value, e))
    }

    pub fn dlog(&self) -> Result<u64> {
        self.field.dlog(self.value)
    }

    pub fn trace(&self) -> u64 {
        self.field.trace(self.value)
    }

    pub fn quadratic_character(&self) -> Result<i8> {
        self.field.quadratic_character(self.value)
    }
}
