//! Ground truth that shares no code with the closed forms: exhaustive
//! enumeration, and the Gauss-sum expansion of `N*`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_traits::{Float, FloatConst, One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ffield::{Fe, FieldSpec};
use crate::modring::{gcd, inv_mod};
use crate::polyform::{reduce_exponent, SparsePoly, TriangularPoly};

/// Default cap on enumerated points.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest distance from an integer tolerated by [`charsum_nstar`].
pub const PRECISION_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteCounts {
    /// Roots in `F_q^n`.
    pub n: u64,
    /// Roots in `(F_q^*)^n`.
    pub n_star: u64,
}

fn check_budget(q: u64, dims: usize, budget: u64) -> Result<()> {
    let points = BigUint::from(q).pow(dims as u32);
    if points > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            points: points.to_string(),
            budget,
        });
    }
    Ok(())
}

/// `f` with its exponents reduced so evaluation only needs `pow_u64`.
struct Evaluator<'a> {
    field: &'a FieldSpec,
    coeffs: Vec<Fe>,
    /// `expo[t][i]`
    expo: Vec<Vec<u64>>,
    neg_b: Fe,
}

impl<'a> Evaluator<'a> {
    fn new(f: &'a SparsePoly) -> Self {
        let field = f.field().as_ref();
        let order = field.order();
        Evaluator {
            field,
            coeffs: f.terms().iter().map(|t| t.coeff).collect(),
            expo: f
                .terms()
                .iter()
                .map(|t| t.expo.iter().map(|d| reduce_exponent(d, order)).collect())
                .collect(),
            neg_b: field.neg(f.b()),
        }
    }

    /// Counts roots whose first coordinate is `x0`, returning `(all, nonzero)`.
    fn count_slice(&self, x0: Fe, n_vars: usize) -> (u64, u64) {
        let k = self.field;
        let m = self.coeffs.len();
        // partial[d][t]: term t with coordinates 0..d substituted
        let mut partial = vec![vec![Fe::ZERO; m]; n_vars + 1];
        partial[0].clone_from(&self.coeffs);
        let mut point = vec![Fe::ZERO; n_vars];
        let mut zeros = vec![0usize; n_vars + 1];
        point[0] = x0;
        let q = k.q();
        let (mut all, mut nonzero) = (0u64, 0u64);
        let mut depth = 0usize;
        loop {
            // descend, filling partial products for coordinates depth..n
            for d in depth..n_vars {
                let x = point[d];
                let (lo, hi) = partial.split_at_mut(d + 1);
                for ((next, &prev), expo) in hi[0].iter_mut().zip(&lo[d]).zip(&self.expo) {
                    *next = k.mul(prev, k.pow_u64(x, expo[d]));
                }
                zeros[d + 1] = zeros[d] + usize::from(x.is_zero());
            }
            let value = partial[n_vars]
                .iter()
                .fold(self.neg_b, |acc, &v| k.add(acc, v));
            if value.is_zero() {
                all += 1;
                if zeros[n_vars] == 0 {
                    nonzero += 1;
                }
            }
            // odometer, last coordinate fastest; coordinate 0 is fixed
            let mut d = n_vars;
            loop {
                d -= 1;
                if d == 0 {
                    return (all, nonzero);
                }
                let next = point[d].raw() + 1;
                if next < q {
                    point[d] = Fe::from_raw(next);
                    break;
                }
                point[d] = Fe::ZERO;
            }
            depth = d;
        }
    }
}

/// Exact `N(f)` and `N*(f)` by enumerating all of `F_q^n`.
///
/// Work is split by the value of the first coordinate; `threads = 0` uses
/// rayon's global pool, `threads = 1` runs inline.
pub fn brute_force_count(f: &SparsePoly, budget: u64, threads: usize) -> Result<BruteCounts> {
    let field = f.field();
    let n_vars = f.n_vars();
    check_budget(field.q(), n_vars, budget)?;
    let ev = Evaluator::new(f);
    let slice = |x0: u64| ev.count_slice(Fe::from_raw(x0), n_vars);
    let merge = |a: (u64, u64), b: (u64, u64)| (a.0 + b.0, a.1 + b.1);
    let q = field.q();
    let (n, n_star) = match threads {
        1 => (0..q).map(slice).fold((0, 0), merge),
        0 => (0..q).into_par_iter().map(slice).reduce(|| (0, 0), merge),
        t => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidPolynomial(format!("thread pool: {e}")))?
            .install(|| (0..q).into_par_iter().map(slice).reduce(|| (0, 0), merge)),
    };
    Ok(BruteCounts { n, n_star })
}

/// All roots of `f` as vectors of packed field elements.
pub fn root_set(f: &SparsePoly, nonzero_only: bool, budget: u64) -> Result<BTreeSet<Vec<u64>>> {
    let field = f.field();
    let n_vars = f.n_vars();
    check_budget(field.q(), n_vars, budget)?;
    let start = u64::from(nonzero_only);
    let q = field.q();
    let mut point = vec![start; n_vars];
    let mut roots = BTreeSet::new();
    let mut fe = vec![Fe::ZERO; n_vars];
    loop {
        for (slot, &v) in fe.iter_mut().zip(&point) {
            *slot = Fe::from_raw(v);
        }
        if f.evaluate(&fe)?.is_zero() {
            roots.insert(point.clone());
        }
        let mut d = n_vars;
        loop {
            if d == 0 {
                return Ok(roots);
            }
            d -= 1;
            point[d] += 1;
            if point[d] < q {
                break;
            }
            point[d] = start;
        }
    }
}

/// A Gauss sum together with a bound on its floating-point error.
#[derive(Clone, Copy, Debug)]
pub struct GaussValue<F> {
    pub value: Complex<F>,
    pub error: F,
}

/// Discrete logs and traces of every nonzero element, under a chosen
/// generator.
struct CharTable {
    q: u64,
    p: u64,
    /// `(log a, Tr a)` indexed by packed `a`, entry 0 unused.
    log_trace: Vec<(u64, u64)>,
}

impl CharTable {
    fn new(field: &FieldSpec, generator: Fe) -> Result<Self> {
        let order = field.order();
        let g_log = field.dlog(generator)?;
        if gcd(g_log, order) != 1 {
            return Err(Error::InvalidElement(format!(
                "{} is not a generator",
                generator.raw()
            )));
        }
        let rescale = inv_mod(g_log, order)?;
        let log_trace = (0..field.q())
            .map(|a| {
                if a == 0 {
                    return (0, 0);
                }
                let x = Fe::from_raw(a);
                let l = field.dlog(x).expect("nonzero");
                let l = (l as u128 * rescale as u128 % order as u128) as u64;
                (l, field.trace(x))
            })
            .collect();
        Ok(CharTable {
            q: field.q(),
            p: field.p(),
            log_trace,
        })
    }

    fn gauss<F: Float + FloatConst>(&self, k: u64) -> GaussValue<F> {
        let n = self.q - 1;
        let k = k % n;
        let two_pi = F::TAU();
        let mut re = Kahan::<F>::new();
        let mut im = Kahan::<F>::new();
        for &(l, tr) in &self.log_trace[1..] {
            // ω(a)^{-k} δ_p^{Tr a} = exp(2πi (Tr a / p - k·log a / (q-1)))
            let neg = (n - (k as u128 * l as u128 % n as u128) as u64) % n;
            let turns = frac::<F>(neg, n) + frac::<F>(tr, self.p);
            let angle = two_pi * turns;
            re.add(angle.cos());
            im.add(angle.sin());
        }
        let terms = F::from(n).expect("fits");
        GaussValue {
            value: Complex::new(re.sum(), im.sum()),
            error: terms * F::epsilon() * F::from(8.0).expect("fits"),
        }
    }
}

fn frac<F: Float>(num: u64, den: u64) -> F {
    F::from(num).expect("fits") / F::from(den).expect("fits")
}

struct Kahan<F> {
    sum: F,
    carry: F,
}

impl<F: Float> Kahan<F> {
    fn new() -> Self {
        Kahan {
            sum: F::zero(),
            carry: F::zero(),
        }
    }

    fn add(&mut self, x: F) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn sum(&self) -> F {
        self.sum
    }
}

/// `G(k) = Σ_{a≠0} ω(a)^{-k} δ_p^{Tr(a)}` with `ω` built from the field's
/// fixed generator.
pub fn gauss_sum<F: Float + FloatConst>(k: u64, field: &FieldSpec) -> GaussValue<F> {
    let table = CharTable::new(field, field.generator()).expect("fixed generator is primitive");
    table.gauss(k)
}

/// `N*(f)` from the Gauss-sum expansion over the solutions `v` of
/// `D̃_f·v ≡ 0 (mod q - 1)`, evaluated in double precision and rounded.
///
/// The first row of `D̃_f` is all ones, so `v_m` is determined by the other
/// coordinates and only `(q-1)^{m-1}` vectors are visited.
pub fn charsum_nstar(f: &SparsePoly, budget: u64) -> Result<u64> {
    charsum_nstar_with_generator(f, f.field().generator(), budget)
}

/// [`charsum_nstar`] with `ω` defined through another primitive element.
pub fn charsum_nstar_with_generator(f: &SparsePoly, generator: Fe, budget: u64) -> Result<u64> {
    let field = f.field();
    let order = field.order();
    let aug = f.augmented_degree_matrix();
    let coeffs = f.coefficient_vector();
    let m = coeffs.len();
    let n = f.n_vars();
    if m == 0 {
        // f = 0 identically: every point is a root
        return Ok(order.pow(n as u32));
    }
    check_budget(order, m - 1, budget)?;
    let table = CharTable::new(field, generator)?;
    let gauss: Vec<GaussValue<f64>> = (0..order).map(|k| table.gauss(k)).collect();
    let coeff_logs: Vec<u64> = coeffs
        .iter()
        .map(|&a| table.log_trace[a.raw() as usize].0)
        .collect();
    let rows = aug.to_rows();

    let mut re = Kahan::<f64>::new();
    let mut im = Kahan::<f64>::new();
    let mut err = 0.0f64;
    let mut v = vec![0u64; m];
    loop {
        let head: u64 = v[..m - 1].iter().sum::<u64>() % order;
        v[m - 1] = (order - head) % order;
        let solves = rows[1..].iter().all(|row| {
            row.iter()
                .zip(&v)
                .fold(0u128, |acc, (&d, &x)| acc + d as u128 * x as u128)
                % order as u128
                == 0
        });
        if solves {
            let mut term = Complex::new(1.0f64, 0.0);
            let mut mag_err = 0.0;
            for j in 0..m {
                let g = gauss[v[j] as usize];
                let turns =
                    (coeff_logs[j] as u128 * v[j] as u128 % order as u128) as f64 / order as f64;
                let w = Complex::from_polar(1.0, TAU * turns);
                mag_err += g.error / g.value.norm().max(1.0) + 4.0 * f64::EPSILON;
                term = term * w * g.value;
            }
            err += term.norm() * mag_err;
            re.add(term.re);
            im.add(term.im);
        }
        // odometer over v_1..v_{m-1}
        let mut d = m - 1;
        let done = loop {
            if d == 0 {
                break true;
            }
            d -= 1;
            v[d] += 1;
            if v[d] < order {
                break false;
            }
            v[d] = 0;
        };
        if done {
            break;
        }
    }

    let qf = field.q() as f64;
    let lead = (order as f64).powi(n as i32) / qf;
    let scale = (order as f64).powi(n as i32 + 1 - m as i32) / qf;
    let value = lead + scale * re.sum();
    let bound = scale * err + value.abs() * f64::EPSILON * 4.0;
    let nearest = value.round();
    let distance = (value - nearest).abs().max((scale * im.sum()).abs());
    if distance > PRECISION_THRESHOLD || bound >= 0.5 {
        return Err(Error::PrecisionLoss {
            value,
            distance,
            bound,
        });
    }
    nearest.to_u64().ok_or(Error::PrecisionLoss {
        value,
        distance,
        bound,
    })
}

/// Fully triangular `f` split as `[b = 0]·q^{n-1} + Σ_k N*(f_k)·q^{n-k-1}`,
/// each `N*(f_k)` by enumeration. Returns the right-hand side together with
/// the per-level values.
pub fn decomposition_rhs(
    f: &TriangularPoly,
    budget: u64,
    threads: usize,
) -> Result<(BigInt, Vec<u64>)> {
    let q = BigInt::from(f.field().q());
    let n = f.n();
    let mut per_k = Vec::with_capacity(n);
    let mut total = if f.b().is_zero() {
        q.pow(n as u32 - 1)
    } else {
        BigInt::from(0)
    };
    for k in 1..=n {
        let fk = f.truncate(k)?.to_sparse();
        let c = brute_force_count(&fk, budget, threads)?.n_star;
        per_k.push(c);
        let weight = if k == n {
            BigInt::one()
        } else {
            q.pow((n - k - 1) as u32)
        };
        total += weight * c;
    }
    Ok((total, per_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::Term;
    use std::sync::Arc;

    fn poly(field: &Arc<FieldSpec>, terms: &[(u64, &[u64])], b: u64) -> SparsePoly {
        let n = terms[0].1.len();
        let terms = terms
            .iter()
            .map(|&(c, e)| Term::new(field.element(c).unwrap(), e))
            .collect();
        SparsePoly::new(field, n, terms, field.element(b).unwrap()).unwrap()
    }

    #[test]
    fn f31_counts() {
        let k = FieldSpec::new(31, 1).unwrap();
        let f = poly(
            &k,
            &[(11, &[13, 0, 0]), (5, &[21, 19, 0]), (12, &[2, 3, 17])],
            0,
        );
        let g = poly(
            &k,
            &[(11, &[1, 0, 0]), (5, &[0, 1, 0]), (12, &[0, 0, 1])],
            0,
        );
        assert_eq!(
            brute_force_count(&f, DEFAULT_BUDGET, 0).unwrap(),
            BruteCounts {
                n: 1861,
                n_star: 870
            }
        );
        assert_eq!(
            brute_force_count(&g, DEFAULT_BUDGET, 1).unwrap(),
            BruteCounts {
                n: 961,
                n_star: 870
            }
        );
        assert_eq!(charsum_nstar(&f, DEFAULT_BUDGET).unwrap(), 870);
    }

    #[test]
    fn thread_counts_agree() {
        let k = FieldSpec::new(13, 1).unwrap();
        let f = poly(&k, &[(3, &[2, 0, 5]), (7, &[1, 4, 0])], 5);
        let one = brute_force_count(&f, DEFAULT_BUDGET, 1).unwrap();
        assert_eq!(brute_force_count(&f, DEFAULT_BUDGET, 3).unwrap(), one);
        assert_eq!(brute_force_count(&f, DEFAULT_BUDGET, 0).unwrap(), one);
    }

    #[test]
    fn small_root_sets() {
        let k = FieldSpec::new(5, 1).unwrap();
        // x^2 - 1
        let f = poly(&k, &[(1, &[2])], 1);
        let roots: Vec<Vec<u64>> = root_set(&f, false, 100).unwrap().into_iter().collect();
        assert_eq!(roots, vec![vec![1], vec![4]]);
        // x
        let x = poly(&k, &[(1, &[1])], 0);
        assert_eq!(
            brute_force_count(&x, 100, 1).unwrap(),
            BruteCounts { n: 1, n_star: 0 }
        );
        assert_eq!(charsum_nstar(&x, 100).unwrap(), 0);
        // the constant polynomial -4 has no roots
        let c = SparsePoly::new(&k, 1, vec![], k.element(4).unwrap()).unwrap();
        assert!(root_set(&c, false, 100).unwrap().is_empty());
    }

    #[test]
    fn f5_equivalent_pair_has_different_roots() {
        let k = FieldSpec::new(5, 1).unwrap();
        let f = poly(&k, &[(1, &[2, 3]), (1, &[1, 2])], 0);
        let g = poly(&k, &[(1, &[1, 1]), (1, &[3, 2])], 0);
        let rf = root_set(&f, true, 100).unwrap();
        let rg = root_set(&g, true, 100).unwrap();
        assert_eq!(rf.len(), rg.len());
        assert_ne!(rf, rg);
        let brute = brute_force_count(&f, 100, 1).unwrap().n_star;
        assert_eq!(charsum_nstar(&f, 100).unwrap(), brute);
        assert_eq!(charsum_nstar(&g, 100).unwrap(), brute);
    }

    #[test]
    fn gauss_sum_properties() {
        for (p, m) in [(5, 1), (7, 1), (3, 2), (13, 1)] {
            let k = FieldSpec::new(p, m).unwrap();
            let g0 = gauss_sum::<f64>(0, &k);
            assert!((g0.value - Complex::new(-1.0, 0.0)).norm() < 1e-9);
            let sq = (k.q() as f64).sqrt();
            for j in 1..k.order() {
                assert!((gauss_sum::<f64>(j, &k).value.norm() - sq).abs() < 1e-9);
            }
        }
        let k = FieldSpec::new(5, 1).unwrap();
        let g2 = gauss_sum::<f64>(2, &k).value;
        assert!(g2.im.abs() < 1e-9);
        assert!((g2.re.abs() - 5f64.sqrt()).abs() < 1e-9);
        let g2_single = gauss_sum::<f32>(2, &k).value;
        assert!((g2_single.re as f64 - g2.re).abs() < 1e-4);
    }

    #[test]
    fn generator_choice_is_irrelevant() {
        let k = FieldSpec::new(13, 1).unwrap();
        let f = poly(&k, &[(3, &[2, 1]), (7, &[4, 3]), (2, &[0, 6])], 9);
        let base = charsum_nstar(&f, DEFAULT_BUDGET).unwrap();
        // 2 and 6 are primitive mod 13; 3 is not
        assert_eq!(
            charsum_nstar_with_generator(&f, k.element(6).unwrap(), DEFAULT_BUDGET).unwrap(),
            base
        );
        assert_eq!(
            base,
            brute_force_count(&f, DEFAULT_BUDGET, 1).unwrap().n_star
        );
        assert!(charsum_nstar_with_generator(&f, k.element(3).unwrap(), DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn decomposition_for_f31() {
        let k = FieldSpec::new(31, 1).unwrap();
        let f = TriangularPoly::from_u64(&k, &[11, 5, 12], 0, &[&[13], &[21, 19], &[2, 3, 17]])
            .unwrap();
        let (rhs, per_k) = decomposition_rhs(&f, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(per_k, vec![0, 30, 870]);
        assert_eq!(rhs, 1861.into());
    }

    #[test]
    fn budget_is_enforced() {
        let k = FieldSpec::new(31, 1).unwrap();
        let f = poly(&k, &[(1, &[1, 1, 1])], 0);
        assert!(matches!(
            brute_force_count(&f, 1000, 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
