//! Square-free counts over polynomial values and arithmetic progressions,
//! and the truncated sieve `k_D(n) = sum_{d <= D, d^2 | n} mu(d)`.
//!
//! `k_D(n) = mu^2(n)` whenever `0 < |n| <= D^2`. Sums of `k_D` over
//! polynomial values swap the order of summation: for every square-free
//! `d <= D`, the `n <= x` with `d^2 | f(n)` fall into `rho_f(d^2)` residue
//! classes modulo `d^2`, each counted in constant time.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    count_in_class, divisors_u64, factor, factor_u64, inv_mod_i128, mobius_sieve, mu_squared,
    primes_up_to, squarefree_sieve_interval,
};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::roots::{crt_combine, RhoTable};

/// Largest `D` the automatic strategy of [`count_squarefree_values`] will
/// use for the `k_D` identity.
pub const KD_SHORTCUT_LIMIT: u64 = 1_000_000;

/// Largest `D` accepted where a full Möbius table up to `D` is built.
pub const MAX_MOBIUS_TABLE: u64 = 100_000_000;

/// The integers `n` in `[lo, hi]` with `n = a mod q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct APWindow {
    pub lo: u64,
    pub hi: u64,
    pub q: u64,
    pub a: u64,
}

impl APWindow {
    pub fn new(lo: u64, hi: u64, q: u64, a: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidWindow(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
        }
        if q == 0 || a >= q {
            return Err(Error::InvalidWindow(format!("need 0 <= a < q, got a = {a}, q = {q}")));
        }
        Ok(APWindow { lo, hi, q, a })
    }

    /// Window `[ceil(x - y), floor(x)]` with modulus `q`, residue `a`.
    pub fn from_endpoint(x: f64, y: f64, q: u64, a: u64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || y < 0.0 {
            return Err(Error::InvalidWindow(format!("x = {x}, y = {y}")));
        }
        Self::new((x - y).ceil().max(1.0) as u64, x.floor() as u64, q, a)
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// How [`count_squarefree_values_with`] evaluates the count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountStrategy {
    /// The `k_D` identity when `D` is small enough, otherwise `Direct`.
    #[default]
    Auto,
    /// Factor every value.
    Direct,
    /// `sum k_D(f(n))` with `D >= sqrt(max |f(n)|)`; needs primitive `f`.
    KdIdentity,
}

/// `sum_{1 <= n <= x} mu^2(f(n))`.
pub fn count_squarefree_values(f: &IntPoly, x: u64) -> Result<u64> {
    count_squarefree_values_with(f, x, CountStrategy::Auto)
}

pub fn count_squarefree_values_with(f: &IntPoly, x: u64, strategy: CountStrategy) -> Result<u64> {
    if x == 0 {
        return Err(Error::NonPositive("x".into()));
    }
    if f.is_zero() {
        return Ok(0);
    }
    let identity_d = || -> Option<u64> {
        if f.degree() == Some(0) || !f.is_primitive() {
            return None;
        }
        let d = ceil_sqrt(&value_bound(f, x));
        d.to_u64().filter(|&d| d < u32::MAX as u64)
    };
    let use_identity = match strategy {
        CountStrategy::Direct => None,
        CountStrategy::KdIdentity => match identity_d() {
            Some(d) => Some(d),
            None => {
                return Err(Error::InvalidParameter(
                    "k_D identity needs a primitive non-constant polynomial of moderate size".into(),
                ))
            }
        },
        CountStrategy::Auto => {
            identity_d().filter(|&d| d <= KD_SHORTCUT_LIMIT && d <= x.saturating_mul(16))
        }
    };
    match use_identity {
        Some(d) => {
            let sum = sum_kd_values(f, x, d)?;
            let zeros = integer_roots_in(f, x).len() as i64;
            let corrected = sum - zeros * mertens(d)?;
            Ok(corrected as u64)
        }
        None => Ok((1..=x)
            .into_par_iter()
            .map(|n| mu_squared(&f.eval(&BigInt::from(n))) as u64)
            .sum()),
    }
}

/// `sum |c_i| x^i`, an upper bound for `|f(n)|` on `[1, x]`.
fn value_bound(f: &IntPoly, x: u64) -> BigUint {
    let xb = BigUint::from(x);
    f.coeffs()
        .iter()
        .fold(BigUint::zero(), |acc, c| acc * &xb + c.magnitude())
}

fn ceil_sqrt(v: &BigUint) -> BigUint {
    let s = v.sqrt();
    if &(&s * &s) == v {
        s
    } else {
        s + 1u32
    }
}

/// The `n` in `[1, x]` with `f(n) = 0`; `f` nonzero.
fn integer_roots_in(f: &IntPoly, x: u64) -> Vec<u64> {
    let asc = f.coeffs_ascending();
    let Some(c) = asc.iter().find(|c| !c.is_zero()) else { return Vec::new() };
    let is_root = |n: u64| f.eval(&BigInt::from(n)).is_zero();
    if let Some(c) = c.magnitude().to_u64() {
        return divisors_u64(c)
            .expect("nonzero")
            .into_iter()
            .filter(|&n| n <= x && is_root(n))
            .collect();
    }
    let lead = f.leading();
    let cauchy = f.coeffs()[1..]
        .iter()
        .map(|ci| (ci.abs() + lead.abs() - 1u32) / lead.abs())
        .max()
        .unwrap_or_default()
        + 1u32;
    let limit = cauchy.to_u64().unwrap_or(u64::MAX).min(x);
    (1..=limit).filter(|&n| is_root(n)).collect()
}

/// `M(D) = sum_{d <= D} mu(d)`.
pub fn mertens(d: u64) -> Result<i64> {
    check_table_size(d)?;
    let table = mobius_sieve(d)?;
    Ok(table.mu_values().unwrap().iter().map(|&m| m as i64).sum())
}

fn check_table_size(d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::NonPositive("D".into()));
    }
    if d > MAX_MOBIUS_TABLE {
        return Err(Error::OutOfRange(format!("D = {d} exceeds {MAX_MOBIUS_TABLE}")));
    }
    Ok(())
}

/// Signed count of square-free products of `primes` (sorted ascending)
/// that are at most `bound`: `sum mu(d)` over such `d`.
fn signed_subset_count(primes: &[u64], bound: u64) -> i64 {
    fn go(primes: &[u64], d: u64, bound: u64, sign: i64) -> i64 {
        let mut total = sign;
        for (i, &p) in primes.iter().enumerate() {
            match d.checked_mul(p) {
                Some(next) if next <= bound => total += go(&primes[i + 1..], next, bound, -sign),
                _ => break,
            }
        }
        total
    }
    go(primes, 1, bound, 1)
}

/// `k_D(n) = sum_{d <= D, d^2 | n} mu(d)`; `k_D(0) = M(D)`, sign of `n` ignored.
pub fn k_d(n: &BigInt, d: u64) -> Result<i64> {
    if d == 0 {
        return Err(Error::NonPositive("D".into()));
    }
    if n.is_zero() {
        return mertens(d);
    }
    let m = n.magnitude();
    let mut square_primes: Vec<u64> = if let Some(small) = m.to_u64() {
        factor_u64(small)?
            .into_iter()
            .filter(|&(p, e)| e >= 2 && p <= d)
            .map(|(p, _)| p)
            .collect()
    } else if d <= KD_SHORTCUT_LIMIT {
        primes_up_to(d)
            .into_iter()
            .filter(|&p| (m % (p * p)).is_zero())
            .collect()
    } else {
        factor(m)?
            .factors()
            .iter()
            .filter(|(_, e)| *e >= 2)
            .filter_map(|(p, _)| p.to_u64())
            .filter(|&p| p <= d)
            .collect()
    };
    square_primes.sort_unstable();
    Ok(signed_subset_count(&square_primes, d))
}

/// `k_D(n)` for every `n` in `[lo, hi]`, by striking multiples of `d^2`.
pub fn kd_sieve_interval(lo: u64, hi: u64, d: u64) -> Result<Vec<i32>> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidWindow(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
    }
    check_table_size(d)?;
    let bound = d.min(hi.sqrt());
    let table = mobius_sieve(bound.max(1))?;
    let mut out = vec![0i32; (hi - lo + 1) as usize];
    for dd in 1..=bound {
        let mu = table.mu(dd).unwrap();
        if mu == 0 {
            continue;
        }
        let sq = dd * dd;
        let mut n = lo.div_ceil(sq) * sq;
        while n <= hi {
            out[(n - lo) as usize] += mu as i32;
            n += sq;
        }
    }
    Ok(out)
}

/// `sum_{1 <= n <= x} k_D(f(n))`, evaluated through residue classes of the
/// roots of `f` modulo `d^2`. `f` must be primitive.
pub fn sum_kd_values(f: &IntPoly, x: u64, d: u64) -> Result<i64> {
    f.require_primitive()?;
    if x == 0 {
        return Err(Error::NonPositive("x".into()));
    }
    if d == 0 {
        return Err(Error::NonPositive("D".into()));
    }
    if d >= u32::MAX as u64 {
        return Err(Error::OutOfRange(format!("D = {d} must be below 2^32")));
    }
    let table = RhoTable::new(f)?;
    let primes = primes_up_to(d);
    table.precompute(&primes)?;
    let rooted: Vec<(u64, Vec<u64>)> = primes
        .iter()
        .filter_map(|&p| {
            let e = table.entry(p).expect("cached");
            (!e.roots_p2.is_empty()).then(|| (p, e.roots_p2.clone()))
        })
        .collect();

    let class_total = |roots: &[u64], m: u64| -> i128 {
        roots.iter().map(|&r| count_in_class(1, x as i128, r as i128, m as i128)).sum()
    };

    fn extend(
        rooted: &[(u64, Vec<u64>)],
        start: usize,
        d: u64,
        roots: &[u64],
        sign: i128,
        bound: u64,
        class_total: &(dyn Fn(&[u64], u64) -> i128 + Sync),
    ) -> i128 {
        let mut total = 0;
        for (i, (p, rp)) in rooted.iter().enumerate().skip(start) {
            let next = d * p;
            if next > bound {
                break;
            }
            let combined = crt_combine(roots, d * d, rp, p * p);
            total -= sign * class_total(&combined, next * next);
            total += extend(rooted, i + 1, next, &combined, -sign, bound, class_total);
        }
        total
    }

    let base = x as i128;
    let rest: i128 = (0..rooted.len())
        .into_par_iter()
        .map(|i| {
            let (p, rp) = &rooted[i];
            -class_total(rp, p * p) + extend(&rooted, i + 1, *p, rp, -1, d, &class_total)
        })
        .sum();
    Ok((base + rest) as i64)
}

/// Number of square-free `n` in the window.
pub fn count_squarefree_ap(w: &APWindow) -> Result<u64> {
    let table = squarefree_sieve_interval(w.lo, w.hi)?;
    Ok(table.count_progression(w.lo, w.hi, w.q, w.a))
}

/// `sum k_D(n)` over a window, with the square-full-part precondition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KdApSum {
    pub value: i64,
    /// Square-full part of `h = gcd(a, q)`.
    pub h2: u64,
    /// Every prime factor of `h2` is below `D^2`.
    pub precondition_holds: bool,
}

/// `sum_{n in w} k_D(n)` by counting, for each square-free `d <= D`, the
/// single residue class modulo `lcm(d^2, q)` where `d^2 | n` and `n = a mod q`.
pub fn sum_kd_ap(w: &APWindow, d: u64) -> Result<KdApSum> {
    check_table_size(d)?;
    let bound = d.min(w.hi.sqrt());
    let table = mobius_sieve(bound.max(1))?;
    let q = w.q as i128;
    let a = w.a as i128;
    let mut value: i128 = 0;
    for dd in 1..=bound {
        let mu = table.mu(dd).unwrap();
        if mu == 0 {
            continue;
        }
        let m = (dd * dd) as i128;
        let g = m.gcd(&q);
        if a % g != 0 {
            continue;
        }
        let q_red = q / g;
        let k0 = if q_red == 1 { 0 } else { (a / g) * inv_mod_i128((m / g) % q_red, q_red) % q_red };
        let lcm = m * q_red;
        let n0 = m * k0 % lcm;
        value += mu as i128 * count_in_class(w.lo as i128, w.hi as i128, n0, lcm);
    }

    let h = if w.a == 0 { w.q } else { w.a.gcd(&w.q) };
    let fac = factor_u64(h)?;
    let h2: u64 = fac.iter().filter(|&&(_, e)| e >= 2).map(|&(p, e)| p.pow(e)).product();
    let d2 = d as u128 * d as u128;
    let precondition_holds = fac.iter().filter(|&&(_, e)| e >= 2).all(|&(p, _)| (p as u128) < d2);
    Ok(KdApSum { value: value as i64, h2, precondition_holds })
}

/// `(q/|I|) * |sum_{n in I, n = a mod q} (mu^2(n) - k_D(n))|`.
pub fn residual_ap(w: &APWindow, d: u64) -> Result<f64> {
    let count = count_squarefree_ap(w)? as i64;
    let kd = sum_kd_ap(w, d)?.value;
    Ok(w.q as f64 / w.len() as f64 * (count - kd).unsigned_abs() as f64)
}

/// Default sieve parameter `D = ceil(x^(9/10))`.
pub fn default_bigd(x: u64) -> u64 {
    if x <= 1 {
        return 1;
    }
    let target = BigUint::from(x).pow(9);
    let mut d = (x as f64).powf(0.9).ceil() as u64;
    while d > 1 && BigUint::from(d - 1).pow(10) >= target {
        d -= 1;
    }
    while BigUint::from(d).pow(10) < target {
        d += 1;
    }
    d
}

/// `D` for the sum over polynomial values: the default policy, capped where
/// the identity `k_D = mu^2` already holds for `D >= cap`.
pub fn capped_bigd(x: u64, cap: u64) -> u64 {
    default_bigd(x).min(cap)
}

/// Whether `D^2` covers every value in `[1, hi]`, so the residual is zero.
pub fn in_identity_region(hi: u64, d: u64) -> bool {
    (hi as u128) <= d as u128 * d as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{mobius, mu_squared_u64};
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn count_values_examples() {
        assert_eq!(count_squarefree_values(&poly(&[1, 0]), 10).unwrap(), 7);
        assert_eq!(count_squarefree_values(&poly(&[1, 0, 1]), 10).unwrap(), 9);
        assert_eq!(count_squarefree_values(&poly(&[4, 0, 0]), 50).unwrap(), 0);
        assert_eq!(count_squarefree_values(&IntPoly::zero(), 50).unwrap(), 0);
        assert_eq!(count_squarefree_values(&poly(&[6]), 5).unwrap(), 5);
    }

    #[test]
    fn strategies_agree() {
        let polys = [
            poly(&[1, 0]),
            poly(&[1, 0, 1]),
            poly(&[1, -5, 6]),
            poly(&[2, 0, -3, 1]),
            poly(&[-1, 7, 0]),
            poly(&[3, 0, 0, 0, -11]),
            poly(&[1, 0, -4]),
            poly(&[1, -3]),
            poly(&[1, -9, 14, 0]),
        ];
        for f in &polys {
            for x in [1u64, 7, 100, 999] {
                let direct = count_squarefree_values_with(f, x, CountStrategy::Direct).unwrap();
                let via_kd = count_squarefree_values_with(f, x, CountStrategy::KdIdentity).unwrap();
                assert_eq!(direct, via_kd, "{f} x={x}");
            }
        }
    }

    #[test]
    fn values_of_t_squared_plus_one_approach_the_density() {
        let f = poly(&[1, 0, 1]);
        let x = 100_000;
        let s = count_squarefree_values(&f, x).unwrap();
        assert_eq!(s, count_squarefree_values_with(&f, x, CountStrategy::Direct).unwrap());
        let c = crate::density::c_f_certified(&f, 100_000).unwrap();
        assert!((s as f64 / x as f64 - c.midpoint()).abs() <= 0.02, "{s}");
    }

    #[test]
    fn k_d_examples() {
        assert_eq!(k_d(&BigInt::from(12), 2).unwrap(), 0);
        assert_eq!(k_d(&BigInt::from(30), 5).unwrap(), 1);
        assert_eq!(k_d(&BigInt::zero(), 10).unwrap(), -1);
        assert_eq!(k_d(&BigInt::from(-12), 2).unwrap(), 0);
        assert_eq!(k_d(&BigInt::from(36), 5).unwrap(), 1 - 1 - 1);
        assert_eq!(k_d(&BigInt::from(36), 6).unwrap(), 0);
        let big: BigInt = "1000000000000000000000000".parse().unwrap();
        assert_eq!(k_d(&big, 10).unwrap(), 1 - 1 - 1 + 1);
    }

    #[test]
    fn k_d_equals_mu_squared_in_identity_region() {
        let sieved = kd_sieve_interval(1, 10_000, 100).unwrap();
        for n in 1..=10_000i64 {
            let mu2 = mu_squared_u64(n as u64) as i64;
            assert_eq!(k_d(&BigInt::from(n), 100).unwrap(), mu2, "n={n}");
            assert_eq!(k_d(&BigInt::from(-n), 100).unwrap(), mu2, "n={n}");
            assert_eq!(sieved[(n - 1) as usize] as i64, mu2, "n={n}");
        }
    }

    #[test]
    fn kd_sieve_matches_pointwise() {
        let (lo, hi, d) = (999_000u64, 1_001_000u64, 37u64);
        let sieved = kd_sieve_interval(lo, hi, d).unwrap();
        for n in lo..=hi {
            assert_eq!(sieved[(n - lo) as usize] as i64, k_d(&BigInt::from(n), d).unwrap());
        }
    }

    #[test]
    fn sum_kd_values_examples() {
        assert_eq!(sum_kd_values(&poly(&[1, 0, 1]), 123, 1).unwrap(), 123);
        assert_eq!(sum_kd_values(&poly(&[1, 0]), 100, 10).unwrap(), 61);
        let f = poly(&[1, 0, 1]);
        assert_eq!(sum_kd_values(&f, 50, 7).unwrap(), direct_kd_sum(&f, 50, 7));
        assert!(matches!(sum_kd_values(&poly(&[2, 4]), 10, 3), Err(Error::NotPrimitive(_))));
    }

    fn direct_kd_sum(f: &IntPoly, x: u64, d: u64) -> i64 {
        let mut total = 0i64;
        for n in 1..=x {
            let v = f.eval(&BigInt::from(n));
            for dd in 1..=d {
                let mu = mobius(dd).unwrap() as i64;
                if mu != 0 && (&v % BigInt::from(dd * dd)).is_zero() {
                    total += mu;
                }
            }
        }
        total
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn exchange_of_summation(
            coeffs in prop::collection::vec(-10i64..=10, 1..=4),
            x in 1u64..=500,
            d in 1u64..=20,
        ) {
            let f = poly(&coeffs);
            prop_assume!(f.is_primitive());
            prop_assert_eq!(sum_kd_values(&f, x, d).unwrap(), direct_kd_sum(&f, x, d));
        }
    }

    #[test]
    fn ap_count_examples() {
        let w = APWindow::new(1, 20, 4, 1).unwrap();
        assert_eq!(count_squarefree_ap(&w).unwrap(), 4);
        assert_eq!(count_squarefree_ap(&APWindow::new(1, 10, 1, 0).unwrap()).unwrap(), 7);
        assert_eq!(count_squarefree_ap(&APWindow::new(17, 3000, 4, 0).unwrap()).unwrap(), 0);
        assert!(APWindow::new(0, 5, 1, 0).is_err());
        assert!(APWindow::new(5, 4, 1, 0).is_err());
        assert!(APWindow::new(1, 5, 4, 4).is_err());
    }

    #[test]
    fn ap_counts_partition_the_window() {
        let (lo, hi) = (12_345u64, 23_456u64);
        let total = count_squarefree_ap(&APWindow::new(lo, hi, 1, 0).unwrap()).unwrap();
        for q in 1..=20u64 {
            let sum: u64 = (0..q)
                .map(|a| count_squarefree_ap(&APWindow::new(lo, hi, q, a).unwrap()).unwrap())
                .sum();
            assert_eq!(sum, total, "q={q}");
        }
    }

    fn direct_kd_ap(w: &APWindow, d: u64) -> i64 {
        (w.lo..=w.hi)
            .filter(|n| n % w.q == w.a)
            .map(|n| k_d(&BigInt::from(n), d).unwrap())
            .sum()
    }

    #[test]
    fn sum_kd_ap_examples() {
        let w = APWindow::new(1, 100, 1, 0).unwrap();
        assert_eq!(sum_kd_ap(&w, 10).unwrap().value, 61);
        let w = APWindow::new(5, 77, 6, 5).unwrap();
        assert_eq!(sum_kd_ap(&w, 1).unwrap().value, (5..=77).filter(|n| n % 6 == 5).count() as i64);
        let w = APWindow::new(1, 200, 4, 2).unwrap();
        assert_eq!(sum_kd_ap(&w, 14).unwrap().value, direct_kd_ap(&w, 14));
        for (lo, hi, q, a, d) in [(1000, 5000, 12, 8, 7), (1, 3000, 36, 0, 5), (77, 4000, 50, 25, 3)] {
            let w = APWindow::new(lo, hi, q, a).unwrap();
            assert_eq!(sum_kd_ap(&w, d).unwrap().value, direct_kd_ap(&w, d), "{w:?}");
        }
    }

    #[test]
    fn sum_kd_ap_precondition_flag() {
        let w = APWindow::new(1, 100, 8, 0).unwrap();
        let s = sum_kd_ap(&w, 2).unwrap();
        assert_eq!(s.h2, 8);
        assert!(s.precondition_holds);
        let w = APWindow::new(1, 100, 25, 0).unwrap();
        let s = sum_kd_ap(&w, 2).unwrap();
        assert_eq!(s.h2, 25);
        assert!(!s.precondition_holds);
        let w = APWindow::new(1, 100, 30, 7).unwrap();
        assert_eq!(sum_kd_ap(&w, 2).unwrap().h2, 1);
    }

    #[test]
    fn residual_vanishes_in_identity_region() {
        for (lo, hi, q, a) in [(1, 10_000, 1, 0), (500, 9_999, 7, 3), (1, 10_000, 100, 64)] {
            let w = APWindow::new(lo, hi, q, a).unwrap();
            assert_eq!(residual_ap(&w, 100).unwrap(), 0.0, "{w:?}");
        }
        let w = APWindow::new(1, 1_000_000, 1, 0).unwrap();
        assert_eq!(residual_ap(&w, 1000).unwrap(), 0.0);
    }

    #[test]
    fn residual_outside_identity_region_is_small() {
        let w = APWindow::new(100_000_000, 100_100_000, 7, 3).unwrap();
        let count = count_squarefree_ap(&w).unwrap();
        let kd = sum_kd_ap(&w, 100).unwrap().value;
        // Both sums computed independently by a direct per-n script.
        assert_eq!(count, 8855);
        assert_eq!(kd, 8867);
        let r = residual_ap(&w, 100).unwrap();
        assert!((r - 7.0 * 12.0 / 100_001.0).abs() < 1e-15);
        assert!(r <= 0.05);
    }

    #[test]
    fn default_bigd_policy() {
        assert_eq!(default_bigd(1), 1);
        assert_eq!(default_bigd(10), 8);
        assert_eq!(default_bigd(100_000), 31_623);
        assert_eq!(default_bigd(1_000_000_000), 125_892_542);
        assert_eq!(capped_bigd(100_000, 316), 316);
        for x in [2u64, 3, 17, 1000, 99_999] {
            let d = default_bigd(x);
            assert!(BigUint::from(d).pow(10) >= BigUint::from(x).pow(9));
            assert!(BigUint::from(d - 1).pow(10) < BigUint::from(x).pow(9));
        }
    }

    #[test]
    fn window_from_endpoint() {
        let w = APWindow::from_endpoint(100.5, 10.2, 3, 1).unwrap();
        assert_eq!((w.lo, w.hi), (91, 100));
        assert!(in_identity_region(10_000, 100));
        assert!(!in_identity_region(10_001, 100));
    }
}
