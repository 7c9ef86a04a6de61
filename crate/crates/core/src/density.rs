//! The density constant `c_f = prod_p (1 - rho_f(p^2)/p^2)` as a certified
//! interval, and the main term for square-free integers in an arithmetic
//! progression.
//!
//! The finite part of the product runs over `p <= P`. Up to a configurable
//! switch point it is exact rational arithmetic; above it, a pair of `f64`
//! accumulators is pushed outward by one ulp after every operation, which
//! brackets the true product because each IEEE operation is correctly
//! rounded. For `p > P` with `p` not dividing the discriminant,
//! `rho_f(p^2) <= deg f`, so
//!
//! ```text
//! 1 >= prod_{p > P} (1 - rho_f(p^2)/p^2) >= 1 - deg f * sum_{n > P} 1/n^2 >= 1 - deg f/(P - 1).
//! ```

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, is_prime, primes_up_to};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::roots::{rho_p2_count, RhoTable};

/// `6/pi^2`, the density of square-free integers.
pub const SQUAREFREE_DENSITY: f64 = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);

/// Primes up to this bound go into the exact rational product by default.
pub const DEFAULT_EXACT_SWITCH: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityConfig {
    /// Last prime handled in exact arithmetic; larger primes use directed
    /// rounding.
    pub exact_switch: u64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { exact_switch: DEFAULT_EXACT_SWITCH }
    }
}

/// An interval `[lower, upper]` known to contain the constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub lower: f64,
    pub upper: f64,
    pub prime_cutoff: u64,
    /// Discriminant primes whose Euler factor was computed exactly.
    pub bad_primes: Vec<u64>,
    /// Part of the discriminant that could not be factored; its prime
    /// factors are covered by the bound `rho_f(p^2) <= deg f * p`.
    pub unresolved_cofactor: Option<String>,
}

impl CertifiedValue {
    pub fn midpoint(&self) -> f64 {
        self.lower + (self.upper - self.lower) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// The Euler factor `1 - rho_f(p^2)/p^2`.
pub fn euler_factor(f: &IntPoly, p: u64) -> Result<BigRational> {
    f.require_primitive()?;
    let rho = rho_p2_count(f, p)?;
    let p2 = BigInt::from(p) * BigInt::from(p);
    Ok(BigRational::new(&p2 - BigInt::from(rho), p2))
}

/// Tightest `f64` pair `(lo, hi)` with `lo <= r <= hi`.
fn rational_bracket(r: &BigRational) -> (f64, f64) {
    let approx = r.to_f64().unwrap_or(0.0);
    let as_rat = |v: f64| BigRational::from_f64(v).expect("finite");
    let mut lo = approx;
    while as_rat(lo) > *r {
        lo = lo.next_down();
    }
    let mut hi = approx;
    while as_rat(hi) < *r {
        hi = hi.next_up();
    }
    (lo, hi)
}

/// Bounds on `1 - num/den`, with `num <= den` and `den` exact in `f64`.
fn factor_bracket(num: u128, den: u128) -> (f64, f64) {
    let q = num as f64 / den as f64;
    let lo = (1.0 - q.next_up()).next_down().max(0.0);
    let hi = (1.0 - q.next_down()).next_up().min(1.0);
    (lo, hi)
}

struct DiscriminantPrimes {
    /// Prime factors up to the cutoff.
    small: Vec<u64>,
    /// Prime factors above the cutoff that were found exactly.
    large: Vec<BigUint>,
    /// Leftover composite part with no prime factor at or below the cutoff.
    cofactor: Option<BigUint>,
}

fn discriminant_primes(table: &RhoTable, cutoff: u64, resolve: bool) -> DiscriminantPrimes {
    let (small, rest) = table.disc_primes_up_to(cutoff);
    let mut out = DiscriminantPrimes { small, large: Vec::new(), cofactor: None };
    if rest.is_one() || !resolve {
        if !rest.is_one() {
            out.cofactor = Some(rest);
        }
        return out;
    }
    if let Some(small_rest) = rest.to_u64() {
        let fac = factor_u64(small_rest).expect("nonzero");
        out.large = fac.into_iter().map(|(p, _)| BigUint::from(p)).collect();
    } else if is_prime(&rest) {
        out.large = vec![rest];
    } else {
        out.cofactor = Some(rest);
    }
    out
}

fn check_squarefree_primitive(f: &IntPoly) -> Result<RhoTable> {
    f.require_primitive()?;
    let table = RhoTable::new(f)?;
    if f.degree() == Some(0) {
        return Err(Error::ConstantPolynomial);
    }
    if table.discriminant().is_zero() {
        return Err(Error::NotSquarefreePolynomial);
    }
    Ok(table)
}

/// Certified bracket for `c_f` with prime cutoff `P`. Every prime dividing
/// the discriminant must be at most `P`.
pub fn c_f_certified(f: &IntPoly, cutoff: u64) -> Result<CertifiedValue> {
    c_f_certified_with(f, cutoff, &DensityConfig::default())
}

pub fn c_f_certified_with(
    f: &IntPoly,
    cutoff: u64,
    config: &DensityConfig,
) -> Result<CertifiedValue> {
    let table = check_squarefree_primitive(f)?;
    check_cutoff(f, cutoff)?;
    let disc = discriminant_primes(&table, cutoff, false);
    if let Some(rest) = disc.cofactor {
        let prime = if is_prime(&rest) {
            rest.to_string()
        } else {
            format!("dividing {rest}")
        };
        return Err(Error::CutoffTooSmall { cutoff, prime });
    }
    bracket(f, cutoff, config, disc)
}

/// Certified bracket for `c_f` that tolerates discriminant primes above
/// the cutoff: those found by factoring the leftover part are handled
/// exactly, and any unfactored remainder is bounded by
/// `rho_f(p^2) <= deg f * p` for each of its at most `log_P` prime factors.
pub fn c_f_bracket(f: &IntPoly, cutoff: u64) -> Result<CertifiedValue> {
    let table = check_squarefree_primitive(f)?;
    check_cutoff(f, cutoff)?;
    let disc = discriminant_primes(&table, cutoff, true);
    bracket(f, cutoff, &DensityConfig::default(), disc)
}

fn check_cutoff(f: &IntPoly, cutoff: u64) -> Result<()> {
    let deg = f.degree().unwrap_or(0) as u64;
    if cutoff < 2 || cutoff <= deg {
        return Err(Error::InvalidParameter(format!(
            "prime cutoff must exceed max(1, deg f) = {}, got {cutoff}",
            deg.max(1)
        )));
    }
    Ok(())
}

fn bracket(
    f: &IntPoly,
    cutoff: u64,
    config: &DensityConfig,
    disc: DiscriminantPrimes,
) -> Result<CertifiedValue> {
    let deg = f.degree().unwrap_or(0) as u64;
    let primes = primes_up_to(cutoff);
    let rhos: Vec<u128> = primes
        .par_iter()
        .map(|&p| rho_p2_count(f, p))
        .collect::<Result<_>>()?;

    let split = primes.partition_point(|&p| p <= config.exact_switch);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&p, &rho) in primes[..split].iter().zip(&rhos[..split]) {
        let p2 = BigInt::from(p) * BigInt::from(p);
        num *= &p2 - BigInt::from(rho);
        den *= p2;
    }
    let (mut lower, mut upper) = rational_bracket(&BigRational::new(num, den));

    let apply = |lower: &mut f64, upper: &mut f64, num: u128, den: u128| {
        let (lo, hi) = factor_bracket(num, den);
        *lower = (*lower * lo).next_down().max(0.0);
        *upper = (*upper * hi).next_up().min(1.0);
    };
    for (&p, &rho) in primes[split..].iter().zip(&rhos[split..]) {
        apply(&mut lower, &mut upper, rho, p as u128 * p as u128);
    }

    let mut bad_primes = disc.small;
    for p in &disc.large {
        match p.to_u64() {
            Some(p) if p < 1 << 63 => {
                let rho = rho_p2_count(f, p)?;
                apply(&mut lower, &mut upper, rho, p as u128 * p as u128);
                bad_primes.push(p);
            }
            _ => {
                let p = p.to_f64().unwrap_or(f64::MAX);
                lower = (lower * factor_bracket_f64(deg as f64, p)).next_down().max(0.0);
            }
        }
    }
    let unresolved_cofactor = disc.cofactor.map(|rest| {
        let k = (rest.bits() as f64 / (cutoff as f64).log2()).floor() as i32;
        let per_prime = factor_bracket_f64(deg as f64, (cutoff + 1) as f64);
        lower = (lower * per_prime.powi(k).next_down()).next_down().max(0.0);
        rest.to_string()
    });

    let tail = factor_bracket_f64(deg as f64, (cutoff - 1) as f64);
    lower = (lower * tail).next_down().max(0.0);

    Ok(CertifiedValue { lower, upper, prime_cutoff: cutoff, bad_primes, unresolved_cofactor })
}

/// A lower bound on `1 - a/b` for positive reals.
fn factor_bracket_f64(a: f64, b: f64) -> f64 {
    (1.0 - (a / b).next_up()).next_down().max(0.0)
}

/// Expected count of square-free `n` with `n = a mod q` in a window of
/// length `y`:
/// `(6/pi^2) * mu^2(h) * (y/q) * prod_{p | q'} (1 - 1/p)^-1 * prod_{p | q} (1 + 1/p)^-1`
/// with `h = gcd(a, q)` and `q' = q/h`.
pub fn ap_main_term(q: u64, a: u64, y: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::NonPositive("q".into()));
    }
    let h = a.gcd(&q);
    let h_factors = factor_u64(h)?;
    if h_factors.iter().any(|&(_, e)| e > 1) {
        return Ok(0.0);
    }
    let mut term = SQUAREFREE_DENSITY * y / q as f64;
    for (p, _) in factor_u64(q / h)? {
        term *= p as f64 / (p - 1) as f64;
    }
    for (p, _) in factor_u64(q)? {
        term *= p as f64 / (p + 1) as f64;
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn euler_factor_examples() {
        assert_eq!(euler_factor(&poly(&[1, 0]), 3).unwrap(), rat(8, 9));
        assert_eq!(euler_factor(&poly(&[1, 0, 1]), 2).unwrap(), rat(1, 1));
        assert_eq!(euler_factor(&poly(&[1, 0, 1]), 5).unwrap(), rat(23, 25));
        assert!(matches!(euler_factor(&poly(&[2, 2]), 3), Err(Error::NotPrimitive(_))));
        assert_eq!(euler_factor(&poly(&[1, 0]), 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn identity_polynomial_brackets_inverse_zeta_two() {
        let v = c_f_certified(&poly(&[1, 0]), 100_000).unwrap();
        assert!(v.contains(SQUAREFREE_DENSITY), "{v:?}");
        assert!(v.width() <= 2e-5, "{v:?}");
        assert!(v.bad_primes.is_empty());
    }

    #[test]
    fn t_squared_plus_one() {
        let v = c_f_certified(&poly(&[1, 0, 1]), 1_000_000).unwrap();
        assert!(v.width() <= 4e-6, "{v:?}");
        assert_eq!(v.bad_primes, vec![2]);
        // Truncated product over p <= 10^6, accumulated in 60-digit decimal
        // arithmetic by an independent script.
        let truncated = 0.894_841_285_245_605_7;
        assert!((v.upper - truncated).abs() < 1e-10, "{v:?}");
        assert!((v.lower - 0.894_839_495_561_245_5).abs() < 1e-10, "{v:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(c_f_certified(&poly(&[2, 2]), 100), Err(Error::NotPrimitive(_))));
        assert_eq!(c_f_certified(&poly(&[1, 0, 0]), 100), Err(Error::NotSquarefreePolynomial));
        assert_eq!(c_f_certified(&poly(&[1]), 100), Err(Error::ConstantPolynomial));
        // disc(t^2 - 1019) = 4 * 1019
        let err = c_f_certified(&poly(&[1, 0, -1019]), 1000).unwrap_err();
        assert_eq!(err, Error::CutoffTooSmall { cutoff: 1000, prime: "1019".into() });
        assert!(c_f_certified(&poly(&[1, 0, -1019]), 1019).is_ok());
    }

    #[test]
    fn exact_switch_does_not_change_bracket_materially() {
        let f = poly(&[1, 1, 1]);
        let a = c_f_certified_with(&f, 20_000, &DensityConfig { exact_switch: 10 }).unwrap();
        let b = c_f_certified_with(&f, 20_000, &DensityConfig { exact_switch: 20_000 }).unwrap();
        assert!((a.lower - b.lower).abs() < 1e-12 && (a.upper - b.upper).abs() < 1e-12);
        assert!(a.lower <= b.lower && a.upper >= b.upper);
    }

    #[test]
    fn bracket_never_widens_with_cutoff() {
        for f in [poly(&[1, 0]), poly(&[1, 0, 1]), poly(&[1, 0, -2, 7]), poly(&[3, 1, 5])] {
            let mut prev: Option<CertifiedValue> = None;
            for cutoff in [2_000u64, 5_000, 20_000, 100_000] {
                let v = c_f_bracket(&f, cutoff).unwrap();
                assert!(0.0 <= v.lower && v.lower <= v.upper && v.upper <= 1.0);
                if let Some(p) = &prev {
                    assert!(v.width() <= p.width(), "{f} at {cutoff}");
                    assert!(v.lower >= p.lower && v.upper <= p.upper, "{f} at {cutoff}");
                }
                prev = Some(v);
            }
        }
    }

    #[test]
    fn large_discriminant_primes_are_handled() {
        // disc = -4 * 1000003
        let f = poly(&[1, 0, 1_000_003]);
        assert!(c_f_certified(&f, 10_000).is_err());
        let v = c_f_bracket(&f, 10_000).unwrap();
        assert_eq!(v.bad_primes, vec![2, 1_000_003]);
        assert!(v.unresolved_cofactor.is_none());
        let reference = c_f_certified(&f, 1_100_000).unwrap();
        assert!(v.lower <= reference.lower && reference.upper <= v.upper);
    }

    #[test]
    fn ap_main_term_examples() {
        let y = 120.0;
        assert!((ap_main_term(1, 5, y).unwrap() - SQUAREFREE_DENSITY * y).abs() < 1e-9);
        let v = ap_main_term(4, 2, y).unwrap();
        assert!((v - SQUAREFREE_DENSITY * 40.0).abs() < 1e-9);
        assert!((v - 24.317).abs() < 1e-3);
        assert_eq!(ap_main_term(4, 0, y).unwrap(), 0.0);
        assert!(ap_main_term(0, 0, y).is_err());
    }

    /// `rho_{qt+a}(p^2)` for the linear polynomial, by the congruence rule.
    fn linear_rho(q: u64, a: u64, p: u64) -> u64 {
        let g = q.gcd(&(p * p));
        if a % g == 0 {
            g
        } else {
            0
        }
    }

    #[test]
    fn main_term_matches_product_form() {
        let cutoff = 10_000u64;
        let primes = primes_up_to(cutoff);
        let tail = 1.0 / (cutoff - 1) as f64;
        for q in 1..=30u64 {
            for a in 0..q {
                let product: f64 = primes
                    .iter()
                    .map(|&p| 1.0 - linear_rho(q, a, p) as f64 / (p * p) as f64)
                    .product();
                let closed = ap_main_term(q, a, 1.0).unwrap();
                let from_product = product / q as f64;
                assert!(
                    closed <= from_product + 1e-12 && closed >= from_product * (1.0 - tail) - 1e-12,
                    "q={q} a={a}: {closed} vs {from_product}"
                );
            }
        }
    }
}
