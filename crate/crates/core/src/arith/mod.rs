//! Elementary number theory: factorization, Möbius and square-free sieves,
//! square-free/square-full splitting, and the divisor-counting quantities
//! used in the averaging argument (large divisors of `q`, large values of
//! `gcd(an + b, c)`).

mod factor;
pub mod primes;
pub mod sieve;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use factor::TRIAL_DIVISION_BOUND;
pub use primes::{is_prime, is_prime_u64, primes_up_to};
pub use sieve::{
    mobius_sieve, squarefree_sieve_interval, squarefree_sieve_interval_with, SieveConfig,
    SieveTable,
};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl FactoredInt {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// `(prime, exponent)` pairs, sorted by prime.
    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn radical(&self) -> BigUint {
        self.factors.iter().map(|(p, _)| p).product()
    }

    /// `(h1, h2)` with `h1` square-free, `h2` square-full, coprime.
    pub fn squarefull_decompose(&self) -> (BigUint, BigUint) {
        let mut h1 = BigUint::one();
        let mut h2 = BigUint::one();
        for (p, e) in &self.factors {
            if *e == 1 {
                h1 *= p;
            } else {
                h2 *= p.pow(*e);
            }
        }
        (h1, h2)
    }

    /// Number of divisors.
    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    fn from_primes(value: BigUint, mut primes: Vec<BigUint>) -> Self {
        primes.sort();
        let mut factors: Vec<(BigUint, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        FactoredInt { value, factors }
    }
}

/// Complete factorization of `n >= 1`.
pub fn factor(n: &BigUint) -> Result<FactoredInt> {
    if n.is_zero() {
        return Err(Error::NonPositive("0".into()));
    }
    let mut primes = Vec::new();
    factor::prime_factors_big(n, &mut primes);
    Ok(FactoredInt::from_primes(n.clone(), primes))
}

/// Factorization of a machine-word integer as `(prime, exponent)` pairs.
pub fn factor_u64(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::NonPositive("0".into()));
    }
    let mut primes = Vec::new();
    factor::prime_factors_u64(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// `mu^2(|n|)` for a word-sized value; `mu^2(0) = 0`.
pub fn mu_squared_u64(n: u64) -> u8 {
    if n == 0 {
        return 0;
    }
    let mut primes = Vec::new();
    factor::prime_factors_u64(n, &mut primes);
    primes.sort_unstable();
    u8::from(primes.windows(2).all(|w| w[0] != w[1]))
}

/// `mu^2(|n|)`, with `mu^2(0) = 0`.
pub fn mu_squared(n: &BigInt) -> u8 {
    if n.is_zero() {
        return 0;
    }
    if let Some(small) = n.magnitude().to_u64() {
        return mu_squared_u64(small);
    }
    let f = factor(n.magnitude()).expect("nonzero");
    u8::from(f.is_squarefree())
}

/// Möbius function of a word-sized positive integer.
pub fn mobius(n: u64) -> Result<i8> {
    let f = factor_u64(n)?;
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

pub fn squarefull_decompose(h: &BigUint) -> Result<(BigUint, BigUint)> {
    Ok(factor(h)?.squarefull_decompose())
}

pub fn radical(n: &BigUint) -> Result<BigUint> {
    Ok(factor(n)?.radical())
}

/// All divisors of `n`, ascending.
pub fn divisors_u64(n: u64) -> Result<Vec<u64>> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n)? {
        let base = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(base.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Exact value of the sum of `1/d` over divisors `d >= z` of `q`.
pub fn divisor_tail_sum(q: u64, z: f64) -> Result<BigRational> {
    if q == 0 {
        return Err(Error::NonPositive("q".into()));
    }
    if !(z >= 1.0) {
        return Err(Error::InvalidParameter(format!("z must be >= 1, got {z}")));
    }
    let threshold = z.ceil();
    let mut total = BigRational::zero();
    for d in divisors_u64(q)? {
        if d as f64 >= threshold {
            total += BigRational::new(BigInt::one(), BigInt::from(d));
        }
    }
    Ok(total)
}

fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

/// Inverse of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub(crate) fn inv_mod_i128(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    s0.rem_euclid(m)
}

/// Number of integers in `[lo, hi]` congruent to `r` modulo `m`.
pub(crate) fn count_in_class(lo: i128, hi: i128, r: i128, m: i128) -> i128 {
    if lo > hi {
        return 0;
    }
    floor_div(hi - r, m) - floor_div(lo - 1 - r, m)
}

/// Exact size of `{n in [-x1, x1] : gcd(a*n + b, c) > x2}`.
///
/// For each divisor `m` of `c`, the `n` with `m | a*n + b` form a single
/// residue class (or none); Möbius inversion over the divisor lattice turns
/// these into counts of `gcd(a*n + b, c) = g` for each `g > x2`.
pub fn large_gcd_count(a: i64, b: i64, c: i64, x1: f64, x2: f64) -> Result<u64> {
    if a == 0 {
        return Err(Error::InvalidParameter("a must be nonzero".into()));
    }
    if c == 0 {
        return Err(Error::InvalidParameter("c must be nonzero".into()));
    }
    if !(x1 >= 1.0) || !(x2 >= 1.0) {
        return Err(Error::InvalidParameter("x1, x2 must be >= 1".into()));
    }
    let range = x1.floor() as i128;
    let primes = factor_u64(c.unsigned_abs())?;
    // Divisors with their exponent vectors, in mixed-radix order.
    // A u64 has at most 15 distinct prime factors, each with exponent < 64.
    let mut divs: Vec<(u64, [u8; 15])> = vec![(1, [0; 15])];
    for (i, &(p, e)) in primes.iter().enumerate() {
        let base = divs.clone();
        let mut pk = 1u64;
        for k in 1..=e {
            pk *= p;
            divs.extend(base.iter().map(|&(d, mut ex)| {
                ex[i] = k as u8;
                (d * pk, ex)
            }));
        }
    }
    let width = primes.len();
    let (a, b) = (a as i128, b as i128);

    let n_divisible = |m: u64| -> i128 {
        let m = m as i128;
        let e = a.gcd(&m);
        if b.rem_euclid(e) != 0 {
            return 0;
        }
        let m_red = m / e;
        let n0 = ((-b / e).rem_euclid(m_red) * inv_mod_i128(a / e, m_red)).rem_euclid(m_red);
        count_in_class(-range, range, n0, m_red)
    };
    let counts: Vec<i128> = divs.iter().map(|&(m, _)| n_divisible(m)).collect();

    let mut total: i128 = 0;
    for (g, g_exp) in divs.iter() {
        if (*g as f64) <= x2 {
            continue;
        }
        for ((_, m_exp), &count) in divs.iter().zip(&counts) {
            if count == 0 {
                continue;
            }
            let mut sign = 1i128;
            let mut divides = true;
            for (&eg, &em) in g_exp[..width].iter().zip(&m_exp[..width]) {
                match em.checked_sub(eg) {
                    Some(0) => {}
                    Some(1) => sign = -sign,
                    _ => {
                        divides = false;
                        break;
                    }
                }
            }
            if divides {
                total += sign * count;
            }
        }
    }
    Ok(total as u64)
}
