//! Roots of `f` modulo `p`, `p^2` and `d^2` for square-free `d`, and the
//! root-count function `rho_f`.
//!
//! Roots modulo `p` come from an exhaustive scan for small `p` and from
//! splitting `gcd(f, t^p - t)` otherwise. Lifting to `p^2` uses Hensel's
//! lemma for simple roots. A root with `f'(r) = 0 mod p` lifts to all `p`
//! classes or to none. At small singular primes (`p | disc(f)` or
//! `p | lc(f)`) every lift of every root is evaluated instead.

mod fp;

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{factor_u64, is_prime_u64};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// Primes below this are scanned exhaustively.
pub const EXHAUSTIVE_ROOT_THRESHOLD: u64 = 1000;

/// Largest prime for which root sets modulo `p^2` are materialized.
pub const MAX_P2_PRIME: u64 = u32::MAX as u64;

/// Roots of `f` modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootsModP {
    /// Sorted residues in `[0, p)`.
    pub roots: Vec<u64>,
    /// `f` vanishes identically mod `p`; `roots` is then all of `[0, p)`.
    pub degenerate: bool,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Ascending coefficients of `f mod m`.
fn ascending_mod(f: &IntPoly, m: u64) -> Vec<u64> {
    let mut c = f.coeffs_mod(m);
    c.reverse();
    c
}

fn roots_mod_p_unchecked(f: &IntPoly, p: u64) -> RootsModP {
    let fp_coeffs = ascending_mod(f, p);
    if fp_coeffs.iter().all(|&c| c == 0) {
        return RootsModP { roots: (0..p).collect(), degenerate: true };
    }
    let roots = if p < EXHAUSTIVE_ROOT_THRESHOLD {
        (0..p).filter(|&r| fp::eval(&fp_coeffs, r, p) == 0).collect()
    } else {
        fp::distinct_roots(&fp_coeffs, p)
    };
    RootsModP { roots, degenerate: false }
}

/// All `r` in `[0, p)` with `f(r) = 0 mod p`.
pub fn roots_mod_p(f: &IntPoly, p: u64) -> Result<RootsModP> {
    check_prime(p)?;
    if p >= 1 << 63 {
        return Err(Error::OutOfRange(format!("prime {p} exceeds 2^63")));
    }
    Ok(roots_mod_p_unchecked(f, p))
}

/// `f(r) mod m` with `m < 2^64`.
fn eval_mod_u128(asc: &[u64], r: u64, m: u64) -> u64 {
    let m = m as u128;
    asc.iter().rev().fold(0u128, |acc, &c| (acc * r as u128 + c as u128) % m) as u64
}

fn is_singular_prime(disc: &BigInt, lead: &BigInt, p: u64) -> bool {
    let pb = BigInt::from(p);
    disc.mod_floor(&pb).is_zero() || lead.mod_floor(&pb).is_zero()
}

/// Lifts the roots mod `p` to roots mod `p^2` (`p < 2^32`). Since
/// `f(r + p t) = f(r) + p t f'(r) mod p^2`, a simple root has one lift and a
/// root with `f'(r) = 0 mod p` has all `p` lifts or none. With `exhaustive`
/// every candidate is evaluated instead.
fn lift_roots(f: &IntPoly, p: u64, roots_p: &[u64], exhaustive: bool) -> Vec<u64> {
    let p2 = p * p;
    let asc = ascending_mod(f, p2);
    let deriv = ascending_mod(&f.derivative(), p);
    let mut out = Vec::new();
    for &r in roots_p {
        let d = fp::eval(&deriv, r, p);
        if exhaustive {
            out.extend((0..p).map(|t| r + p * t).filter(|&s| eval_mod_u128(&asc, s, p2) == 0));
        } else if d == 0 {
            if eval_mod_u128(&asc, r, p2) == 0 {
                out.extend((0..p).map(|t| r + p * t));
            }
        } else {
            let fr_over_p = eval_mod_u128(&asc, r, p2) / p;
            let t = (p - fr_over_p % p) % p * crate::arith::primes::pow_mod(d, p - 2, p) % p;
            out.push(r + p * t);
        }
    }
    out.sort_unstable();
    out
}

fn roots_mod_p2_with_disc(f: &IntPoly, disc: &BigInt, p: u64) -> Result<RhoEntry> {
    if p > MAX_P2_PRIME {
        return Err(Error::OutOfRange(format!("p^2 overflows 64 bits for p = {p}")));
    }
    let singular = is_singular_prime(disc, &f.leading(), p);
    let rp = roots_mod_p_unchecked(f, p);
    let exhaustive = singular && p < EXHAUSTIVE_ROOT_THRESHOLD;
    let roots_p2 = lift_roots(f, p, &rp.roots, exhaustive);
    Ok(RhoEntry { roots_p: rp.roots, roots_p2, singular })
}

/// Discriminant, or 1 for constants (which have no singular primes).
fn disc_or_one(f: &IntPoly) -> Result<BigInt> {
    match f.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Ok(BigInt::from(1)),
        Some(_) => f.discriminant(),
    }
}

/// All `r` in `[0, p^2)` with `f(r) = 0 mod p^2`. `f` must be primitive.
pub fn roots_mod_p2(f: &IntPoly, p: u64) -> Result<Vec<u64>> {
    f.require_primitive()?;
    check_prime(p)?;
    let disc = disc_or_one(f)?;
    Ok(roots_mod_p2_with_disc(f, &disc, p)?.roots_p2)
}

/// `rho_f(p^2)` for any prime `p < 2^63`, without materializing the roots.
/// A simple root has exactly one lift; a root with `f'(r) = 0 mod p` has
/// either all `p` lifts (when `p^2 | f(r)`) or none.
pub fn rho_p2_count(f: &IntPoly, p: u64) -> Result<u128> {
    f.require_primitive()?;
    check_prime(p)?;
    if p < EXHAUSTIVE_ROOT_THRESHOLD {
        let disc = disc_or_one(f)?;
        return Ok(roots_mod_p2_with_disc(f, &disc, p)?.roots_p2.len() as u128);
    }
    let rp = roots_mod_p(f, p)?;
    let deriv = ascending_mod(&f.derivative(), p);
    let p2 = BigInt::from(p) * BigInt::from(p);
    let mut count = 0u128;
    for &r in &rp.roots {
        if fp::eval(&deriv, r, p) != 0 {
            count += 1;
        } else if f.eval(&BigInt::from(r)).mod_floor(&p2).is_zero() {
            count += p as u128;
        }
    }
    Ok(count)
}

fn squarefree_primes(d: u64) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(Error::NonPositive("d".into()));
    }
    let fac = factor_u64(d)?;
    if fac.iter().any(|&(_, e)| e > 1) {
        return Err(Error::NotSquarefree(d));
    }
    Ok(fac.into_iter().map(|(p, _)| p).collect())
}

/// `rho_f(d^2)` for square-free `d`, by multiplicativity.
pub fn rho(f: &IntPoly, d: u64) -> Result<u64> {
    f.require_primitive()?;
    let primes = squarefree_primes(d)?;
    let disc = disc_or_one(f)?;
    let mut total = 1u64;
    for p in primes {
        total *= roots_mod_p2_with_disc(f, &disc, p)?.roots_p2.len() as u64;
    }
    Ok(total)
}

/// Chinese-remainder combination of root sets modulo coprime `m1`, `m2`.
pub(crate) fn crt_combine(a: &[u64], m1: u64, b: &[u64], m2: u64) -> Vec<u64> {
    let m1i = m1 as i128;
    let m2i = m2 as i128;
    let inv = crate::arith::inv_mod_i128(m1i % m2i, m2i);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            let k = ((y as i128 - x as i128).rem_euclid(m2i) * inv).rem_euclid(m2i);
            out.push((x as i128 + m1i * k) as u64);
        }
    }
    out
}

/// All residues mod `d^2` where `f` vanishes, for square-free `d < 2^32`.
pub fn roots_mod_dsq(f: &IntPoly, d: u64) -> Result<Vec<u64>> {
    f.require_primitive()?;
    if d > MAX_P2_PRIME {
        return Err(Error::OutOfRange(format!("d^2 overflows 64 bits for d = {d}")));
    }
    let primes = squarefree_primes(d)?;
    let disc = disc_or_one(f)?;
    let mut roots = vec![0u64];
    let mut modulus = 1u64;
    for p in primes {
        let entry = roots_mod_p2_with_disc(f, &disc, p)?;
        roots = crt_combine(&roots, modulus, &entry.roots_p2, p * p);
        modulus *= p * p;
    }
    roots.sort_unstable();
    Ok(roots)
}

/// Root data for one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoEntry {
    pub roots_p: Vec<u64>,
    pub roots_p2: Vec<u64>,
    /// `p` divides the discriminant or the leading coefficient.
    pub singular: bool,
}

impl RhoEntry {
    pub fn rho_p(&self) -> u64 {
        self.roots_p.len() as u64
    }

    pub fn rho_p2(&self) -> u64 {
        self.roots_p2.len() as u64
    }
}

/// Per-prime root cache for a fixed primitive polynomial. Entries are
/// computed on demand (or in bulk with [`RhoTable::precompute`]) and never
/// change afterwards, so concurrent readers always see the same contents.
#[derive(Debug)]
pub struct RhoTable {
    poly: IntPoly,
    disc: BigInt,
    entries: RwLock<BTreeMap<u64, Arc<RhoEntry>>>,
}

impl RhoTable {
    pub fn new(f: &IntPoly) -> Result<Self> {
        f.require_primitive()?;
        let disc = disc_or_one(f)?;
        Ok(RhoTable { poly: f.clone(), disc, entries: RwLock::new(BTreeMap::new()) })
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn entry(&self, p: u64) -> Result<Arc<RhoEntry>> {
        if let Some(e) = self.entries.read().unwrap().get(&p) {
            return Ok(e.clone());
        }
        check_prime(p)?;
        let e = Arc::new(roots_mod_p2_with_disc(&self.poly, &self.disc, p)?);
        self.entries.write().unwrap().entry(p).or_insert_with(|| e.clone());
        Ok(e)
    }

    /// Fills the cache for every prime in `primes`, in parallel.
    pub fn precompute(&self, primes: &[u64]) -> Result<()> {
        let missing: Vec<u64> = {
            let map = self.entries.read().unwrap();
            primes.iter().copied().filter(|p| !map.contains_key(p)).collect()
        };
        let computed: Vec<(u64, RhoEntry)> = missing
            .par_iter()
            .map(|&p| {
                check_prime(p)?;
                Ok((p, roots_mod_p2_with_disc(&self.poly, &self.disc, p)?))
            })
            .collect::<Result<_>>()?;
        let mut map = self.entries.write().unwrap();
        for (p, e) in computed {
            map.entry(p).or_insert_with(|| Arc::new(e));
        }
        Ok(())
    }

    pub fn rho_p2(&self, p: u64) -> Result<u64> {
        Ok(self.entry(p)?.rho_p2())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Primes currently cached, ascending.
    pub fn primes(&self) -> Vec<u64> {
        self.entries.read().unwrap().keys().copied().collect()
    }

    /// Primes dividing the discriminant, taken from the trial-division
    /// bound `limit`; the cofactor left after removing them is returned too.
    pub fn disc_primes_up_to(&self, limit: u64) -> (Vec<u64>, BigUint) {
        let mut rest = self.disc.magnitude().clone();
        let mut found = Vec::new();
        if rest.is_zero() {
            return (found, rest);
        }
        for p in crate::arith::primes_up_to(limit) {
            let pb = BigUint::from(p);
            if (&rest % &pb).is_zero() {
                found.push(p);
                while (&rest % &pb).is_zero() {
                    rest /= &pb;
                }
            }
            if rest.to_u64() == Some(1) {
                break;
            }
        }
        (found, rest)
    }
}
