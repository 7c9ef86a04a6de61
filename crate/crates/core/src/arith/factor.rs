//! Integer factorization: trial division by the small primes, then Brent's
//! variant of Pollard rho on whatever composite cofactor remains, with
//! Miller-Rabin deciding when to stop. The cycle constant runs through the
//! fixed schedule 1, 2, 3, ... starting from x0 = 2, so the output (and the
//! work done) is a pure function of the input.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::{is_prime, is_prime_u64, mul_mod, small_primes};

/// Trial division runs over primes below this bound before rho takes over.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 12;

const RHO_BATCH: u64 = 128;

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// A nontrivial divisor of the odd composite `n`.
fn brent_rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |v: u64| (mul_mod(v, v, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..RHO_BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += RHO_BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot: replay one step at a time
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn brent_rho_big(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if n.is_even() {
        return two;
    }
    let one = BigUint::one();
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    for c in 1u64.. {
        let c = BigUint::from(c);
        let f = |v: &BigUint| (v * v + &c) % n;
        let mut y = two.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..RHO_BATCH.min(r - k) {
                    y = f(&y);
                    q = q * absdiff(&x, &y) % n;
                }
                g = q.gcd(n);
                k += RHO_BATCH;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = absdiff(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
    unreachable!()
}

/// Prime factors of `n` with multiplicity (unsorted), `n >= 1`.
pub(crate) fn prime_factors_u64(mut n: u64, out: &mut Vec<u64>) {
    for &p in small_primes().iter().take_while(|&&p| p < TRIAL_DIVISION_BOUND) {
        if p * p > n {
            break;
        }
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            out.push(m);
            continue;
        }
        let d = brent_rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
}

pub(crate) fn prime_factors_big(n: &BigUint, out: &mut Vec<BigUint>) {
    if let Some(small) = n.to_u64() {
        let mut v = Vec::new();
        prime_factors_u64(small, &mut v);
        out.extend(v.into_iter().map(BigUint::from));
        return;
    }
    let mut n = n.clone();
    for &p in small_primes().iter().take_while(|&&p| p < TRIAL_DIVISION_BOUND) {
        let pb = BigUint::from(p);
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            out.push(pb.clone());
            n = q;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            let mut v = Vec::new();
            prime_factors_u64(small, &mut v);
            out.extend(v.into_iter().map(BigUint::from));
            continue;
        }
        if is_prime(&m) {
            out.push(m);
            continue;
        }
        let d = brent_rho_big(&m);
        let other = &m / &d;
        stack.push(d);
        stack.push(other);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_splits_semiprimes() {
        let n = 1_000_003u64 * 1_000_033;
        let d = brent_rho_u64(n);
        assert!(d == 1_000_003 || d == 1_000_033);
        let mut v = Vec::new();
        prime_factors_u64(4_294_967_291 * 4_294_967_279, &mut v);
        v.sort();
        assert_eq!(v, vec![4_294_967_279, 4_294_967_291]);
    }

    #[test]
    fn prime_squares_split() {
        let mut v = Vec::new();
        prime_factors_u64(1_000_003 * 1_000_003, &mut v);
        assert_eq!(v, vec![1_000_003, 1_000_003]);
    }

    #[test]
    fn big_products() {
        let p: BigUint = "1000000000000000003".parse().unwrap();
        let q: BigUint = "1000000007".parse().unwrap();
        let n = &p * &q * &q;
        let mut v = Vec::new();
        prime_factors_big(&n, &mut v);
        v.sort();
        assert_eq!(v, vec![q.clone(), q, p]);
    }
}
