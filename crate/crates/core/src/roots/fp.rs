//! Dense polynomials over the prime field F_p, coefficients lowest power
//! first. Supports `p < 2^63`.

use crate::arith::primes::{mul_mod, pow_mod};

pub(crate) type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// `(quotient, remainder)` of `a / b`, `b` nonzero.
fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let db = b.len() - 1;
    let lead_inv = inv(b[db], p);
    let mut r = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![0u64; r.len() - db];
    for k in (db..r.len()).rev() {
        let coef = mul_mod(r[k], lead_inv, p);
        if coef == 0 {
            continue;
        }
        q[k - db] = coef;
        for (j, &bj) in b.iter().enumerate() {
            let idx = k - db + j;
            r[idx] = (r[idx] + p - mul_mod(coef, bj, p)) % p;
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    div_rem(a, b, p).1
}

pub(crate) fn monic(a: &[u64], p: u64) -> Poly {
    let Some(&lead) = a.last() else { return Vec::new() };
    let li = inv(lead, p);
    a.iter().map(|&c| mul_mod(c, li, p)).collect()
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// `base^e mod modulus`.
fn pow_mod_poly(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), modulus, p);
        }
        b = rem(&mul(&b, &b, p), modulus, p);
        e >>= 1;
    }
    acc
}

/// Distinct roots in F_p of the nonzero polynomial `f` (ascending coefficients),
/// sorted. Takes `gcd(f, t^p - t)` and splits it by the deterministic
/// sequence of shifts `gcd(g, (t + s)^((p-1)/2) - 1)`, `s = 0, 1, 2, ...`.
pub(crate) fn distinct_roots(f: &[u64], p: u64) -> Vec<u64> {
    let f = monic(&trim(f.to_vec()), p);
    if f.len() <= 1 {
        return Vec::new();
    }
    let tp = pow_mod_poly(&[0, 1], p, &f, p);
    let g = gcd(&f, &sub(&tp, &[0, 1], p), p);
    let mut roots = Vec::new();
    split_linear(g, p, 0, &mut roots);
    roots.sort_unstable();
    roots
}

fn split_linear(g: Poly, p: u64, mut shift: u64, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            // monic t + c
            out.push((p - g[0]) % p);
            return;
        }
        _ => {}
    }
    let half = (p - 1) / 2;
    loop {
        let h = pow_mod_poly(&[shift % p, 1], half, &g, p);
        let h = gcd(&g, &sub(&h, &[1], p), p);
        shift += 1;
        if h.len() > 1 && h.len() < g.len() {
            let (other, _) = div_rem(&g, &h, p);
            let other = monic(&other, p);
            split_linear(h, p, shift, out);
            split_linear(other, p, shift, out);
            return;
        }
    }
}

/// Horner evaluation mod `p`.
pub(crate) fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &[u64], p: u64) -> Vec<u64> {
        (0..p).filter(|&x| eval(f, x, p) == 0).collect()
    }

    #[test]
    fn matches_exhaustive_search() {
        for p in [3u64, 5, 7, 11, 101, 1009, 7919] {
            let polys: [Vec<u64>; 5] = [
                vec![1, 0, 1],
                vec![0, p - 1, 0, 1],
                vec![2, 3, 0, 5, 1],
                vec![6, 11, 6, 1],
                vec![p - 1, 0, 0, 0, 1],
            ];
            for f in polys {
                let f: Vec<u64> = f.into_iter().map(|c| c % p).collect();
                assert_eq!(distinct_roots(&f, p), brute(&f, p), "p={p} f={f:?}");
            }
        }
    }

    #[test]
    fn repeated_roots_reported_once() {
        let p = 1009;
        // (t - 3)^2 (t - 5)
        let f = mul(&mul(&[p - 3, 1], &[p - 3, 1], p), &[p - 5, 1], p);
        assert_eq!(distinct_roots(&f, p), vec![3, 5]);
    }

    #[test]
    fn large_prime() {
        let p = 1_000_000_007u64;
        // (t - 12345)(t - 999)(t + 1)
        let f = mul(&mul(&[p - 12345, 1], &[p - 999, 1], p), &[1, 1], p);
        assert_eq!(distinct_roots(&f, p), vec![999, 12345, p - 1]);
    }
}
