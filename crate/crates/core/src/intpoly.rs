//! Univariate integer polynomials with arbitrary-precision coefficients.
//!
//! Coefficients are stored highest degree first, so `[c0, c1, ..., cd]` is
//! `c0*t^d + c1*t^(d-1) + ... + cd`. The zero polynomial is the empty list.
//! The textual form used everywhere (CLI included) is the same order,
//! comma-separated: `"1,0,1"` is `t^2 + 1`.
//!
//! The resultant follows the Sylvester-determinant convention: `Res(f, g)` is
//! the determinant of the Sylvester matrix whose first `deg g` rows carry the
//! coefficients of `f` and whose last `deg f` rows carry those of `g`.
//! Equivalently `Res(f, g) = lc(f)^deg(g) * prod g(alpha)` over the roots of `f`.
//! For constants, `Res(f, c) = c^deg(f)` and `Res(c, g) = c^deg(g)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds a polynomial from highest-degree-first coefficients, stripping
    /// leading zeros.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let first = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        IntPoly { coeffs: coeffs[first..].to_vec() }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    /// The monomial `t`.
    pub fn identity() -> Self {
        Self::from_i64(&[1, 0])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn leading(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    /// Coefficient of `t^power`.
    pub fn coeff_of_power(&self, power: usize) -> BigInt {
        match self.degree() {
            Some(d) if power <= d => self.coeffs[d - power].clone(),
            _ => BigInt::zero(),
        }
    }

    /// Coefficients lowest power first.
    pub fn coeffs_ascending(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn from_ascending(mut coeffs: Vec<BigInt>) -> Self {
        coeffs.reverse();
        Self::new(coeffs)
    }

    /// Height: the largest absolute value of a coefficient.
    pub fn height(&self) -> BigUint {
        self.coeffs.iter().map(|c| c.magnitude().clone()).max().unwrap_or_default()
    }

    /// Horner evaluation at `n`, exact.
    pub fn eval(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in &self.coeffs {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_i64(&self, n: i64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> IntPoly {
        let Some(d) = self.degree() else { return IntPoly::zero() };
        let coeffs = self.coeffs[..d]
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigInt::from(d - i))
            .collect();
        IntPoly::new(coeffs)
    }

    /// Gcd of the coefficients; always positive.
    pub fn content(&self) -> Result<BigUint> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        Ok(g.magnitude().clone())
    }

    pub fn is_primitive(&self) -> bool {
        self.content().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Errors with `NotPrimitive` unless the content is 1.
    pub fn require_primitive(&self) -> Result<()> {
        let c = self.content()?;
        if c.is_one() {
            Ok(())
        } else {
            Err(Error::NotPrimitive(c.to_string()))
        }
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Divides every coefficient by `k`; `k` must divide them all.
    fn div_exact(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c / k).collect())
    }

    /// Coefficients reduced into `[0, m)`, highest first, leading zeros kept.
    pub fn coeffs_mod(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().expect("residue fits u64"))
            .collect()
    }

    /// Resultant via the subresultant pseudo-remainder sequence.
    pub fn resultant(&self, other: &IntPoly) -> Result<BigInt> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let da = self.degree().unwrap();
        let db = other.degree().unwrap();
        if da == 0 {
            return Ok(pow(&self.coeffs[0], db));
        }
        if db == 0 {
            return Ok(pow(&other.coeffs[0], da));
        }

        let ca = BigInt::from(self.content()?);
        let cb = BigInt::from(other.content()?);
        let mut a = self.div_exact(&ca);
        let mut b = other.div_exact(&cb);
        let t = pow(&ca, db) * pow(&cb, da);
        let mut s = BigInt::one();
        if da < db {
            std::mem::swap(&mut a, &mut b);
            if da % 2 == 1 && db % 2 == 1 {
                s = -s;
            }
        }

        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let deg_a = a.degree().unwrap();
            let deg_b = b.degree().unwrap();
            let delta = deg_a - deg_b;
            if deg_a % 2 == 1 && deg_b % 2 == 1 {
                s = -s;
            }
            let r = pseudo_remainder(&a, &b);
            a = b;
            if r.is_zero() {
                return Ok(BigInt::zero());
            }
            b = r.div_exact(&(&g * pow(&h, delta)));
            g = a.leading();
            h = if delta == 0 { h } else { pow(&g, delta) / pow(&h, delta - 1) };

            let deg_b = b.degree().unwrap();
            if deg_b == 0 {
                let deg_a = a.degree().unwrap();
                let lb = b.leading();
                let hfin = pow(&lb, deg_a) / pow(&h, deg_a - 1);
                return Ok(s * t * hfin);
            }
        }
    }

    /// Discriminant `(-1)^(n(n-1)/2) * Res(f, f') / lc(f)`.
    pub fn discriminant(&self) -> Result<BigInt> {
        let n = match self.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        let res = self.resultant(&self.derivative())?;
        let (q, r) = res.div_rem(&self.leading());
        debug_assert!(r.is_zero(), "Res(f, f') is divisible by lc(f)");
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -q } else { q })
    }

    /// True iff the discriminant is nonzero (no repeated factor over the rationals).
    pub fn is_squarefree_poly(&self) -> Result<bool> {
        Ok(!self.discriminant()?.is_zero())
    }

    /// Comma-separated coefficients, highest degree first.
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn pow(base: &BigInt, exp: usize) -> BigInt {
    num_traits::pow(base.clone(), exp)
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`, with `deg a >= deg b >= 1`.
fn pseudo_remainder(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let m = a.degree().unwrap();
    let n = b.degree().unwrap();
    let lb = b.leading();
    let mut r = a.coeffs.clone();
    for k in 0..=(m - n) {
        let lead = r[k].clone();
        for c in r[k..].iter_mut() {
            *c *= &lb;
        }
        if !lead.is_zero() {
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[k + j] -= &lead * bj;
            }
        }
    }
    IntPoly::new(r[m - n + 1..].to_vec())
}

impl FromStr for IntPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        let coeffs = s
            .split(',')
            .map(|part| {
                BigInt::from_str(part.trim())
                    .map_err(|_| Error::Parse(format!("bad coefficient {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({})", self)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else { return write!(f, "0") };
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = d - i;
            let neg = c.sign() == Sign::Minus;
            let mag = c.magnitude();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = power == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match power {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{power}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    /// Sylvester determinant by fraction-free Gaussian elimination.
    fn sylvester_det(f: &IntPoly, g: &IntPoly) -> BigInt {
        let m = f.degree().unwrap();
        let n = g.degree().unwrap();
        let size = m + n;
        if size == 0 {
            return BigInt::one();
        }
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        for row in 0..n {
            for (j, c) in f.coeffs().iter().enumerate() {
                mat[row][row + j] = c.clone();
            }
        }
        for row in 0..m {
            for (j, c) in g.coeffs().iter().enumerate() {
                mat[n + row][row + j] = c.clone();
            }
        }
        bareiss(mat)
    }

    fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
        let n = a.len();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[1, 0, 1]).eval_i64(3), BigInt::from(10));
        assert_eq!(IntPoly::zero().eval_i64(7), BigInt::zero());
        let big = IntPoly::new(vec![BigInt::from(10u64.pow(12)), BigInt::one()]);
        assert_eq!(big.eval_i64(1_000_000), BigInt::from(10u64.pow(18) + 1));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p(&[1, 0, 1]).derivative(), p(&[2, 0]));
        assert!(p(&[5]).derivative().is_zero());
        assert_eq!(p(&[1, 0, -1, 0]).derivative(), p(&[3, 0, -1]));
    }

    #[test]
    fn content_examples() {
        assert_eq!(p(&[2, 4, 6]).content().unwrap(), BigUint::from(2u32));
        assert_eq!(p(&[1, 0, 1]).content().unwrap(), BigUint::one());
        assert_eq!(p(&[-3, 0]).content().unwrap(), BigUint::from(3u32));
        assert_eq!(IntPoly::zero().content(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(p(&[1, 0, -1]).resultant(&p(&[1, -1])).unwrap(), BigInt::zero());
        let f = p(&[1, 0]);
        let g = p(&[1, -2]);
        assert_eq!(f.resultant(&g).unwrap(), BigInt::from(-2));
        assert_eq!(sylvester_det(&f, &g), BigInt::from(-2));
        let f = p(&[1, 0, 1]);
        let g = p(&[2, 0]);
        assert_eq!(f.resultant(&g).unwrap(), BigInt::from(4));
        assert_eq!(sylvester_det(&f, &g), BigInt::from(4));
        assert!(IntPoly::zero().resultant(&f).is_err());
    }

    #[test]
    fn resultant_of_constants() {
        assert_eq!(p(&[3]).resultant(&p(&[1, 0, 1])).unwrap(), BigInt::from(9));
        assert_eq!(p(&[1, 2, 3]).resultant(&p(&[-2])).unwrap(), BigInt::from(4));
        assert_eq!(p(&[3]).resultant(&p(&[5])).unwrap(), BigInt::one());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(p(&[1, 0, 1]).discriminant().unwrap(), BigInt::from(-4));
        assert_eq!(p(&[1, 3, 2]).discriminant().unwrap(), BigInt::from(1));
        assert_eq!(p(&[1, 0, -1, 0]).discriminant().unwrap(), BigInt::from(4));
        assert_eq!(p(&[1, 0, 0]).discriminant().unwrap(), BigInt::zero());
        assert_eq!(p(&[3, 7]).discriminant().unwrap(), BigInt::one());
        assert_eq!(p(&[4]).discriminant(), Err(Error::ConstantPolynomial));
        assert_eq!(IntPoly::zero().discriminant(), Err(Error::ZeroPolynomial));
        // non-monic quadratic: b^2 - 4ac
        assert_eq!(p(&[3, 5, -7]).discriminant().unwrap(), BigInt::from(25 + 84));
    }

    #[test]
    fn squarefree_poly_examples() {
        assert!(p(&[1, 0, 1]).is_squarefree_poly().unwrap());
        assert!(!p(&[1, 0, 0]).is_squarefree_poly().unwrap());
        assert!(!p(&[1, 0, -3, 2]).is_squarefree_poly().unwrap());
    }

    #[test]
    fn parse_and_display() {
        let f: IntPoly = "1,0,1".parse().unwrap();
        assert_eq!(f, p(&[1, 0, 1]));
        assert_eq!(f.to_string(), "t^2 + 1");
        assert_eq!(p(&[-3, 0, -1, 2]).to_string(), "-3t^3 - t + 2");
        assert_eq!(" 0, 0,2 ,-1".parse::<IntPoly>().unwrap(), p(&[2, -1]));
        assert!("1,x".parse::<IntPoly>().is_err());
        assert_eq!(f.to_coeff_string(), "1,0,1");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_poly(max_deg: usize, bound: i64) -> impl Strategy<Value = IntPoly> {
            proptest::collection::vec(-bound..=bound, 1..=max_deg + 1)
                .prop_map(|c| IntPoly::from_i64(&c))
        }

        // Rational Euclid as the gcd oracle: returns degree of gcd over Q.
        fn rational_gcd_degree(f: &IntPoly, g: &IntPoly) -> usize {
            use num_rational::BigRational;
            let to_q = |p: &IntPoly| -> Vec<BigRational> {
                p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
            };
            let mut a = to_q(f);
            let mut b = to_q(g);
            while !b.is_empty() {
                // a mod b
                while a.len() >= b.len() && !a.is_empty() {
                    let factor = &a[0] / &b[0];
                    for j in 0..b.len() {
                        let v = &b[j] * &factor;
                        a[j] -= v;
                    }
                    a.remove(0);
                    while a.first().is_some_and(|c| c.is_zero()) {
                        a.remove(0);
                    }
                }
                std::mem::swap(&mut a, &mut b);
            }
            a.len().saturating_sub(1)
        }

        proptest! {
            #[test]
            fn resultant_matches_sylvester(f in small_poly(4, 20), g in small_poly(4, 20)) {
                prop_assume!(!f.is_zero() && !g.is_zero());
                prop_assert_eq!(f.resultant(&g).unwrap(), sylvester_det(&f, &g));
            }

            #[test]
            fn resultant_vanishes_iff_common_factor(f in small_poly(4, 20), g in small_poly(4, 20)) {
                prop_assume!(!f.is_zero() && !g.is_zero());
                let zero = f.resultant(&g).unwrap().is_zero();
                prop_assert_eq!(zero, rational_gcd_degree(&f, &g) > 0);
            }

            #[test]
            fn square_has_zero_discriminant(f in small_poly(3, 20)) {
                prop_assume!(f.degree().unwrap_or(0) >= 1);
                prop_assert!(f.mul(&f).discriminant().unwrap().is_zero());
            }

            #[test]
            fn derivative_matches_finite_difference(f in small_poly(2, 50), n in -100i64..100) {
                // For deg <= 2: f(n+1) - f(n) = f'(n) + a2 where a2 is the t^2 coefficient.
                let diff = f.eval_i64(n + 1) - f.eval_i64(n);
                let correction = f.coeff_of_power(2);
                prop_assert_eq!(f.derivative().eval_i64(n) + correction, diff);
            }

            #[test]
            fn content_scales(f in small_poly(4, 30), k in -50i64..50) {
                prop_assume!(!f.is_zero() && k != 0);
                let scaled = f.scale(&BigInt::from(k)).content().unwrap();
                prop_assert_eq!(scaled, f.content().unwrap() * BigUint::from(k.unsigned_abs()));
            }
        }
    }
}
