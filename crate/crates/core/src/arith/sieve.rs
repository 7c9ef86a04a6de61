//! Bulk tables of the Möbius function and of the square-free indicator.

use rayon::prelude::*;

use super::primes::primes_up_to;
use crate::error::{Error, Result};

/// Default number of entries per sieve segment.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

/// Segmentation and parallelism knobs for interval sieves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Entries per segment; rounded up to a multiple of 64.
    pub segment_size: usize,
    /// Process segments on the ambient rayon pool.
    pub parallel: bool,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig { segment_size: DEFAULT_SEGMENT_SIZE, parallel: true }
    }
}

/// `mu(n)` (only when `lo == 1`) and the square-free bit `mu^2(n)` for every
/// `n` in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveTable {
    lo: u64,
    hi: u64,
    mu: Option<Vec<i8>>,
    sf: Vec<u64>,
}

impl SieveTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    /// `mu^2(n)` as a boolean. Panics if `n` is outside the table.
    pub fn is_squarefree(&self, n: u64) -> bool {
        assert!(self.contains(n), "{n} outside [{}, {}]", self.lo, self.hi);
        let i = (n - self.lo) as usize;
        self.sf[i / 64] >> (i % 64) & 1 == 1
    }

    /// `mu(n)`, available when the table was built by [`mobius_sieve`].
    pub fn mu(&self, n: u64) -> Option<i8> {
        let mu = self.mu.as_ref()?;
        self.contains(n).then(|| mu[(n - self.lo) as usize])
    }

    pub fn mu_values(&self) -> Option<&[i8]> {
        self.mu.as_deref()
    }

    /// Overwrites one Möbius entry. Exists so verification harnesses can
    /// inject faults; the square-free bit is left untouched.
    pub fn set_mu(&mut self, n: u64, value: i8) {
        if let Some(mu) = self.mu.as_mut() {
            mu[(n - self.lo) as usize] = value;
        }
    }

    /// Raw square-free bits, 64 entries per word, bit `i` is `lo + i`.
    pub fn bits(&self) -> &[u64] {
        &self.sf
    }

    /// Number of square-free entries in the whole table.
    pub fn count(&self) -> u64 {
        self.sf.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Square-free `n` in `[lo, hi]` (clamped to the table) with `n = a mod q`.
    pub fn count_progression(&self, lo: u64, hi: u64, q: u64, a: u64) -> u64 {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi);
        if lo > hi {
            return 0;
        }
        if q == 1 {
            return self.count_range(lo, hi);
        }
        let a = a % q;
        let first = lo + (a + q - lo % q) % q;
        (first..=hi).step_by(q as usize).filter(|&n| self.is_squarefree(n)).count() as u64
    }

    fn count_range(&self, lo: u64, hi: u64) -> u64 {
        let start = (lo - self.lo) as usize;
        let end = (hi - self.lo) as usize + 1;
        let (ws, we) = (start / 64, end / 64);
        let mask_from = |b: usize| if b == 0 { !0u64 } else { !0u64 << b };
        if ws == we {
            let w = self.sf[ws] & mask_from(start % 64) & !mask_from(end % 64);
            return w.count_ones() as u64;
        }
        let mut total = (self.sf[ws] & mask_from(start % 64)).count_ones() as u64;
        total += self.sf[ws + 1..we].iter().map(|w| w.count_ones() as u64).sum::<u64>();
        if end % 64 != 0 {
            total += (self.sf[we] & !mask_from(end % 64)).count_ones() as u64;
        }
        total
    }

    /// Iterator over the square-free members of the table.
    pub fn squarefree_iter(&self) -> impl Iterator<Item = u64> + '_ {
        (self.lo..=self.hi).filter(move |&n| self.is_squarefree(n))
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Möbius values for `1..=n` by a linear sieve.
pub fn mobius_sieve(n: u64) -> Result<SieveTable> {
    if n == 0 {
        return Err(Error::NonPositive("N".into()));
    }
    let size = n as usize + 1;
    let mut mu = vec![0i8; size];
    let mut is_comp = vec![false; size];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    for i in 2..size {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip >= size {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    let mu: Vec<i8> = mu[1..].to_vec();
    let mut sf = vec![0u64; mu.len().div_ceil(64)];
    for (i, &m) in mu.iter().enumerate() {
        if m != 0 {
            sf[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(SieveTable { lo: 1, hi: n, mu: Some(mu), sf })
}

/// Square-free indicator on `[lo, hi]` by striking multiples of `p^2` for
/// every prime `p <= sqrt(hi)`, one segment at a time.
pub fn squarefree_sieve_interval(lo: u64, hi: u64) -> Result<SieveTable> {
    squarefree_sieve_interval_with(lo, hi, &SieveConfig::default())
}

pub fn squarefree_sieve_interval_with(lo: u64, hi: u64, config: &SieveConfig) -> Result<SieveTable> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidWindow(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
    }
    let len = (hi - lo + 1) as usize;
    let words = len.div_ceil(64);
    let seg_words = config.segment_size.max(64).div_ceil(64);
    let squares: Vec<u64> = primes_up_to(isqrt(hi)).into_iter().map(|p| p * p).collect();

    let mut sf = vec![!0u64; words];
    if len % 64 != 0 {
        sf[words - 1] = (1u64 << (len % 64)) - 1;
    }

    let strike = |(seg, chunk): (usize, &mut [u64])| {
        let start = lo + (seg * seg_words * 64) as u64;
        let end = (start + (chunk.len() * 64) as u64 - 1).min(hi);
        for &sq in &squares {
            if sq > end {
                break;
            }
            let mut m = start.div_ceil(sq) * sq;
            while m <= end {
                let i = (m - start) as usize;
                chunk[i / 64] &= !(1u64 << (i % 64));
                m += sq;
            }
        }
    };
    if config.parallel {
        sf.par_chunks_mut(seg_words).enumerate().for_each(strike);
    } else {
        sf.chunks_mut(seg_words).enumerate().for_each(strike);
    }
    Ok(SieveTable { lo, hi, mu: None, sf })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_squarefree(n: u64) -> bool {
        let mut m = n;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                m /= p;
                if m % p == 0 {
                    return false;
                }
            }
            p += 1;
        }
        true
    }

    #[test]
    fn mobius_first_ten() {
        let t = mobius_sieve(10).unwrap();
        let mu: Vec<i8> = (1..=10).map(|n| t.mu(n).unwrap()).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        assert_eq!(mobius_sieve(30).unwrap().mu(30), Some(-1));
        assert!(mobius_sieve(0).is_err());
    }

    #[test]
    fn mobius_squarefree_sum_matches_trial_division() {
        let t = mobius_sieve(10_000).unwrap();
        let expected = (1..=10_000u64).filter(|&n| trial_division_squarefree(n)).count() as u64;
        assert_eq!(t.count(), expected);
        let mu_nonzero = t.mu_values().unwrap().iter().filter(|&&m| m != 0).count() as u64;
        assert_eq!(mu_nonzero, expected);
    }

    #[test]
    fn interval_examples() {
        let t = squarefree_sieve_interval(1, 10).unwrap();
        assert_eq!(t.squarefree_iter().collect::<Vec<_>>(), vec![1, 2, 3, 5, 6, 7, 10]);
        assert_eq!(t.count(), 7);
        assert_eq!(squarefree_sieve_interval(48, 50).unwrap().count(), 0);
        assert!(squarefree_sieve_interval(0, 5).is_err());
        assert!(squarefree_sieve_interval(6, 5).is_err());
    }

    #[test]
    fn interval_matches_factorization_oracle() {
        let lo = 1_000_000;
        let hi = lo + 1_000;
        let t = squarefree_sieve_interval(lo, hi).unwrap();
        for n in lo..=hi {
            assert_eq!(t.is_squarefree(n), trial_division_squarefree(n), "n = {n}");
        }
    }

    #[test]
    fn segment_size_does_not_change_bits() {
        let reference = squarefree_sieve_interval_with(
            777,
            200_000,
            &SieveConfig { segment_size: 1 << 20, parallel: false },
        )
        .unwrap();
        for seg in [64, 100, 4096] {
            let t = squarefree_sieve_interval_with(
                777,
                200_000,
                &SieveConfig { segment_size: seg, parallel: true },
            )
            .unwrap();
            assert_eq!(t, reference);
        }
    }

    #[test]
    fn progression_counts() {
        let t = squarefree_sieve_interval(1, 20).unwrap();
        assert_eq!(t.count_progression(1, 20, 4, 1), 4);
        assert_eq!(t.count_progression(1, 20, 4, 0), 0);
        assert_eq!(t.count_progression(3, 17, 1, 0), 10);
        let big = squarefree_sieve_interval(1, 5000).unwrap();
        for (lo, hi) in [(1, 5000), (63, 64), (64, 129), (100, 100), (65, 4000)] {
            let slow = (lo..=hi).filter(|&n| big.is_squarefree(n)).count() as u64;
            assert_eq!(big.count_progression(lo, hi, 1, 0), slow, "[{lo},{hi}]");
        }
    }

    #[test]
    fn agrees_with_mobius_table() {
        let mobius = mobius_sieve(100_000).unwrap();
        let interval = squarefree_sieve_interval(1, 100_000).unwrap();
        assert_eq!(mobius.bits(), interval.bits());
    }
}
