//! Families of polynomials near a base polynomial and the statistics taken
//! over them.
//!
//! A family `F_{g,S}(H)` keeps every coefficient of `g` except those of the
//! powers `t^i`, `i in S`, which range over `[c_i - H, c_i + H]`; members
//! must be primitive and keep the degree of `g`. The same object is written
//! `G_g(H)` when `S` is clear from context.
//!
//! All randomness comes from [`SplitMix64`], a fixed generator given by its
//! recurrence so that runs are reproducible in any language.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{count_squarefree_values, residual_ap, sum_kd_ap, APWindow};
use crate::density::c_f_bracket;
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// Version of the report layout; bumped whenever columns change.
pub const SCHEMA_VERSION: u32 = 1;

/// Prime cutoff for the certified `c_f` brackets inside [`moments`].
pub const MOMENTS_PRIME_CUTOFF: u64 = 10_000;

/// Largest family [`enumerate_family`] will list.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Families with height above this are sampled by default.
pub const SAMPLING_HEIGHT_THRESHOLD: u64 = 1_000;

/// Rejected draws allowed per requested member before giving up.
pub const REJECTION_BUDGET_PER_MEMBER: u64 = 1_000;

/// `epsilon` in the typical-set conditions.
pub const TYPICAL_SET_EPSILON: f64 = 0.01;

/// SplitMix64. With state `s` (64-bit, wrapping):
///
/// ```text
/// s = s + 0x9E3779B97F4A7C15
/// z = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output z ^ (z >> 31)
/// ```
///
/// The initial state is the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)`, `n >= 1`: outputs at or above the largest
    /// multiple of `n` below `2^64` are redrawn, then reduced mod `n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let limit = (1u128 << 64) / n as u128 * n as u128;
        loop {
            let v = self.next_u64();
            if (v as u128) < limit {
                return v % n;
            }
        }
    }

    /// Uniform in `[lo, hi]`.
    pub fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi as i128 - lo as i128 + 1) as u64;
        (lo as i128 + self.below(span) as i128) as i64
    }
}

/// Base polynomial, varied exponents, height and seed of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub base: IntPoly,
    /// Exponents `i` whose coefficients vary, sorted and distinct.
    pub varied: Vec<usize>,
    pub height: u64,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(base: IntPoly, mut varied: Vec<usize>, height: u64, seed: u64) -> Result<Self> {
        let deg = match base.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Err(Error::ConstantPolynomial),
            Some(d) => d,
        };
        varied.sort_unstable();
        varied.dedup();
        if let Some(&i) = varied.iter().find(|&&i| i > deg) {
            return Err(Error::InvalidParameter(format!(
                "varied exponent {i} exceeds degree {deg}"
            )));
        }
        if height == 0 {
            return Err(Error::NonPositive("height".into()));
        }
        if height > 1 << 62 {
            return Err(Error::OutOfRange(format!("height {height} exceeds 2^62")));
        }
        Ok(FamilySpec { base, varied, height, seed })
    }

    pub fn degree(&self) -> usize {
        self.base.degree().expect("nonconstant")
    }

    /// Number of coefficient vectors before the primitivity and degree
    /// constraints, `(2H + 1)^|S|`, if it fits.
    pub fn raw_size(&self) -> Option<u128> {
        let side = 2 * self.height as u128 + 1;
        self.varied.iter().try_fold(1u128, |acc, _| acc.checked_mul(side))
    }

    /// Hypotheses of the averaging theorem that this family violates.
    pub fn hypothesis_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.base.coeff_of_power(0).is_zero() && !self.varied.contains(&0) {
            out.push("base polynomial has g(0) = 0 and the constant term is fixed".to_string());
        }
        out
    }

    fn member(&self, offsets: &[i64]) -> Option<IntPoly> {
        let mut asc = self.base.coeffs_ascending();
        for (&i, &o) in self.varied.iter().zip(offsets) {
            asc[i] += o;
        }
        let f = IntPoly::from_ascending(asc);
        (f.degree() == Some(self.degree()) && f.is_primitive()).then_some(f)
    }

    pub fn summary(&self) -> SpecSummary {
        SpecSummary {
            base: self.base.to_coeff_string(),
            varied: self.varied.clone(),
            height: self.height,
            seed: self.seed,
        }
    }
}

/// Serializable form of a [`FamilySpec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub base: String,
    pub varied: Vec<usize>,
    pub height: u64,
    pub seed: u64,
}

/// Members drawn from or listed out of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub members: Vec<IntPoly>,
    pub warnings: Vec<String>,
    /// Coefficient vectors drawn or visited, accepted or not.
    pub draws: u64,
}

/// `count` members drawn uniformly with replacement, redrawing vectors
/// that are not primitive or lose the leading coefficient.
pub fn sample_family(spec: &FamilySpec, count: usize) -> Result<Family> {
    if count == 0 {
        return Err(Error::NonPositive("count".into()));
    }
    let budget = REJECTION_BUDGET_PER_MEMBER * count as u64 + REJECTION_BUDGET_PER_MEMBER;
    let h = spec.height as i64;
    let mut rng = SplitMix64::new(spec.seed);
    let mut members = Vec::with_capacity(count);
    let mut draws = 0u64;
    while members.len() < count {
        if draws >= budget {
            return Err(Error::EmptyFamily { budget, found: members.len(), wanted: count });
        }
        draws += 1;
        let offsets: Vec<i64> = spec.varied.iter().map(|_| rng.in_range(-h, h)).collect();
        if let Some(f) = spec.member(&offsets) {
            members.push(f);
        }
    }
    Ok(Family { members, warnings: spec.hypothesis_warnings(), draws })
}

/// Every member of the family, sorted. Refuses families with more than
/// [`ENUMERATION_LIMIT`] coefficient vectors.
pub fn enumerate_family(spec: &FamilySpec) -> Result<Family> {
    let size = spec.raw_size().filter(|&s| s <= ENUMERATION_LIMIT).ok_or_else(|| {
        Error::OutOfRange(format!(
            "family has more than {ENUMERATION_LIMIT} coefficient vectors; sample instead"
        ))
    })?;
    let h = spec.height as i64;
    let mut offsets = vec![-h; spec.varied.len()];
    let mut members = Vec::new();
    for _ in 0..size {
        if let Some(f) = spec.member(&offsets) {
            members.push(f);
        }
        for o in offsets.iter_mut() {
            if *o < h {
                *o += 1;
                break;
            }
            *o = -h;
        }
    }
    members.sort();
    if members.is_empty() {
        return Err(Error::EmptyFamily { budget: size as u64, found: 0, wanted: 1 });
    }
    Ok(Family { members, warnings: spec.hypothesis_warnings(), draws: size as u64 })
}

/// One square-free member: its count, certified constant and residual
/// `|S(f, x)/x - c_f|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyRow {
    pub coeffs: String,
    pub count: u64,
    pub c_f_lower: f64,
    pub c_f_upper: f64,
    pub c_f_mid: f64,
    pub residual: f64,
}

/// A member that is not square-free as a polynomial; only its count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonSquarefreeRow {
    pub coeffs: String,
    pub count: u64,
}

/// Mean of `r_f` and of `r_f^2` over the square-free members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub members: usize,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalCount {
    pub eta: f64,
    /// Members with `r_f > eta`.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub spec: Option<SpecSummary>,
    pub x: u64,
    pub prime_cutoff: u64,
    /// How `S(f, x)` was evaluated.
    pub d_policy: String,
    pub per_poly: Vec<PolyRow>,
    pub non_squarefree: Vec<NonSquarefreeRow>,
    pub moments: Moments,
    pub exceptional: Vec<ExceptionalCount>,
    pub warnings: Vec<String>,
}

const D_POLICY: &str = "exact: k_D identity with D = ceil(sqrt(max |f(n)|)) or per-value factorization";

enum Evaluated {
    Squarefree(PolyRow),
    NotSquarefree(NonSquarefreeRow),
}

fn evaluate(f: &IntPoly, x: u64, cutoff: u64) -> Result<Evaluated> {
    f.require_primitive()?;
    let count = count_squarefree_values(f, x)?;
    let coeffs = f.to_coeff_string();
    if f.degree() == Some(0) || !f.is_squarefree_poly()? {
        return Ok(Evaluated::NotSquarefree(NonSquarefreeRow { coeffs, count }));
    }
    let c = c_f_bracket(f, cutoff)?;
    let mid = c.midpoint();
    Ok(Evaluated::Squarefree(PolyRow {
        coeffs,
        count,
        c_f_lower: c.lower,
        c_f_upper: c.upper,
        c_f_mid: mid,
        residual: (count as f64 / x as f64 - mid).abs(),
    }))
}

/// Counts, residuals, moments and exceptional counts for the polynomials
/// `fs` at `x`. Rows are emitted in polynomial order, so the report does not
/// depend on input order or scheduling.
pub fn moments(fs: &[IntPoly], x: u64, eta_grid: &[f64]) -> Result<ExperimentReport> {
    if x == 0 {
        return Err(Error::NonPositive("x".into()));
    }
    if let Some(eta) = eta_grid.iter().find(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter(format!("eta {eta}")));
    }
    let mut sorted: Vec<&IntPoly> = fs.iter().collect();
    sorted.sort();
    let evaluated: Vec<Evaluated> = sorted
        .par_iter()
        .map(|f| evaluate(f, x, MOMENTS_PRIME_CUTOFF))
        .collect::<Result<_>>()?;

    let mut per_poly = Vec::new();
    let mut non_squarefree = Vec::new();
    for e in evaluated {
        match e {
            Evaluated::Squarefree(r) => per_poly.push(r),
            Evaluated::NotSquarefree(r) => non_squarefree.push(r),
        }
    }
    let moments = moments_of(&per_poly);
    let mut etas = eta_grid.to_vec();
    etas.sort_by(f64::total_cmp);
    etas.dedup();
    let exceptional = etas
        .into_iter()
        .map(|eta| ExceptionalCount {
            eta,
            count: per_poly.iter().filter(|r| r.residual > eta).count(),
        })
        .collect();

    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        spec: None,
        x,
        prime_cutoff: MOMENTS_PRIME_CUTOFF,
        d_policy: D_POLICY.to_string(),
        per_poly,
        non_squarefree,
        moments,
        exceptional,
        warnings: Vec::new(),
    })
}

/// Moments recomputed from rows, in row order.
pub fn moments_of(rows: &[PolyRow]) -> Moments {
    let n = rows.len();
    if n == 0 {
        return Moments { members: 0, first: 0.0, second: 0.0 };
    }
    let first = rows.iter().map(|r| r.residual).sum::<f64>() / n as f64;
    let second = rows.iter().map(|r| r.residual * r.residual).sum::<f64>() / n as f64;
    Moments { members: n, first, second }
}

/// Draws (or lists) the family and runs [`moments`] on it.
pub fn family_moments(
    spec: &FamilySpec,
    samples: usize,
    x: u64,
    eta_grid: &[f64],
    enumerate: bool,
) -> Result<ExperimentReport> {
    let family = if enumerate {
        enumerate_family(spec)?
    } else {
        sample_family(spec, samples)?
    };
    let mut report = moments(&family.members, x, eta_grid)?;
    report.spec = Some(spec.summary());
    report.warnings = family.warnings;
    Ok(report)
}

/// Pair counts for the typical set `M_{kappa,d}` over `[1, x]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalSetCounts {
    pub inside: u64,
    pub outside: u64,
    pub epsilon: f64,
}

/// `v`, or the nearest integer when `v` is within rounding noise of it.
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r
    } else {
        v
    }
}

/// Counts the pairs `(n1, n2)` in `[1, x]^2` inside and outside
/// `M_{kappa,d}`: both `n_i` and `|n1 - n2|` exceed `x^(1 - kappa/d)`,
/// `gcd(n1, n2) < x^(kappa/d)` and `gcd(n1^d, g(n1)) < x^(kappa + epsilon)`.
pub fn typical_set_diagnostic(g: &IntPoly, x: u64, kappa: f64, d: u32) -> Result<TypicalSetCounts> {
    if x == 0 {
        return Err(Error::NonPositive("x".into()));
    }
    if !(kappa > 0.0 && kappa < d as f64) {
        return Err(Error::InvalidParameter(format!("need 0 < kappa < d, got kappa = {kappa}, d = {d}")));
    }
    if g.is_zero() || g.coeff_of_power(0).is_zero() {
        return Err(Error::InvalidParameter("need g(0) != 0".into()));
    }
    if g.degree().unwrap() > d as usize {
        return Err(Error::InvalidParameter(format!("deg g exceeds d = {d}")));
    }
    let xf = x as f64;
    let size = snap(xf.powf(1.0 - kappa / d as f64));
    let gcd_bound = snap(xf.powf(kappa / d as f64));
    let value_bound = snap(xf.powf(kappa + TYPICAL_SET_EPSILON));

    let first_ok: Vec<bool> = (1..=x)
        .map(|n| {
            let nb = BigInt::from(n);
            let gv = g.eval(&nb);
            let common = nb.pow(d).gcd(&gv);
            (n as f64) > size && common.to_f64().unwrap_or(f64::INFINITY) < value_bound
        })
        .collect();

    let inside: u64 = (1..=x)
        .into_par_iter()
        .map(|n1| {
            if !first_ok[(n1 - 1) as usize] {
                return 0;
            }
            (1..=x)
                .filter(|&n2| {
                    (n2 as f64) > size
                        && (n1.abs_diff(n2) as f64) > size
                        && (n1.gcd(&n2) as f64) < gcd_bound
                })
                .count() as u64
        })
        .sum();
    Ok(TypicalSetCounts { inside, outside: x * x - inside, epsilon: TYPICAL_SET_EPSILON })
}

/// How the sieve parameter `D` is chosen for each window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DPolicy {
    Fixed(u64),
    /// `ceil(hi^(9/10))` for the window's right endpoint `hi`.
    NineTenths,
}

impl DPolicy {
    pub fn for_window(&self, hi: u64) -> u64 {
        match *self {
            DPolicy::Fixed(d) => d,
            DPolicy::NineTenths => crate::counting::default_bigd(hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatteryConfig {
    pub d_policy: DPolicy,
    pub q_max: u64,
    pub windows: usize,
    pub seed: u64,
    /// Windows are drawn inside this interval.
    pub region: (u64, u64),
    /// Window lengths are uniform in this range.
    pub lengths: (u64, u64),
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            d_policy: DPolicy::Fixed(1000),
            q_max: 50,
            windows: 100,
            seed: 42,
            region: (10_000_000, 100_000_000),
            lengths: (10_000, 100_000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub index: usize,
    pub q: u64,
    pub u: u64,
    pub gcd: u64,
    pub lo: u64,
    pub hi: u64,
    pub bigd: u64,
    pub residual: f64,
    pub precondition_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub rows: Vec<BatteryRow>,
    pub max: f64,
    pub mean: f64,
}

/// Residuals of `mu^2 - k_D` on random windows of random progressions.
/// For each window the generator yields, in order: the length, the left
/// endpoint, the modulus `q` in `[1, q_max]` and the residue `u` in `[0, q)`.
pub fn corollary_hypothesis_battery(config: &BatteryConfig) -> Result<BatteryReport> {
    let (r_lo, r_hi) = config.region;
    let (len_lo, len_hi) = config.lengths;
    if config.q_max == 0 || config.windows == 0 {
        return Err(Error::NonPositive("q_max and windows".into()));
    }
    if r_lo == 0 || len_lo == 0 || len_lo > len_hi || r_hi < r_lo || r_hi - r_lo + 1 < len_hi {
        return Err(Error::InvalidParameter(format!(
            "region [{r_lo}, {r_hi}] cannot hold windows of length {len_lo}..={len_hi}"
        )));
    }
    let mut rng = SplitMix64::new(config.seed);
    let mut draws = Vec::with_capacity(config.windows);
    for index in 0..config.windows {
        let len = len_lo + rng.below(len_hi - len_lo + 1);
        let lo = r_lo + rng.below(r_hi - r_lo + 2 - len);
        let q = 1 + rng.below(config.q_max);
        let u = rng.below(q);
        draws.push((index, APWindow::new(lo, lo + len - 1, q, u)?));
    }
    let rows: Vec<BatteryRow> = draws
        .par_iter()
        .map(|&(index, w)| {
            let bigd = config.d_policy.for_window(w.hi);
            Ok(BatteryRow {
                index,
                q: w.q,
                u: w.a,
                gcd: w.a.gcd(&w.q),
                lo: w.lo,
                hi: w.hi,
                bigd,
                residual: residual_ap(&w, bigd)?,
                precondition_holds: sum_kd_ap(&w, bigd)?.precondition_holds,
            })
        })
        .collect::<Result<_>>()?;
    let max = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mean = rows.iter().map(|r| r.residual).sum::<f64>() / rows.len() as f64;
    Ok(BatteryReport { rows, max, mean })
}
