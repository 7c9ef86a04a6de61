//! Built-in self checks. `Quick` runs the worked examples of every module;
//! `Full` adds the numbered acceptance criteria, each with its time budget.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{
    factor_u64, large_gcd_count, mobius, mobius_sieve, mu_squared_u64, squarefree_sieve_interval,
    squarefree_sieve_interval_with, SieveConfig,
};
use crate::cli::{dispatch, strip_header};
use crate::counting::{
    capped_bigd, count_squarefree_ap, count_squarefree_values, k_d, kd_sieve_interval, residual_ap,
    sum_kd_ap, sum_kd_values, APWindow,
};
use crate::density::{ap_main_term, c_f_bracket, c_f_certified, SQUAREFREE_DENSITY};
use crate::family::{family_moments, typical_set_diagnostic, FamilySpec, SplitMix64};
use crate::intpoly::IntPoly;
use crate::roots::roots_mod_p2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate corruption used to confirm that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of `mu(30)` in the Möbius table.
    CorruptMu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

/// One numbered acceptance criterion.
pub struct Criterion {
    pub number: u32,
    pub name: &'static str,
    pub budget: Duration,
    pub run: fn() -> Outcome,
}

/// Verdict and explanation before timing is applied.
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn timed(name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> CheckResult {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let mut passed = o.passed;
    let mut detail = o.detail;
    if let Some(b) = budget {
        detail = format!("{detail}; {:.2} s of {} s", elapsed.as_secs_f64(), b.as_secs());
        if elapsed > b {
            passed = false;
            detail.push_str(" (over budget)");
        }
    }
    CheckResult { name: name.to_string(), passed, detail, elapsed }
}

fn poly(c: &[i64]) -> IntPoly {
    IntPoly::from_i64(c)
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return outcome(false, format!($($msg)+));
        }
    };
}

macro_rules! try_o {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return outcome(false, format!("error: {err}")),
        }
    };
}

fn check_intpoly() -> Outcome {
    let f = poly(&[1, 0, 1]);
    ensure!(try_o!(f.discriminant()) == BigInt::from(-4), "disc(t^2 + 1) != -4");
    let g = poly(&[1, -6, 11, -6]);
    ensure!(try_o!(g.discriminant()) == BigInt::from(4), "disc((t-1)(t-2)(t-3)) != 4");
    ensure!(!poly(&[2, 4]).is_primitive(), "2t + 4 reported primitive");
    ensure!(!try_o!(poly(&[1, 2, 1]).is_squarefree_poly()), "(t+1)^2 reported square-free");
    ensure!(f.eval_i64(3) == BigInt::from(10), "(t^2 + 1)(3) != 10");
    outcome(true, "discriminant, content and evaluation examples")
}

fn check_arith() -> Outcome {
    ensure!(try_o!(factor_u64(72)) == vec![(2, 3), (3, 2)], "factor(72)");
    let sf: Vec<u64> = (1..=10).filter(|&n| mu_squared_u64(n) == 1).collect();
    ensure!(sf == vec![1, 2, 3, 5, 6, 7, 10], "square-free n <= 10: {sf:?}");
    ensure!(try_o!(squarefree_sieve_interval(48, 50)).count() == 0, "[48, 50] not empty");
    ensure!(try_o!(large_gcd_count(1, 0, 6, 6.0, 2.0)) == 5, "large_gcd_count(1, 0, 6, 6, 2)");
    outcome(true, "factorization, square-free indicator and gcd-count examples")
}

/// Möbius table against per-entry trial division.
fn check_mobius_table(faults: &[Fault]) -> Outcome {
    let mut table = try_o!(mobius_sieve(10_000));
    if faults.contains(&Fault::CorruptMu) {
        let v = table.mu(30).unwrap();
        table.set_mu(30, -v);
    }
    for n in 1..=10_000 {
        let expected = try_o!(mobius(n));
        ensure!(table.mu(n) == Some(expected), "mu({n}) = {:?}, trial division gives {expected}", table.mu(n));
    }
    outcome(true, "mu(n) for n <= 10^4 agrees with trial division")
}

fn check_roots() -> Outcome {
    let r = try_o!(roots_mod_p2(&poly(&[1, 0, 1]), 5));
    ensure!(r == vec![7, 18], "roots of t^2 + 1 mod 25: {r:?}");
    let r = try_o!(roots_mod_p2(&poly(&[1, 0, 0]), 3));
    ensure!(r == vec![0, 3, 6], "roots of t^2 mod 9: {r:?}");
    outcome(true, "roots mod p^2 examples")
}

fn check_density() -> Outcome {
    let v = try_o!(c_f_certified(&poly(&[1, 0]), 100_000));
    ensure!(v.contains(SQUAREFREE_DENSITY), "c_f(t) bracket [{}, {}] misses 6/pi^2", v.lower, v.upper);
    let m = try_o!(ap_main_term(1, 0, 1.0e6));
    ensure!((m - 1.0e6 * SQUAREFREE_DENSITY).abs() < 1e-6, "main term for q = 1: {m}");
    outcome(true, "c_f(t) brackets 6/pi^2; main term for q = 1")
}

fn check_counting() -> Outcome {
    ensure!(try_o!(count_squarefree_values(&poly(&[1, 0]), 10)) == 7, "count(t, 10) != 7");
    ensure!(try_o!(k_d(&BigInt::from(12), 1)) == 1, "k_1(12) != 1");
    ensure!(try_o!(k_d(&BigInt::from(12), 2)) == 0, "k_2(12) != 0");
    let w = try_o!(APWindow::new(100_000_000, 100_100_000, 7, 3));
    ensure!(try_o!(count_squarefree_ap(&w)) == 8855, "square-free count on the reference window");
    ensure!(try_o!(sum_kd_ap(&w, 100)).value == 8867, "k_100 sum on the reference window");
    outcome(true, "square-free counts and k_D examples")
}

fn check_family() -> Outcome {
    let mut rng = SplitMix64::new(1_234_567);
    let first = rng.next_u64();
    ensure!(first == 6_457_827_717_110_365_317, "SplitMix64(1234567) first output {first}");
    let spec = try_o!(FamilySpec::new(poly(&[1, 0, 1]), vec![0], 3, 0));
    ensure!(spec.raw_size() == Some(7), "family t^2 + c, |c| <= 3 has raw size {:?}", spec.raw_size());
    outcome(true, "generator and family-size examples")
}

fn check_cli() -> Outcome {
    let out = dispatch(["sqflab", "count", "--poly", "1,0", "--x", "10"]);
    ensure!(out.code == 0, "count exited with {}: {}", out.code, out.stderr);
    ensure!(strip_header(&out.stdout).ends_with(",10,7\n"), "count body: {}", out.stdout);
    ensure!(dispatch(["sqflab", "count", "--nope"]).code == 2, "unknown flag not a usage error");
    outcome(true, "dispatch examples and exit codes")
}

/// Runs the checks for `level`, with optional injected faults.
pub fn run(level: Level, faults: &[Fault]) -> Vec<CheckResult> {
    let mut results = vec![
        timed("intpoly_examples", None, check_intpoly),
        timed("arith_examples", None, check_arith),
        timed("mobius_table_matches_trial_division", None, || check_mobius_table(faults)),
        timed("roots_examples", None, check_roots),
        timed("density_examples", None, check_density),
        timed("counting_examples", None, check_counting),
        timed("family_examples", None, check_family),
        timed("cli_examples", None, check_cli),
    ];
    if level == Level::Full {
        results.extend(criteria().iter().map(run_criterion));
    }
    results
}

pub fn run_criterion(c: &Criterion) -> CheckResult {
    timed(&format!("criterion_{:02}_{}", c.number, c.name), Some(c.budget), c.run)
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { number: 1, name: "squarefree_density", budget: secs(10), run: criterion_density },
        Criterion { number: 2, name: "kd_identity", budget: secs(30), run: criterion_kd_identity },
        Criterion { number: 3, name: "rho_oracle", budget: secs(60), run: criterion_rho_oracle },
        Criterion { number: 4, name: "short_progressions", budget: secs(120), run: criterion_short_progressions },
        Criterion { number: 5, name: "kd_sum_vs_density", budget: secs(120), run: criterion_kd_sum_vs_density },
        Criterion { number: 6, name: "exchange_of_summation", budget: secs(10), run: criterion_exchange },
        Criterion { number: 7, name: "family_residual_decay", budget: secs(300), run: criterion_family_decay },
        Criterion { number: 8, name: "typical_set_scaling", budget: secs(60), run: criterion_typical_set },
        Criterion { number: 9, name: "large_gcd_oracle", budget: secs(60), run: criterion_large_gcd },
        Criterion { number: 10, name: "sieve_performance", budget: secs(180), run: criterion_sieve_performance },
        Criterion { number: 11, name: "reproducibility", budget: secs(300), run: criterion_reproducibility },
    ]
}

fn criterion_density() -> Outcome {
    let n = 1_000_000;
    let table = try_o!(squarefree_sieve_interval(1, n));
    let density = table.count() as f64 / n as f64;
    ensure!((density - SQUAREFREE_DENSITY).abs() <= 0.001, "density {density} vs {SQUAREFREE_DENSITY}");
    let small = try_o!(squarefree_sieve_interval(1, 100_000));
    for m in 1..=100_000 {
        let by_factoring = try_o!(factor_u64(m)).iter().all(|&(_, e)| e == 1);
        ensure!(small.is_squarefree(m) == by_factoring, "sieve and factorization disagree at {m}");
    }
    outcome(true, format!("density {density:.6}; sieve = factorization on [1, 10^5]"))
}

fn criterion_kd_identity() -> Outcome {
    let n = 1_000_000;
    let kd = try_o!(kd_sieve_interval(1, n, 1000));
    let table = try_o!(squarefree_sieve_interval(1, n));
    for m in 1..=n {
        let sf = table.is_squarefree(m) as i32;
        ensure!(kd[(m - 1) as usize] == sf, "k_1000({m}) = {} but mu^2 = {sf}", kd[(m - 1) as usize]);
    }
    let mut windows = 0;
    for q in 1..=100u64 {
        for a in 0..q {
            let w = try_o!(APWindow::new(1, n, q, a));
            let r = try_o!(residual_ap(&w, 1000));
            ensure!(r == 0.0, "residual {r} for q = {q}, a = {a}");
            windows += 1;
        }
    }
    outcome(true, format!("k_1000 = mu^2 on [1, 10^6]; zero residual on {windows} progressions"))
}

fn random_primitive(rng: &mut SplitMix64, degree: usize, bound: i64) -> IntPoly {
    loop {
        let mut c: Vec<i64> = (0..=degree).map(|_| rng.in_range(-bound, bound)).collect();
        if c[0] == 0 {
            c[0] = if rng.below(2) == 0 { 1 } else { -1 };
        }
        let f = poly(&c);
        if f.is_primitive() {
            return f;
        }
    }
}

fn criterion_rho_oracle() -> Outcome {
    let mut rng = SplitMix64::new(3);
    let primes = crate::arith::primes_up_to(100);
    let mut singular = 0usize;
    for _ in 0..1000 {
        let deg = 1 + rng.below(4) as usize;
        let f = random_primitive(&mut rng, deg, 50);
        let asc: Vec<i64> = f.coeffs_ascending().iter().map(|c| i64::try_from(c).unwrap()).collect();
        let disc = try_o!(f.discriminant());
        for &p in &primes {
            let m = (p * p) as i64;
            let brute: Vec<u64> = (0..m)
                .filter(|&r| asc.iter().rev().fold(0i64, |acc, &c| (acc * r + c).rem_euclid(m)) == 0)
                .map(|r| r as u64)
                .collect();
            let got = try_o!(roots_mod_p2(&f, p));
            ensure!(got == brute, "{} mod {p}^2: {got:?} vs {brute:?}", f.to_coeff_string());
            if disc.is_zero() || (&disc % p as i64).is_zero() {
                singular += 1;
            }
        }
    }
    outcome(true, format!("1000 polynomials x 25 primes, {singular} singular pairs"))
}

fn criterion_short_progressions() -> Outcome {
    let y = 1_000_000u64;
    let mut relative_checked = 0;
    let mut worst = 0.0f64;
    for q in 1..=50u64 {
        for a in 0..q {
            let w = try_o!(APWindow::new(1, y, q, a));
            let count = try_o!(count_squarefree_ap(&w)) as f64;
            let main = try_o!(ap_main_term(q, a, y as f64));
            let h = a.gcd(&q) as f64;
            let bound = 10.0 * h * ((y as f64 / q as f64).sqrt() + (q as f64).powf(0.6));
            let err = (count - main).abs();
            ensure!(err <= bound, "q = {q}, a = {a}: |{count} - {main}| > {bound}");
            worst = worst.max(err / bound);
            if main > 1.0e4 {
                let rel = err / main;
                ensure!(rel < 0.02, "q = {q}, a = {a}: relative error {rel}");
                relative_checked += 1;
            }
        }
    }
    outcome(true, format!("1275 classes; worst error/bound {worst:.4}; {relative_checked} relative checks"))
}

fn criterion_kd_sum_vs_density() -> Outcome {
    let x = 100_000u64;
    let d = capped_bigd(x, 316);
    let bound = 10.0 * (d as f64 + x as f64 / d as f64);
    let mut rng = SplitMix64::new(5);
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < 20 {
        let deg = 1 + rng.below(3) as usize;
        let f = random_primitive(&mut rng, deg, 100);
        if !try_o!(f.is_squarefree_poly()) {
            continue;
        }
        let sum = try_o!(sum_kd_values(&f, x, d)) as f64;
        let c = try_o!(c_f_bracket(&f, 10_000));
        let err = (sum - c.midpoint() * x as f64).abs();
        ensure!(err <= bound, "{}: |{sum} - {} x| = {err} > {bound}", f.to_coeff_string(), c.midpoint());
        worst = worst.max(err);
        done += 1;
    }
    outcome(true, format!("20 polynomials, D = {d}, worst error {worst:.1} of {bound:.1}"))
}

fn criterion_exchange() -> Outcome {
    let mut rng = SplitMix64::new(6);
    for _ in 0..100 {
        let deg = rng.below(4) as usize;
        let f = random_primitive(&mut rng, deg, 10);
        let x = 1 + rng.below(500);
        let d = 1 + rng.below(20);
        let fast = try_o!(sum_kd_values(&f, x, d));
        let mut direct = 0i64;
        for n in 1..=x {
            direct += try_o!(k_d(&f.eval_i64(n as i64), d));
        }
        ensure!(fast == direct, "{} x = {x} D = {d}: {fast} vs {direct}", f.to_coeff_string());
    }
    outcome(true, "100 random cases agree exactly")
}

fn criterion_family_decay() -> Outcome {
    let spec = try_o!(FamilySpec::new(poly(&[1, 0, 0]), vec![1, 0], 1_000_000, 42));
    let small = try_o!(family_moments(&spec, 200, 250, &[0.05], false));
    let large = try_o!(family_moments(&spec, 200, 2000, &[0.05], false));
    let (r250, r2000) = (small.moments.first, large.moments.first);
    let exceptional = large.exceptional[0].count;
    let detail = format!(
        "mean residual {r250:.5} at 250, {r2000:.5} at 2000; {exceptional} of {} above 0.05",
        large.moments.members
    );
    outcome(r2000 < r250 && exceptional <= 20, detail)
}

fn criterion_typical_set() -> Outcome {
    let g = poly(&[1, 0, 1]);
    let mut ratios = Vec::new();
    for x in [100u64, 200, 400] {
        let c = try_o!(typical_set_diagnostic(&g, x, 1.0, 2));
        ratios.push(c.outside as f64 / (x as f64).powf(1.5));
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    outcome(spread <= 3.0, format!("normalized counts {ratios:?}, spread {spread:.3}"))
}

fn criterion_large_gcd() -> Outcome {
    const X2: [u64; 5] = [1, 2, 3, 5, 10];
    let mut cases = 0u64;
    for a in (-30i64..=30).filter(|&v| v != 0) {
        for c in (-30i64..=30).filter(|&v| v != 0) {
            for b in -30i64..=30 {
                // gcd of a*n + b with c for n in [-50, 50].
                let g: Vec<u64> = (-50i64..=50).map(|n| (a * n + b).gcd(&c) as u64).collect();
                for x1 in 1..=50usize {
                    let window = &g[50 - x1..=50 + x1];
                    for &x2 in &X2 {
                        let brute = window.iter().filter(|&&v| v > x2).count() as u64;
                        let got = try_o!(large_gcd_count(a, b, c, x1 as f64, x2 as f64));
                        ensure!(got == brute, "a = {a}, b = {b}, c = {c}, x1 = {x1}, x2 = {x2}: {got} vs {brute}");
                        cases += 1;
                    }
                }
            }
        }
    }
    outcome(true, format!("{cases} cases agree exactly"))
}

fn criterion_sieve_performance() -> Outcome {
    let hi = 100_000_000u64;
    let config = SieveConfig::default();
    let sieve_with = |threads: usize| -> Result<(crate::arith::SieveTable, Duration), String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let t = pool.install(|| squarefree_sieve_interval_with(1, hi, &config)).map_err(|e| e.to_string())?;
        Ok((t, start.elapsed()))
    };
    let (one, t1) = try_o!(sieve_with(1));
    let (four, t4) = try_o!(sieve_with(4));
    let identical = one.bits() == four.bits();
    let speedup = t1.as_secs_f64() / t4.as_secs_f64();
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let detail = format!(
        "1 thread {:.2} s, 4 threads {:.2} s, speedup {speedup:.2}x, identical {identical}, {cores} cores available",
        t1.as_secs_f64(),
        t4.as_secs_f64()
    );
    outcome(identical && t1 < Duration::from_secs(60) && speedup >= 2.0, detail)
}

fn criterion_reproducibility() -> Outcome {
    let args = |threads: &'static str| {
        vec![
            "sqflab", "family-moments", "--base", "1,0,0", "--vary", "1,0", "--height", "1000",
            "--samples", "40", "--x", "400", "--seed", "9", "--threads", threads,
        ]
    };
    let runs: Vec<_> = ["1", "4", "1", "2"].iter().map(|t| dispatch(args(t))).collect();
    for r in &runs {
        ensure!(r.code == 0, "family-moments exited {}: {}", r.code, r.stderr);
    }
    let bodies: Vec<String> = runs.iter().map(|r| strip_header(&r.stdout)).collect();
    ensure!(bodies.iter().all(|b| *b == bodies[0]), "bodies differ across runs or thread counts");
    let manifest = |s: &str| -> Vec<String> {
        s.lines().filter(|l| l.starts_with("# args=") || l.starts_with("# output_sha256=")).map(String::from).collect()
    };
    ensure!(runs.iter().all(|r| manifest(&r.stdout) == manifest(&runs[0].stdout)), "manifests differ");
    outcome(true, format!("4 runs, {} body lines, identical", bodies[0].lines().count()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_passes() {
        for r in run(Level::Quick, &[]) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn corrupted_mu_is_named() {
        let results = run(Level::Quick, &[Fault::CorruptMu]);
        let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].name, "mobius_table_matches_trial_division");
        assert!(failed[0].detail.contains("mu(30)"));
    }

    #[test]
    fn cli_verify_exit_codes() {
        assert_eq!(dispatch(["sqflab", "verify", "quick"]).code, 0);
        let out = dispatch(["sqflab", "verify", "quick", "--inject-fault", "corrupt-mu"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("mobius_table_matches_trial_division"));
    }
}
