//! Command-line front end. Every subcommand produces one flat table, written
//! as CSV (default) or JSON, preceded by a manifest: the subcommand, every
//! argument value after defaults are applied, the seed, the tool version,
//! the schema version and SHA-256 checksums of the canonical argument list
//! and of the output body. Thread count and output destination are not part
//! of the manifest, since they never change the body.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::counting::{
    count_squarefree_ap, count_squarefree_values_with, default_bigd, residual_ap, sum_kd_ap,
    sum_kd_values, APWindow, CountStrategy,
};
use crate::density::{ap_main_term, c_f_certified_with, DensityConfig, DEFAULT_EXACT_SWITCH};
use crate::error::{Error, Result};
use crate::family::{
    corollary_hypothesis_battery, family_moments, typical_set_diagnostic, BatteryConfig,
    DPolicy, FamilySpec, SCHEMA_VERSION,
};
use crate::intpoly::IntPoly;
use crate::roots::{rho_p2_count, roots_mod_p, roots_mod_p2, MAX_P2_PRIME};
use crate::verify::{self, Fault, Level};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "SQFLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "sqflab", version, about = "Square-free values of integer polynomials")]
struct Cli {
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: SQFLAB_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Direct,
    KdIdentity,
}

impl From<StrategyArg> for CountStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => CountStrategy::Auto,
            StrategyArg::Direct => CountStrategy::Direct,
            StrategyArg::KdIdentity => CountStrategy::KdIdentity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    CorruptMu,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots of f modulo p and p^2.
    Rho {
        #[arg(long, allow_hyphen_values = true)]
        poly: IntPoly,
        #[arg(long)]
        prime: u64,
    },
    /// Certified bracket for the density constant c_f.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        poly: IntPoly,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        #[arg(long, default_value_t = DEFAULT_EXACT_SWITCH)]
        exact_switch: u64,
    },
    /// Number of n <= x with f(n) square-free.
    Count {
        #[arg(long, allow_hyphen_values = true)]
        poly: IntPoly,
        #[arg(long)]
        x: u64,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
    },
    /// Sum of k_D(f(n)) over n <= x.
    KdSum {
        #[arg(long, allow_hyphen_values = true)]
        poly: IntPoly,
        #[arg(long)]
        x: u64,
        /// Sieve parameter D (default ceil(x^(9/10))).
        #[arg(long)]
        bigd: Option<u64>,
    },
    /// Square-free n = a mod q in [lo, hi], with the main term.
    ApCount {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        a: u64,
        /// Also report the k_D sum for this D.
        #[arg(long)]
        bigd: Option<u64>,
    },
    /// (q/|I|) |sum (mu^2 - k_D)| over a progression window.
    Residual {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        a: u64,
        #[arg(long)]
        bigd: u64,
    },
    /// Residual statistics over a polynomial family.
    FamilyMoments {
        #[arg(long, allow_hyphen_values = true)]
        base: IntPoly,
        /// Exponents of t whose coefficients vary.
        #[arg(long, value_delimiter = ',', required = true)]
        vary: Vec<usize>,
        #[arg(long)]
        height: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        x: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1")]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List the whole family instead of sampling.
        #[arg(long)]
        enumerate: bool,
    },
    /// Pair counts inside and outside the typical set M_{kappa,d}.
    DiagnoseM {
        #[arg(long, allow_hyphen_values = true)]
        base: IntPoly,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        kappa: f64,
        /// Degree parameter d (default deg g).
        #[arg(long)]
        d: Option<u32>,
    },
    /// Residuals on random progression windows.
    HypothesisBattery {
        #[arg(long, default_value_t = 50)]
        qmax: u64,
        #[arg(long, default_value_t = 100)]
        windows: usize,
        /// Fixed D; without it D = ceil(hi^(9/10)) per window.
        #[arg(long)]
        bigd: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        region_lo: u64,
        #[arg(long, default_value_t = 100_000_000)]
        region_hi: u64,
        #[arg(long, default_value_t = 10_000)]
        min_len: u64,
        #[arg(long, default_value_t = 100_000)]
        max_len: u64,
    },
    /// Run the built-in checks.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One result table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Extra `#` lines that are not part of the manifest.
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    /// Set when the table reports failed checks.
    pub failed: bool,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), ..Default::default() }
    }

    fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Subcommand, canonical arguments and seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<(String, String)>,
    pub seed: Option<String>,
    pub version: String,
}

impl RunManifest {
    pub fn args_string(&self) -> String {
        self.args.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    pub fn input_checksum(&self) -> String {
        sha256_hex(format!("{} {}", self.command, self.args_string()).as_bytes())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

const NON_MANIFEST_ARGS: [&str; 3] = ["json", "threads", "out"];

fn manifest_of(matches: &clap::ArgMatches) -> RunManifest {
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let mut args: Vec<(String, String)> = sub
        .ids()
        .map(|id| id.as_str())
        .filter(|id| !NON_MANIFEST_ARGS.contains(id) && !id.starts_with(char::is_uppercase))
        .filter_map(|id| {
            let raw = sub.get_raw(id)?;
            let value = raw.map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>().join(",");
            Some((id.to_string(), value))
        })
        .collect();
    args.sort();
    let seed = args.iter().find(|(k, _)| k == "seed").map(|(_, v)| v.clone());
    RunManifest {
        command: name.to_string(),
        args,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn csv_body(table: &Table) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn json_rows(table: &Table) -> Vec<Value> {
    table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.to_string(), Value::String(v.clone())))
                .collect();
            Value::Object(obj)
        })
        .collect()
}

/// Renders the table with its manifest.
pub fn render(manifest: &RunManifest, table: &Table, as_json: bool) -> String {
    if as_json {
        let rows = json_rows(table);
        let body = serde_json::to_string(&rows).expect("serializable");
        let doc = json!({
            "manifest": {
                "tool": "sqflab",
                "version": manifest.version,
                "command": manifest.command,
                "args": manifest.args.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>(),
                "seed": manifest.seed,
                "schema_version": SCHEMA_VERSION,
                "input_sha256": manifest.input_checksum(),
                "output_sha256": sha256_hex(body.as_bytes()),
            },
            "notes": table.notes,
            "columns": table.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        return s;
    }
    let body = csv_body(table);
    let mut out = String::new();
    out.push_str(&format!("# sqflab {}\n", manifest.version));
    out.push_str(&format!("# command={}\n", manifest.command));
    out.push_str(&format!("# args={}\n", manifest.args_string()));
    out.push_str(&format!("# seed={}\n", manifest.seed.as_deref().unwrap_or("none")));
    out.push_str(&format!("# schema_version={SCHEMA_VERSION}\n"));
    out.push_str(&format!("# input_sha256={}\n", manifest.input_checksum()));
    out.push_str(&format!("# output_sha256={}\n", sha256_hex(body.as_bytes())));
    for note in &table.notes {
        out.push_str(&format!("# {note}\n"));
    }
    out.push_str(&body);
    out
}

/// Lines of a CSV output that are not `#` comments.
pub fn strip_header(output: &str) -> String {
    output.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn thread_count(flag: Option<usize>) -> std::result::Result<Option<usize>, String> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")),
        _ => Ok(None),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns
/// what would be printed. Exit code 0 on success, 2 on usage errors, 1 on
/// domain errors and failed checks.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return Outcome { code: 2, stdout: String::new(), stderr: e.render().to_string() },
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(msg) => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
    };
    let manifest = manifest_of(&matches);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let result = pool.install(|| run(&cli.command));

    match result {
        Ok(table) => {
            let mut stderr: String =
                table.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
            let rendered = render(&manifest, &table, cli.json);
            let code = if table.failed { 1 } else { 0 };
            match &cli.out {
                Some(path) => match std::fs::write(path, &rendered) {
                    Ok(()) => Outcome { code, stdout: String::new(), stderr },
                    Err(e) => {
                        stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                        Outcome { code: 1, stdout: String::new(), stderr }
                    }
                },
                None => Outcome { code, stdout: rendered, stderr },
            }
        }
        Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn run(command: &Command) -> Result<Table> {
    match command {
        Command::Rho { poly, prime } => rho_table(poly, *prime),
        Command::Cf { poly, cutoff, exact_switch } => {
            let v = c_f_certified_with(poly, *cutoff, &DensityConfig { exact_switch: *exact_switch })?;
            let mut t = Table::new(&[
                "poly", "cutoff", "lower", "upper", "midpoint", "width", "bad_primes",
            ]);
            t.push([
                poly.to_coeff_string(),
                cutoff.to_string(),
                v.lower.to_string(),
                v.upper.to_string(),
                v.midpoint().to_string(),
                v.width().to_string(),
                join(&v.bad_primes),
            ]);
            Ok(t)
        }
        Command::Count { poly, x, strategy } => {
            let count = count_squarefree_values_with(poly, *x, (*strategy).into())?;
            let mut t = Table::new(&["poly", "x", "count"]);
            t.push([poly.to_coeff_string(), x.to_string(), count.to_string()]);
            Ok(t)
        }
        Command::KdSum { poly, x, bigd } => {
            let d = bigd.unwrap_or_else(|| default_bigd(*x));
            let sum = sum_kd_values(poly, *x, d)?;
            let mut t = Table::new(&["poly", "x", "bigd", "kd_sum"]);
            t.push([poly.to_coeff_string(), x.to_string(), d.to_string(), sum.to_string()]);
            Ok(t)
        }
        Command::ApCount { lo, hi, q, a, bigd } => {
            let w = APWindow::new(*lo, *hi, *q, *a)?;
            let count = count_squarefree_ap(&w)?;
            let main = ap_main_term(*q, *a, w.len() as f64)?;
            let kd = bigd.map(|d| sum_kd_ap(&w, d)).transpose()?;
            let mut t = Table::new(&["lo", "hi", "q", "a", "count", "main_term", "bigd", "kd_sum"]);
            t.push([
                lo.to_string(),
                hi.to_string(),
                q.to_string(),
                a.to_string(),
                count.to_string(),
                main.to_string(),
                bigd.map(|d| d.to_string()).unwrap_or_default(),
                kd.map(|k| k.value.to_string()).unwrap_or_default(),
            ]);
            Ok(t)
        }
        Command::Residual { lo, hi, q, a, bigd } => {
            let w = APWindow::new(*lo, *hi, *q, *a)?;
            let count = count_squarefree_ap(&w)?;
            let kd = sum_kd_ap(&w, *bigd)?;
            let residual = residual_ap(&w, *bigd)?;
            let mut t = Table::new(&[
                "lo", "hi", "q", "a", "bigd", "count", "kd_sum", "residual", "h2",
                "precondition_holds",
            ]);
            if !kd.precondition_holds {
                t.warnings.push(format!(
                    "square-full part {} of gcd(a, q) has a prime factor >= D^2",
                    kd.h2
                ));
            }
            t.push([
                lo.to_string(),
                hi.to_string(),
                q.to_string(),
                a.to_string(),
                bigd.to_string(),
                count.to_string(),
                kd.value.to_string(),
                residual.to_string(),
                kd.h2.to_string(),
                kd.precondition_holds.to_string(),
            ]);
            Ok(t)
        }
        Command::FamilyMoments { base, vary, height, samples, x, eta, seed, enumerate } => {
            let spec = FamilySpec::new(base.clone(), vary.clone(), *height, *seed)?;
            family_table(&spec, *samples, *x, eta, *enumerate)
        }
        Command::DiagnoseM { base, x, kappa, d } => {
            let d = match d {
                Some(d) => *d,
                None => base.degree().ok_or(Error::ZeroPolynomial)? as u32,
            };
            let c = typical_set_diagnostic(base, *x, *kappa, d)?;
            let scale = (*x as f64).powf(2.0 - kappa / d as f64);
            let mut t = Table::new(&[
                "base", "x", "kappa", "d", "epsilon", "inside", "outside", "outside_scaled",
            ]);
            t.push([
                base.to_coeff_string(),
                x.to_string(),
                kappa.to_string(),
                d.to_string(),
                c.epsilon.to_string(),
                c.inside.to_string(),
                c.outside.to_string(),
                (c.outside as f64 / scale).to_string(),
            ]);
            Ok(t)
        }
        Command::HypothesisBattery {
            qmax,
            windows,
            bigd,
            seed,
            region_lo,
            region_hi,
            min_len,
            max_len,
        } => {
            let config = BatteryConfig {
                d_policy: bigd.map(DPolicy::Fixed).unwrap_or(DPolicy::NineTenths),
                q_max: *qmax,
                windows: *windows,
                seed: *seed,
                region: (*region_lo, *region_hi),
                lengths: (*min_len, *max_len),
            };
            let report = corollary_hypothesis_battery(&config)?;
            let mut t = Table::new(&[
                "record", "index", "q", "u", "gcd", "lo", "hi", "bigd", "residual",
                "precondition_holds",
            ]);
            for r in &report.rows {
                t.push([
                    "window".to_string(),
                    r.index.to_string(),
                    r.q.to_string(),
                    r.u.to_string(),
                    r.gcd.to_string(),
                    r.lo.to_string(),
                    r.hi.to_string(),
                    r.bigd.to_string(),
                    r.residual.to_string(),
                    r.precondition_holds.to_string(),
                ]);
            }
            for (name, value) in [("max", report.max), ("mean", report.mean)] {
                let mut row = vec![String::new(); 10];
                row[0] = name.to_string();
                row[8] = value.to_string();
                t.push(row);
            }
            Ok(t)
        }
        Command::Verify { level, inject_fault } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let faults: Vec<Fault> = inject_fault.iter().map(|f| match f {
                FaultArg::CorruptMu => Fault::CorruptMu,
            }).collect();
            let results = verify::run(level, &faults);
            let mut t = Table::new(&["check", "status", "elapsed_ms", "detail"]);
            for r in &results {
                t.push([
                    r.name.clone(),
                    if r.passed { "pass" } else { "FAIL" }.to_string(),
                    r.elapsed.as_millis().to_string(),
                    r.detail.clone(),
                ]);
                if !r.passed {
                    t.warnings.push(format!("check failed: {}: {}", r.name, r.detail));
                }
            }
            t.failed = results.iter().any(|r| !r.passed);
            Ok(t)
        }
    }
}

fn rho_table(poly: &IntPoly, prime: u64) -> Result<Table> {
    let rp = roots_mod_p(poly, prime)?;
    let mut t = Table::new(&[
        "poly", "prime", "rho_p", "roots_mod_p", "rho", "roots", "degenerate",
    ]);
    let (rho, roots) = if prime <= MAX_P2_PRIME {
        let r = roots_mod_p2(poly, prime)?;
        (r.len() as u128, join(&r))
    } else {
        (rho_p2_count(poly, prime)?, String::new())
    };
    t.push([
        poly.to_coeff_string(),
        prime.to_string(),
        rp.roots.len().to_string(),
        join(&rp.roots),
        rho.to_string(),
        roots,
        rp.degenerate.to_string(),
    ]);
    Ok(t)
}

const FAMILY_COLUMNS: [&str; 9] = [
    "record", "coeffs", "count", "c_f_lower", "c_f_upper", "c_f_mid", "residual", "eta", "value",
];

fn family_table(
    spec: &FamilySpec,
    samples: usize,
    x: u64,
    eta: &[f64],
    enumerate: bool,
) -> Result<Table> {
    let report = family_moments(spec, samples, x, eta, enumerate)?;
    let mut t = Table::new(&FAMILY_COLUMNS);
    let started = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    t.notes.push(format!("started_at_unix={started}"));
    t.notes.push(format!("prime_cutoff={}", report.prime_cutoff));
    t.notes.push(format!("d_policy={}", report.d_policy));
    t.warnings = report.warnings.clone();
    let blank = || vec![String::new(); FAMILY_COLUMNS.len()];
    for r in &report.per_poly {
        t.push([
            "poly".to_string(),
            r.coeffs.clone(),
            r.count.to_string(),
            r.c_f_lower.to_string(),
            r.c_f_upper.to_string(),
            r.c_f_mid.to_string(),
            r.residual.to_string(),
            String::new(),
            String::new(),
        ]);
    }
    for r in &report.non_squarefree {
        let mut row = blank();
        row[0] = "non_squarefree".into();
        row[1] = r.coeffs.clone();
        row[2] = r.count.to_string();
        t.push(row);
    }
    for (name, value) in [
        ("members", report.moments.members.to_string()),
        ("first_moment", report.moments.first.to_string()),
        ("second_moment", report.moments.second.to_string()),
    ] {
        let mut row = blank();
        row[0] = name.into();
        row[8] = value;
        t.push(row);
    }
    for e in &report.exceptional {
        let mut row = blank();
        row[0] = "exceptional".into();
        row[7] = e.eta.to_string();
        row[8] = e.count.to_string();
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> Outcome {
        dispatch(std::iter::once("sqflab").chain(args.iter().copied()))
    }

    fn rows(out: &Outcome) -> Vec<csv::StringRecord> {
        let body = strip_header(&out.stdout);
        csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
    }

    #[test]
    fn rho_example() {
        let out = run_cli(&["rho", "--poly", "1,0,1", "--prime", "5"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let r = &rows(&out)[0];
        assert_eq!(&r[4], "2");
        assert_eq!(&r[5], "7;18");
    }

    #[test]
    fn count_example() {
        let out = run_cli(&["count", "--poly", "1,0", "--x", "10"]);
        assert_eq!(out.code, 0);
        assert_eq!(&rows(&out)[0][2], "7");
        let out = run_cli(&["count", "--poly", "-1,0,1", "--x", "10"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
    }

    #[test]
    fn cf_example() {
        let out = run_cli(&["cf", "--poly", "1,0", "--cutoff", "100000"]);
        assert_eq!(out.code, 0);
        let r = &rows(&out)[0];
        let lower: f64 = r[2].parse().unwrap();
        let upper: f64 = r[3].parse().unwrap();
        assert!(lower <= 0.607_927_1 && 0.607_927_2 <= upper);
        assert!(upper - lower < 1e-5);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_cli(&["count", "--poly", "1,0", "--x", "10", "--bogus"]).code, 2);
        assert_eq!(run_cli(&["frobnicate"]).code, 2);
        assert_eq!(run_cli(&["count", "--poly", "1,x", "--x", "10"]).code, 2);
        let out = run_cli(&["cf", "--poly", "2,2"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("not primitive"), "{}", out.stderr);
        let out = run_cli(&["cf", "--poly", "1,0,0"]);
        assert!(out.stderr.contains("polynomial not square-free, c_f undefined here"));
        assert_eq!(run_cli(&["--help"]).code, 0);
    }

    #[test]
    fn manifest_header_and_checksum() {
        let out = run_cli(&["count", "--poly", "1,0,1", "--x", "10"]);
        let header: Vec<&str> = out.stdout.lines().filter(|l| l.starts_with('#')).collect();
        assert!(header.contains(&"# command=count"));
        assert!(header.contains(&"# args=poly=1,0,1;strategy=auto;x=10"));
        let body = strip_header(&out.stdout);
        let sum = header.iter().find_map(|l| l.strip_prefix("# output_sha256=")).unwrap();
        assert_eq!(sum, sha256_hex(body.as_bytes()));
    }

    #[test]
    fn threads_do_not_enter_the_manifest() {
        let a = run_cli(&["--threads", "1", "kd-sum", "--poly", "1,0,1", "--x", "500"]);
        let b = run_cli(&["kd-sum", "--poly", "1,0,1", "--x", "500", "--threads", "3"]);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
    }

    #[test]
    fn json_matches_csv() {
        let args = ["hypothesis-battery", "--windows", "3", "--bigd", "1000", "--min-len", "1000",
            "--max-len", "2000"];
        let csv_out = run_cli(&args);
        let mut json_args = args.to_vec();
        json_args.push("--json");
        let json_out = run_cli(&json_args);
        assert_eq!(csv_out.code, 0, "{}", csv_out.stderr);
        let doc: Value = serde_json::from_str(&json_out.stdout).unwrap();
        let json_rows = doc["rows"].as_array().unwrap();
        let body = strip_header(&csv_out.stdout);
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let headers = reader.headers().unwrap().clone();
        let csv_rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(csv_rows.len(), json_rows.len());
        for (c, j) in csv_rows.iter().zip(json_rows) {
            let obj = j.as_object().unwrap();
            assert_eq!(obj.len(), headers.len());
            for (h, v) in headers.iter().zip(c.iter()) {
                assert_eq!(obj[h].as_str().unwrap(), v);
            }
        }
        let m = &doc["manifest"];
        assert_eq!(m["command"], "hypothesis-battery");
        assert_eq!(m["seed"], "42");
    }

    #[test]
    fn out_flag_writes_file() {
        let dir = std::env::temp_dir().join(format!("sqflab-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("count.csv");
        let out = run_cli(&["count", "--poly", "1,0", "--x", "10", "--out", path.to_str().unwrap()]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.is_empty());
        let written = std::fs::read_to_string(&path).unwrap();
        assert!(written.ends_with("poly,x,count\n1,0,10,7\n") || written.contains("\"1,0\",10,7"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
