//! The `cyclo` command-line front end.
//!
//! Exit status: 0 on success, 1 on verification failures and other runtime
//! errors, 2 on bad arguments, 3 when the degree cap is exceeded.

pub mod cache;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cyclotomic::{a_height, is_prime, phi, primes_in};
use crate::divisors::{enumerate_b_with, pq_form, EnumerateOptions, HeightRecord, Strategy, DEFAULT_DEGREE_CAP};
use crate::error::{Error, Result};
use crate::formulas::{b_formula_n, Branch, RegimeTag};
use crate::verify::{self, ExplorerOptions, GridOptions, Record};

use cache::{Cache, CacheRecord};

/// Above this `n`, `--method auto` trusts the closed form without also
/// running the exhaustive search. The degree cap only limits exhaustive
/// search and materialized products, so closed forms reach past it.
pub const AUTO_CROSS_CHECK_MAX: u64 = 20_000;

#[derive(Debug, Parser)]
#[command(name = "cyclo", version, about = "Heights of cyclotomic polynomials and of divisors of x^n - 1")]
pub struct Cli {
    /// Largest n (and polynomial length) for exhaustive search and expanded products.
    #[arg(long, global = true, env = "CYCLO_DEGREE_CAP", default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the n-th cyclotomic polynomial.
    Phi { n: u64 },
    /// Print A(n), the height of the n-th cyclotomic polynomial.
    A { n: u64 },
    /// Compute B(n), the largest height of a divisor of x^n - 1.
    B {
        n: u64,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Tabulate B(p q^b) over a range of primes q.
    Table {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        b: u32,
        /// Inclusive range `lo..hi`, or a single prime.
        #[arg(long)]
        q: QRange,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Cross-check closed forms against exhaustive search on a grid of p q^b.
    Verify {
        #[arg(long, default_value_t = 13)]
        p_max: u64,
        #[arg(long, default_value_t = 13)]
        q_max: u64,
        #[arg(long, default_value_t = 20)]
        b_max: u32,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Group B(p q^b) by the residue of q mod p over the first primes above p.
    Conjecture {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        b: u32,
        #[arg(long, default_value_t = 12)]
        q_count: usize,
        /// Confirm closed-form values by exhaustive search where within the cap.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Brute,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Soft time limit, in seconds, for each exhaustive search.
    #[arg(long)]
    pub budget_secs: Option<f64>,
}

impl RunArgs {
    fn budget(&self) -> Option<Duration> {
        self.budget_secs.map(Duration::from_secs_f64)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Report elapsed_ms as 0 so output is reproducible byte for byte.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, env = "CYCLO_CACHE", default_value = "cyclo-cache.ndjson")]
    pub cache: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QRange {
    pub lo: u64,
    pub hi: u64,
}

impl FromStr for QRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad bound {t:?} in range {s:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(QRange { lo, hi })
    }
}

/// Process exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::PreconditionViolation(_) | Error::Parse(_) => 2,
        Error::DegreeCapExceeded { .. } | Error::TooManyDivisors { .. } => 3,
        _ => 1,
    }
}

/// Runs the CLI on `std::env::args`, writing to stdout and stderr.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cap = cli.degree_cap;
    match &cli.command {
        Command::Phi { n } => {
            check_n(*n, cap)?;
            writeln!(out, "Φ_{n}(x) = {}", phi(*n))?;
        }
        Command::A { n } => {
            check_n(*n, cap)?;
            writeln!(out, "A({n}) = {}", a_height(*n))?;
        }
        Command::B { n, method, run, output, cache } => {
            let mut cache = open_cache(cache, err)?;
            let o = compute_b(*n, *method, cap, run.budget(), cache.as_mut(), err)?;
            emit(out, &[o], output)?;
        }
        Command::Table { p, b, q, method, run, output, cache } => {
            if !is_prime(*p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            let mut cache = open_cache(cache, err)?;
            let mut rows = Vec::new();
            for q in primes_in(q.lo, q.hi).into_iter().filter(|q| q != p) {
                let n = q
                    .checked_pow(*b)
                    .and_then(|v| v.checked_mul(*p))
                    .ok_or_else(|| Error::InvalidInput(format!("{p}·{q}^{b} overflows")))?;
                rows.push(compute_b(n, *method, cap, run.budget(), cache.as_mut(), err)?);
            }
            emit(out, &rows, output)?;
        }
        Command::Verify { p_max, q_max, b_max, run, output } => {
            let opts = GridOptions { degree_cap: cap, budget: run.budget() };
            let report = verify::cross_check_grid_with(*p_max, *q_max, *b_max, &opts)?;
            let mut failures = report.failures();
            failures.extend(verify::grid_property_failures(&report));
            match output.format {
                Format::Text => out.write_all(report.render_text().as_bytes())?,
                _ => {
                    let rows: Vec<Outcome> = report
                        .cells
                        .iter()
                        .filter_map(|c| c.record().map(|record| Outcome { record, branch: c.branch() }))
                        .collect();
                    emit(out, &rows, output)?;
                }
            }
            for f in &failures {
                writeln!(err, "{f}")?;
            }
            return Ok(if failures.is_empty() { 0 } else { 1 });
        }
        Command::Conjecture { p, b, q_count, cross_check, run } => {
            let qs = primes_above(*p, *q_count);
            let opts = ExplorerOptions { degree_cap: cap, budget: run.budget(), cross_check: *cross_check };
            let report = verify::conjecture_explorer_with(*p, *b, &qs, &opts)?;
            out.write_all(report.render_text().as_bytes())?;
        }
    }
    Ok(0)
}

fn check_n(n: u64, cap: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if n > cap {
        return Err(Error::DegreeCapExceeded { degree: n, cap });
    }
    Ok(())
}

fn primes_above(p: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut q = p + 1;
    while out.len() < count {
        if is_prime(q) {
            out.push(q);
        }
        q += 1;
    }
    out
}

fn open_cache(args: &CacheArgs, err: &mut dyn Write) -> Result<Option<Cache>> {
    if args.no_cache {
        return Ok(None);
    }
    match Cache::open(&args.cache) {
        Ok(c) => Ok(Some(c)),
        Err(Error::CacheConflict { n, cached, computed }) => {
            let _ = write!(err, "{}", cache::dump(&args.cache, n));
            Err(Error::CacheConflict { n, cached, computed })
        }
        Err(e) => Err(e),
    }
}

/// A value ready for output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub record: Record,
    pub branch: Option<Branch>,
}

fn from_cache(c: &CacheRecord) -> Outcome {
    let pqb = pq_form(c.n);
    Outcome {
        record: Record {
            n: c.n,
            p: pqb.map(|t| t.0),
            q: pqb.map(|t| t.1),
            b: pqb.map(|t| t.2),
            b_value: c.b_value,
            method: c.method.clone(),
            regime: pqb.map(|(p, q, _)| RegimeTag::of(p, q).as_str().to_string()),
            witness: c.witness.clone(),
            elapsed_ms: 0,
        },
        branch: None,
    }
}

fn compute_b(
    n: u64,
    method: MethodArg,
    cap: u64,
    budget: Option<Duration>,
    cache: Option<&mut Cache>,
    err: &mut dyn Write,
) -> Result<Outcome> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let wanted = match method {
        MethodArg::Auto => None,
        MethodArg::Brute => Some("brute"),
        MethodArg::Formula => Some("formula"),
    };
    if let Some(hit) = cache.as_ref().and_then(|c| c.lookup(n, wanted)) {
        return Ok(from_cache(hit));
    }
    let start = Instant::now();
    let opts = EnumerateOptions { degree_cap: cap, budget, strategy: Strategy::Auto };
    let mut rec: HeightRecord = match method {
        MethodArg::Brute => enumerate_b_with(n, &opts)?,
        MethodArg::Formula => b_formula_n(n, cap)?
            .ok_or_else(|| Error::PreconditionViolation(format!("no closed form covers n = {n}")))?,
        MethodArg::Auto => match b_formula_n(n, cap)? {
            Some(mut f) if n <= AUTO_CROSS_CHECK_MAX.min(cap) => {
                let brute = enumerate_b_with(n, &opts)?;
                if brute.b_value != f.b_value {
                    let (p, q, b) = pq_form(n).unwrap_or((n, 1, 1));
                    let detail = format!("closed form {} but exhaustive search {}", f.b_value, brute.b_value);
                    return Err(Error::FormulaConflict { p, q, b, detail });
                }
                f.witness = brute.witness;
                f
            }
            Some(f) => f,
            None => enumerate_b_with(n, &opts)?,
        },
    };
    rec.elapsed = start.elapsed();
    if let Some(cache) = cache {
        let entry = CacheRecord {
            n,
            b_value: rec.b_value,
            method: rec.method.as_str().to_string(),
            witness: rec.witness.as_ref().map(|w| w.selected().to_vec()),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let computed = entry.b_value;
        if let Err(e) = cache.insert(entry) {
            if let Error::CacheConflict { n, .. } = e {
                let _ = writeln!(err, "{}computed now: {computed}", cache::dump(cache.path(), n));
            }
            return Err(e);
        }
    }
    Ok(Outcome { record: Record::from(&rec), branch: rec.branch })
}

fn emit(out: &mut dyn Write, rows: &[Outcome], opts: &OutputArgs) -> Result<()> {
    let records: Vec<Record> = rows
        .iter()
        .map(|o| Record { elapsed_ms: if opts.deterministic { 0 } else { o.record.elapsed_ms }, ..o.record.clone() })
        .collect();
    match opts.format {
        Format::Csv => format::write_csv(&mut *out, &records)?,
        Format::Json => {
            for r in &records {
                writeln!(out, "{}", format::to_json_line(r))?;
            }
        }
        Format::Text => {
            for (r, o) in records.iter().zip(rows) {
                write!(out, "B({}) = {} method={}", r.n, r.b_value, r.method)?;
                if let Some(b) = o.branch {
                    write!(out, " branch={b}")?;
                }
                if let Some(g) = &r.regime {
                    write!(out, " regime={g}")?;
                }
                if let Some(w) = &r.witness {
                    write!(out, " witness={}", format::encode_witness(w))?;
                }
                if let (Some(p), Some(q)) = (r.p, r.q) {
                    write!(out, " q_mod_p={}", q % p)?;
                }
                if !opts.deterministic {
                    write!(out, " elapsed_ms={}", r.elapsed_ms)?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("cyclo").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn q_range_parsing() {
        assert_eq!("11..60".parse::<QRange>().unwrap(), QRange { lo: 11, hi: 60 });
        assert_eq!("11..=60".parse::<QRange>().unwrap(), QRange { lo: 11, hi: 60 });
        assert_eq!("13".parse::<QRange>().unwrap(), QRange { lo: 13, hi: 13 });
        assert!("9..3".parse::<QRange>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["b", "x"]).0, 2);
        assert_eq!(run_args(&["b", "1000", "--degree-cap", "999", "--no-cache"]).0, 3);
        assert_eq!(run_args(&["b", "375", "--method", "brute", "--degree-cap", "100", "--no-cache"]).0, 3);
        assert_eq!(run_args(&["b", "375", "--degree-cap", "100", "--no-cache"]).0, 0);
        assert_eq!(run_args(&["b", "0", "--no-cache"]).0, 2);
        let (code, out, _) = run_args(&["b", "97", "--no-cache", "--deterministic"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("B(97) = 1 "), "{out}");
    }

    #[test]
    fn primes_above_counts() {
        assert_eq!(primes_above(5, 4), vec![7, 11, 13, 17]);
    }
}
