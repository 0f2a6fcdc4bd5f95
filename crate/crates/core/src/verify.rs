//! Cross-checks between the exhaustive search and the closed forms, grid-wide
//! property checks, and the residue-class explorer.
//!
//! Reports are ordered by `(p, q, b)` and their text form omits timings, so
//! identical inputs render identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{is_prime, primes_in};
use crate::divisors::{enumerate_b_with, pq_form, EnumerateOptions, HeightRecord, Method, Strategy};
use crate::error::{Error, Result};
use crate::formulas::{b_formula_with, Branch, RegimeTag};

/// One result row, in the shape the CSV and JSON emitters write.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub n: u64,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub b: Option<u32>,
    pub b_value: u64,
    pub method: String,
    pub regime: Option<String>,
    pub witness: Option<Vec<u64>>,
    pub elapsed_ms: u64,
}

impl From<&HeightRecord> for Record {
    fn from(r: &HeightRecord) -> Self {
        let pqb = pq_form(r.n);
        Record {
            n: r.n,
            p: pqb.map(|t| t.0),
            q: pqb.map(|t| t.1),
            b: pqb.map(|t| t.2),
            b_value: r.b_value,
            method: r.method.as_str().to_string(),
            regime: r.regime.map(|g| g.as_str().to_string()),
            witness: r.witness.as_ref().map(|w| w.selected().to_vec()),
            elapsed_ms: r.elapsed.as_millis() as u64,
        }
    }
}

/// A property that did not hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub inputs: String,
    /// Which statement was checked, e.g. `lower-bound` or `formula:b=4`.
    pub key: String,
    pub expected: String,
    pub got: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FAIL [{}] {}: expected {}, got {}", self.key, self.inputs, self.expected, self.got)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Agree,
    Mismatch,
    /// No closed form covers the cell; the brute value stands alone.
    Unsupported,
    /// The exhaustive search ran out of time.
    SkippedBudget,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Agree => "agree",
            CellStatus::Mismatch => "MISMATCH",
            CellStatus::Unsupported => "unsupported",
            CellStatus::SkippedBudget => "skipped: budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCell {
    pub p: u64,
    pub q: u64,
    pub b: u32,
    pub n: u64,
    pub brute: Option<HeightRecord>,
    pub formula: Option<HeightRecord>,
    pub status: CellStatus,
}

impl GridCell {
    pub fn regime(&self) -> RegimeTag {
        RegimeTag::of(self.p, self.q)
    }

    pub fn branch(&self) -> Option<Branch> {
        self.formula.as_ref().and_then(|f| f.branch)
    }

    /// The brute value if present, else the formula value.
    pub fn value(&self) -> Option<u64> {
        self.brute.as_ref().or(self.formula.as_ref()).map(|r| r.b_value)
    }

    pub fn record(&self) -> Option<Record> {
        self.brute.as_ref().or(self.formula.as_ref()).map(Record::from)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
}

impl GridReport {
    pub fn count(&self, status: &CellStatus) -> usize {
        self.cells.iter().filter(|c| &c.status == status).count()
    }

    /// Cells where the formula and the exhaustive search disagree.
    pub fn failures(&self) -> Vec<Failure> {
        self.cells
            .iter()
            .filter(|c| c.status == CellStatus::Mismatch)
            .map(|c| Failure {
                inputs: format!("p={} q={} b={}", c.p, c.q, c.b),
                key: format!("formula:{}", c.branch().map_or("?", Branch::label)),
                expected: c.formula.as_ref().map_or("-".into(), |f| f.b_value.to_string()),
                got: c.brute.as_ref().map_or("-".into(), |f| f.b_value.to_string()),
            })
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let show = |r: &Option<HeightRecord>| r.as_ref().map_or("-".to_string(), |r| r.b_value.to_string());
            let witness = c.brute.as_ref().and_then(|r| r.witness.as_ref()).map_or("-".to_string(), |w| w.to_string());
            let _ = writeln!(
                out,
                "p={} q={} b={} n={} brute={} formula={} branch={} regime={} witness={} status={}",
                c.p,
                c.q,
                c.b,
                c.n,
                show(&c.brute),
                show(&c.formula),
                c.branch().map_or("-", Branch::label),
                c.regime().as_str(),
                witness,
                c.status.as_str()
            );
        }
        let _ = writeln!(
            out,
            "cells={} agree={} unsupported={} skipped={} mismatches={}",
            self.cells.len(),
            self.count(&CellStatus::Agree),
            self.count(&CellStatus::Unsupported),
            self.count(&CellStatus::SkippedBudget),
            self.count(&CellStatus::Mismatch)
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridOptions {
    pub degree_cap: u64,
    /// Soft time budget per cell for the exhaustive search.
    pub budget: Option<Duration>,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { degree_cap: crate::divisors::DEFAULT_DEGREE_CAP, budget: None }
    }
}

/// Compares `enumerate_b` with `b_formula` on every `p q^b` with distinct
/// primes `p <= p_max`, `q <= q_max`, `1 <= b <= b_max` and `p q^b <= degree_cap`.
pub fn cross_check_grid(p_max: u64, q_max: u64, b_max: u32, degree_cap: u64) -> Result<GridReport> {
    cross_check_grid_with(p_max, q_max, b_max, &GridOptions { degree_cap, budget: None })
}

pub fn cross_check_grid_with(p_max: u64, q_max: u64, b_max: u32, opts: &GridOptions) -> Result<GridReport> {
    if p_max == 0 || q_max == 0 || b_max == 0 {
        return Err(Error::InvalidInput("grid bounds must be positive".into()));
    }
    let mut cells = Vec::new();
    for p in primes_in(2, p_max) {
        for q in primes_in(2, q_max) {
            if p == q {
                continue;
            }
            for b in 1..=b_max {
                let Some(n) = q.checked_pow(b).and_then(|v| v.checked_mul(p)).filter(|&n| n <= opts.degree_cap) else {
                    break;
                };
                cells.push(check_cell(p, q, b, n, opts)?);
            }
        }
    }
    Ok(GridReport { cells })
}

fn check_cell(p: u64, q: u64, b: u32, n: u64, opts: &GridOptions) -> Result<GridCell> {
    let formula = b_formula_with(p, q, b, opts.degree_cap)?;
    let eopts = EnumerateOptions { degree_cap: opts.degree_cap, budget: opts.budget, strategy: Strategy::Auto };
    let brute = match enumerate_b_with(n, &eopts) {
        Ok(r) => Some(r),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    let status = match (&brute, &formula) {
        (None, _) => CellStatus::SkippedBudget,
        (Some(_), None) => CellStatus::Unsupported,
        (Some(b), Some(f)) if b.b_value == f.b_value => CellStatus::Agree,
        _ => CellStatus::Mismatch,
    };
    Ok(GridCell { p, q, b, n, brute, formula, status })
}

/// Properties every computed cell must satisfy, checked against the brute
/// values of a grid:
///
/// * `lower-bound`: `B(p q^b) >= min(p, q^b)`;
/// * `p-divides-b`: `p | B(p q^b)` for `p < q`;
/// * `at-least-3p`: `B(p q^b) >= 3p` for odd `3 < p < q`, `b > 2`;
/// * `p3-twice-iff-b34`: for `p = 3 < q`, `b > 2`, `B = 6` exactly when `b` is 3 or 4.
pub fn grid_property_failures(report: &GridReport) -> Vec<Failure> {
    let mut out = Vec::new();
    for c in &report.cells {
        let Some(v) = c.brute.as_ref().map(|r| r.b_value) else { continue };
        let (p, q, b) = (c.p, c.q, c.b);
        let inputs = format!("p={p} q={q} b={b}");
        let mut fail = |key: &str, expected: String| {
            out.push(Failure { inputs: inputs.clone(), key: key.into(), expected, got: v.to_string() });
        };
        let floor = p.min(q.pow(b));
        if v < floor {
            fail("lower-bound", format!(">= {floor}"));
        }
        if p < q && v % p != 0 {
            fail("p-divides-b", format!("multiple of {p}"));
        }
        if p < q && p > 3 && b > 2 && v < 3 * p {
            fail("at-least-3p", format!(">= {}", 3 * p));
        }
        if p == 3 && q > 3 && b > 2 && (v == 6) != (b == 3 || b == 4) {
            fail("p3-twice-iff-b34", format!("B = 6 iff b in {{3,4}} (b = {b})"));
        }
    }
    out
}

/// For odd primes `p < q <= q_max`: `B(p q³) = p(p-1)` exactly when
/// `q ≡ ±1 (mod p)`. Uses the closed form.
pub fn pm1_biconditional_failures(q_max: u64) -> Result<(usize, Vec<Failure>)> {
    let mut checked = 0;
    let mut out = Vec::new();
    for p in primes_in(3, q_max) {
        for q in primes_in(p + 1, q_max) {
            let rec = b_formula_with(p, q, 3, crate::divisors::DEFAULT_DEGREE_CAP)?
                .ok_or_else(|| Error::InvalidInput(format!("no closed form for ({p}, {q}, 3)")))?;
            checked += 1;
            let pm1 = q % p == 1 || q % p == p - 1;
            if (rec.b_value == p * (p - 1)) != pm1 {
                out.push(Failure {
                    inputs: format!("p={p} q={q} b=3"),
                    key: "p(p-1)-iff-pm1".into(),
                    expected: if pm1 { format!("{}", p * (p - 1)) } else { format!("!= {}", p * (p - 1)) },
                    got: rec.b_value.to_string(),
                });
            }
        }
    }
    Ok((checked, out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorerEntry {
    pub q: u64,
    /// `min(q mod p, p - q mod p)`; the class is `±class`.
    pub class: u64,
    pub value: Option<u64>,
    pub method: Option<Method>,
    /// Whether an exhaustive search confirmed a closed-form value.
    pub confirmed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassStatus {
    Constant(u64),
    NonConstant(Vec<u64>),
    /// Fewer than two computed values.
    Insufficient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub class: u64,
    pub qs: Vec<u64>,
    pub status: ClassStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorerReport {
    pub p: u64,
    pub b: u32,
    pub entries: Vec<ExplorerEntry>,
    pub classes: Vec<ClassSummary>,
}

impl ExplorerReport {
    pub fn all_constant(&self) -> bool {
        self.classes.iter().all(|c| !matches!(c.status, ClassStatus::NonConstant(_)))
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("observation: B({}·q^{}) by residue class of q mod {}\n", self.p, self.b, self.p);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "  q={} class=±{} value={} method={}{}",
                e.q,
                e.class,
                e.value.map_or("skipped".into(), |v| v.to_string()),
                e.method.map_or("-", Method::as_str),
                match e.confirmed {
                    Some(true) => " confirmed=brute",
                    Some(false) => " confirmed=MISMATCH",
                    None => "",
                }
            );
        }
        for c in &self.classes {
            let status = match &c.status {
                ClassStatus::Constant(v) => format!("constant {v}"),
                ClassStatus::NonConstant(vs) => format!("non-constant {vs:?}"),
                ClassStatus::Insufficient => "insufficient".into(),
            };
            let qs: Vec<String> = c.qs.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "  class ±{}: q in {{{}}}: {}", c.class, qs.join(","), status);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorerOptions {
    pub degree_cap: u64,
    pub budget: Option<Duration>,
    /// Re-derive closed-form values by exhaustive search when `p q^b` is within the cap.
    pub cross_check: bool,
}

impl Default for ExplorerOptions {
    fn default() -> Self {
        ExplorerOptions { degree_cap: crate::divisors::DEFAULT_DEGREE_CAP, budget: None, cross_check: false }
    }
}

/// Groups `q_list` by `±q mod p` and reports whether `B(p q^b)` is constant
/// on each class. Closed forms are used where available, exhaustive search
/// otherwise; cells beyond the cap or budget are skipped.
pub fn conjecture_explorer(p: u64, b: u32, q_list: &[u64]) -> Result<ExplorerReport> {
    conjecture_explorer_with(p, b, q_list, &ExplorerOptions::default())
}

pub fn conjecture_explorer_with(p: u64, b: u32, q_list: &[u64], opts: &ExplorerOptions) -> Result<ExplorerReport> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if b == 0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    let mut qs = q_list.to_vec();
    qs.sort_unstable();
    qs.dedup();
    if let Some(&q) = qs.iter().find(|&&q| !is_prime(q) || q <= p) {
        return Err(Error::InvalidInput(format!("{q} is not a prime above {p}")));
    }
    let eopts = EnumerateOptions { degree_cap: opts.degree_cap, budget: opts.budget, strategy: Strategy::Auto };
    let brute = |q: u64| -> Result<Option<u64>> {
        let Some(n) = q.checked_pow(b).and_then(|v| v.checked_mul(p)).filter(|&n| n <= opts.degree_cap) else {
            return Ok(None);
        };
        match enumerate_b_with(n, &eopts) {
            Ok(r) => Ok(Some(r.b_value)),
            Err(Error::BudgetExceeded(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut entries = Vec::new();
    for q in qs {
        let r = q % p;
        let class = r.min(p - r);
        let entry = match b_formula_with(p, q, b, opts.degree_cap)? {
            Some(f) => {
                let confirmed = if opts.cross_check { brute(q)?.map(|v| v == f.b_value) } else { None };
                ExplorerEntry { q, class, value: Some(f.b_value), method: Some(Method::Formula), confirmed }
            }
            None => {
                let v = brute(q)?;
                ExplorerEntry { q, class, value: v, method: v.map(|_| Method::Brute), confirmed: None }
            }
        };
        entries.push(entry);
    }
    let mut groups: BTreeMap<u64, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for e in &entries {
        let g = groups.entry(e.class).or_default();
        g.0.push(e.q);
        g.1.extend(e.value);
    }
    let classes = groups
        .into_iter()
        .map(|(class, (qs, mut values))| {
            let status = if values.len() < 2 {
                ClassStatus::Insufficient
            } else if values.iter().all(|&v| v == values[0]) {
                ClassStatus::Constant(values[0])
            } else {
                values.dedup();
                ClassStatus::NonConstant(values)
            };
            ClassSummary { class, qs, status }
        })
        .collect();
    Ok(ExplorerReport { p, b, entries, classes })
}
