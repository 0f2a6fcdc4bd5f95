//! Divisors of `x^n - 1` as subset products of cyclotomic factors, and the
//! brute-force computation of `B(n)`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::cyclotomic::{self, check_distinct_primes, factorize};
use crate::error::{Error, Result};
use crate::formulas::{Branch, RegimeTag};
use crate::intpoly::IntPoly;

pub mod engine;

pub use engine::{lex_less, max_height_over_subsets, Strategy, SubsetMax, MAX_FACTORS};

/// Default bound on `n` (and on materialized polynomial lengths).
pub const DEFAULT_DEGREE_CAP: u64 = 200_000;

/// A set of divisors `d | base_n`, standing for `∏ Φ_d`, which divides
/// `x^base_n - 1`. Stored sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorSelection {
    base_n: u64,
    selected: Vec<u64>,
}

impl DivisorSelection {
    pub fn new(base_n: u64, selected: impl IntoIterator<Item = u64>) -> Result<Self> {
        if base_n == 0 {
            return Err(Error::InvalidInput("base n must be positive".into()));
        }
        let mut selected: Vec<u64> = selected.into_iter().collect();
        selected.sort_unstable();
        selected.dedup();
        if let Some(&d) = selected.iter().find(|&&d| d == 0 || !base_n.is_multiple_of(d)) {
            return Err(Error::InvalidInput(format!("{d} does not divide {base_n}")));
        }
        Ok(DivisorSelection { base_n, selected })
    }

    fn from_mask(base_n: u64, factors: &[u64], mask: u64) -> Self {
        let mut selected: Vec<u64> = (0..factors.len()).filter(|&i| mask >> i & 1 == 1).map(|i| factors[i]).collect();
        selected.sort_unstable();
        DivisorSelection { base_n, selected }
    }

    pub fn base_n(&self) -> u64 {
        self.base_n
    }

    pub fn selected(&self) -> &[u64] {
        &self.selected
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.selected.iter().map(|&d| factorize(d).totient()).sum()
    }

    /// `∏ Φ_d` over the selection.
    pub fn polynomial(&self) -> IntPoly {
        divisor_poly(self)
    }

    /// Height of the product, computed without materializing it.
    pub fn height(&self) -> Result<u64> {
        engine::product_height(&self.selected, u64::MAX)
    }
}

/// Divisors joined by `+`; the empty selection is `{}`.
impl fmt::Display for DivisorSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.selected.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.selected.iter().map(u64::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

/// The product `∏ Φ_d` over a selection.
pub fn divisor_poly(sel: &DivisorSelection) -> IntPoly {
    cyclotomic::cyclotomic_product(&sel.selected)
}

/// How a [`HeightRecord`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Brute,
    Formula,
    Reduced,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Formula => "formula",
            Method::Reduced => "reduced",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "formula" => Ok(Method::Formula),
            "reduced" => Ok(Method::Reduced),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// A computed value of `B(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightRecord {
    pub n: u64,
    pub b_value: u64,
    /// A selection attaining `b_value`; formula results carry none.
    pub witness: Option<DivisorSelection>,
    pub method: Method,
    pub regime: Option<RegimeTag>,
    pub branch: Option<Branch>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub degree_cap: u64,
    pub budget: Option<Duration>,
    pub strategy: Strategy,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { degree_cap: DEFAULT_DEGREE_CAP, budget: None, strategy: Strategy::Auto }
    }
}

impl EnumerateOptions {
    pub fn with_cap(degree_cap: u64) -> Self {
        EnumerateOptions { degree_cap, ..Default::default() }
    }
}

/// `n = p q^b` with `p`, `q` distinct primes, read with `p` the prime of
/// exponent one (the smaller prime when both exponents are one).
pub fn pq_form(n: u64) -> Option<(u64, u64, u32)> {
    match *factorize(n).factors() {
        [(a, 1), (b, 1)] => Some((a, b, 1)),
        [(a, 1), (b, e)] => Some((a, b, e)),
        [(a, e), (b, 1)] => Some((b, a, e)),
        _ => None,
    }
}

/// `B(n)` by exhaustive search over all `2^d(n)` subset products.
pub fn enumerate_b(n: u64, degree_cap: u64) -> Result<HeightRecord> {
    enumerate_b_with(n, &EnumerateOptions::with_cap(degree_cap))
}

pub fn enumerate_b_with(n: u64, opts: &EnumerateOptions) -> Result<HeightRecord> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if n > opts.degree_cap {
        return Err(Error::DegreeCapExceeded { degree: n, cap: opts.degree_cap });
    }
    let start = Instant::now();
    let factors = factorize(n).divisors();
    let best = max_height_over_subsets(&factors, opts.strategy, opts.budget)?;
    Ok(HeightRecord {
        n,
        b_value: best.height,
        witness: Some(DivisorSelection::from_mask(n, &factors, best.mask)),
        method: Method::Brute,
        regime: pq_form(n).map(|(p, q, _)| RegimeTag::of(p, q)),
        branch: None,
        elapsed: start.elapsed(),
    })
}

/// The factors `Φ_{q^i}`, `Φ_{pq^i}` for `1 <= i <= b-1`, ascending.
pub fn reduced_factors(p: u64, q: u64, b: u32) -> Vec<u64> {
    let mut f: Vec<u64> = (1..b).flat_map(|i| [q.pow(i), p * q.pow(i)]).collect();
    f.sort_unstable();
    f
}

/// `H_b`: the maximum height over divisors of `∏_{i<b} Φ_{q^i} Φ_{pq^i}`.
///
/// The witness is a selection of divisors of `p q^(b-1)`.
pub fn reduced_h_b(p: u64, q: u64, b: u32) -> Result<(u64, DivisorSelection)> {
    reduced_h_b_with(p, q, b, &EnumerateOptions::default())
}

pub fn reduced_h_b_with(p: u64, q: u64, b: u32, opts: &EnumerateOptions) -> Result<(u64, DivisorSelection)> {
    check_distinct_primes(p, q)?;
    if p > q {
        return Err(Error::PreconditionViolation(format!("reduction needs p < q, got p = {p}, q = {q}")));
    }
    if b < 2 {
        return Err(Error::InvalidInput(format!("reduction needs b >= 2, got {b}")));
    }
    let base = q
        .checked_pow(b - 1)
        .and_then(|v| v.checked_mul(p))
        .ok_or_else(|| Error::InvalidInput("p q^(b-1) overflows".into()))?;
    if base > opts.degree_cap {
        return Err(Error::DegreeCapExceeded { degree: base, cap: opts.degree_cap });
    }
    let factors = reduced_factors(p, q, b);
    let best = max_height_over_subsets(&factors, opts.strategy, opts.budget)?;
    Ok((best.height, DivisorSelection::from_mask(base, &factors, best.mask)))
}

/// `B(p q^b) = p H_b` for `p < q`, recorded with method `reduced`.
pub fn reduced_b(p: u64, q: u64, b: u32, opts: &EnumerateOptions) -> Result<HeightRecord> {
    let start = Instant::now();
    let (h, _) = reduced_h_b_with(p, q, b, opts)?;
    Ok(HeightRecord {
        n: p * q.pow(b),
        b_value: p * h,
        witness: None,
        method: Method::Reduced,
        regime: Some(RegimeTag::of(p, q)),
        branch: None,
        elapsed: start.elapsed(),
    })
}
