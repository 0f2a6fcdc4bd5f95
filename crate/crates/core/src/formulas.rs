//! Closed forms for `B(p q^b)`.
//!
//! Several formulas can apply to the same `(p, q, b)`; they must agree.
//! [`b_formula`] reports the first applicable branch in the order
//! `p = 2`, `p = 3`, `q ≡ ±1 (mod p)`, then the `b`-specific ones.
//! [`b_formula_verified`] evaluates every applicable branch and fails with
//! [`Error::FormulaConflict`] if they disagree.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::cyclotomic::{check_distinct_primes, factorize, is_prime, sigma_rho};
use crate::divisors::{engine, enumerate_b, HeightRecord, Method, DEFAULT_DEGREE_CAP};
use crate::error::{Error, Result};

/// Ordering of `p` against the powers of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegimeTag {
    PLtQ,
    QLtPLtQ2,
    Q2LtPLtQ3,
    PGtQ3,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 4] = [RegimeTag::PLtQ, RegimeTag::QLtPLtQ2, RegimeTag::Q2LtPLtQ3, RegimeTag::PGtQ3];

    /// Regime of distinct primes `p`, `q`. No boundary can be hit since
    /// `p` is never a power of `q`.
    pub fn of(p: u64, q: u64) -> RegimeTag {
        let q2 = q.saturating_mul(q);
        let q3 = q2.saturating_mul(q);
        if p < q {
            RegimeTag::PLtQ
        } else if p < q2 {
            RegimeTag::QLtPLtQ2
        } else if p < q3 {
            RegimeTag::Q2LtPLtQ3
        } else {
            RegimeTag::PGtQ3
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::PLtQ => "P_LT_Q",
            RegimeTag::QLtPLtQ2 => "Q_LT_P_LT_Q2",
            RegimeTag::Q2LtPLtQ3 => "Q2_LT_P_LT_Q3",
            RegimeTag::PGtQ3 => "P_GT_Q3",
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegimeTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RegimeTag::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown regime {s:?}")))
    }
}

/// A closed-form branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `n = p^l`: `B = 1`.
    PrimePower,
    /// `p = 2 < q`: `B = 2`.
    TwoQ,
    /// `p = 3 < q`: `B = 3·2^⌊(b-1)/2⌋`.
    ThreeQ,
    /// `p < q`, `q ≡ ±1 (mod p)`: `B = p(p-1)^⌊(b-1)/2⌋`.
    QPlusMinusOne,
    /// `b = 1`: `min{p, q}`.
    PQ,
    /// `b = 2`: `min{p, q²}`.
    PQ2,
    /// `b = 3`, `p < q`: `max{(σ+1)p, (p-σ-1)p}`.
    Cube(RegimeTag),
    /// `b = 4`, `p < q`: `max{p·H(Φ_pq Φ_pq² Φ_q³), p·H(Φ_pq Φ_q²)}`.
    Fourth,
    /// `b = 5`, `p < q`: `p·H(Φ_pq Φ_q²)²`.
    Fifth,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::PrimePower => "prime-power",
            Branch::TwoQ => "p=2",
            Branch::ThreeQ => "p=3",
            Branch::QPlusMinusOne => "q=+-1",
            Branch::PQ => "b=1",
            Branch::PQ2 => "b=2",
            Branch::Cube(RegimeTag::PLtQ) => "b=3:P_LT_Q",
            Branch::Cube(RegimeTag::QLtPLtQ2) => "b=3:Q_LT_P_LT_Q2",
            Branch::Cube(RegimeTag::Q2LtPLtQ3) => "b=3:Q2_LT_P_LT_Q3",
            Branch::Cube(RegimeTag::PGtQ3) => "b=3:P_GT_Q3",
            Branch::Fourth => "b=4",
            Branch::Fifth => "b=5",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn floor_half(b: u32) -> u32 {
    (b - 1) / 2
}

fn pq_pow(p: u64, q: u64, b: u32) -> Result<u64> {
    q.checked_pow(b).and_then(|v| v.checked_mul(p)).ok_or_else(|| Error::InvalidInput(format!("{p}·{q}^{b} overflows")))
}

/// Every branch whose hypotheses hold for `(p, q, b)`, in dispatch order.
pub fn applicable_branches(p: u64, q: u64, b: u32) -> Result<Vec<Branch>> {
    check_distinct_primes(p, q)?;
    if b == 0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    let mut out = Vec::new();
    if p < q {
        if p == 2 {
            out.push(Branch::TwoQ);
        }
        if p == 3 {
            out.push(Branch::ThreeQ);
        }
        if q % p == 1 || q % p == p - 1 {
            out.push(Branch::QPlusMinusOne);
        }
    }
    match b {
        1 => out.push(Branch::PQ),
        2 => out.push(Branch::PQ2),
        3 if p != 2 && q != 2 => out.push(Branch::Cube(RegimeTag::of(p, q))),
        4 if p < q && p != 2 => out.push(Branch::Fourth),
        5 if p < q && p != 2 => out.push(Branch::Fifth),
        _ => {}
    }
    Ok(out)
}

/// Value of a single branch. The caller is responsible for applicability.
pub fn evaluate_branch(branch: Branch, p: u64, q: u64, b: u32, cap: u64) -> Result<u64> {
    let q2 = q * q;
    Ok(match branch {
        Branch::PrimePower => 1,
        Branch::TwoQ => 2,
        Branch::ThreeQ => 3 * 2u64.pow(floor_half(b)),
        Branch::QPlusMinusOne => p * (p - 1).pow(floor_half(b)),
        Branch::PQ => p.min(q),
        Branch::PQ2 => p.min(q2),
        Branch::Cube(RegimeTag::PLtQ) => {
            let sr = sigma_rho(p, q)?;
            sr.spread() * p
        }
        Branch::Cube(RegimeTag::QLtPLtQ2) => p.max(h_of_product_with(&[p, q, p * q2, q2 * q], cap)?),
        Branch::Cube(RegimeTag::Q2LtPLtQ3) => p,
        Branch::Cube(RegimeTag::PGtQ3) => q2 * q,
        Branch::Fourth => {
            let a = h_of_product_with(&[p * q, p * q2, q2 * q], cap)?;
            let g0 = h_of_product_with(&[p * q, q2], cap)?;
            p * a.max(g0)
        }
        Branch::Fifth => {
            let g0 = h_of_product_with(&[p * q, q2], cap)?;
            p * g0 * g0
        }
    })
}

fn record(p: u64, q: u64, b: u32, branch: Branch, value: u64, start: Instant) -> Result<HeightRecord> {
    Ok(HeightRecord {
        n: pq_pow(p, q, b)?,
        b_value: value,
        witness: None,
        method: Method::Formula,
        regime: Some(RegimeTag::of(p, q)),
        branch: Some(branch),
        elapsed: start.elapsed(),
    })
}

/// Closed-form `B(p q^b)`, or `None` when no formula covers the case.
pub fn b_formula(p: u64, q: u64, b: u32) -> Result<Option<HeightRecord>> {
    b_formula_with(p, q, b, DEFAULT_DEGREE_CAP)
}

pub fn b_formula_with(p: u64, q: u64, b: u32, cap: u64) -> Result<Option<HeightRecord>> {
    let start = Instant::now();
    let Some(&branch) = applicable_branches(p, q, b)?.first() else {
        return Ok(None);
    };
    let value = evaluate_branch(branch, p, q, b, cap)?;
    record(p, q, b, branch, value, start).map(Some)
}

/// Like [`b_formula_with`] but evaluates all applicable branches and insists
/// they agree.
pub fn b_formula_verified(p: u64, q: u64, b: u32, cap: u64) -> Result<Option<HeightRecord>> {
    let start = Instant::now();
    let branches = applicable_branches(p, q, b)?;
    let Some(&first) = branches.first() else {
        return Ok(None);
    };
    let mut values = Vec::with_capacity(branches.len());
    for &br in &branches {
        values.push((br, evaluate_branch(br, p, q, b, cap)?));
    }
    let value = values[0].1;
    if values.iter().any(|&(_, v)| v != value) {
        let detail = values.iter().map(|(br, v)| format!("{br} = {v}")).collect::<Vec<_>>().join(", ");
        return Err(Error::FormulaConflict { p, q, b, detail });
    }
    record(p, q, b, first, value, start).map(Some)
}

/// Closed form for any `n`: prime powers give 1, `n = p q^b` goes through
/// [`b_formula_with`].
pub fn b_formula_n(n: u64, cap: u64) -> Result<Option<HeightRecord>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if factorize(n).is_prime_power() {
        return Ok(Some(HeightRecord {
            n,
            b_value: 1,
            witness: None,
            method: Method::Formula,
            regime: None,
            branch: Some(Branch::PrimePower),
            elapsed: Default::default(),
        }));
    }
    match crate::divisors::pq_form(n) {
        Some((p, q, b)) => b_formula_with(p, q, b, cap),
        None => Ok(None),
    }
}

/// Height of `∏ Φ_{n_i}`.
pub fn h_of_product(indices: &[u64]) -> Result<u64> {
    h_of_product_with(indices, DEFAULT_DEGREE_CAP)
}

/// As [`h_of_product`]; `cap` bounds the length of any polynomial built on the
/// way, not the degree of the product.
pub fn h_of_product_with(indices: &[u64], cap: u64) -> Result<u64> {
    if indices.contains(&0) {
        return Err(Error::InvalidInput("cyclotomic index must be positive".into()));
    }
    engine::product_height(indices, cap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueReport {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub b: u32,
    pub left: HeightRecord,
    pub right: HeightRecord,
    pub equal: bool,
    /// `σ_q = σ_r` when `q ≡ r`, and `σ_q + σ_r + 2 = p` when `q ≡ -r (mod p)`.
    pub sigma_identity: bool,
}

fn b_value_any(p: u64, q: u64, b: u32, cap: u64) -> Result<HeightRecord> {
    match b_formula_with(p, q, b, cap)? {
        Some(rec) => Ok(rec),
        None => enumerate_b(pq_pow(p, q, b)?, cap),
    }
}

/// Compares `B(p q^b)` with `B(p r^b)` for `q ≡ ±r (mod p)`.
pub fn residue_invariance_check(p: u64, q: u64, r: u64, b: u32) -> Result<ResidueReport> {
    residue_invariance_check_with(p, q, r, b, DEFAULT_DEGREE_CAP)
}

pub fn residue_invariance_check_with(p: u64, q: u64, r: u64, b: u32, cap: u64) -> Result<ResidueReport> {
    for x in [p, q, r] {
        if !is_prime(x) || x == 2 {
            return Err(Error::InvalidInput(format!("{x} is not an odd prime")));
        }
    }
    if !(p < q && q < r) {
        return Err(Error::PreconditionViolation(format!("need p < q < r, got ({p}, {q}, {r})")));
    }
    if !(1..=5).contains(&b) {
        return Err(Error::InvalidInput(format!("b must be in 1..=5, got {b}")));
    }
    let (qm, rm) = (q % p, r % p);
    let same = qm == rm;
    let opposite = (qm + rm) % p == 0;
    if !same && !opposite {
        return Err(Error::PreconditionViolation(format!("{q} ≢ ±{r} (mod {p}): residues {qm} and {rm}")));
    }
    let (s1, s2) = (sigma_rho(p, q)?.sigma, sigma_rho(p, r)?.sigma);
    let sigma_identity = if same { s1 == s2 } else { s1 + s2 + 2 == p };
    let left = b_value_any(p, q, b, cap)?;
    let right = b_value_any(p, r, b, cap)?;
    Ok(ResidueReport { p, q, r, b, equal: left.b_value == right.b_value, left, right, sigma_identity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(p: u64, q: u64, b: u32) -> u64 {
        b_formula(p, q, b).unwrap().unwrap().b_value
    }

    #[test]
    fn regimes() {
        assert_eq!(RegimeTag::of(3, 5), RegimeTag::PLtQ);
        assert_eq!(RegimeTag::of(5, 3), RegimeTag::QLtPLtQ2);
        assert_eq!(RegimeTag::of(11, 3), RegimeTag::Q2LtPLtQ3);
        assert_eq!(RegimeTag::of(29, 3), RegimeTag::PGtQ3);
        for r in RegimeTag::ALL {
            assert_eq!(r.as_str().parse::<RegimeTag>().unwrap(), r);
        }
    }

    #[test]
    fn example_values() {
        assert_eq!(b(3, 5, 3), 6);
        assert_eq!(b(5, 3, 3), 8);
        assert_eq!(b(7, 3, 3), 7);
        assert_eq!(b(11, 3, 3), 11);
        assert_eq!(b(13, 3, 3), 13);
        assert_eq!(b(29, 3, 3), 27);
        assert_eq!(b(31, 3, 3), 27);
        assert_eq!(b(5, 7, 4), 20);
        assert_eq!(b(5, 7, 3), 15);
        assert_eq!(b(7, 17, 3), 35);
        assert_eq!(b(7, 17, 4), 35);
        assert_eq!(b(5, 7, 5), 45);
    }

    #[test]
    fn dispatch_order() {
        assert_eq!(
            applicable_branches(3, 7, 3).unwrap(),
            vec![Branch::ThreeQ, Branch::QPlusMinusOne, Branch::Cube(RegimeTag::PLtQ)]
        );
        assert_eq!(applicable_branches(7, 17, 6).unwrap(), vec![]);
        assert_eq!(applicable_branches(5, 3, 4).unwrap(), vec![]);
        assert_eq!(applicable_branches(5, 2, 3).unwrap(), vec![]);
        assert!(b_formula(7, 5, 4).unwrap().is_none());
        assert!(b_formula(5, 5, 3).is_err());
    }

    #[test]
    fn product_heights() {
        assert_eq!(h_of_product(&[35, 49]).unwrap(), 3);
        assert_eq!(h_of_product(&[35, 245, 343]).unwrap(), 4);
        assert_eq!(h_of_product(&[105]).unwrap(), 2);
        assert_eq!(7 * h_of_product(&[7 * 17, 7 * 289, 4913]).unwrap(), 28);
    }

    #[test]
    fn overlapping_branches_agree() {
        for p in [2, 3, 5, 7] {
            for q in crate::cyclotomic::primes_in(2, 40) {
                for bb in 1..=7 {
                    if p != q {
                        b_formula_verified(p, q, bb, DEFAULT_DEGREE_CAP).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn residue_examples() {
        let r = residue_invariance_check(5, 7, 17, 3).unwrap();
        assert!(r.equal && r.sigma_identity);
        assert_eq!(r.left.b_value, 15);
        let r = residue_invariance_check(3, 5, 7, 4).unwrap();
        assert_eq!((r.left.b_value, r.right.b_value), (6, 6));
        let r = residue_invariance_check(5, 11, 19, 3).unwrap();
        assert_eq!((r.left.b_value, r.right.b_value), (20, 20));
        assert!(r.sigma_identity);
        assert!(matches!(residue_invariance_check(5, 7, 11, 3), Err(Error::PreconditionViolation(_))));
    }
}
