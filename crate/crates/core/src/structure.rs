//! Coefficient-level checks on the products `g = Φ_pq Φ_pq² Φ_q³` that
//! govern `B(p q^b)` for small `b`, and the bound suite for `q < p < q³`.
//!
//! Every check returns a report carrying the first offending index and the
//! coefficient values involved, so a failure can be located directly.

use crate::cyclotomic::{check_distinct_primes, cyclotomic_product};
use crate::divisors::engine::product_height;
use crate::divisors::DEFAULT_DEGREE_CAP;
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// A coefficient that does not match what the rule predicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    /// Which rule failed: `shift`, `block`, `profile` or `transport`.
    pub rule: &'static str,
    pub index: usize,
    /// The index the coefficient was compared against, if any.
    pub other_index: Option<usize>,
    pub expected: i64,
    pub got: i64,
}

/// Outcome of a coefficient scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub p: u64,
    pub q: u64,
    /// Number of coefficient comparisons made.
    pub checked: usize,
    pub violation: Option<Mismatch>,
}

impl ScanReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

fn check_odd_pair(p: u64, q: u64) -> Result<()> {
    check_distinct_primes(p, q)?;
    if p == 2 || q == 2 {
        return Err(Error::InvalidInput(format!("p and q must be odd, got ({p}, {q})")));
    }
    if p > q {
        return Err(Error::PreconditionViolation(format!("need p < q, got p = {p}, q = {q}")));
    }
    Ok(())
}

fn small_coeffs(f: &IntPoly) -> Result<Vec<i64>> {
    f.as_i64().map(<[i64]>::to_vec).ok_or(Error::HeightOverflow)
}

/// Coefficients of `Φ_pq Φ_pq² Φ_q³`.
pub fn g_coefficients(p: u64, q: u64) -> Result<Vec<i64>> {
    g_coefficients_with(p, q, DEFAULT_DEGREE_CAP)
}

pub fn g_coefficients_with(p: u64, q: u64, cap: u64) -> Result<Vec<i64>> {
    let q3 = q.checked_pow(3).ok_or_else(|| Error::InvalidInput("q^3 overflows".into()))?;
    let degree = (p - 1) * (q - 1) * (1 + q) + (q - 1) * q * q;
    if degree > cap {
        return Err(Error::DegreeCapExceeded { degree, cap });
    }
    small_coeffs(&cyclotomic_product(&[p * q, p * q * q, q3]))
}

fn at(c: &[i64], i: usize) -> i64 {
    c.get(i).copied().unwrap_or(0)
}

/// `c_i = c_{i-p}` for `i >= p`, `i ≢ 0, 1 (mod q²)`, on `g = Φ_pq Φ_pq² Φ_q³`.
///
/// The same scan checks that inside each block `r q² + 1 < i < (r+1) q²`
/// coefficients agree along residue classes mod `p`.
pub fn periodicity_check(p: u64, q: u64) -> Result<ScanReport> {
    check_odd_pair(p, q)?;
    Ok(periodicity_scan(&g_coefficients(p, q)?, p, q))
}

/// The periodicity scan on arbitrary coefficients `c`.
pub fn periodicity_scan(c: &[i64], p: u64, q: u64) -> ScanReport {
    let (pu, q2) = (p as usize, (q * q) as usize);
    let mut checked = 0;
    let mut compare = |rule, i: usize, j: usize| {
        checked += 1;
        let (a, b) = (at(c, i), at(c, j));
        (a != b).then_some(Mismatch { rule, index: i, other_index: Some(j), expected: b, got: a })
    };
    let shift = (pu..c.len() + pu).filter(|i| i % q2 > 1).find_map(|i| compare("shift", i, i - pu));
    let violation = shift.or_else(|| {
        (0..c.len().div_ceil(q2)).find_map(|block| {
            let lo = block * q2 + 2;
            ((lo + pu)..(block + 1) * q2).find_map(|i| compare("block", i, lo + (i - lo) % pu))
        })
    });
    ScanReport { p, q, checked, violation }
}

/// `a_i = min(i+1, p, q, p+q-1-i)` for `0 <= i <= p+q-2`.
pub fn trapezoid_profile(p: u64, q: u64) -> Vec<u64> {
    (0..p + q - 1).map(|i| (i + 1).min(p).min(q).min(p + q - 1 - i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapezoidReport {
    pub scan: ScanReport,
    /// The predicted profile `a_i`.
    pub profile: Vec<u64>,
    /// The coefficients actually found at `i q² + 1`.
    pub observed: Vec<i64>,
}

impl TrapezoidReport {
    pub fn holds(&self) -> bool {
        self.scan.holds()
    }
}

/// `(x^p - 1) g(x) = Σ a_i (x^{i q² + 1} - x^{i q²})` for `g = Φ_pq Φ_pq² Φ_q³`.
pub fn trapezoid_profile_check(p: u64, q: u64) -> Result<TrapezoidReport> {
    check_odd_pair(p, q)?;
    Ok(trapezoid_scan(&g_coefficients(p, q)?, p, q))
}

/// Compares `(x^p - 1) g` against the trapezoid sum for `(p, q)`.
pub fn trapezoid_scan(g: &[i64], p: u64, q: u64) -> TrapezoidReport {
    let profile = trapezoid_profile(p, q);
    let (pu, q2) = (p as usize, (q * q) as usize);
    let len = (g.len() + pu).max(profile.len() * q2 + 2);
    let mut expected = vec![0i64; len];
    for (i, &a) in profile.iter().enumerate() {
        expected[i * q2 + 1] += a as i64;
        expected[i * q2] -= a as i64;
    }
    let product = |k: usize| at(g, k.wrapping_sub(pu)) * i64::from(k >= pu) - at(g, k);
    let observed = (0..profile.len()).map(|i| product(i * q2 + 1)).collect();
    let violation = (0..len).find(|&k| product(k) != expected[k]).map(|k| Mismatch {
        rule: "profile",
        index: k,
        other_index: None,
        expected: expected[k],
        got: product(k),
    });
    TrapezoidReport { scan: ScanReport { p, q, checked: len, violation }, profile, observed }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportReport {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    /// Blocks of length `q²` over which coefficients are transported:
    /// `min(2p-1, q)`. Past block `q - 1` the trapezoid profiles for `q`
    /// and `r` differ, so the map is only claimed up to there.
    pub blocks: usize,
    pub checked: usize,
    pub violation: Option<Mismatch>,
    /// First mismatch in blocks `blocks..2p-1`, if those exist. Informational.
    pub overrun: Option<Mismatch>,
    pub height_q: u64,
    pub height_r: u64,
    /// Smallest index where `Φ_pq Φ_pq² Φ_q³` attains its height.
    pub peak_q: usize,
    pub peak_r: usize,
    /// Both peaks sit at offset 0 or 1 of a block numbered below `blocks`.
    pub peaks_ok: bool,
}

impl TransportReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none() && self.height_q == self.height_r && self.peaks_ok
    }
}

fn first_peak(c: &[i64]) -> (u64, usize) {
    let h = c.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    (h, c.iter().position(|v| v.unsigned_abs() == h).unwrap_or(0))
}

/// Maps coefficients of `Φ_pq Φ_pq² Φ_q³` onto those of `Φ_pr Φ_pr² Φ_r³`
/// for `q ≡ ±r (mod p)`: `c_n = d_l` with `l = ⌊n/q²⌋ r² + (n mod q²)`.
///
/// Also checks that both heights agree and are first attained at offset 0 or
/// 1 of a block inside the transported range, which is what makes the map
/// carry the height across.
pub fn coefficient_transport_check(p: u64, q: u64, r: u64) -> Result<TransportReport> {
    coefficient_transport_check_with(p, q, r, DEFAULT_DEGREE_CAP)
}

pub fn coefficient_transport_check_with(p: u64, q: u64, r: u64, cap: u64) -> Result<TransportReport> {
    check_odd_pair(p, q)?;
    check_odd_pair(p, r)?;
    if q >= r {
        return Err(Error::PreconditionViolation(format!("need q < r, got q = {q}, r = {r}")));
    }
    let (qm, rm) = (q % p, r % p);
    if qm != rm && (qm + rm) % p != 0 {
        return Err(Error::PreconditionViolation(format!("{q} ≢ ±{r} (mod {p}): residues {qm} and {rm}")));
    }
    let c = g_coefficients_with(p, q, cap)?;
    let d = g_coefficients_with(p, r, cap)?;
    let (q2, r2) = ((q * q) as usize, (r * r) as usize);
    let full = 2 * p as usize - 1;
    let blocks = full.min(q as usize);
    let first_mismatch = |range: std::ops::Range<usize>| {
        range.map(|n| (n, n / q2 * r2 + n % q2)).find(|&(n, l)| at(&c, n) != at(&d, l)).map(|(n, l)| Mismatch {
            rule: "transport",
            index: n,
            other_index: Some(l),
            expected: at(&c, n),
            got: at(&d, l),
        })
    };
    let violation = first_mismatch(0..blocks * q2);
    let overrun = first_mismatch(blocks * q2..full * q2);
    let (height_q, peak_q) = first_peak(&c);
    let (height_r, peak_r) = first_peak(&d);
    let placed = |peak: usize, block: usize| peak / block < blocks && peak % block <= 1;
    let peaks_ok = placed(peak_q, q2) && placed(peak_r, r2);
    Ok(TransportReport {
        p,
        q,
        r,
        blocks,
        checked: blocks * q2,
        violation,
        overrun,
        height_q,
        height_r,
        peak_q,
        peak_r,
        peaks_ok,
    })
}

/// Right-hand sides appearing in the bound suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    One,
    P,
    TwoQ,
    QSquared,
    MaxPQSquared,
    MaxPTwoQ,
}

impl Bound {
    pub fn value(self, p: u64, q: u64) -> u64 {
        match self {
            Bound::One => 1,
            Bound::P => p,
            Bound::TwoQ => 2 * q,
            Bound::QSquared => q * q,
            Bound::MaxPQSquared => p.max(q * q),
            Bound::MaxPTwoQ => p.max(2 * q),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bound::One => "1",
            Bound::P => "p",
            Bound::TwoQ => "2q",
            Bound::QSquared => "q^2",
            Bound::MaxPQSquared => "max(p,q^2)",
            Bound::MaxPTwoQ => "max(p,2q)",
        }
    }
}

/// One product measured against its bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundEntry {
    /// `pq3`, `q3`, `extra` or `f2-split`.
    pub family: &'static str,
    /// The factor list besides `f2`, e.g. `p*pq^2*q^3`.
    pub shape: String,
    /// The divisors of `q²` making up `f2`.
    pub f2: Vec<u64>,
    pub bound: Bound,
    pub bound_value: u64,
    pub observed: u64,
}

impl BoundEntry {
    pub fn holds(&self) -> bool {
        self.observed <= self.bound_value
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub p: u64,
    pub q: u64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn violations(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| !e.holds())
    }

    pub fn holds(&self) -> bool {
        self.violations().next().is_none()
    }
}

// The eight shapes with their bounds in the `Φ_pq³` and `Φ_q³` columns.
const SHAPES: [(&[&str], Bound, Bound); 8] = [
    (&[], Bound::One, Bound::One),
    (&["p"], Bound::P, Bound::P),
    (&["pq"], Bound::TwoQ, Bound::P),
    (&["pq^2"], Bound::P, Bound::P),
    (&["p", "pq"], Bound::P, Bound::P),
    (&["p", "pq^2"], Bound::P, Bound::MaxPQSquared),
    (&["pq", "pq^2"], Bound::TwoQ, Bound::MaxPTwoQ),
    (&["p", "pq", "pq^2"], Bound::P, Bound::P),
];

fn index_of(name: &str, p: u64, q: u64) -> u64 {
    match name {
        "p" => p,
        "pq" => p * q,
        "pq^2" => p * q * q,
        "pq^3" => p * q * q * q,
        "q^3" => q * q * q,
        _ => unreachable!("unknown factor {name}"),
    }
}

/// Heights of `Φ_pq³ f` and `Φ_q³ f` for the eight shapes of `f` times
/// every `f2 | x^{q²} - 1`, against their stated bounds, for `q < p < q³`.
///
/// Also covers `Φ_pq² Φ_p f2 <= max(p, 2q)` and the split of
/// `Φ_p Φ_pq² Φ_q³ f2` by `f2` into `q²`, `2q` and `p`.
pub fn table1_bounds_check(p: u64, q: u64) -> Result<BoundReport> {
    check_distinct_primes(p, q)?;
    if q == 2 || p == 2 {
        return Err(Error::InvalidInput(format!("p and q must be odd, got ({p}, {q})")));
    }
    let q3 = q.checked_pow(3).ok_or_else(|| Error::InvalidInput("q^3 overflows".into()))?;
    if !(q < p && p < q3) {
        return Err(Error::PreconditionViolation(format!("need q < p < q^3, got p = {p}, q = {q}")));
    }
    let n = p * q3;
    if n > DEFAULT_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { degree: n, cap: DEFAULT_DEGREE_CAP });
    }
    let f2s: Vec<Vec<u64>> = (0..8u32)
        .map(|m| [1, q, q * q].into_iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, d)| d).collect())
        .collect();
    let mut entries = Vec::new();
    let mut measure = |family, names: &[&str], f2: &[u64], bound: Bound| -> Result<()> {
        let mut idx: Vec<u64> = names.iter().map(|s| index_of(s, p, q)).chain(f2.iter().copied()).collect();
        idx.sort_unstable();
        entries.push(BoundEntry {
            family,
            shape: if names.is_empty() { "1".into() } else { names.join("*") },
            f2: f2.to_vec(),
            bound,
            bound_value: bound.value(p, q),
            observed: product_height(&idx, DEFAULT_DEGREE_CAP)?,
        });
        Ok(())
    };
    for (names, b_pq3, b_q3) in SHAPES {
        for f2 in &f2s {
            let with = |extra| names.iter().copied().chain([extra]).collect::<Vec<_>>();
            measure("pq3", &with("pq^3"), f2, b_pq3)?;
            measure("q3", &with("q^3"), f2, b_q3)?;
        }
    }
    for f2 in &f2s {
        measure("extra", &["p", "pq^2"], f2, Bound::MaxPTwoQ)?;
        let split = if *f2 == [q] {
            Bound::QSquared
        } else if *f2 == [1] || *f2 == [1, q] {
            Bound::TwoQ
        } else {
            Bound::P
        };
        measure("f2-split", &["p", "pq^2", "q^3"], f2, split)?;
    }
    Ok(BoundReport { p, q, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodicity_small_pairs() {
        for (p, q) in [(3, 5), (5, 7), (3, 7), (5, 11)] {
            let r = periodicity_check(p, q).unwrap();
            assert!(r.holds(), "({p},{q}): {:?}", r.violation);
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn periodicity_detects_bumped_coefficient() {
        let mut g = g_coefficients(3, 5).unwrap();
        g[40] += 1;
        let r = periodicity_scan(&g, 3, 5);
        let v = r.violation.unwrap();
        assert!(v.index == 40 || v.other_index == Some(40), "{v:?}");
    }

    #[test]
    fn trapezoid_examples() {
        let r = trapezoid_profile_check(3, 5).unwrap();
        assert!(r.holds(), "{:?}", r.scan.violation);
        assert_eq!(r.profile, vec![1, 2, 3, 3, 3, 2, 1]);
        assert_eq!(r.observed, vec![1, 2, 3, 3, 3, 2, 1]);
        let r = trapezoid_profile_check(5, 7).unwrap();
        assert!(r.holds());
        assert_eq!(r.profile.len(), 11);
        assert_eq!(r.profile.iter().max(), Some(&5));
    }

    #[test]
    fn trapezoid_rejects_swapped_roles() {
        let swapped = small_coeffs(&cyclotomic_product(&[15, 45, 27])).unwrap();
        assert!(!trapezoid_scan(&swapped, 3, 5).holds());
    }

    #[test]
    fn transport_examples() {
        for (p, q, r) in [(3, 5, 7), (5, 7, 17), (5, 11, 19)] {
            let t = coefficient_transport_check(p, q, r).unwrap();
            assert!(t.holds(), "{t:?}");
        }
        let t = coefficient_transport_check(5, 7, 17).unwrap();
        assert_eq!(t.blocks, 7);
        assert_eq!(t.overrun.map(|m| m.index), Some(343));
        assert!(matches!(coefficient_transport_check(5, 7, 11), Err(Error::PreconditionViolation(_))));
    }

    #[test]
    fn bound_suite_reports_entries() {
        let r = table1_bounds_check(5, 3).unwrap();
        assert_eq!(r.entries.len(), 2 * 8 * 8 + 2 * 8);
        assert!(table1_bounds_check(3, 5).is_err());
    }
}
