//! Dense univariate polynomials with exact integer coefficients.
//!
//! Coefficients live in a machine-word vector whenever every coefficient fits
//! in an `i64`, and are promoted to arbitrary precision otherwise. The zero
//! polynomial is the empty coefficient vector and every other polynomial has a
//! nonzero leading coefficient, so structural equality is polynomial equality.
//!
//! Machine-word products are computed with wrapping arithmetic. Ring
//! operations are exact modulo 2^64, so a product whose true coefficients are
//! bounded in magnitude by `i64::MAX` is recovered exactly; that bound
//! (`H(f) * H(g) * min(len f, len g)`) is checked before the fast path runs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Degree above which multiplication switches from schoolbook to Karatsuba.
pub const DEFAULT_KARATSUBA_THRESHOLD: usize = 512;

/// Tuning knobs for [`IntPoly::mul_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MulConfig {
    pub karatsuba_threshold: usize,
}

impl Default for MulConfig {
    fn default() -> Self {
        MulConfig { karatsuba_threshold: DEFAULT_KARATSUBA_THRESHOLD }
    }
}

/// A polynomial in `Z[x]`; index `i` of the coefficient sequence holds the
/// coefficient of `x^i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // Never contains i64::MIN, so `abs` is always safe.
    Small(Vec<i64>),
    // At least one coefficient does not fit the Small representation.
    Big(Vec<BigInt>),
}

impl Default for Repr {
    fn default() -> Self {
        Repr::Small(Vec::new())
    }
}

fn trim_small(v: &mut Vec<i64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn trim_big(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn to_small(c: &BigInt) -> Option<i64> {
    c.to_i64().filter(|&x| x != i64::MIN)
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly::default()
    }

    pub fn one() -> Self {
        IntPoly::constant(1)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        IntPoly::monomial(1, 1)
    }

    pub fn constant(c: i64) -> Self {
        IntPoly::from_i64(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: i64, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        IntPoly::from_i64(v)
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        if n == 0 {
            return IntPoly::zero();
        }
        let mut v = vec![0; n + 1];
        v[0] = -1;
        v[n] = 1;
        IntPoly::from_i64(v)
    }

    pub fn from_i64(mut coeffs: Vec<i64>) -> Self {
        trim_small(&mut coeffs);
        if coeffs.contains(&i64::MIN) {
            return IntPoly::from_bigints(coeffs.into_iter().map(BigInt::from).collect());
        }
        IntPoly { repr: Repr::Small(coeffs) }
    }

    pub fn from_bigints(mut coeffs: Vec<BigInt>) -> Self {
        trim_big(&mut coeffs);
        let small: Option<Vec<i64>> = coeffs.iter().map(to_small).collect();
        match small {
            Some(v) => IntPoly { repr: Repr::Small(v) },
            None => IntPoly { repr: Repr::Big(coeffs) },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Small(v) => v.is_empty(),
            Repr::Big(v) => v.is_empty(),
        }
    }

    /// Number of stored coefficients (`degree + 1`, or 0 for the zero polynomial).
    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Small(v) => v.len(),
            Repr::Big(v) => v.len(),
        }
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.len().checked_sub(1)
    }

    /// True when every coefficient is held in a machine word.
    pub fn is_small(&self) -> bool {
        matches!(self.repr, Repr::Small(_))
    }

    /// Borrow the coefficients when they all fit in machine words.
    pub fn as_i64(&self) -> Option<&[i64]> {
        match &self.repr {
            Repr::Small(v) => Some(v),
            Repr::Big(_) => None,
        }
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        match &self.repr {
            Repr::Small(v) => v.iter().map(|&c| BigInt::from(c)).collect(),
            Repr::Big(v) => v.clone(),
        }
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        match &self.repr {
            Repr::Small(v) => BigInt::from(v.get(i).copied().unwrap_or(0)),
            Repr::Big(v) => v.get(i).cloned().unwrap_or_default(),
        }
    }

    pub fn coeff_i64(&self, i: usize) -> Option<i64> {
        match &self.repr {
            Repr::Small(v) => Some(v.get(i).copied().unwrap_or(0)),
            Repr::Big(v) => v.get(i).map_or(Some(0), |c| c.to_i64()),
        }
    }

    /// Number of nonzero coefficients.
    pub fn nonzero_count(&self) -> usize {
        match &self.repr {
            Repr::Small(v) => v.iter().filter(|&&c| c != 0).count(),
            Repr::Big(v) => v.iter().filter(|c| !c.is_zero()).count(),
        }
    }

    /// Largest coefficient in absolute value; zero for the zero polynomial.
    pub fn height(&self) -> BigUint {
        match &self.repr {
            Repr::Small(v) => BigUint::from(small_height(v)),
            Repr::Big(v) => v.iter().map(|c| c.magnitude().clone()).max().unwrap_or_default(),
        }
    }

    /// [`height`](Self::height) as a machine word, when it fits.
    pub fn height_u64(&self) -> Option<u64> {
        match &self.repr {
            Repr::Small(v) => Some(small_height(v)),
            Repr::Big(_) => self.height().to_u64(),
        }
    }

    /// Sum of the absolute values of the coefficients.
    pub fn norm1(&self) -> BigUint {
        match &self.repr {
            Repr::Small(v) => BigUint::from(v.iter().map(|c| c.unsigned_abs() as u128).sum::<u128>()),
            Repr::Big(v) => v.iter().map(|c| c.magnitude().clone()).sum(),
        }
    }

    /// `f(x^k)`. Panics if `k == 0`.
    pub fn substitute_power(&self, k: usize) -> IntPoly {
        assert!(k >= 1, "substitute_power requires k >= 1");
        if k == 1 || self.is_zero() {
            return self.clone();
        }
        let deg = self.len() - 1;
        match &self.repr {
            Repr::Small(v) => {
                let mut out = vec![0i64; deg * k + 1];
                for (i, &c) in v.iter().enumerate() {
                    out[i * k] = c;
                }
                IntPoly::from_i64(out)
            }
            Repr::Big(v) => {
                let mut out = vec![BigInt::zero(); deg * k + 1];
                for (i, c) in v.iter().enumerate() {
                    out[i * k] = c.clone();
                }
                IntPoly::from_bigints(out)
            }
        }
    }

    /// `f(-x)`.
    pub fn negate_variable(&self) -> IntPoly {
        match &self.repr {
            Repr::Small(v) => {
                IntPoly::from_i64(v.iter().enumerate().map(|(i, &c)| if i % 2 == 1 { -c } else { c }).collect())
            }
            Repr::Big(v) => IntPoly::from_bigints(
                v.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect(),
            ),
        }
    }

    /// Coefficient sequence reversed: `x^deg f * f(1/x)`.
    pub fn reversed(&self) -> IntPoly {
        match &self.repr {
            Repr::Small(v) => IntPoly::from_i64(v.iter().rev().copied().collect()),
            Repr::Big(v) => IntPoly::from_bigints(v.iter().rev().cloned().collect()),
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        self.mul_with(other, &MulConfig::default())
    }

    pub fn mul_with(&self, other: &IntPoly, config: &MulConfig) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        if let (Repr::Small(a), Repr::Small(b)) = (&self.repr, &other.repr) {
            if let Some(v) = mul_small(a, b, config) {
                return IntPoly::from_i64(v);
            }
        }
        IntPoly::from_bigints(mul_big(&self.to_bigints(), &other.to_bigints()))
    }

    /// `f * (x^e - 1)`.
    pub fn mul_binomial(&self, e: usize) -> IntPoly {
        assert!(e >= 1);
        self.mul(&IntPoly::x_pow_minus_one(e))
    }

    /// Exact quotient `f / g`.
    ///
    /// Fails with [`Error::NonExactDivision`] when `g` does not divide `f` in
    /// `Z[x]`, and with [`Error::DivisionByZero`] when `g` is zero.
    pub fn div_exact(&self, g: &IntPoly) -> Result<IntPoly> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(IntPoly::zero());
        }
        if self.len() < g.len() {
            return Err(Error::NonExactDivision);
        }
        if let (Repr::Small(f), Repr::Small(gv)) = (&self.repr, &g.repr) {
            match div_small(f, gv) {
                Some(Ok(q)) => return Ok(IntPoly::from_i64(q)),
                Some(Err(e)) => return Err(e),
                None => {}
            }
        }
        div_big(&self.to_bigints(), &g.to_bigints()).map(IntPoly::from_bigints)
    }

    fn zip_with(
        &self,
        other: &IntPoly,
        small_op: fn(i64, i64) -> Option<i64>,
        big_op: fn(&BigInt, &BigInt) -> BigInt,
    ) -> IntPoly {
        let n = self.len().max(other.len());
        if let (Repr::Small(a), Repr::Small(b)) = (&self.repr, &other.repr) {
            let out: Option<Vec<i64>> =
                (0..n).map(|i| small_op(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))).collect();
            if let Some(v) = out {
                return IntPoly::from_i64(v);
            }
        }
        let (a, b) = (self.to_bigints(), other.to_bigints());
        let zero = BigInt::zero();
        IntPoly::from_bigints((0..n).map(|i| big_op(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero))).collect())
    }
}

pub(crate) fn small_height(v: &[i64]) -> u64 {
    v.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

/// Machine integers used by the in-place kernels. Arithmetic wraps, so results
/// are exact modulo `2^BITS` and exact outright once they are known to fit.
pub(crate) trait Word:
    Copy + Default + Eq + Ord + std::hash::Hash + std::fmt::Debug + Send + Sync + 'static
{
    const ZERO: Self;
    const ONE: Self;
    fn wadd(self, o: Self) -> Self;
    fn wsub(self, o: Self) -> Self;
    fn wmul(self, o: Self) -> Self;
    fn wneg(self) -> Self;
    fn abs_u128(self) -> u128;
    fn is_negative(self) -> bool;
}

macro_rules! word {
    ($t:ty) => {
        impl Word for $t {
            const ZERO: Self = 0;
            const ONE: Self = 1;
            #[inline(always)]
            fn wadd(self, o: Self) -> Self {
                self.wrapping_add(o)
            }
            #[inline(always)]
            fn wsub(self, o: Self) -> Self {
                self.wrapping_sub(o)
            }
            #[inline(always)]
            fn wmul(self, o: Self) -> Self {
                self.wrapping_mul(o)
            }
            #[inline(always)]
            fn wneg(self) -> Self {
                self.wrapping_neg()
            }
            #[inline(always)]
            fn abs_u128(self) -> u128 {
                self.unsigned_abs() as u128
            }
            #[inline(always)]
            fn is_negative(self) -> bool {
                self < 0
            }
        }
    };
}

word!(i64);
word!(i128);

/// `buf <- buf * (x^e - 1)` in wrapping arithmetic.
pub(crate) fn mul_binomial_in_place<W: Word>(buf: &mut Vec<W>, e: usize) {
    let len = buf.len();
    if len == 0 {
        return;
    }
    buf.resize(len + e, W::ZERO);
    // c[k] = b[k-e] - b[k], descending in blocks of e so source and target never overlap
    let mut end = len + e;
    while end > e {
        let start = (end - e).max(e);
        let (lo, hi) = buf.split_at_mut(start);
        for (h, &l) in hi[..end - start].iter_mut().zip(&lo[start - e..end - e]) {
            *h = l.wsub(*h);
        }
        end = start;
    }
    for c in &mut buf[..e] {
        *c = c.wneg();
    }
}

/// `buf <- buf / (x^e - 1)` in wrapping arithmetic. Returns false if the
/// remainder is nonzero (modulo the word size); `buf` is then unspecified.
pub(crate) fn div_binomial_in_place<W: Word>(buf: &mut Vec<W>, e: usize) -> bool {
    let len = buf.len();
    if len == 0 {
        return true;
    }
    if len <= e {
        return false;
    }
    for c in &mut buf[..e] {
        *c = c.wneg();
    }
    let mut start = e;
    while start < len {
        let end = (start + e).min(len);
        let (lo, hi) = buf.split_at_mut(start);
        for (h, &l) in hi[..end - start].iter_mut().zip(&lo[start - e..end - e]) {
            *h = l.wsub(*h);
        }
        start = end;
    }
    let qlen = len - e;
    if buf[qlen..].iter().any(|&c| c != W::ZERO) {
        return false;
    }
    buf.truncate(qlen);
    true
}

fn nnz(v: &[i64]) -> usize {
    v.iter().filter(|&&c| c != 0).count()
}

fn mul_small(a: &[i64], b: &[i64], config: &MulConfig) -> Option<Vec<i64>> {
    let bound = small_height(a) as u128 * small_height(b) as u128 * a.len().min(b.len()) as u128;
    if bound > i64::MAX as u128 {
        return None;
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    let (sparse, dense) = if nnz(a) * b.len() <= nnz(b) * a.len() { (a, b) } else { (b, a) };
    let sparse_nnz = nnz(sparse);
    let min_degree = a.len().min(b.len()) - 1;
    if sparse_nnz * 4 <= sparse.len() || min_degree <= config.karatsuba_threshold {
        sparse_mul_acc(sparse, dense, &mut out);
    } else {
        karatsuba_acc(a, b, &mut out, config.karatsuba_threshold.max(1));
    }
    Some(out)
}

fn sparse_mul_acc(sparse: &[i64], dense: &[i64], out: &mut [i64]) {
    for (i, &c) in sparse.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let dst = &mut out[i..i + dense.len()];
        match c {
            1 => dst.iter_mut().zip(dense).for_each(|(o, &d)| *o = o.wrapping_add(d)),
            -1 => dst.iter_mut().zip(dense).for_each(|(o, &d)| *o = o.wrapping_sub(d)),
            _ => dst.iter_mut().zip(dense).for_each(|(o, &d)| *o = o.wrapping_add(c.wrapping_mul(d))),
        }
    }
}

fn add_into(dst: &mut [i64], src: &[i64]) {
    dst.iter_mut().zip(src).for_each(|(d, &s)| *d = d.wrapping_add(s));
}

fn sub_into(dst: &mut [i64], src: &[i64]) {
    dst.iter_mut().zip(src).for_each(|(d, &s)| *d = d.wrapping_sub(s));
}

fn sum_halves(lo: &[i64], hi: &[i64]) -> Vec<i64> {
    let mut s = vec![0i64; lo.len().max(hi.len())];
    add_into(&mut s, lo);
    add_into(&mut s, hi);
    s
}

// Accumulates a*b into out (out.len() >= a.len() + b.len() - 1).
fn karatsuba_acc(a: &[i64], b: &[i64], out: &mut [i64], threshold: usize) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let (n, m) = (a.len(), b.len());
    if m == 0 {
        return;
    }
    if m <= threshold {
        sparse_mul_acc(b, a, out);
        return;
    }
    if n >= 2 * m {
        for (i, chunk) in a.chunks(m).enumerate() {
            karatsuba_acc(chunk, b, &mut out[i * m..], threshold);
        }
        return;
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);

    let mut z0 = vec![0i64; 2 * h - 1];
    karatsuba_acc(a0, b0, &mut z0, threshold);
    let mut z2 = vec![0i64; a1.len() + b1.len() - 1];
    karatsuba_acc(a1, b1, &mut z2, threshold);
    let sa = sum_halves(a0, a1);
    let sb = sum_halves(b0, b1);
    let mut z1 = vec![0i64; sa.len() + sb.len() - 1];
    karatsuba_acc(&sa, &sb, &mut z1, threshold);
    sub_into(&mut z1, &z0);
    sub_into(&mut z1, &z2);

    add_into(out, &z0);
    add_into(&mut out[2 * h..], &z2);
    // z1 may carry trailing zeros past the true product length.
    let len = z1.len().min(out.len() - h);
    add_into(&mut out[h..h + len], &z1[..len]);
}

fn mul_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

// None signals machine-word overflow; the caller retries with big integers.
fn div_small(f: &[i64], g: &[i64]) -> Option<Result<Vec<i64>>> {
    let dg = g.len() - 1;
    let lc = g[dg];
    let terms: Vec<(usize, i64)> = g[..dg].iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, c)).collect();
    let mut rem = f.to_vec();
    let mut q = vec![0i64; f.len() - dg];
    for k in (0..q.len()).rev() {
        let c = rem[k + dg];
        if c == 0 {
            continue;
        }
        if c % lc != 0 {
            return Some(Err(Error::NonExactDivision));
        }
        let qc = c / lc;
        q[k] = qc;
        rem[k + dg] = 0;
        for &(j, gj) in &terms {
            rem[k + j] = rem[k + j].checked_sub(qc.checked_mul(gj)?)?;
        }
    }
    if rem[..dg].iter().any(|&c| c != 0) {
        return Some(Err(Error::NonExactDivision));
    }
    Some(Ok(q))
}

fn div_big(f: &[BigInt], g: &[BigInt]) -> Result<Vec<BigInt>> {
    let dg = g.len() - 1;
    let lc = &g[dg];
    let mut rem = f.to_vec();
    let mut q = vec![BigInt::zero(); f.len() - dg];
    for k in (0..q.len()).rev() {
        if rem[k + dg].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut rem[k + dg]);
        if !(&c % lc).is_zero() {
            return Err(Error::NonExactDivision);
        }
        let qc = c / lc;
        for (j, gj) in g[..dg].iter().enumerate() {
            if !gj.is_zero() {
                rem[k + j] -= &qc * gj;
            }
        }
        q[k] = qc;
    }
    if rem[..dg].iter().any(|c| !c.is_zero()) {
        return Err(Error::NonExactDivision);
    }
    Ok(q)
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        self.zip_with(rhs, i64::checked_add, |a, b| a + b)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self.zip_with(rhs, i64::checked_sub, |a, b| a - b)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::mul(self, rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        match &self.repr {
            Repr::Small(v) => IntPoly::from_i64(v.iter().map(|&c| -c).collect()),
            Repr::Big(v) => IntPoly::from_bigints(v.iter().map(|c| -c).collect()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for IntPoly {
            type Output = IntPoly;
            fn $method(self, rhs: IntPoly) -> IntPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        -&self
    }
}

impl From<Vec<i64>> for IntPoly {
    fn from(v: Vec<i64>) -> Self {
        IntPoly::from_i64(v)
    }
}

impl From<&[i64]> for IntPoly {
    fn from(v: &[i64]) -> Self {
        IntPoly::from_i64(v.to_vec())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let coeffs = self.to_bigints();
        let mut first = true;
        for (i, c) in coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.magnitude();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{mag}x")?,
                _ if unit => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[i64]) -> IntPoly {
        IntPoly::from(v)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p(&[-1, 1]) + &p(&[1, 1]), p(&[0, 2]));
        let f = p(&[1, -1, 1]);
        assert_eq!(&f + &IntPoly::zero(), f);
        assert_eq!(&f + &p(&[-1, 1]), p(&[0, 0, 1]));
        assert!((&f - &f).is_zero());
    }

    #[test]
    fn canonical_zero_is_empty() {
        assert_eq!(p(&[0, 0, 0]), IntPoly::zero());
        assert_eq!(IntPoly::zero().degree(), None);
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p(&[-1, 1]).mul(&p(&[1, 1])), p(&[-1, 0, 1]));
        let phi5 = p(&[1, 1, 1, 1, 1]);
        assert_eq!(phi5.mul(&p(&[-1, 1])), IntPoly::x_pow_minus_one(5));
        let phi9 = p(&[1, 0, 0, 1, 0, 0, 1]);
        let prod = p(&[1, 1, 1]).mul(&p(&[-1, 1])).mul(&phi9);
        assert_eq!(prod, IntPoly::x_pow_minus_one(9));
    }

    #[test]
    fn binomial_kernels_match_generic_ops() {
        let f = p(&[2, -3, 0, 5, 1, -1, 7]);
        for e in [1, 2, 3, 6, 7, 11] {
            let mut buf = f.as_i64().unwrap().to_vec();
            mul_binomial_in_place(&mut buf, e);
            let prod = f.mul_binomial(e);
            assert_eq!(IntPoly::from_i64(buf.clone()), prod);
            assert!(div_binomial_in_place(&mut buf, e));
            assert_eq!(IntPoly::from_i64(buf), f);
        }
        let mut buf = vec![1i64, 0, 1];
        assert!(!div_binomial_in_place(&mut buf, 1));
    }

    #[test]
    fn div_exact_examples() {
        assert_eq!(IntPoly::x_pow_minus_one(2).div_exact(&p(&[-1, 1])).unwrap(), p(&[1, 1]));
        let phi6 = IntPoly::x_pow_minus_one(6)
            .mul(&p(&[-1, 1]))
            .div_exact(&IntPoly::x_pow_minus_one(2))
            .unwrap()
            .div_exact(&IntPoly::x_pow_minus_one(3))
            .unwrap();
        assert_eq!(phi6, p(&[1, -1, 1]));
        assert!(matches!(p(&[1, 0, 1]).div_exact(&p(&[-1, 1])), Err(Error::NonExactDivision)));
        assert!(matches!(p(&[1]).div_exact(&IntPoly::zero()), Err(Error::DivisionByZero)));
        assert!(matches!(p(&[1, 1]).div_exact(&p(&[1, 1, 1])), Err(Error::NonExactDivision)));
        // Non-monic exact and non-exact division.
        assert_eq!(p(&[2, 4]).div_exact(&p(&[1, 2])).unwrap(), p(&[2]));
        assert!(p(&[1, 4]).div_exact(&p(&[1, 2])).is_err());
    }

    #[test]
    fn height_and_norm() {
        assert_eq!(p(&[1, -1, 1]).height(), BigUint::from(1u32));
        assert_eq!(p(&[1, -1, 1]).norm1(), BigUint::from(3u32));
        assert_eq!(IntPoly::x_pow_minus_one(5).norm1(), BigUint::from(2u32));
        assert_eq!(IntPoly::x_pow_minus_one(15).height(), BigUint::from(1u32));
        assert_eq!(IntPoly::zero().height(), BigUint::zero());
        assert_eq!(p(&[1, 1, 1, 1, 1, 1, 1]).norm1(), BigUint::from(7u32));
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(p(&[1, 1]).substitute_power(3), p(&[1, 0, 0, 1]));
        let f = p(&[2, -3, 0, 5]);
        assert_eq!(f.substitute_power(1), f);
        let phi5 = p(&[1, 1, 1, 1, 1]);
        let mut phi25 = vec![0; 21];
        for i in 0..5 {
            phi25[5 * i] = 1;
        }
        assert_eq!(phi5.substitute_power(5), p(&phi25));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -1, 1]).to_string(), "x^2 - x + 1");
        assert_eq!(p(&[-1, 0, 3]).to_string(), "3x^2 - 1");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    #[test]
    fn promotes_instead_of_wrapping() {
        let big = p(&[i64::MAX, 1]);
        let sq = big.mul(&big);
        assert!(!sq.is_small());
        let expected = BigInt::from(i64::MAX) * BigInt::from(i64::MAX);
        assert_eq!(sq.coeff(0), expected);
        assert_eq!(sq.div_exact(&big).unwrap(), big);
        let s = &big + &big;
        assert_eq!(s.coeff(0), BigInt::from(i64::MAX) * 2);
        // i64::MIN is held in the big representation and demotes on negation back.
        let m = IntPoly::from_i64(vec![i64::MIN]);
        assert!(!m.is_small());
        assert_eq!(m.height(), BigUint::from(1u128 << 63));
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let a: Vec<i64> = (0..1500).map(|i| (i * 7919 % 13) - 6).collect();
        let b: Vec<i64> = (0..1100).map(|i| (i * 104729 % 11) - 5).collect();
        let fast = IntPoly::from(a.clone()).mul_with(&IntPoly::from(b.clone()), &MulConfig { karatsuba_threshold: 16 });
        let slow = IntPoly::from_bigints(mul_big(
            &a.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
            &b.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
        ));
        assert_eq!(fast, slow);
    }

    fn small_poly(max_len: usize, max_coeff: i64) -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-max_coeff..=max_coeff, 0..max_len).prop_map(IntPoly::from)
    }

    proptest! {
        #[test]
        fn div_exact_inverts_mul(f in small_poly(40, 50), g in small_poly(30, 50)) {
            prop_assume!(!g.is_zero());
            prop_assert_eq!(f.mul(&g).div_exact(&g).unwrap(), f);
        }

        #[test]
        fn mul_paths_agree(f in small_poly(120, 9), g in small_poly(120, 9), thr in 1usize..40) {
            let a = f.mul_with(&g, &MulConfig { karatsuba_threshold: thr });
            let b = IntPoly::from_bigints(if f.is_zero() || g.is_zero() { vec![] } else { mul_big(&f.to_bigints(), &g.to_bigints()) });
            prop_assert_eq!(a, b);
        }

        #[test]
        fn substitution_preserves_height_and_norm(f in small_poly(30, 100), k in 1usize..7) {
            let s = f.substitute_power(k);
            prop_assert_eq!(s.height(), f.height());
            prop_assert_eq!(s.norm1(), f.norm1());
        }

        #[test]
        fn norm_and_height_bounds(f in small_poly(25, 20), g in small_poly(25, 20)) {
            let fg = f.mul(&g);
            prop_assert!(fg.height() <= f.norm1() * g.height());
            prop_assert!(fg.norm1() <= f.norm1() * g.norm1());
        }
    }
}
