//! Cyclotomic polynomials, the integer bookkeeping they need, and the direct
//! ±1 construction of `Φ_pq`.
//!
//! `Φ_n` is computed by reducing to the squarefree radical `r = rad(n)` with
//! `Φ_n(x) = Φ_r(x^(n/r))`, and obtaining `Φ_r` from `x^r - 1` by exact
//! division by `Φ_d` for each proper divisor `d | r` in ascending order.
//! Results are memoized in a [`CycloCache`].

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::intpoly::{self, IntPoly};

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in the inclusive range `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredIndex {
    n: u64,
    factors: Vec<(u64, u32)>,
}

/// Complete factorization of `n >= 1` by trial division. `1` has no factors.
pub fn factorize(n: u64) -> FactoredIndex {
    FactoredIndex::new(n)
}

impl FactoredIndex {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "factorize requires n >= 1");
        let mut factors = Vec::new();
        let mut m = n;
        let mut d = 2u64;
        while d.saturating_mul(d) <= m {
            if m.is_multiple_of(d) {
                let mut e = 0;
                while m.is_multiple_of(d) {
                    m /= d;
                    e += 1;
                }
                factors.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m, 1));
        }
        FactoredIndex { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Product of the distinct prime factors.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// Euler's totient, which is also `deg Φ_n`.
    pub fn totient(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
    }

    pub fn mobius(&self) -> i64 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// True for `n = p^l`, including `n = 1`.
    pub fn is_prime_power(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn num_divisors(&self) -> usize {
        self.factors.iter().map(|&(_, e)| e as usize + 1).product()
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
            for &d in &divs {
                let mut pk = 1;
                for _ in 0..=e {
                    next.push(d * pk);
                    pk *= p;
                }
            }
            divs = next;
        }
        divs.sort_unstable();
        divs
    }
}

/// The unique `(ρ, σ)` with `ρp + σq = (p-1)(q-1)`, `0 <= σ <= p-1`, `0 <= ρ <= q-1`.
///
/// `σ = 0` is allowed; it occurs exactly when `q ≡ 1 (mod p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SigmaRho {
    pub p: u64,
    pub q: u64,
    pub sigma: u64,
    pub rho: u64,
}

impl SigmaRho {
    /// `max{σ+1, p-(σ+1)}`.
    pub fn spread(&self) -> u64 {
        (self.sigma + 1).max(self.p - (self.sigma + 1))
    }
}

pub(crate) fn check_distinct_primes(p: u64, q: u64) -> Result<()> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::InvalidInput(format!("{p} and {q} must both be prime")));
    }
    if p == q {
        return Err(Error::InvalidInput(format!("primes must be distinct, got p = q = {p}")));
    }
    Ok(())
}

pub fn sigma_rho(p: u64, q: u64) -> Result<SigmaRho> {
    check_distinct_primes(p, q)?;
    let target = (p - 1) * (q - 1);
    let sigma = (0..p)
        .find(|&s| s * q <= target && (target - s * q).is_multiple_of(p))
        .expect("(p-1)(q-1) is representable as a nonnegative combination of p and q");
    let rho = (target - sigma * q) / p;
    Ok(SigmaRho { p, q, sigma, rho })
}

/// Memo table for `Φ_n`. Readers run concurrently; insertion is serialized.
#[derive(Debug, Default)]
pub struct CycloCache {
    map: RwLock<HashMap<u64, Arc<IntPoly>>>,
}

impl CycloCache {
    pub fn new() -> Self {
        CycloCache::default()
    }

    /// Process-wide cache used by the free functions of this crate.
    pub fn global() -> &'static CycloCache {
        static GLOBAL: OnceLock<CycloCache> = OnceLock::new();
        GLOBAL.get_or_init(CycloCache::new)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self, n: u64) -> Arc<IntPoly> {
        assert!(n >= 1, "cyclotomic index must be positive");
        if let Some(hit) = self.map.read().expect("cache lock poisoned").get(&n) {
            return Arc::clone(hit);
        }
        let computed = Arc::new(self.compute(n));
        let mut map = self.map.write().expect("cache lock poisoned");
        Arc::clone(map.entry(n).or_insert(computed))
    }

    fn compute(&self, n: u64) -> IntPoly {
        if n == 1 {
            return IntPoly::from_i64(vec![-1, 1]);
        }
        let fi = factorize(n);
        let r = fi.radical();
        if r < n {
            return self.phi(r).substitute_power((n / r) as usize);
        }
        let mut f = IntPoly::x_pow_minus_one(r as usize);
        for d in fi.divisors() {
            if d == r {
                break;
            }
            f = f.div_exact(&self.phi(d)).expect("Φ_d divides x^n - 1 for every d | n");
        }
        f
    }
}

/// `Φ_n` from the given cache.
pub fn phi_n(n: u64, cache: &CycloCache) -> Arc<IntPoly> {
    cache.phi(n)
}

/// `Φ_n` from the process-wide cache.
pub fn phi(n: u64) -> Arc<IntPoly> {
    CycloCache::global().phi(n)
}

/// `A(n)`, the height of `Φ_n`.
pub fn a_height(n: u64) -> BigUint {
    phi(n).height()
}

/// `Φ_pq` written down directly from `(ρ, σ)`: coefficient `+1` at `ip + jq`
/// for `i ∈ [0, ρ]`, `j ∈ [0, σ]`; coefficient `-1` at `ip + jq - pq` for
/// `i ∈ [ρ+1, q-1]`, `j ∈ [σ+1, p-1]`; zero elsewhere.
pub fn phi_pq_lam_leung(p: u64, q: u64) -> Result<IntPoly> {
    let SigmaRho { sigma, rho, .. } = sigma_rho(p, q)?;
    let degree = ((p - 1) * (q - 1)) as usize;
    let mut coeffs = vec![0i64; degree + 1];
    for i in 0..=rho {
        for j in 0..=sigma {
            coeffs[(i * p + j * q) as usize] = 1;
        }
    }
    for i in rho + 1..q {
        for j in sigma + 1..p {
            coeffs[(i * p + j * q - p * q) as usize] = -1;
        }
    }
    Ok(IntPoly::from_i64(coeffs))
}

/// Exponents `e` of the binomials in `Φ_d(x) = ∏_{e | d} (x^e - 1)^μ(d/e)`,
/// split by the sign of `μ(d/e)`.
pub(crate) fn binomial_chain(d: u64) -> (Vec<usize>, Vec<usize>) {
    let fi = factorize(d);
    let r = fi.radical();
    let m = d / r;
    let (mut up, mut down) = (Vec::new(), Vec::new());
    for e in factorize(r).divisors() {
        match factorize(r / e).mobius() {
            1 => up.push((m * e) as usize),
            -1 => down.push((m * e) as usize),
            _ => {}
        }
    }
    (up, down)
}

/// `Φ_n` as the binomial quotient `∏_{d | n} (x^d - 1)^μ(n/d)`.
///
/// Independent of the division chain behind [`phi`]; used to cross-check it.
pub fn phi_via_mobius(n: u64) -> IntPoly {
    let (up, down) = binomial_chain(n);
    let mut f = IntPoly::one();
    for e in up {
        f = f.mul_binomial(e);
    }
    for e in down {
        f = f.div_exact(&IntPoly::x_pow_minus_one(e)).expect("binomial quotient is a polynomial");
    }
    f
}

/// `f * Φ_d`.
///
/// Uses either a sparse product with the cached `Φ_d` or the in-place
/// binomial chain, whichever touches fewer coefficients.
pub fn mul_cyclotomic(f: &IntPoly, d: u64) -> IntPoly {
    let phi_d = phi(d);
    if let (Some(fv), Some(pv)) = (f.as_i64(), phi_d.as_i64()) {
        let bound = intpoly::small_height(fv) as u128 * phi_d.norm1().to_u128().unwrap_or(u128::MAX);
        if bound <= i64::MAX as u128 && !fv.is_empty() {
            let (up, down) = binomial_chain(d);
            let nnz = phi_d.nonzero_count();
            if up.len() + down.len() < nnz {
                let mut buf = fv.to_vec();
                for &e in &up {
                    intpoly::mul_binomial_in_place(&mut buf, e);
                }
                for &e in &down {
                    let exact = intpoly::div_binomial_in_place(&mut buf, e);
                    debug_assert!(exact);
                }
                return IntPoly::from_i64(buf);
            }
            let _ = pv;
        }
    }
    f.mul(&phi_d)
}

/// `∏ Φ_{n_i}` over the given indices (repeats allowed).
pub fn cyclotomic_product(indices: &[u64]) -> IntPoly {
    indices.iter().fold(IntPoly::one(), |acc, &d| mul_cyclotomic(&acc, d))
}
