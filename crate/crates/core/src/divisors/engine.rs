//! Maximum height over subset products of cyclotomic factors.
//!
//! A factor `Φ_d` with `s | d/rad(d)` satisfies `Φ_d(x) = Φ_{d/s}(x^s)`. Call
//! those factors high and the rest low. Every subset product then splits as
//! `P(x)·Q(x^s)` with `P` the low part. Writing `P = Σ_{r<s} x^r R_r(x^s)`, the
//! coefficients of `P·Q(x^s)` in residue class `r` are exactly those of
//! `R_r·Q`, so `H(P·Q(x^s)) = max_r H(R_r·Q)`.
//!
//! The engine tabulates the distinct `R_r` over all low subsets once, walks the
//! high subsets depth-first in the stride-`s` variable, and multiplies each
//! short `R` against the short `Q`. With `s = 1` every factor is high and this
//! is the plain depth-first search with a carried product.
//!
//! Arithmetic wraps in `i64` or `i128`. That is exact modulo the word size, so
//! results are exact once every final coefficient is known to fit; the
//! product of the 1-norms of all factors bounds every quantity computed here
//! and picks the word.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::cyclotomic::{self, factorize};
use crate::error::{Error, Result};
use crate::intpoly::{self, IntPoly, Word};

/// Largest number of factors a subset mask can address.
pub const MAX_FACTORS: usize = 64;

/// How the subset maximum is searched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Pick a stride by a cost model.
    #[default]
    Auto,
    /// Depth-first search over all factors with a carried product.
    Plain,
    /// Depth-first search with arbitrary-precision [`IntPoly`] products.
    Generic,
}

/// Result of a subset search: the maximum height and the lexicographically
/// first subset attaining it, as a bit mask over the factor list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetMax {
    pub height: u64,
    pub mask: u64,
}

/// `a` precedes `b` in the order of ascending-sorted selections, where a proper
/// prefix precedes its extensions (depth-first preorder).
pub fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let i = diff.trailing_zeros();
    let above = if i == 63 { 0 } else { !0u64 << (i + 1) };
    if a >> i & 1 == 1 {
        b & above != 0
    } else {
        a & above == 0
    }
}

struct Clock {
    start: Instant,
    budget: Option<Duration>,
}

impl Clock {
    fn new(budget: Option<Duration>) -> Self {
        Clock { start: Instant::now(), budget }
    }

    fn check(&self) -> Result<()> {
        match self.budget {
            Some(b) if self.start.elapsed() > b => Err(Error::BudgetExceeded(b)),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
struct Chain {
    up: Vec<usize>,
    down: Vec<usize>,
}

impl Chain {
    fn of(d: u64) -> Chain {
        let (up, down) = cyclotomic::binomial_chain(d);
        Chain { up, down }
    }

    fn apply<W: Word>(&self, buf: &mut Vec<W>) {
        for &e in &self.up {
            intpoly::mul_binomial_in_place(buf, e);
        }
        for &e in &self.down {
            let exact = intpoly::div_binomial_in_place(buf, e);
            debug_assert!(exact, "cyclotomic binomial chain is exact");
        }
    }
}

fn totient(d: u64) -> usize {
    factorize(d).totient() as usize
}

/// Stride candidates: every `s > 1` dividing some `d / rad(d)`.
fn stride_candidates(factors: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for &d in factors {
        let fi = factorize(d);
        let m = d / fi.radical();
        for s in factorize(m).divisors() {
            if s > 1 && !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out.sort_unstable();
    out
}

fn is_high(d: u64, s: u64) -> bool {
    (d / factorize(d).radical()).is_multiple_of(s)
}

/// Machine word able to hold every coefficient the search produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Width {
    I64,
    I128,
    Big,
}

/// Chooses the word from `∏ T(Φ_d)`, which bounds the 1-norm (hence the
/// height) of every subset product.
pub(crate) fn width_for(factors: &[u64]) -> Width {
    let mut bound: u128 = 1;
    for &d in factors {
        let t = cyclotomic::phi(factorize(d).radical()).norm1();
        let Some(t) = t.to_u128() else { return Width::Big };
        bound = bound.saturating_mul(t);
        if bound > i128::MAX as u128 {
            return Width::Big;
        }
    }
    if bound <= i64::MAX as u128 {
        Width::I64
    } else {
        Width::I128
    }
}

fn height_of<W: Word>(v: &[W]) -> u128 {
    v.iter().map(|c| c.abs_u128()).max().unwrap_or(0)
}

/// Residue polynomials `R_r` of `p` for stride `s`, canonicalized so that
/// `H(R·Q)` is unchanged: zeros stripped, leading sign positive, and the
/// lexicographically smaller of `R` and its reversal. The reversal is allowed
/// because every product of cyclotomic polynomials is palindromic up to sign.
fn residues<W: Word>(p: &[W], s: usize, mut emit: impl FnMut(Vec<W>)) {
    for r in 0..s.min(p.len()) {
        let raw: Vec<W> = p[r..].iter().step_by(s).copied().collect();
        if let Some(c) = canonical(&raw) {
            emit(c);
        }
    }
}

fn canonical<W: Word>(raw: &[W]) -> Option<Vec<W>> {
    let first = raw.iter().position(|&c| c != W::ZERO)?;
    let last = raw.iter().rposition(|&c| c != W::ZERO)?;
    let core = &raw[first..=last];
    let sign = |v: &mut Vec<W>| {
        if v[0].is_negative() {
            v.iter_mut().for_each(|c| *c = c.wneg());
        }
    };
    let mut fwd = core.to_vec();
    sign(&mut fwd);
    let mut rev: Vec<W> = core.iter().rev().copied().collect();
    sign(&mut rev);
    Some(if rev < fwd { rev } else { fwd })
}

/// `H(r·q)` using `scratch` as the output buffer.
fn conv_height<W: Word>(r: &[W], q: &[W], scratch: &mut Vec<W>) -> u128 {
    if r.len() == 1 {
        return height_of(q).wrapping_mul(r[0].abs_u128());
    }
    scratch.clear();
    scratch.resize(q.len() + r.len() - 1, W::ZERO);
    let neg_one = W::ONE.wneg();
    for (t, &c) in r.iter().enumerate() {
        let out = &mut scratch[t..t + q.len()];
        if c == W::ZERO {
            continue;
        } else if c == W::ONE {
            out.iter_mut().zip(q).for_each(|(o, &x)| *o = o.wadd(x));
        } else if c == neg_one {
            out.iter_mut().zip(q).for_each(|(o, &x)| *o = o.wsub(x));
        } else {
            out.iter_mut().zip(q).for_each(|(o, &x)| *o = o.wadd(c.wmul(x)));
        }
    }
    height_of(scratch)
}

/// Distinct residue polynomials over all low subsets, and which ones each
/// low subset produces.
struct LowTable<W> {
    masks: Vec<u64>,
    ids: Vec<Vec<u32>>,
    polys: Vec<Vec<W>>,
    norms: Vec<u128>,
}

impl<W: Word> LowTable<W> {
    fn work(&self) -> usize {
        self.polys.iter().map(|r| r.iter().filter(|&&c| c != W::ZERO).count()).sum()
    }
}

fn build_low_table<W: Word>(factors: &[u64], low: &[usize], s: u64, clock: &Clock) -> Result<LowTable<W>> {
    struct Walk<'a, W> {
        low: &'a [usize],
        chains: Vec<Chain>,
        s: usize,
        table: LowTable<W>,
        index: HashMap<Vec<W>, u32>,
        bufs: Vec<Vec<W>>,
        clock: &'a Clock,
    }

    impl<W: Word> Walk<'_, W> {
        fn record(&mut self, depth: usize, mask: u64) {
            let mut ids = Vec::new();
            let (table, index) = (&mut self.table, &mut self.index);
            residues(&self.bufs[depth], self.s, |r| {
                let next = table.polys.len() as u32;
                let id = *index.entry(r).or_insert_with_key(|r| {
                    table.norms.push(r.iter().map(|c| c.abs_u128()).sum());
                    table.polys.push(r.clone());
                    next
                });
                ids.push(id);
            });
            ids.sort_unstable();
            ids.dedup();
            table.masks.push(mask);
            table.ids.push(ids);
        }

        fn visit(&mut self, depth: usize, start: usize, mask: u64) -> Result<()> {
            self.clock.check()?;
            self.record(depth, mask);
            for j in start..self.low.len() {
                let (head, tail) = self.bufs.split_at_mut(depth + 1);
                let child = &mut tail[0];
                child.clear();
                child.extend_from_slice(&head[depth]);
                self.chains[j].apply(child);
                self.visit(depth + 1, j + 1, mask | 1 << self.low[j])?;
            }
            Ok(())
        }
    }

    let mut bufs = vec![Vec::new(); low.len() + 1];
    bufs[0] = vec![W::ONE];
    let mut walk = Walk {
        low,
        chains: low.iter().map(|&i| Chain::of(factors[i])).collect(),
        s: s as usize,
        table: LowTable { masks: Vec::new(), ids: Vec::new(), polys: Vec::new(), norms: Vec::new() },
        index: HashMap::new(),
        bufs,
        clock,
    };
    walk.visit(0, 0, 0)?;
    Ok(walk.table)
}

struct Split {
    s: u64,
    high: Vec<usize>,
    low: Vec<usize>,
}

impl Split {
    fn new(factors: &[u64], s: u64) -> Split {
        let (high, low) = (0..factors.len()).partition(|&i| s == 1 || is_high(factors[i], s));
        Split { s, high, low }
    }

    fn degrees(&self, factors: &[u64]) -> (usize, usize) {
        let low: usize = self.low.iter().map(|&i| totient(factors[i])).sum();
        let high: usize = self.high.iter().map(|&i| totient(factors[i]) / self.s as usize).sum();
        (low, high)
    }
}

/// Work spent on low tables while choosing a stride.
const PLANNING_WORK: f64 = 3e7;

fn choose_split<W: Word>(factors: &[u64], clock: &Clock) -> Result<(Split, LowTable<W>)> {
    let plain = Split::new(factors, 1);
    let (_, deg) = plain.degrees(factors);
    let mut best_cost = (2f64).powi(factors.len() as i32) * (deg as f64 + 1.0) * 2.0;
    let mut best = (plain, None);

    let mut options: Vec<(f64, Split)> = stride_candidates(factors)
        .into_iter()
        .map(|s| {
            let split = Split::new(factors, s);
            let (deg_low, _) = split.degrees(factors);
            let low_work = (2f64).powi(split.low.len() as i32) * (deg_low as f64 + 1.0);
            (low_work, split)
        })
        .collect();
    options.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut spent = 0.0;
    for (low_work, split) in options {
        if spent + low_work > PLANNING_WORK {
            break;
        }
        spent += low_work;
        let table = build_low_table(factors, &split.low, split.s, clock)?;
        let (_, deg_high) = split.degrees(factors);
        let per_node = (deg_high as f64 + 1.0) * (2.0 + table.work() as f64);
        let cost = low_work + (2f64).powi(split.high.len() as i32) * per_node;
        if cost < best_cost {
            best_cost = cost;
            best = (split, Some(table));
        }
    }
    let (split, table) = best;
    let table = match table {
        Some(t) => t,
        None => build_low_table(factors, &split.low, split.s, clock)?,
    };
    Ok((split, table))
}

/// High subsets evaluated in full before the main walk.
const SEED_NODES: usize = 16;

struct HighWalk<'a, W> {
    high: &'a [usize],
    chains: Vec<Chain>,
    table: &'a LowTable<W>,
    bufs: Vec<Vec<W>>,
    heights: Vec<u128>,
    scratch: Vec<W>,
    best: u128,
    witness: Option<u64>,
    clock: &'a Clock,
}

impl<W: Word> HighWalk<'_, W> {
    /// `(H(Q), local mask)` for every high subset.
    fn survey(&mut self, depth: usize, start: usize, local: u64, out: &mut Vec<(u128, u64)>) -> Result<()> {
        self.clock.check()?;
        out.push((height_of(&self.bufs[depth]), local));
        for j in start..self.high.len() {
            let (head, tail) = self.bufs.split_at_mut(depth + 1);
            let child = &mut tail[0];
            child.clear();
            child.extend_from_slice(&head[depth]);
            self.chains[j].apply(child);
            self.survey(depth + 1, j + 1, local | 1 << j, out)?;
        }
        Ok(())
    }

    /// Starts `best` at a value some pair attains, taken from the high
    /// subsets of largest height, so the pruning bound bites from the start.
    fn seed(&mut self) -> Result<()> {
        let mut nodes = Vec::new();
        self.survey(0, 0, 0, &mut nodes)?;
        nodes.sort_unstable_by_key(|n| std::cmp::Reverse(n.0));
        for &(_, local) in nodes.iter().take(SEED_NODES) {
            let mut q = vec![W::ONE];
            for j in (0..self.high.len()).filter(|&j| local >> j & 1 == 1) {
                self.chains[j].apply(&mut q);
            }
            for r in &self.table.polys {
                self.best = self.best.max(conv_height(r, &q, &mut self.scratch));
            }
        }
        Ok(())
    }

    fn evaluate(&mut self, depth: usize, mask: u64) {
        let q = &self.bufs[depth];
        let hq = height_of(q);
        let mut top = 0;
        for (id, r) in self.table.polys.iter().enumerate() {
            // H(R·Q) <= T(R)·H(Q); pairs that cannot reach `best` are skipped
            let h = if self.table.norms[id].saturating_mul(hq) < self.best {
                0
            } else {
                conv_height(r, q, &mut self.scratch)
            };
            self.heights[id] = h;
            top = top.max(h);
        }
        if top < self.best {
            return;
        }
        if top > self.best {
            self.best = top;
            self.witness = None;
        }
        for (lm, ids) in self.table.masks.iter().zip(&self.table.ids) {
            if ids.iter().any(|&id| self.heights[id as usize] == top) {
                let cand = lm | mask;
                if self.witness.is_none_or(|w| lex_less(cand, w)) {
                    self.witness = Some(cand);
                }
            }
        }
    }

    fn visit(&mut self, depth: usize, start: usize, mask: u64) -> Result<()> {
        self.clock.check()?;
        self.evaluate(depth, mask);
        for j in start..self.high.len() {
            let (head, tail) = self.bufs.split_at_mut(depth + 1);
            let child = &mut tail[0];
            child.clear();
            child.extend_from_slice(&head[depth]);
            self.chains[j].apply(child);
            self.visit(depth + 1, j + 1, mask | 1 << self.high[j])?;
        }
        Ok(())
    }
}

fn run_split<W: Word>(factors: &[u64], split: &Split, table: &LowTable<W>, clock: &Clock) -> Result<SubsetMax> {
    let mut bufs = vec![Vec::new(); split.high.len() + 1];
    bufs[0] = vec![W::ONE];
    let mut walk = HighWalk {
        high: &split.high,
        chains: split.high.iter().map(|&i| Chain::of(factors[i] / split.s)).collect(),
        table,
        bufs,
        heights: vec![0; table.polys.len()],
        scratch: Vec::new(),
        best: 0,
        witness: None,
        clock,
    };
    walk.seed()?;
    walk.visit(0, 0, 0)?;
    Ok(SubsetMax {
        height: u64::try_from(walk.best).map_err(|_| Error::HeightOverflow)?,
        mask: walk.witness.expect("the empty selection is always a candidate"),
    })
}

fn run_generic(factors: &[u64], clock: &Clock) -> Result<SubsetMax> {
    struct Walk<'a> {
        factors: &'a [u64],
        best: BigUint,
        mask: u64,
        clock: &'a Clock,
    }
    impl Walk<'_> {
        fn visit(&mut self, prod: &IntPoly, start: usize, mask: u64) -> Result<()> {
            self.clock.check()?;
            let h = prod.height();
            if h > self.best {
                self.best = h;
                self.mask = mask;
            }
            for j in start..self.factors.len() {
                let child = cyclotomic::mul_cyclotomic(prod, self.factors[j]);
                self.visit(&child, j + 1, mask | 1 << j)?;
            }
            Ok(())
        }
    }
    let mut walk = Walk { factors, best: BigUint::one(), mask: 0, clock };
    walk.visit(&IntPoly::one(), 0, 0)?;
    let height = walk.best.to_u64().ok_or(Error::HeightOverflow)?;
    Ok(SubsetMax { height, mask: walk.mask })
}

fn run_words<W: Word>(factors: &[u64], strategy: Strategy, clock: &Clock) -> Result<SubsetMax> {
    if strategy == Strategy::Plain {
        let split = Split::new(factors, 1);
        let table = build_low_table::<W>(factors, &split.low, 1, clock)?;
        return run_split(factors, &split, &table, clock);
    }
    let (split, table) = choose_split::<W>(factors, clock)?;
    run_split(factors, &split, &table, clock)
}

fn search(factors: &[u64], strategy: Strategy, width: Width, clock: &Clock) -> Result<SubsetMax> {
    match (strategy, width) {
        (Strategy::Generic, _) | (_, Width::Big) => run_generic(factors, clock),
        (_, Width::I64) => run_words::<i64>(factors, strategy, clock),
        (_, Width::I128) => run_words::<i128>(factors, strategy, clock),
    }
}

/// Maximum height over all subset products of `Φ_d`, `d ∈ factors`, with the
/// first maximal subset in preorder of the given factor order.
pub fn max_height_over_subsets(factors: &[u64], strategy: Strategy, budget: Option<Duration>) -> Result<SubsetMax> {
    if factors.len() > MAX_FACTORS {
        return Err(Error::TooManyDivisors { count: factors.len(), limit: MAX_FACTORS });
    }
    if let Some(&bad) = factors.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidInput(format!("cyclotomic index must be positive, got {bad}")));
    }
    search(factors, strategy, width_for(factors), &Clock::new(budget))
}

fn product_height_words<W: Word>(factors: &[u64], split: &Split) -> u128 {
    let mut p = vec![W::ONE];
    for &i in &split.low {
        Chain::of(factors[i]).apply(&mut p);
    }
    let mut q = vec![W::ONE];
    for &i in &split.high {
        Chain::of(factors[i] / split.s).apply(&mut q);
    }
    let mut distinct: Vec<Vec<W>> = Vec::new();
    residues(&p, split.s as usize, |r| {
        if !distinct.contains(&r) {
            distinct.push(r);
        }
    });
    let mut scratch = Vec::new();
    distinct.iter().map(|r| conv_height(r, &q, &mut scratch)).max().unwrap_or(0)
}

/// Height of `∏ Φ_d` over `factors` (repeats allowed) without materializing
/// anything longer than `cap + 1` coefficients.
pub fn product_height(factors: &[u64], cap: u64) -> Result<u64> {
    let total: u64 = factors.iter().map(|&d| totient(d) as u64).sum();
    let width = width_for(factors);
    if width == Width::Big {
        if total > cap {
            return Err(Error::DegreeCapExceeded { degree: total, cap });
        }
        return cyclotomic::cyclotomic_product(factors).height().to_u64().ok_or(Error::HeightOverflow);
    }
    let mut best: Option<(f64, Split)> = None;
    for s in std::iter::once(1).chain(stride_candidates(factors)) {
        let split = Split::new(factors, s);
        let (deg_low, deg_high) = split.degrees(factors);
        if deg_low.max(deg_high + deg_low / s as usize) as u64 > cap {
            continue;
        }
        let cost = deg_low as f64 + (deg_high as f64 + 1.0) * (deg_low as f64 + 2.0);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, split));
        }
    }
    let Some((_, split)) = best else {
        return Err(Error::DegreeCapExceeded { degree: total, cap });
    };
    let h = match width {
        Width::I64 => product_height_words::<i64>(factors, &split),
        _ => product_height_words::<i128>(factors, &split),
    };
    u64::try_from(h).map_err(|_| Error::HeightOverflow)
}
