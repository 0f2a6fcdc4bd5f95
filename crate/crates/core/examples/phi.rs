//! Cyclotomic polynomials, their heights, and the first `n` with `A(n) > 1`.
//!
//! `cargo run --example phi -- 105`

use cyclo_core::{a_height, factorize, phi};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(105);
    let f = factorize(n);
    println!("n = {n}: radical {}, totient {}, mobius {}", f.radical(), f.totient(), f.mobius());
    println!("Φ_{n}(x) = {}", phi(n));
    println!("A({n}) = {}", a_height(n));

    // Heights only grow once n has three odd prime factors.
    let first = (1..).find(|&m| a_height(m) > 1u32.into()).unwrap();
    println!("smallest n with A(n) > 1: {first}");
}
