//! `B(n)` by exhaustive search, with the divisor attaining it.
//!
//! `cargo run --release --example brute_force_b -- 135`

use cyclo_core::divisors::DEFAULT_DEGREE_CAP;
use cyclo_core::{enumerate_b, reduced_h_b};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(135);
    let rec = enumerate_b(n, DEFAULT_DEGREE_CAP).expect("n within the cap");
    let w = rec.witness.as_ref().unwrap();
    println!("B({n}) = {} in {:?}", rec.b_value, rec.elapsed);
    println!("witness: product of Φ_d for d in {w} (degree {})", w.degree());
    assert_eq!(w.height().unwrap(), rec.b_value);

    // For p < q the problem shrinks to H_b over divisors of p q^(b-1).
    let (h, sel) = reduced_h_b(3, 5, 3).unwrap();
    println!("H_3 for (3, 5) = {h}, attained by {sel}");
}
