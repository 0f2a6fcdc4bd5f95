//! Is `B(p q^b)` constant on residue classes `±q mod p`? Prints an observation.
//!
//! `cargo run --release --example conjecture -- 7 4`

use cyclo_core::conjecture_explorer;
use cyclo_core::cyclotomic::primes_in;

fn main() {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().expect("integer argument"));
    let p = args.next().unwrap_or(7);
    let b = args.next().unwrap_or(4) as u32;
    let qs = primes_in(p + 1, 120);
    print!("{}", conjecture_explorer(p, b, &qs).unwrap().render_text());
}
