//! `B(5q³)`, `B(7q³)` and `B(7q⁴)` by residue of `q`, with the matching
//! invariance check between two primes of the same class.

use cyclo_core::cyclotomic::primes_in;
use cyclo_core::{b_formula, residue_invariance_check};

fn main() {
    for (p, b) in [(5, 3), (7, 3), (7, 4)] {
        print!("B({p}q^{b}):");
        for q in primes_in(p + 1, 60) {
            let v = b_formula(p, q, b).unwrap().unwrap().b_value;
            print!(" {q}:{v}");
        }
        println!();
    }
    let r = residue_invariance_check(5, 7, 17, 4).unwrap();
    println!("B(5·7^4) = {}, B(5·17^4) = {}, sigma identity {}", r.left.b_value, r.right.b_value, r.sigma_identity);
}
