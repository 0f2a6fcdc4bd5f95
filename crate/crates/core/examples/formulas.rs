//! Closed forms for `B(p q^b)` next to exhaustive search.

use cyclo_core::divisors::DEFAULT_DEGREE_CAP;
use cyclo_core::{b_formula, enumerate_b, h_of_product};

fn main() {
    let cases = [(3, 5, 3), (5, 3, 3), (7, 3, 3), (29, 3, 3), (5, 7, 4), (5, 7, 5), (2, 7, 5), (3, 11, 4)];
    for (p, q, b) in cases {
        let f = b_formula(p, q, b).unwrap().expect("closed form exists");
        let n = p * q.pow(b);
        let brute = enumerate_b(n, DEFAULT_DEGREE_CAP).unwrap();
        println!(
            "B({p}·{q}^{b}) = {:>3}  branch {:<16} brute {:>3} ({:?})",
            f.b_value,
            f.branch.unwrap().label(),
            brute.b_value,
            brute.elapsed
        );
        assert_eq!(f.b_value, brute.b_value);
    }
    // The b = 4 value is driven by this product for (7, 17).
    println!("H(Φ_119 Φ_2023 Φ_4913) = {}", h_of_product(&[119, 2023, 4913]).unwrap());
}
