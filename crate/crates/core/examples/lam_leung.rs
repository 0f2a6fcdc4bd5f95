//! `Φ_pq` from the `(ρ, σ)` decomposition, checked against the general construction.

use cyclo_core::{phi, phi_pq_lam_leung, sigma_rho};

fn main() {
    for (p, q) in [(3, 5), (5, 7), (7, 11), (11, 13)] {
        let sr = sigma_rho(p, q).unwrap();
        let f = phi_pq_lam_leung(p, q).unwrap();
        assert_eq!(f, *phi(p * q));
        println!("p={p} q={q}: rho={} sigma={} terms={} height={}", sr.rho, sr.sigma, f.nonzero_count(), f.height());
    }
    println!("Φ_15(x) = {}", phi_pq_lam_leung(3, 5).unwrap());
}
