//! Exact arithmetic on cyclotomic polynomials and heights of divisors of `x^n - 1`.
//!
//! The crate computes `A(n)`, the height of `Φ_n`, and `B(n)`, the largest
//! height of any integer divisor of `x^n - 1`, both by exhaustive search over
//! subset products of cyclotomic factors and by closed forms for `n = p q^b`.

pub mod cli;
pub mod cyclotomic;
pub mod divisors;
pub mod error;
pub mod formulas;
pub mod intpoly;
pub mod structure;
pub mod verify;

pub use cyclotomic::{
    a_height, factorize, is_prime, phi, phi_n, phi_pq_lam_leung, sigma_rho, CycloCache, FactoredIndex, SigmaRho,
};
pub use divisors::{
    divisor_poly, enumerate_b, enumerate_b_with, reduced_h_b, DivisorSelection, EnumerateOptions, HeightRecord, Method,
    Strategy,
};
pub use error::{Error, Result};
pub use formulas::{b_formula, h_of_product, residue_invariance_check, Branch, RegimeTag};
pub use intpoly::{IntPoly, MulConfig};
pub use structure::{coefficient_transport_check, periodicity_check, table1_bounds_check, trapezoid_profile_check};
pub use verify::{conjecture_explorer, cross_check_grid, Record};
