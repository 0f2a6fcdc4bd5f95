use proptest::prelude::*;

use cyclo_core::cli::format::{parse_csv, parse_json_line, to_csv, to_json_line};
use cyclo_core::cyclotomic::{cyclotomic_product, phi_via_mobius, primes_in};
use cyclo_core::divisors::engine::product_height;
use cyclo_core::formulas::b_formula;
use cyclo_core::structure::trapezoid_profile;
use cyclo_core::{factorize, phi, sigma_rho, DivisorSelection, IntPoly, Record};

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(primes_in(2, 40))
}

fn record() -> impl Strategy<Value = Record> {
    (
        1u64..10_000_000,
        prop::option::of((small_prime(), small_prime(), 1u32..9)),
        0u64..100_000,
        prop::sample::select(vec!["brute", "formula", "reduced"]),
        prop::option::of(prop::sample::select(vec!["P_LT_Q", "Q_LT_P_LT_Q2", "Q2_LT_P_LT_Q3", "P_GT_Q3"])),
        prop::option::of(prop::collection::vec(1u64..100_000, 0..8)),
        0u64..1_000_000,
    )
        .prop_map(|(n, pqb, b_value, method, regime, witness, elapsed_ms)| Record {
            n,
            p: pqb.map(|t| t.0),
            q: pqb.map(|t| t.1),
            b: pqb.map(|t| t.2),
            b_value,
            method: method.into(),
            regime: regime.map(Into::into),
            witness,
            elapsed_ms,
        })
}

proptest! {
    #[test]
    fn csv_and_json_round_trip(rows in prop::collection::vec(record(), 0..6)) {
        prop_assert_eq!(parse_csv(&to_csv(&rows)).unwrap(), rows.clone());
        for r in &rows {
            prop_assert_eq!(&parse_json_line(&to_json_line(r)).unwrap(), r);
        }
    }

    #[test]
    fn phi_agrees_with_mobius_product(n in 1u64..400) {
        prop_assert_eq!(&*phi(n), &phi_via_mobius(n));
        prop_assert_eq!(phi(n).degree(), Some(factorize(n).totient() as usize));
    }

    #[test]
    fn selection_product_divides_x_n_minus_one(n in 1u64..300, mask in any::<u64>()) {
        let divisors = factorize(n).divisors();
        let chosen: Vec<u64> = divisors.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, &d)| d).collect();
        let sel = DivisorSelection::new(n, chosen.clone()).unwrap();
        let f = sel.polynomial();
        prop_assert_eq!(f.degree(), Some(sel.degree() as usize));
        let quotient = IntPoly::x_pow_minus_one(n as usize).div_exact(&f).unwrap();
        prop_assert_eq!(quotient.mul(&f), IntPoly::x_pow_minus_one(n as usize));
        prop_assert_eq!(sel.height().unwrap(), f.height_u64().unwrap());
    }

    #[test]
    fn product_height_ignores_order(mut idx in prop::collection::vec(1u64..120, 1..6)) {
        let h = product_height(&idx, 1_000_000).unwrap();
        idx.reverse();
        prop_assert_eq!(product_height(&idx, 1_000_000).unwrap(), h);
        prop_assert_eq!(cyclotomic_product(&idx).height_u64().unwrap(), h);
    }

    #[test]
    fn sigma_rho_decomposes(p in small_prime(), q in small_prime()) {
        prop_assume!(p != q);
        let s = sigma_rho(p, q).unwrap();
        prop_assert_eq!(s.rho * p + s.sigma * q, (p - 1) * (q - 1));
        prop_assert!(s.sigma < p && s.rho < q);
    }

    #[test]
    fn trapezoid_is_symmetric(p in small_prime(), q in small_prime()) {
        prop_assume!(p < q);
        let a = trapezoid_profile(p, q);
        prop_assert_eq!(a.len() as u64, p + q - 1);
        prop_assert!(a.iter().eq(a.iter().rev()));
        prop_assert_eq!(*a.iter().max().unwrap(), p);
    }

    #[test]
    fn p_divides_closed_form(p in small_prime(), q in small_prime(), b in 1u32..12) {
        prop_assume!(p < q);
        if let Some(r) = b_formula(p, q, b).unwrap() {
            prop_assert_eq!(r.b_value % p, 0);
            prop_assert!(r.b_value >= p.min(q.pow(b.min(3))));
        }
    }
}
