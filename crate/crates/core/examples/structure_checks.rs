//! Coefficient structure of `Φ_pq Φ_pq² Φ_q³` and the bounds used for `q < p < q³`.

use cyclo_core::structure::{
    coefficient_transport_check, periodicity_check, table1_bounds_check, trapezoid_profile_check,
};

fn main() {
    let t = trapezoid_profile_check(5, 7).unwrap();
    println!("(x^5 - 1) g for (5, 7): profile {:?}, holds {}", t.observed, t.holds());

    let r = periodicity_check(5, 7).unwrap();
    println!("periodicity (5, 7): {} comparisons, holds {}", r.checked, r.holds());

    let tr = coefficient_transport_check(5, 7, 17).unwrap();
    println!(
        "transport (5, 7, 17): heights {} and {}, peaks at {} and {}, holds {}",
        tr.height_q,
        tr.height_r,
        tr.peak_q,
        tr.peak_r,
        tr.holds()
    );
    if let Some(m) = &tr.overrun {
        println!(
            "  past block {}: c_{} = {} but d_{} = {}",
            tr.blocks,
            m.index,
            m.expected,
            m.other_index.unwrap(),
            m.got
        );
    }

    let b = table1_bounds_check(7, 3).unwrap();
    println!("bound suite (7, 3): {} products measured", b.entries.len());
    for e in b.violations() {
        println!("  exceeds: {} with f2 = {:?}: height {} > {}", e.shape, e.f2, e.observed, e.bound.label());
    }
}
