//! A small verification grid written as text, CSV and JSON.

use cyclo_core::cli::format::{parse_csv, to_csv, to_json_line};
use cyclo_core::verify::{cross_check_grid, grid_property_failures, Record};

fn main() {
    let report = cross_check_grid(5, 7, 4, 200_000).unwrap();
    print!("{}", report.render_text());
    for f in report.failures().iter().chain(&grid_property_failures(&report)) {
        println!("{f}");
    }

    let rows: Vec<Record> =
        report.cells.iter().filter_map(|c| c.record()).map(|r| Record { elapsed_ms: 0, ..r }).take(4).collect();
    let csv = to_csv(&rows);
    print!("{csv}");
    assert_eq!(parse_csv(&csv).unwrap(), rows);
    for r in &rows {
        println!("{}", to_json_line(r));
    }
}
