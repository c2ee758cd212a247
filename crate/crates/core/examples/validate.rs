//! Runs the oracle gates and prints their measured errors.
//!
//! cargo run --release --example validate

use elevator_lookahead::bench::{validate_suite, ValidateOptions};

fn main() -> elevator_lookahead::Result<()> {
    let report = validate_suite(&ValidateOptions::default())?;
    for g in &report.gates {
        println!(
            "{:<24} {:<4} {:.3e} / {:.3e}",
            g.name,
            if g.passed { "ok" } else { "FAIL" },
            g.measured,
            g.tolerance
        );
    }
    std::process::exit(if report.passed { 0 } else { 1 });
}
