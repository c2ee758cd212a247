//! Mean wait of the look-ahead scheduler across discount rates.
//!
//! cargo run --release --example beta_curve [seeds]

use elevator_lookahead::bench::{beta_curve, run_sweep, SweepConfig};
use elevator_lookahead::policy::Scheduler;
use elevator_lookahead::BuildingSpec;

fn main() -> elevator_lookahead::Result<()> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .map_or(3, |a| a.parse().expect("seeds"));
    let cfg = SweepConfig {
        buildings: vec![BuildingSpec::new(15, 6)?],
        rates: vec![2500.0],
        policies: vec![Scheduler::EsaDpLa],
        test_seeds: (1..=seeds).collect(),
        betas: vec![0.001, 0.005, 0.02, 0.05, 0.2, 0.5],
        stop_wait_s: f64::INFINITY,
        ..SweepConfig::desk_default()
    };
    for p in beta_curve(&run_sweep(&cfg, 1)?) {
        println!(
            "beta {:<6} mean wait {:6.2} s ± {:.2}",
            p.beta, p.avg_wait_s, p.stderr_s
        );
    }
    Ok(())
}
