//! Paired seeds at one operating point, with a one-sided sign test.
//!
//! cargo run --release --example paired_comparison [rate_per_hour] [seeds]

use elevator_lookahead::bench::{mean, run_sweep, sign_test, SweepConfig};
use elevator_lookahead::policy::Scheduler;
use elevator_lookahead::BuildingSpec;

fn main() -> elevator_lookahead::Result<()> {
    let mut args = std::env::args().skip(1);
    let rate: f64 = args.next().map_or(1800.0, |a| a.parse().expect("rate"));
    let seeds: u64 = args.next().map_or(6, |a| a.parse().expect("seeds"));
    let cfg = SweepConfig {
        buildings: vec![BuildingSpec::new(15, 6)?],
        rates: vec![rate],
        test_seeds: (1..=seeds).collect(),
        stop_wait_s: f64::INFINITY,
        ..SweepConfig::desk_default()
    };
    let rows = run_sweep(&cfg, 1)?;
    let waits = |p: Scheduler| {
        rows.iter()
            .filter(|r| r.policy == p)
            .map(|r| r.avg_wait_s)
            .collect::<Vec<_>>()
    };
    let la = waits(Scheduler::EsaDpLa);
    for base in [Scheduler::Conventional, Scheduler::EsaDp] {
        let x = waits(base);
        let t = sign_test(&la, &x);
        println!(
            "look-ahead {:.2} s vs {base} {:.2} s: {} wins, {} losses, p = {:.4}",
            mean(&la),
            mean(&x),
            t.wins,
            t.losses,
            t.p_value
        );
    }
    Ok(())
}
