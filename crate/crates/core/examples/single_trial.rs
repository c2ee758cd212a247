//! One simulated hour under each scheduler on the same traffic.
//!
//! cargo run --release --example single_trial [rate_per_hour] [seed]

use elevator_lookahead::forecast::ForecastOptions;
use elevator_lookahead::policy::{Scheduler, SchedulerParams};
use elevator_lookahead::sim::{
    generate_traffic, run_trial, traffic_hash, TrafficProfile, TrialOptions,
};
use elevator_lookahead::BuildingSpec;

fn main() -> elevator_lookahead::Result<()> {
    let mut args = std::env::args().skip(1);
    let rate: f64 = args.next().map_or(1200.0, |a| a.parse().expect("rate"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    let b = BuildingSpec::new(15, 6)?;
    let traffic = generate_traffic(&TrafficProfile::new(rate, seed), &b)?;
    println!(
        "{} passengers, traffic {}",
        traffic.len(),
        traffic_hash(&traffic)
    );
    let params = SchedulerParams {
        forecast: ForecastOptions { cap: 64, seed },
        ..Default::default()
    };
    for s in Scheduler::ALL {
        let out = run_trial(&b, s, &traffic, &params, &TrialOptions::default())?;
        let m = &out.metrics;
        println!(
            "{s:>12}: mean wait {:6.2} s, max {:6.1} s, {} unserved",
            m.avg_wait_s, m.max_wait_s, m.unserved
        );
    }
    Ok(())
}
