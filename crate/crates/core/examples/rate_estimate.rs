//! The decayed arrival-rate estimate following a step change in demand.
//!
//! cargo run --example rate_estimate

use elevator_lookahead::policy::RateEstimator;
use elevator_lookahead::sim::{generate_traffic, TrafficProfile};
use elevator_lookahead::BuildingSpec;

fn main() -> elevator_lookahead::Result<()> {
    let b = BuildingSpec::new(15, 6)?;
    let quiet = generate_traffic(
        &TrafficProfile {
            duration_s: 1200.0,
            ..TrafficProfile::new(600.0, 1)
        },
        &b,
    )?;
    let busy = generate_traffic(
        &TrafficProfile {
            duration_s: 1200.0,
            ..TrafficProfile::new(2400.0, 2)
        },
        &b,
    )?;
    let mut est = RateEstimator::new(300.0, 0.0, 0.0)?;
    let arrivals = quiet
        .iter()
        .map(|p| (p.arrival_time_s, p.origin_floor))
        .chain(
            busy.iter()
                .map(|p| (p.arrival_time_s + 1200.0, p.origin_floor)),
        );
    let mut report_at = 300.0;
    for (t, origin) in arrivals {
        while t > report_at {
            println!(
                "t={report_at:5.0}s lobby {:.0}/h, above {:.0}/h",
                est.lobby_rate(report_at)? * 3600.0,
                est.above_rate(report_at)? * 3600.0
            );
            report_at += 300.0;
        }
        est.observe(origin, t)?;
    }
    Ok(())
}
