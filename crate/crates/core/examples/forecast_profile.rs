//! Expected pickup waits and lobby landing time of one busy car.
//!
//! cargo run --example forecast_profile

use elevator_lookahead::car::{CarState, Phase, Pickup, Rider};
use elevator_lookahead::forecast::{enumerate_scenarios, expected_profile, ForecastOptions};
use elevator_lookahead::{BuildingSpec, Direction};

fn main() -> elevator_lookahead::Result<()> {
    let b = BuildingSpec::new(10, 2)?;
    let mut car = CarState::idle_at(0, 4);
    car.phase = Phase::Moving;
    car.direction = Some(Direction::Up);
    car.ready_at = 2.0;
    car.onboard = vec![Rider {
        passenger: 10,
        destination: 7,
    }];
    car.assigned = vec![
        Pickup {
            passenger: 1,
            floor: 5,
            direction: Direction::Up,
            arrival_s: 0.5,
        },
        Pickup {
            passenger: 2,
            floor: 8,
            direction: Direction::Down,
            arrival_s: 1.0,
        },
    ];
    println!(
        "{} destination scenarios",
        enumerate_scenarios(&car, &b, 10_000, 0)?.len()
    );
    let p = expected_profile(&car, &b, 1.0, &ForecastOptions::default())?;
    for (id, w) in &p.expected_waits {
        println!("passenger {id}: expected wait {w:.2} s");
    }
    println!(
        "expected landing in {:.2} s ({} cases, exact: {})",
        p.expected_landing_s, p.scenarios, p.exact
    );
    Ok(())
}
