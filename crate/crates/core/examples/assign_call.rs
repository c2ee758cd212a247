//! One hall call scored by the three schedulers.
//!
//! cargo run --example assign_call

use elevator_lookahead::car::{BankState, CarState, Phase, Pickup};
use elevator_lookahead::forecast::ForecastOptions;
use elevator_lookahead::policy::{decide, Scheduler, SchedulerParams};
use elevator_lookahead::{BuildingSpec, Direction, HallCall};

fn moving(id: usize, floor: u32, d: Direction, ready: f64, stops: &[u32]) -> CarState {
    let mut c = CarState::idle_at(id, floor);
    c.phase = Phase::Moving;
    c.direction = Some(d);
    c.ready_at = ready;
    c.assigned = stops
        .iter()
        .enumerate()
        .map(|(k, &f)| Pickup {
            passenger: (100 * id + k) as u64,
            floor: f,
            direction: Direction::Down,
            arrival_s: 95.0,
        })
        .collect();
    c
}

fn main() -> elevator_lookahead::Result<()> {
    let b = BuildingSpec::new(15, 4)?;
    let bank = BankState {
        cars: vec![
            CarState::idle_at(0, 1),
            moving(1, 15, Direction::Down, 100.8, &[7]),
            moving(2, 7, Direction::Down, 100.9, &[6, 6, 5]),
            moving(3, 5, Direction::Up, 100.9, &[14, 12, 10]),
        ],
        clock_s: 100.0,
    };
    let call = HallCall::new(8, Direction::Down, 100.0, &b)?;
    let params = SchedulerParams {
        lobby_rate: 2500.0 / 3600.0 * 0.8,
        forecast: ForecastOptions {
            cap: 10_000,
            seed: 0,
        },
        ..Default::default()
    };
    for s in Scheduler::ALL {
        let r = decide(s, &bank, &call, &b, &params)?;
        println!("{s}: car {}", r.chosen_car);
        for c in &r.candidates {
            println!(
                "  car {}: W/N {:7.2}  V {:7.2}  score {:8.2}",
                c.car, c.w_bar, c.v_bar, c.score
            );
        }
    }
    Ok(())
}
