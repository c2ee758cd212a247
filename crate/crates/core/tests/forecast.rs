use elevator_lookahead::car::{BankState, CarState, Phase, Pickup, Rider};
use elevator_lookahead::forecast::{
    candidate_table, enumerate_scenarios, expected_profile, simulate_delivery, ForecastOptions,
};
use elevator_lookahead::{BuildingSpec, Direction, Floor, HallCall};
use proptest::prelude::*;

fn building() -> BuildingSpec {
    BuildingSpec::new(10, 3).unwrap()
}

/// A moving car with a few waiting passengers at random floors.
fn car_strategy() -> impl Strategy<Value = CarState> {
    (
        2u32..=9,
        any::<bool>(),
        prop::collection::vec((1u32..=10, any::<bool>()), 0..=3),
        prop::collection::vec(1u32..=10, 0..=2),
    )
        .prop_map(|(floor, up, calls, riders)| {
            let mut c = CarState::idle_at(0, floor);
            c.phase = Phase::Moving;
            c.direction = Some(if up { Direction::Up } else { Direction::Down });
            c.ready_at = 3.0;
            for (k, (f, up)) in calls.into_iter().enumerate() {
                let d = match (f, up) {
                    (1, _) => Direction::Up,
                    (10, _) => Direction::Down,
                    (_, true) => Direction::Up,
                    _ => Direction::Down,
                };
                c.assigned.push(Pickup {
                    passenger: k as u64,
                    floor: f,
                    direction: d,
                    arrival_s: 0.5 * k as f64,
                });
            }
            for (k, dest) in riders.into_iter().enumerate() {
                if dest != floor {
                    c.onboard.push(Rider {
                        passenger: 100 + k as u64,
                        destination: dest,
                    });
                }
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scenario_probabilities_sum_to_one(car in car_strategy()) {
        let s = enumerate_scenarios(&car, &building(), 10_000, 0).unwrap();
        let total: f64 = s.iter().map(|x| x.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profile_is_the_scenario_average(car in car_strategy()) {
        let b = building();
        let prof = expected_profile(&car, &b, 1.0, &ForecastOptions::default()).unwrap();
        prop_assert!(prof.exact);
        let mut landing = 0.0;
        let mut total = 0.0;
        for s in enumerate_scenarios(&car, &b, 10_000, 0).unwrap() {
            let out = simulate_delivery(&car, &s, &b, 1.0).unwrap();
            landing += s.probability * out.landing_s;
            total += s.probability * out.pickup_waits.iter().map(|w| w.1).sum::<f64>();
        }
        prop_assert!((prof.expected_landing_s - landing).abs() < 1e-9 * landing.max(1.0));
        prop_assert!((prof.total_wait_s - total).abs() < 1e-9 * total.max(1.0));
    }

    #[test]
    fn waits_and_landings_are_non_negative(car in car_strategy(), clock in 0.0..10.0f64) {
        let prof = expected_profile(&car, &building(), clock, &ForecastOptions::default()).unwrap();
        prop_assert!(prof.expected_landing_s >= 0.0);
        prop_assert!(prof.expected_waits.iter().all(|w| w.1 >= 0.0));
    }

    #[test]
    fn sampling_is_seed_deterministic(car in car_strategy(), seed in any::<u64>()) {
        let opts = ForecastOptions { cap: 2, seed };
        let b = building();
        prop_assert_eq!(expected_profile(&car, &b, 0.0, &opts).unwrap(), expected_profile(&car, &b, 0.0, &opts).unwrap());
    }
}

fn busy_bank() -> BankState {
    let mut a = CarState::idle_at(0, 6);
    a.phase = Phase::Moving;
    a.direction = Some(Direction::Down);
    a.ready_at = 11.0;
    a.assigned = vec![Pickup {
        passenger: 1,
        floor: 3,
        direction: Direction::Down,
        arrival_s: 2.0,
    }];
    let mut b = a.clone();
    b.id = 1;
    let mut c = CarState::idle_at(2, 1);
    c.phase = Phase::Dwelling;
    c.direction = Some(Direction::Up);
    c.ready_at = 14.0;
    c.onboard = vec![Rider {
        passenger: 2,
        destination: 8,
    }];
    BankState {
        cars: vec![a, b, c],
        clock_s: 10.0,
    }
}

#[test]
fn identical_cars_get_identical_rows() {
    let b = building();
    let call = HallCall::new(7, Direction::Down, 10.0, &b).unwrap();
    let t = candidate_table(&busy_bank(), &call, 99, &b, &ForecastOptions::default()).unwrap();
    assert_eq!(t.w[0], t.w[1]);
    assert_eq!(t.t_hat[0][1], t.t_hat[1][0]);
    assert_eq!(t.t_hat[0][2], t.t_hat[1][2]);
    assert_eq!(t.n, 3);
}

#[test]
fn a_candidate_only_changes_its_own_landing() {
    let b = building();
    let call = HallCall::new(4, Direction::Up, 10.0, &b).unwrap();
    let t = candidate_table(&busy_bank(), &call, 99, &b, &ForecastOptions::default()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let other = (0..3).find(|&k| k != i && k != j).unwrap();
                assert_eq!(t.t_hat[i][j], t.t_hat[other][j], "row {i} col {j}");
            }
        }
    }
}

#[test]
fn sampling_oracle_matches_enumeration() {
    use rand::{Rng, SeedableRng};
    let b = building();
    let car = &busy_bank().cars[2];
    let mut car = car.clone();
    car.assigned = vec![
        Pickup {
            passenger: 5,
            floor: 4,
            direction: Direction::Up,
            arrival_s: 9.0,
        },
        Pickup {
            passenger: 6,
            floor: 9,
            direction: Direction::Down,
            arrival_s: 9.5,
        },
    ];
    let exact = expected_profile(&car, &b, 10.0, &ForecastOptions::default()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let n = 20_000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let d5: Floor = rng.gen_range(5..=10);
        let d6: Floor = rng.gen_range(1..9);
        let sc = elevator_lookahead::forecast::DestinationScenario {
            assignments: vec![(5, d5), (6, d6)],
            probability: 1.0,
        };
        let l = simulate_delivery(&car, &sc, &b, 10.0).unwrap().landing_s;
        s += l;
        s2 += l * l;
    }
    let m = s / n as f64;
    let se = ((s2 / n as f64 - m * m) / (n as f64 - 1.0)).sqrt();
    assert!(
        (exact.expected_landing_s - m).abs() <= 3.0 * se,
        "{} vs {m} ± {se}",
        exact.expected_landing_s
    );
}
