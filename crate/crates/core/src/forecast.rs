//! Expected waits of existing passengers and expected lobby landing times,
//! marginalized over the unknown destinations of passengers not yet aboard.
//!
//! Each destination scenario is played out with the same sweep-order car
//! logic the simulator uses, with no further calls arriving. Expectations
//! are exact while the scenario space fits under a cap and fall back to
//! seeded sampling beyond it.
//!
//! Internally, passengers waiting at the same floor in the same direction
//! board together, so only the multiset of their destinations matters;
//! [`expected_profile`] enumerates those multisets with multinomial weights,
//! which is exact and much smaller than the full product that
//! [`enumerate_scenarios`] returns.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::building::{BuildingSpec, Floor, LOBBY};
use crate::car::{BankState, CarState, Phase, Pickup, ServiceHooks};
use crate::error::{domain, Result};
use crate::types::{Direction, HallCall, PassengerId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForecastOptions {
    /// Largest scenario space enumerated exactly; also the sample count
    /// once the space is larger.
    pub cap: usize,
    /// Seed for the sampling fallback.
    pub seed: u64,
}

impl Default for ForecastOptions {
    fn default() -> Self {
        ForecastOptions {
            cap: 10_000,
            seed: 0,
        }
    }
}

/// Uniform prior over the floors reachable in the call's direction.
pub fn destination_distribution(
    call: &HallCall,
    building: &BuildingSpec,
) -> Result<Vec<(Floor, f64)>> {
    call.validate(building)?;
    let floors = destination_support(call.floor, call.direction, building);
    if floors.is_empty() {
        return domain(format!(
            "no destination {} from floor {}",
            call.direction, call.floor
        ));
    }
    let p = 1.0 / floors.len() as f64;
    Ok(floors.into_iter().map(|f| (f, p)).collect())
}

fn destination_support(floor: Floor, direction: Direction, building: &BuildingSpec) -> Vec<Floor> {
    match direction {
        Direction::Up => (floor + 1..=building.top_floor()).collect(),
        Direction::Down => (LOBBY..floor).collect(),
    }
}

/// One joint assignment of destinations to a car's waiting passengers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DestinationScenario {
    pub assignments: Vec<(PassengerId, Floor)>,
    pub probability: f64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sampled destinations for one passenger. The stream depends only on the
/// seed and the passenger, so the same passenger receives the same draws in
/// every profile computed with that seed.
fn passenger_draws(
    pickup: &Pickup,
    building: &BuildingSpec,
    seed: u64,
    count: usize,
) -> Vec<Floor> {
    let support = destination_support(pickup.floor, pickup.direction, building);
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(pickup.passenger)));
    (0..count)
        .map(|_| support[rng.gen_range(0..support.len())])
        .collect()
}

/// Full Cartesian product of the destination priors of the car's waiting
/// passengers when it has at most `cap` elements, otherwise `cap` seeded
/// samples with equal weights.
pub fn enumerate_scenarios(
    car: &CarState,
    building: &BuildingSpec,
    cap: usize,
    seed: u64,
) -> Result<Vec<DestinationScenario>> {
    if cap == 0 {
        return domain("scenario cap must be >= 1");
    }
    let supports: Vec<Vec<Floor>> = car
        .assigned
        .iter()
        .map(|p| destination_support(p.floor, p.direction, building))
        .collect();
    if supports.iter().any(Vec::is_empty) {
        return domain("a waiting passenger has no feasible destination");
    }
    let count = supports.iter().fold(1f64, |acc, s| acc * s.len() as f64);
    if count <= cap as f64 {
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0usize; supports.len()];
        loop {
            let assignments = car
                .assigned
                .iter()
                .zip(&supports)
                .zip(&digits)
                .map(|((p, s), &d)| (p.passenger, s[d]))
                .collect();
            let probability = supports.iter().map(|s| 1.0 / s.len() as f64).product();
            out.push(DestinationScenario {
                assignments,
                probability,
            });
            if !odometer(&mut digits, |k| supports[k].len()) {
                break;
            }
        }
        Ok(out)
    } else {
        let draws: Vec<Vec<Floor>> = car
            .assigned
            .iter()
            .map(|p| passenger_draws(p, building, seed, cap))
            .collect();
        let w = 1.0 / cap as f64;
        Ok((0..cap)
            .map(|k| DestinationScenario {
                assignments: car
                    .assigned
                    .iter()
                    .zip(&draws)
                    .map(|(p, d)| (p.passenger, d[k]))
                    .collect(),
                probability: w,
            })
            .collect())
    }
}

/// Advances a mixed-radix counter; false once it wraps around.
fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix(k) {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Outcome of playing out one car under one destination scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeliveryOutcome {
    /// Pickup time minus arrival time for each waiting passenger.
    pub pickup_waits: Vec<(PassengerId, f64)>,
    /// Seconds from `clock` until the emptied car is available at the lobby.
    pub landing_s: f64,
}

struct Replay<'a> {
    destinations: &'a [(PassengerId, Floor)],
    boards: Vec<(PassengerId, f64)>,
}

impl ServiceHooks for Replay<'_> {
    fn destination(&mut self, passenger: PassengerId) -> Floor {
        self.destinations
            .iter()
            .find(|(p, _)| *p == passenger)
            .map(|&(_, f)| f)
            .expect("scenario covers every waiting passenger")
    }

    fn boarded(&mut self, passenger: PassengerId, time_s: f64) {
        self.boards.push((passenger, time_s));
    }
}

pub(crate) struct Played {
    /// (passenger, board time) in boarding order.
    pub boards: Vec<(PassengerId, f64)>,
    /// Absolute time the car is next available at the lobby.
    pub landing_at: f64,
}

const STEP_LIMIT: usize = 1_000_000;

/// Plays the car forward from its checkpoint until it has no commitments.
/// `building` must be uncapped. `extra` is assigned at `clock` first.
pub(crate) fn play_out(
    car: &CarState,
    extra: Option<Pickup>,
    destinations: &[(PassengerId, Floor)],
    building: &BuildingSpec,
    clock: f64,
) -> Played {
    let mut car = car.clone();
    let mut hooks = Replay {
        destinations,
        boards: Vec::with_capacity(car.assigned.len() + 1),
    };
    if let Some(p) = extra {
        car.assign(p, clock, building, &mut hooks);
    }
    let mut steps = 0;
    while !car.is_free() && car.phase != Phase::Idle {
        car.advance(building, false, &mut hooks);
        steps += 1;
        assert!(
            steps < STEP_LIMIT,
            "car {} did not empty within {STEP_LIMIT} steps",
            car.id
        );
    }
    let landing_at = match car.phase {
        Phase::Dwelling if car.floor == LOBBY => car.ready_at - building.stop_dwell_s,
        Phase::Dwelling | Phase::Moving => car.ready_at + building.travel_s(car.floor, LOBBY),
        Phase::Idle => car.ready_at.max(clock) + building.travel_s(car.floor, LOBBY),
    };
    Played {
        boards: hooks.boards,
        landing_at,
    }
}

/// An idle car has nothing to do; one holding riders or pickups cannot be
/// played forward.
fn check_car(car: &CarState) -> Result<()> {
    if car.phase == Phase::Idle && !car.is_free() {
        return domain(format!("car {} is idle but has riders or pickups", car.id));
    }
    Ok(())
}

pub(crate) fn uncapped(building: &BuildingSpec) -> BuildingSpec {
    BuildingSpec {
        capacity: None,
        ..building.clone()
    }
}

fn waits_from(boards: &[(PassengerId, f64)], pickups: &[Pickup]) -> Vec<(PassengerId, f64)> {
    pickups
        .iter()
        .map(|p| {
            let t = boards
                .iter()
                .find(|(id, _)| *id == p.passenger)
                .map(|&(_, t)| t)
                .expect("every pickup boards once the car empties");
            (p.passenger, t - p.arrival_s)
        })
        .collect()
}

/// Plays out `car` with destinations fixed by `scenario`.
pub fn simulate_delivery(
    car: &CarState,
    scenario: &DestinationScenario,
    building: &BuildingSpec,
    clock: f64,
) -> Result<DeliveryOutcome> {
    check_car(car)?;
    if let Some(p) = car.assigned.iter().find(|p| {
        !scenario
            .assignments
            .iter()
            .any(|(id, _)| *id == p.passenger)
    }) {
        return domain(format!(
            "scenario has no destination for passenger {}",
            p.passenger
        ));
    }
    let b = uncapped(building);
    let played = play_out(car, None, &scenario.assignments, &b, clock);
    Ok(DeliveryOutcome {
        pickup_waits: waits_from(&played.boards, &car.assigned),
        landing_s: (played.landing_at - clock).max(0.0),
    })
}

/// Expectation of [`simulate_delivery`] over the destination scenarios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub expected_waits: Vec<(PassengerId, f64)>,
    /// Sum of `expected_waits`.
    pub total_wait_s: f64,
    pub expected_landing_s: f64,
    pub scenarios: usize,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Mode {
    Exact,
    Sampled(usize),
}

type Multisets = Vec<(Vec<Floor>, f64)>;

/// Destination multisets of one boarding group with multinomial weights.
fn group_multisets(support: &[Floor], size: usize) -> Multisets {
    let d = support.len();
    let ln_p = -(d as f64).ln();
    let mut out = Vec::new();
    let mut idx = vec![0usize; size];
    loop {
        // multinomial: size! / Π c! · d^-size
        let mut ln_w = crate::lobby::ln_factorial(size as u64) + size as f64 * ln_p;
        let mut run = 1u64;
        for k in 1..=size {
            if k < size && idx[k] == idx[k - 1] {
                run += 1;
            } else {
                ln_w -= crate::lobby::ln_factorial(run);
                run = 1;
            }
        }
        out.push((idx.iter().map(|&i| support[i]).collect(), ln_w.exp()));
        // next nondecreasing sequence
        let mut k = size;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] + 1 < d {
                let v = idx[k] + 1;
                for slot in &mut idx[k..] {
                    *slot = v;
                }
                break;
            }
        }
    }
}

fn pickups_with(car: &CarState, extra: Option<Pickup>) -> Vec<Pickup> {
    let mut all = car.assigned.clone();
    all.extend(extra);
    all
}

/// Boarding groups keyed by (floor, direction), members in pickup order.
fn boarding_groups(pickups: &[Pickup]) -> BTreeMap<(Floor, Direction), Vec<usize>> {
    let mut groups: BTreeMap<(Floor, Direction), Vec<usize>> = BTreeMap::new();
    for (k, p) in pickups.iter().enumerate() {
        groups.entry((p.floor, p.direction)).or_default().push(k);
    }
    groups
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Size of the collapsed scenario space.
fn collapsed_count(pickups: &[Pickup], building: &BuildingSpec) -> f64 {
    boarding_groups(pickups)
        .iter()
        .map(|(&(floor, dir), members)| {
            let d = destination_support(floor, dir, building).len();
            binomial(d + members.len() - 1, members.len())
        })
        .product()
}

fn profile_of(
    car: &CarState,
    extra: Option<Pickup>,
    building: &BuildingSpec,
    clock: f64,
    mode: Mode,
    seed: u64,
) -> Profile {
    let pickups = pickups_with(car, extra);
    let n = pickups.len();
    let mut wait_acc = vec![0.0; n];
    let mut landing_acc = 0.0;
    let mut dests: Vec<(PassengerId, Floor)> = pickups.iter().map(|p| (p.passenger, 0)).collect();
    let mut scenarios = 0usize;

    let mut accumulate = |dests: &[(PassengerId, Floor)], weight: f64| {
        let played = play_out(car, extra, dests, building, clock);
        for (k, p) in pickups.iter().enumerate() {
            let t = played
                .boards
                .iter()
                .find(|(id, _)| *id == p.passenger)
                .map(|&(_, t)| t)
                .expect("every pickup boards");
            wait_acc[k] += weight * (t - p.arrival_s);
        }
        landing_acc += weight * (played.landing_at - clock).max(0.0);
    };

    match mode {
        Mode::Exact => {
            let groups: Vec<(Vec<usize>, Multisets)> = boarding_groups(&pickups)
                .into_iter()
                .map(|((floor, dir), members)| {
                    let support = destination_support(floor, dir, building);
                    let sets = group_multisets(&support, members.len());
                    (members, sets)
                })
                .collect();
            let mut digits = vec![0usize; groups.len()];
            loop {
                let mut weight = 1.0;
                for ((members, sets), &d) in groups.iter().zip(&digits) {
                    let (floors, w) = &sets[d];
                    weight *= w;
                    for (&m, &f) in members.iter().zip(floors) {
                        dests[m].1 = f;
                    }
                }
                accumulate(&dests, weight);
                scenarios += 1;
                if !odometer(&mut digits, |k| groups[k].1.len()) {
                    break;
                }
            }
        }
        Mode::Sampled(count) => {
            let draws: Vec<Vec<Floor>> = pickups
                .iter()
                .map(|p| passenger_draws(p, building, seed, count))
                .collect();
            let w = 1.0 / count as f64;
            for s in 0..count {
                for (k, d) in draws.iter().enumerate() {
                    dests[k].1 = d[s];
                }
                accumulate(&dests, w);
            }
            scenarios = count;
        }
    }

    let expected_waits: Vec<(PassengerId, f64)> = pickups
        .iter()
        .zip(&wait_acc)
        .map(|(p, &w)| (p.passenger, w))
        .collect();
    Profile {
        total_wait_s: wait_acc.iter().sum(),
        expected_waits,
        expected_landing_s: landing_acc,
        scenarios,
        exact: mode == Mode::Exact,
    }
}

fn mode_for(pickups: &[Pickup], building: &BuildingSpec, cap: usize) -> Mode {
    if collapsed_count(pickups, building) <= cap as f64 {
        Mode::Exact
    } else {
        Mode::Sampled(cap)
    }
}

/// Expected pickup waits and expected lobby landing time of one car.
pub fn expected_profile(
    car: &CarState,
    building: &BuildingSpec,
    clock: f64,
    opts: &ForecastOptions,
) -> Result<Profile> {
    expected_profile_with(car, None, building, clock, opts)
}

/// As [`expected_profile`], with `extra` assigned to the car at `clock`.
pub fn expected_profile_with(
    car: &CarState,
    extra: Option<Pickup>,
    building: &BuildingSpec,
    clock: f64,
    opts: &ForecastOptions,
) -> Result<Profile> {
    if opts.cap == 0 {
        return domain("scenario cap must be >= 1");
    }
    check_car(car)?;
    let b = uncapped(building);
    let pickups = pickups_with(car, extra);
    for p in &pickups {
        if destination_support(p.floor, p.direction, &b).is_empty() {
            return domain(format!(
                "passenger {} has no feasible destination",
                p.passenger
            ));
        }
    }
    let mode = mode_for(&pickups, &b, opts.cap);
    Ok(profile_of(car, extra, &b, clock, mode, opts.seed))
}

/// Per-candidate expectations for one hall call.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateTable {
    /// `w[i]`: expected cumulative wait of all waiting passengers (including
    /// the new one) if the call goes to car `i`.
    pub w: Vec<f64>,
    /// Number of waiting passengers, the new one included.
    pub n: usize,
    /// `t_hat[i][j]`: expected landing time of car `j` if the call goes to car `i`.
    pub t_hat: Vec<Vec<f64>>,
}

/// Evaluates every candidate assignment of `call` (for passenger `passenger`).
///
/// For each car both the call-free and the with-call profile are computed
/// with the same scenario set, so candidate differences are free of
/// sampling noise from the car's existing passengers.
pub fn candidate_table(
    bank: &BankState,
    call: &HallCall,
    passenger: PassengerId,
    building: &BuildingSpec,
    opts: &ForecastOptions,
) -> Result<CandidateTable> {
    call.validate(building)?;
    if bank.cars.is_empty() {
        return domain("bank has no cars");
    }
    if opts.cap == 0 {
        return domain("scenario cap must be >= 1");
    }
    for car in &bank.cars {
        check_car(car)?;
    }
    let b = uncapped(building);
    let clock = bank.clock_s;
    let pickup = Pickup::from_call(passenger, call);
    let profiles: Vec<(Profile, Profile)> = bank
        .cars
        .iter()
        .map(|car| {
            let mode = mode_for(&pickups_with(car, Some(pickup)), &b, opts.cap);
            let free = profile_of(car, None, &b, clock, mode, opts.seed);
            let with = profile_of(car, Some(pickup), &b, clock, mode, opts.seed);
            (free, with)
        })
        .collect();
    let c = profiles.len();
    let mut w = Vec::with_capacity(c);
    let mut t_hat = Vec::with_capacity(c);
    for i in 0..c {
        let mut total = 0.0;
        let mut row = Vec::with_capacity(c);
        for (j, (free, with)) in profiles.iter().enumerate() {
            let p = if i == j { with } else { free };
            total += p.total_wait_s;
            row.push(p.expected_landing_s);
        }
        w.push(total);
        t_hat.push(row);
    }
    Ok(CandidateTable {
        w,
        n: bank.waiting_count() + 1,
        t_hat,
    })
}

/// Deterministic single-scenario play-out with every waiting passenger sent
/// to the farthest floor in their direction. Returns landing seconds from
/// `clock`. Used by the round-trip baseline.
pub(crate) fn pessimistic_landing(
    car: &CarState,
    extra: Option<Pickup>,
    building: &BuildingSpec,
    clock: f64,
) -> f64 {
    let pickups = pickups_with(car, extra);
    let dests: Vec<(PassengerId, Floor)> = pickups
        .iter()
        .map(|p| {
            let f = match p.direction {
                Direction::Up => building.top_floor(),
                Direction::Down => LOBBY,
            };
            (p.passenger, f)
        })
        .collect();
    (play_out(car, extra, &dests, building, clock).landing_at - clock).max(0.0)
}
