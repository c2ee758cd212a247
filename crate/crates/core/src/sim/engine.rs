//! Event-driven simulation of one trial.
//!
//! Events are ordered by time, then by kind (car actions before passenger
//! arrivals, so riders alight and board before a simultaneous arrival is
//! dispatched), then by insertion order. Each busy car has exactly one
//! pending event: the action due at its `ready_at`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::building::{BuildingSpec, Floor};
use crate::car::{BankState, Phase, Pickup, ServiceHooks};
use crate::error::{domain, Result};
use crate::policy::{decide, DecisionRecord, RateEstimator, Scheduler, SchedulerParams};
use crate::types::{HallCall, Passenger, PassengerId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialOptions {
    /// Empty cars return to the lobby and wait there.
    pub park_idle_at_lobby: bool,
    /// Time after the last arrival during which cars keep serving.
    pub drain_s: f64,
    /// Time constant of the arrival-rate estimate.
    pub rate_decay_s: f64,
    /// Rate assumed before any arrival has been seen, 1/s.
    pub rate_prior: f64,
    /// Feed the look-ahead the lobby-origin rate (true) or the total rate.
    pub lobby_rate_only: bool,
    /// Attach a passenger to a car already assigned to the same hall call
    /// instead of invoking the scheduler.
    pub coalesce_calls: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        TrialOptions {
            park_idle_at_lobby: true,
            drain_s: 600.0,
            rate_decay_s: 300.0,
            rate_prior: 0.0,
            lobby_rate_only: true,
            coalesce_calls: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialMetrics {
    /// Board time minus arrival time of every served passenger, by id.
    pub waits_s: Vec<f64>,
    pub avg_wait_s: f64,
    pub max_wait_s: f64,
    pub served: usize,
    /// Passengers that had not boarded when the trial ended.
    pub unserved: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub metrics: TrialMetrics,
    /// Input passengers with assignment, board and alight times filled in.
    pub passengers: Vec<Passenger>,
    /// Scheduler invocations.
    pub decisions: usize,
    /// Time of the last processed event.
    pub end_time_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Event {
    time: f64,
    /// 0 for car actions, 1 for arrivals.
    kind: u8,
    seq: u64,
    /// Car index or passenger index.
    target: usize,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Queue {
    heap: BinaryHeap<Reverse<Event>>,
    seq: u64,
}

impl Queue {
    fn push(&mut self, time: f64, kind: u8, target: usize) {
        self.seq += 1;
        self.heap.push(Reverse(Event {
            time,
            kind,
            seq: self.seq,
            target,
        }));
    }
}

struct Ledger<'a> {
    passengers: &'a mut [Passenger],
}

impl ServiceHooks for Ledger<'_> {
    fn destination(&mut self, passenger: PassengerId) -> Floor {
        self.passengers[passenger as usize].destination_floor
    }

    fn boarded(&mut self, passenger: PassengerId, time_s: f64) {
        self.passengers[passenger as usize].board_time_s = Some(time_s);
    }

    fn alighted(&mut self, passenger: PassengerId, time_s: f64) {
        self.passengers[passenger as usize].alight_time_s = Some(time_s);
    }
}

fn check_traffic(traffic: &[Passenger], building: &BuildingSpec) -> Result<()> {
    for (k, p) in traffic.iter().enumerate() {
        if p.id != k as u64 {
            return domain(format!(
                "passenger ids must equal their index; found id {} at {k}",
                p.id
            ));
        }
        if !(p.arrival_time_s.is_finite() && p.arrival_time_s >= 0.0) {
            return domain(format!(
                "passenger {k} has invalid arrival time {}",
                p.arrival_time_s
            ));
        }
        if k > 0 && p.arrival_time_s < traffic[k - 1].arrival_time_s {
            return domain("traffic must be sorted by arrival time");
        }
        if !building.contains(p.origin_floor)
            || !building.contains(p.destination_floor)
            || p.origin_floor == p.destination_floor
        {
            return domain(format!(
                "passenger {k} has an invalid trip {} -> {}",
                p.origin_floor, p.destination_floor
            ));
        }
    }
    Ok(())
}

/// Runs one trial. All cars start parked at the lobby at time zero.
pub fn run_trial(
    building: &BuildingSpec,
    scheduler: Scheduler,
    traffic: &[Passenger],
    params: &SchedulerParams,
    opts: &TrialOptions,
) -> Result<TrialOutcome> {
    run_trial_observed(building, scheduler, traffic, params, opts, |_, _, _, _| {})
}

/// As [`run_trial`], calling `observe` with the bank state, the call, the
/// effective parameters and the decision before each assignment.
pub fn run_trial_observed<F>(
    building: &BuildingSpec,
    scheduler: Scheduler,
    traffic: &[Passenger],
    params: &SchedulerParams,
    opts: &TrialOptions,
    mut observe: F,
) -> Result<TrialOutcome>
where
    F: FnMut(&BankState, &HallCall, &SchedulerParams, &DecisionRecord),
{
    building.validate()?;
    params.validate()?;
    check_traffic(traffic, building)?;
    if !(opts.drain_s.is_finite() && opts.drain_s >= 0.0) {
        return domain(format!(
            "drain_s must be finite and >= 0, got {}",
            opts.drain_s
        ));
    }
    let mut passengers = traffic.to_vec();
    for p in &mut passengers {
        p.assigned_car = None;
        p.board_time_s = None;
        p.alight_time_s = None;
    }
    let mut bank = BankState::parked(building);
    let mut estimator = RateEstimator::new(opts.rate_decay_s, opts.rate_prior, 0.0)?;
    let mut queue = Queue {
        heap: BinaryHeap::new(),
        seq: 0,
    };
    for (k, p) in passengers.iter().enumerate() {
        queue.push(p.arrival_time_s, 1, k);
    }
    let stop_at = passengers.last().map_or(0.0, |p| p.arrival_time_s) + opts.drain_s;
    let mut decisions = 0;
    let mut params = *params;
    let mut now = 0.0;

    while let Some(Reverse(ev)) = queue.heap.pop() {
        if ev.time > stop_at {
            break;
        }
        now = ev.time;
        bank.clock_s = now;
        if ev.kind == 0 {
            let car = &mut bank.cars[ev.target];
            let mut ledger = Ledger {
                passengers: &mut passengers,
            };
            if let Some(next) = car.advance(building, opts.park_idle_at_lobby, &mut ledger) {
                queue.push(next, 0, ev.target);
            }
            continue;
        }

        let p = &passengers[ev.target];
        let call = p.hall_call();
        let pickup = Pickup::from_call(p.id, &call);
        estimator.observe(call.floor, now)?;
        let coalesced = if opts.coalesce_calls {
            bank.cars.iter().position(|c| {
                c.assigned
                    .iter()
                    .any(|q| q.floor == call.floor && q.direction == call.direction)
            })
        } else {
            None
        };
        let chosen = match coalesced {
            Some(c) => c,
            None => {
                params.lobby_rate = if opts.lobby_rate_only {
                    estimator.lobby_rate(now)?
                } else {
                    estimator.total_rate(now)?
                };
                decisions += 1;
                let record = decide(scheduler, &bank, &call, building, &params)?;
                observe(&bank, &call, &params, &record);
                record.chosen_car
            }
        };
        passengers[ev.target].assigned_car = Some(chosen);
        let car = &mut bank.cars[chosen];
        let was_idle = car.phase == Phase::Idle;
        let mut ledger = Ledger {
            passengers: &mut passengers,
        };
        if car.assign(pickup, now, building, &mut ledger) {
            debug_assert!(was_idle);
            queue.push(car.ready_at, 0, chosen);
        }
    }

    let waits_s: Vec<f64> = passengers
        .iter()
        .filter_map(Passenger::waiting_time_s)
        .collect();
    let served = waits_s.len();
    let metrics = TrialMetrics {
        avg_wait_s: if served > 0 {
            waits_s.iter().sum::<f64>() / served as f64
        } else {
            0.0
        },
        max_wait_s: waits_s.iter().copied().fold(0.0, f64::max),
        served,
        unserved: passengers.len() - served,
        waits_s,
    };
    Ok(TrialOutcome {
        metrics,
        passengers,
        decisions,
        end_time_s: now,
    })
}
