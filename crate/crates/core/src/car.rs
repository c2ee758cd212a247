//! Car state and the sweep-order service discipline.
//!
//! The same stepping code drives both the simulator and the forecaster, so a
//! forecast replays exactly what the simulator would do if no further calls
//! arrived. A car is described by a checkpoint: the floor it is at (or will
//! reach next while moving) and the time `ready_at` at which it acts there.

use serde::Serialize;

use crate::building::{BuildingSpec, Floor, LOBBY};
use crate::types::{Direction, HallCall, PassengerId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// No pending action; the car waits where it is.
    Idle,
    /// Travelling; `floor` is the next floor, reached at `ready_at`.
    Moving,
    /// Doors open at `floor` until `ready_at`.
    Dwelling,
}

/// A passenger inside the car; the destination is known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rider {
    pub passenger: PassengerId,
    pub destination: Floor,
}

/// An assigned passenger who has not boarded yet; only the direction is known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pickup {
    pub passenger: PassengerId,
    pub floor: Floor,
    pub direction: Direction,
    pub arrival_s: f64,
}

impl Pickup {
    pub fn from_call(passenger: PassengerId, call: &HallCall) -> Self {
        Pickup {
            passenger,
            floor: call.floor,
            direction: call.direction,
            arrival_s: call.time_s,
        }
    }
}

/// Callbacks invoked while a car serves its commitments.
pub trait ServiceHooks {
    /// Destination revealed when `passenger` boards.
    fn destination(&mut self, passenger: PassengerId) -> Floor;
    fn boarded(&mut self, _passenger: PassengerId, _time_s: f64) {}
    fn alighted(&mut self, _passenger: PassengerId, _time_s: f64) {}
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarState {
    /// Zero-based index within the bank.
    pub id: usize,
    pub floor: Floor,
    pub ready_at: f64,
    pub phase: Phase,
    /// Service direction; `None` when the car has no direction (idle).
    pub direction: Option<Direction>,
    pub onboard: Vec<Rider>,
    pub assigned: Vec<Pickup>,
}

impl CarState {
    /// An idle, empty car standing at `floor`.
    pub fn idle_at(id: usize, floor: Floor) -> Self {
        CarState {
            id,
            floor,
            ready_at: 0.0,
            phase: Phase::Idle,
            direction: None,
            onboard: Vec::new(),
            assigned: Vec::new(),
        }
    }

    /// True when the car has neither riders nor pending pickups.
    pub fn is_free(&self) -> bool {
        self.onboard.is_empty() && self.assigned.is_empty()
    }

    /// Idle and empty at the lobby.
    pub fn is_parked_at_lobby(&self) -> bool {
        self.phase == Phase::Idle && self.floor == LOBBY && self.is_free()
    }

    /// End of the current dwell, if the doors are open.
    pub fn busy_until_s(&self) -> Option<f64> {
        (self.phase == Phase::Dwelling).then_some(self.ready_at)
    }

    /// Height of the car above the lobby sill at time `now`.
    pub fn position_m(&self, building: &BuildingSpec, now: f64) -> f64 {
        let here = building.height_m(self.floor);
        match (self.phase, self.direction) {
            (Phase::Moving, Some(d)) => {
                let remaining = ((self.ready_at - now).max(0.0)) * building.car_speed_mps;
                match d {
                    Direction::Up => here - remaining,
                    Direction::Down => here + remaining,
                }
            }
            _ => here,
        }
    }

    fn has_room(&self, capacity: Option<usize>) -> bool {
        capacity.is_none_or(|c| self.onboard.len() < c)
    }

    /// Any rider destination or pickup floor strictly beyond the current
    /// floor in direction `d`.
    pub fn targets_beyond(&self, d: Direction) -> bool {
        let f = self.floor;
        self.onboard.iter().any(|r| d.beyond(r.destination, f))
            || self.assigned.iter().any(|p| d.beyond(p.floor, f))
    }

    /// Direction toward the nearest target not at the current floor; ties go up.
    fn toward_nearest_target(&self) -> Option<Direction> {
        let f = self.floor;
        let nearest = self
            .onboard
            .iter()
            .map(|r| r.destination)
            .chain(self.assigned.iter().map(|p| p.floor))
            .filter(|&t| t != f)
            .min_by_key(|&t| (t.abs_diff(f), if t > f { 0 } else { 1 }))?;
        Direction::between(f, nearest)
    }

    /// Whether a car arriving at its current floor must stop there.
    pub fn should_stop(&self, capacity: Option<usize>) -> bool {
        let f = self.floor;
        if self.onboard.iter().any(|r| r.destination == f) {
            return true;
        }
        if !self.has_room(capacity) {
            return false;
        }
        let mut here = self.assigned.iter().filter(|p| p.floor == f).peekable();
        if here.peek().is_none() {
            return false;
        }
        match self.direction {
            Some(d) => here.any(|p| p.direction == d) || !self.targets_beyond(d),
            None => true,
        }
    }

    /// Direction the car will serve after alighting at the current floor.
    fn service_direction_here(&self) -> Option<Direction> {
        let f = self.floor;
        if let Some(d) = self.direction {
            if self.targets_beyond(d) {
                return Some(d);
            }
        }
        let mut here = self.assigned.iter().filter(|p| p.floor == f);
        if let Some(first) = here.next() {
            let same = self
                .direction
                .filter(|&d| d == first.direction || here.any(|p| p.direction == d));
            return Some(same.unwrap_or(first.direction));
        }
        match self.direction {
            Some(d) if self.targets_beyond(d.opposite()) => Some(d.opposite()),
            Some(_) => None,
            None => self.toward_nearest_target(),
        }
    }

    fn board_here<H: ServiceHooks>(
        &mut self,
        d: Direction,
        now: f64,
        capacity: Option<usize>,
        hooks: &mut H,
    ) {
        let f = self.floor;
        let mut i = 0;
        while i < self.assigned.len() {
            let p = self.assigned[i];
            if p.floor == f && p.direction == d && self.has_room(capacity) {
                self.assigned.remove(i);
                hooks.boarded(p.passenger, now);
                let destination = hooks.destination(p.passenger);
                self.onboard.push(Rider {
                    passenger: p.passenger,
                    destination,
                });
            } else {
                i += 1;
            }
        }
    }

    /// Opens the doors at the current floor: riders alight, the service
    /// direction is chosen, matching pickups board, and a dwell starts.
    fn stop<H: ServiceHooks>(&mut self, now: f64, building: &BuildingSpec, hooks: &mut H) {
        let f = self.floor;
        self.onboard.retain(|r| {
            if r.destination == f {
                hooks.alighted(r.passenger, now);
                false
            } else {
                true
            }
        });
        let d = self.service_direction_here();
        self.direction = d;
        if let Some(d) = d {
            self.board_here(d, now, building.capacity, hooks);
        }
        self.phase = Phase::Dwelling;
        self.ready_at = now + building.stop_dwell_s;
    }

    fn move_one(&mut self, d: Direction, now: f64, building: &BuildingSpec) -> Option<f64> {
        let next = match d {
            Direction::Up => self.floor + 1,
            Direction::Down => self.floor - 1,
        };
        debug_assert!(building.contains(next), "car {} left the shaft", self.id);
        self.ready_at = now + building.travel_s(self.floor, next);
        self.floor = next;
        self.direction = Some(d);
        self.phase = Phase::Moving;
        Some(self.ready_at)
    }

    fn go_idle(&mut self, now: f64) -> Option<f64> {
        self.phase = Phase::Idle;
        self.direction = None;
        self.ready_at = now;
        None
    }

    /// Leaves the current floor toward the next commitment, or parks.
    fn depart<H: ServiceHooks>(
        &mut self,
        now: f64,
        building: &BuildingSpec,
        park_at_lobby: bool,
        hooks: &mut H,
    ) -> Option<f64> {
        let next = match self.direction {
            Some(d) if self.targets_beyond(d) => Some(d),
            Some(d) if self.targets_beyond(d.opposite()) => Some(d.opposite()),
            _ => self.toward_nearest_target(),
        };
        match next {
            Some(d) => self.move_one(d, now, building),
            None if self.is_free() => {
                if park_at_lobby && self.floor != LOBBY {
                    self.move_one(Direction::Down, now, building)
                } else {
                    self.go_idle(now)
                }
            }
            // Only pickups at this very floor remain.
            None => {
                self.direction = None;
                self.stop(now, building, hooks);
                Some(self.ready_at)
            }
        }
    }

    /// Performs the action due at `ready_at` and returns the time of the next
    /// one, or `None` once the car is idle.
    pub fn advance<H: ServiceHooks>(
        &mut self,
        building: &BuildingSpec,
        park_at_lobby: bool,
        hooks: &mut H,
    ) -> Option<f64> {
        let now = self.ready_at;
        match self.phase {
            Phase::Idle => None,
            Phase::Dwelling => self.depart(now, building, park_at_lobby, hooks),
            Phase::Moving => {
                if self.should_stop(building.capacity) {
                    self.stop(now, building, hooks);
                    Some(self.ready_at)
                } else {
                    self.depart(now, building, park_at_lobby, hooks)
                }
            }
        }
    }

    /// Adds a pickup commitment at time `now`. Returns `true` when the car
    /// was idle and now has an action pending (the caller must schedule it).
    pub fn assign<H: ServiceHooks>(
        &mut self,
        pickup: Pickup,
        now: f64,
        building: &BuildingSpec,
        hooks: &mut H,
    ) -> bool {
        self.assigned.push(pickup);
        match self.phase {
            Phase::Idle => {
                if pickup.floor == self.floor {
                    self.direction = None;
                    self.stop(now, building, hooks);
                } else {
                    let d = Direction::between(self.floor, pickup.floor).expect("floors differ");
                    self.move_one(d, now, building);
                }
                true
            }
            Phase::Dwelling => {
                let compatible = self.direction.is_none_or(|d| d == pickup.direction);
                if pickup.floor == self.floor && compatible && self.has_room(building.capacity) {
                    self.direction = Some(pickup.direction);
                    self.board_here(pickup.direction, now, building.capacity, hooks);
                }
                false
            }
            Phase::Moving => false,
        }
    }
}

/// Dynamic state of the whole bank at one instant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BankState {
    pub cars: Vec<CarState>,
    pub clock_s: f64,
}

impl BankState {
    /// All cars idle at the lobby at time zero.
    pub fn parked(building: &BuildingSpec) -> Self {
        BankState {
            cars: (0..building.num_cars)
                .map(|i| CarState::idle_at(i, LOBBY))
                .collect(),
            clock_s: 0.0,
        }
    }

    /// Passengers assigned to some car and still waiting.
    pub fn waiting_count(&self) -> usize {
        self.cars.iter().map(|c| c.assigned.len()).sum()
    }

    pub fn ids_complete(&self) -> bool {
        self.cars.iter().enumerate().all(|(i, c)| c.id == i)
    }
}
