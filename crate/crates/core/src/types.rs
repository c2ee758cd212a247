use std::fmt;

use serde::{Deserialize, Serialize};

use crate::building::{BuildingSpec, Floor, LOBBY};
use crate::error::{domain, Result};

pub type PassengerId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    /// Direction of travel from `from` to `to`; `None` when equal.
    pub fn between(from: Floor, to: Floor) -> Option<Direction> {
        match to.cmp(&from) {
            std::cmp::Ordering::Greater => Some(Direction::Up),
            std::cmp::Ordering::Less => Some(Direction::Down),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// True when `floor` lies strictly past `from` in this direction.
    #[inline]
    pub fn beyond(self, floor: Floor, from: Floor) -> bool {
        match self {
            Direction::Up => floor > from,
            Direction::Down => floor < from,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

/// A hall-call button press: floor and desired direction are known, the
/// destination is not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HallCall {
    pub floor: Floor,
    pub direction: Direction,
    pub time_s: f64,
}

impl HallCall {
    pub fn new(
        floor: Floor,
        direction: Direction,
        time_s: f64,
        building: &BuildingSpec,
    ) -> Result<Self> {
        let call = HallCall {
            floor,
            direction,
            time_s,
        };
        call.validate(building)?;
        Ok(call)
    }

    pub fn validate(&self, building: &BuildingSpec) -> Result<()> {
        if !building.contains(self.floor) {
            return domain(format!(
                "hall call at floor {} outside the building",
                self.floor
            ));
        }
        match self.direction {
            Direction::Down if self.floor == LOBBY => domain("no down call at the lobby"),
            Direction::Up if self.floor == building.top_floor() => {
                domain("no up call at the top floor")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Passenger {
    pub id: PassengerId,
    pub arrival_time_s: f64,
    pub origin_floor: Floor,
    pub destination_floor: Floor,
    pub assigned_car: Option<usize>,
    pub board_time_s: Option<f64>,
    pub alight_time_s: Option<f64>,
}

impl Passenger {
    pub fn new(
        id: PassengerId,
        arrival_time_s: f64,
        origin_floor: Floor,
        destination_floor: Floor,
    ) -> Self {
        Passenger {
            id,
            arrival_time_s,
            origin_floor,
            destination_floor,
            assigned_car: None,
            board_time_s: None,
            alight_time_s: None,
        }
    }

    pub fn direction(&self) -> Direction {
        Direction::between(self.origin_floor, self.destination_floor)
            .expect("origin and destination differ")
    }

    pub fn hall_call(&self) -> HallCall {
        HallCall {
            floor: self.origin_floor,
            direction: self.direction(),
            time_s: self.arrival_time_s,
        }
    }

    pub fn waiting_time_s(&self) -> Option<f64> {
        self.board_time_s.map(|b| b - self.arrival_time_s)
    }
}
