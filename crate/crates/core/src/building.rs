//! Building geometry and the constant-velocity car kinematics shared by the
//! forecaster and the simulator.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Floors are numbered from 1; floor 1 is the lobby.
pub type Floor = u32;

pub const LOBBY: Floor = 1;

fn default_floor_height() -> f64 {
    4.0
}
fn default_lobby_height() -> f64 {
    5.0
}
fn default_speed() -> f64 {
    3.0
}
fn default_dwell() -> f64 {
    8.0
}

/// Static description of a building and its elevator bank.
///
/// The serialized keys are the ones accepted in building config files:
/// `floors`, `cars`, `floor_height_m`, `lobby_height_m`, `speed_mps`,
/// `dwell_s` and the optional `capacity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingSpec {
    #[serde(rename = "floors")]
    pub num_floors: u32,
    #[serde(rename = "cars")]
    pub num_cars: usize,
    #[serde(default = "default_floor_height")]
    pub floor_height_m: f64,
    #[serde(default = "default_lobby_height")]
    pub lobby_height_m: f64,
    #[serde(rename = "speed_mps", default = "default_speed")]
    pub car_speed_mps: f64,
    #[serde(rename = "dwell_s", default = "default_dwell")]
    pub stop_dwell_s: f64,
    /// `None` means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
}

impl BuildingSpec {
    /// A building with the default kinematic constants (4 m floors, 5 m lobby,
    /// 3 m/s cars, 8 s dwell, unbounded capacity).
    pub fn new(num_floors: u32, num_cars: usize) -> Result<Self> {
        let spec = BuildingSpec {
            num_floors,
            num_cars,
            floor_height_m: default_floor_height(),
            lobby_height_m: default_lobby_height(),
            car_speed_mps: default_speed(),
            stop_dwell_s: default_dwell(),
            capacity: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_floors < 2 {
            return domain(format!("floors must be >= 2, got {}", self.num_floors));
        }
        if self.num_cars < 1 {
            return domain("cars must be >= 1");
        }
        for (name, v) in [
            ("floor_height_m", self.floor_height_m),
            ("lobby_height_m", self.lobby_height_m),
            ("speed_mps", self.car_speed_mps),
            ("dwell_s", self.stop_dwell_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.capacity == Some(0) {
            return domain("capacity must be >= 1 when set");
        }
        Ok(())
    }

    /// Loads and validates a building config file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let spec: BuildingSpec = crate::config::load_toml(path.as_ref())?;
        spec.validate().map_err(|e| Error::Config {
            path: path.as_ref().display().to_string(),
            message: e.to_string(),
        })?;
        Ok(spec)
    }

    pub fn top_floor(&self) -> Floor {
        self.num_floors
    }

    pub fn contains(&self, floor: Floor) -> bool {
        (1..=self.num_floors).contains(&floor)
    }

    fn check(&self, floor: Floor) -> Result<()> {
        if self.contains(floor) {
            Ok(())
        } else {
            domain(format!("floor {floor} outside 1..={}", self.num_floors))
        }
    }

    /// Height of a floor sill above the lobby sill, in meters.
    pub fn height_m(&self, floor: Floor) -> f64 {
        if floor <= LOBBY {
            0.0
        } else {
            self.lobby_height_m + f64::from(floor - 2) * self.floor_height_m
        }
    }

    /// Travel time between two floors without range checks. Hot paths use
    /// this after validating floors once.
    #[inline]
    pub fn travel_s(&self, from: Floor, to: Floor) -> f64 {
        (self.height_m(from) - self.height_m(to)).abs() / self.car_speed_mps
    }

    /// Constant-velocity travel time between two floors.
    pub fn travel_time(&self, from: Floor, to: Floor) -> Result<f64> {
        self.check(from)?;
        self.check(to)?;
        Ok(self.travel_s(from, to))
    }

    /// Duration of visiting `stops` in order from `start`: travel between
    /// consecutive floors plus one dwell per listed stop.
    pub fn itinerary_duration(&self, stops: &[Floor], start: Floor) -> Result<f64> {
        if stops.is_empty() {
            return domain("itinerary needs at least one stop");
        }
        self.check(start)?;
        let mut at = start;
        let mut total = 0.0;
        for &stop in stops {
            total += self.travel_time(at, stop)? + self.stop_dwell_s;
            at = stop;
        }
        Ok(total)
    }

    /// Short label used in reports, e.g. `15fl-6sh`.
    pub fn label(&self) -> String {
        format!("{}fl-{}sh", self.num_floors, self.num_cars)
    }
}
