//! Mixed up-peak traffic: Poisson arrivals, mostly from the lobby.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::building::{BuildingSpec, Floor, LOBBY};
use crate::config::load_toml;
use crate::error::{domain, Result};
use crate::types::Passenger;

fn default_lobby_fraction() -> f64 {
    0.8
}

fn default_duration() -> f64 {
    3600.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficProfile {
    /// Total arrival rate, passengers per hour.
    pub rate_per_hour: f64,
    #[serde(default = "default_lobby_fraction")]
    pub lobby_fraction: f64,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    #[serde(default)]
    pub seed: u64,
}

impl TrafficProfile {
    pub fn new(rate_per_hour: f64, seed: u64) -> Self {
        TrafficProfile {
            rate_per_hour,
            lobby_fraction: default_lobby_fraction(),
            duration_s: default_duration(),
            seed,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        load_toml(path)
    }

    pub fn validate(&self, building: &BuildingSpec) -> Result<()> {
        if !(self.rate_per_hour.is_finite() && self.rate_per_hour >= 0.0) {
            return domain(format!(
                "rate_per_hour must be finite and >= 0, got {}",
                self.rate_per_hour
            ));
        }
        if !(0.0..=1.0).contains(&self.lobby_fraction) {
            return domain(format!(
                "lobby_fraction must lie in [0, 1], got {}",
                self.lobby_fraction
            ));
        }
        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return domain(format!(
                "duration_s must be finite and >= 0, got {}",
                self.duration_s
            ));
        }
        if self.lobby_fraction < 1.0 && building.num_floors < 3 {
            return domain("inter-floor traffic needs at least three floors");
        }
        Ok(())
    }

    pub fn rate_per_s(&self) -> f64 {
        self.rate_per_hour / 3600.0
    }
}

/// Arrivals of a Poisson process over `[0, duration_s]`. Lobby passengers go
/// to a uniform upper floor; the rest travel between two distinct upper
/// floors. Passenger ids are the arrival indices.
pub fn generate_traffic(
    profile: &TrafficProfile,
    building: &BuildingSpec,
) -> Result<Vec<Passenger>> {
    profile.validate(building)?;
    building.validate()?;
    let rate = profile.rate_per_s();
    let mut out = Vec::new();
    if rate == 0.0 {
        return Ok(out);
    }
    let top = building.top_floor();
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let mut t = 0.0;
    loop {
        t += -(1.0 - rng.gen::<f64>()).ln() / rate;
        if t > profile.duration_s {
            break;
        }
        let (origin, destination): (Floor, Floor) = if rng.gen_bool(profile.lobby_fraction) {
            (LOBBY, rng.gen_range(2..=top))
        } else {
            let origin = rng.gen_range(2..=top);
            // Uniform over the upper floors other than the origin.
            let mut dest = rng.gen_range(2..top);
            if dest >= origin {
                dest += 1;
            }
            (origin, dest)
        };
        let id = out.len() as u64;
        out.push(Passenger::new(id, t, origin, destination));
    }
    Ok(out)
}

/// Short content hash of a passenger sequence, used to check that paired
/// trials saw the same traffic.
pub fn traffic_hash(passengers: &[Passenger]) -> String {
    let mut h = Sha256::new();
    for p in passengers {
        h.update(p.id.to_le_bytes());
        h.update(p.arrival_time_s.to_bits().to_le_bytes());
        h.update(p.origin_floor.to_le_bytes());
        h.update(p.destination_floor.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}
