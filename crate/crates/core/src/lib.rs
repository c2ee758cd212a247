//! Group elevator scheduling with look-ahead over future lobby passengers.
//!
//! The crate is organised bottom-up:
//!
//! - [`building`], [`types`], [`car`]: building geometry, domain types and
//!   the sweep-order car model shared by the simulator and the forecaster.
//! - [`lobby`]: expected discounted waits of future lobby passengers for a
//!   landing pattern, via a semi-Markov grid solved backwards.
//! - [`forecast`]: expected waits of existing passengers and expected
//!   landing times per candidate car, marginalizing unknown destinations.
//! - [`policy`]: the look-ahead scheduler, the existing-passengers-only
//!   scheduler, a round-trip baseline, and the arrival-rate estimator.
//! - [`sim`]: traffic generation and the discrete-event simulator.
//! - [`bench`]: seeded sweeps, validation gates and plot data.
//! - [`cli`]: the command implementations behind the `elevsim` binary.

pub mod bench;
pub mod building;
pub mod car;
pub mod cli;
mod config;
pub mod error;
pub mod forecast;
pub mod lobby;
pub mod policy;
pub mod sim;
pub mod types;

pub use building::{BuildingSpec, Floor, LOBBY};
pub use car::{BankState, CarState, Phase, Pickup, Rider, ServiceHooks};
pub use error::{Error, Result};
pub use types::{Direction, HallCall, Passenger, PassengerId};
