//! Traffic generation and the discrete-event simulator.

mod engine;
mod traffic;

pub use engine::{run_trial, run_trial_observed, TrialMetrics, TrialOptions, TrialOutcome};
pub use traffic::{generate_traffic, traffic_hash, TrafficProfile};
