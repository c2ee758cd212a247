//! Call assignment policies.
//!
//! - [`assign_esa_dp_la`]: mixes the average expected wait of existing
//!   passengers with the normalized expected wait of future lobby passengers.
//! - [`assign_esa_dp`]: existing passengers only.
//! - [`assign_conventional`]: shortest total round trip with pessimistic
//!   placeholder destinations; the baseline.

mod rate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use rate::{update_rate_estimate, RateEstimator};

use crate::building::BuildingSpec;
use crate::car::{BankState, Pickup};
use crate::error::{domain, Error, Result};
use crate::forecast::{self, candidate_table, ForecastOptions};
use crate::lobby::{expected_lobby_wait, normalize_wait, LandingPattern};
use crate::types::{HallCall, PassengerId};

/// Placeholder id for the passenger behind the call under decision.
pub const NEW_PASSENGER: PassengerId = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    Conventional,
    EsaDp,
    EsaDpLa,
}

impl Scheduler {
    pub const ALL: [Scheduler; 3] = [
        Scheduler::Conventional,
        Scheduler::EsaDp,
        Scheduler::EsaDpLa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheduler::Conventional => "conventional",
            Scheduler::EsaDp => "esa-dp",
            Scheduler::EsaDpLa => "esa-dp-la",
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheduler::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown scheduler {s:?} (expected conventional, esa-dp or esa-dp-la)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchedulerParams {
    /// Weight of the existing-passenger term.
    pub alpha: f64,
    /// Discount rate of the look-ahead, 1/s.
    pub beta: f64,
    /// Lobby arrival rate fed to the look-ahead, 1/s.
    pub lobby_rate: f64,
    pub forecast: ForecastOptions,
}

impl Default for SchedulerParams {
    fn default() -> Self {
        SchedulerParams {
            alpha: 0.2,
            beta: 0.02,
            lobby_rate: 0.0,
            forecast: ForecastOptions::default(),
        }
    }
}

impl SchedulerParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return domain(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return domain(format!("beta must be finite and >= 0, got {}", self.beta));
        }
        if !(self.lobby_rate.is_finite() && self.lobby_rate >= 0.0) {
            return domain(format!(
                "lobby rate must be finite and >= 0, got {}",
                self.lobby_rate
            ));
        }
        if self.forecast.cap == 0 {
            return domain("forecast cap must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateScore {
    pub car: usize,
    pub w_bar: f64,
    pub v_bar: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionRecord {
    pub candidates: Vec<CandidateScore>,
    pub chosen_car: usize,
    /// More than one candidate attained the minimum score.
    pub tie_broken: bool,
}

/// Scores within this relative distance of the minimum count as tied.
const TIE_EPS: f64 = 1e-12;

/// Index of the smallest score, lowest index among ties, and whether a tie
/// occurred.
pub fn argmin(scores: &[f64]) -> (usize, bool) {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = TIE_EPS * min.abs();
    let mut tied = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s - min <= tol)
        .map(|(k, _)| k);
    let first = tied.next().expect("at least one candidate");
    (first, tied.next().is_some())
}

fn record(candidates: Vec<CandidateScore>) -> DecisionRecord {
    let scores: Vec<f64> = candidates.iter().map(|c| c.score).collect();
    let (chosen_car, tie_broken) = argmin(&scores);
    DecisionRecord {
        candidates,
        chosen_car,
        tie_broken,
    }
}

/// Normalized expected wait of future lobby passengers for one row of the
/// landing matrix.
pub fn look_ahead_wait(landings: &[f64], lobby_rate: f64, beta: f64) -> Result<f64> {
    let pattern = LandingPattern::canonicalize(landings)?;
    let v = expected_lobby_wait(&pattern, lobby_rate, beta)?;
    normalize_wait(v, beta, lobby_rate, pattern.horizon_s())
}

/// Look-ahead assignment: minimizes `alpha * W_bar + (1 - alpha) * V_bar`.
pub fn assign_esa_dp_la(
    bank: &BankState,
    call: &HallCall,
    building: &BuildingSpec,
    params: &SchedulerParams,
) -> Result<DecisionRecord> {
    params.validate()?;
    let table = candidate_table(bank, call, NEW_PASSENGER, building, &params.forecast)?;
    let n = table.n as f64;
    let mut candidates = Vec::with_capacity(table.w.len());
    for (i, (&w, row)) in table.w.iter().zip(&table.t_hat).enumerate() {
        let w_bar = w / n;
        // alpha = 1 ignores the look-ahead entirely, so skip the work.
        let v_bar = if params.alpha < 1.0 {
            look_ahead_wait(row, params.lobby_rate, params.beta)?
        } else {
            0.0
        };
        candidates.push(CandidateScore {
            car: i,
            w_bar,
            v_bar,
            score: params.alpha * w_bar + (1.0 - params.alpha) * v_bar,
        });
    }
    Ok(record(candidates))
}

/// Existing-passenger assignment: minimizes the expected cumulative wait.
pub fn assign_esa_dp(
    bank: &BankState,
    call: &HallCall,
    building: &BuildingSpec,
    opts: &ForecastOptions,
) -> Result<DecisionRecord> {
    let table = candidate_table(bank, call, NEW_PASSENGER, building, opts)?;
    let n = table.n as f64;
    Ok(record(
        table
            .w
            .iter()
            .enumerate()
            .map(|(i, &w)| CandidateScore {
                car: i,
                w_bar: w / n,
                v_bar: 0.0,
                score: w,
            })
            .collect(),
    ))
}

/// Round-trip baseline: every waiting passenger is sent to the farthest
/// floor in their direction, and the candidate with the smallest sum of
/// lobby return times over all cars wins.
pub fn assign_conventional(
    bank: &BankState,
    call: &HallCall,
    building: &BuildingSpec,
) -> Result<DecisionRecord> {
    call.validate(building)?;
    if bank.cars.is_empty() {
        return domain("bank has no cars");
    }
    let b = forecast::uncapped(building);
    let clock = bank.clock_s;
    let pickup = Pickup::from_call(NEW_PASSENGER, call);
    let free: Vec<f64> = bank
        .cars
        .iter()
        .map(|c| forecast::pessimistic_landing(c, None, &b, clock))
        .collect();
    let base: f64 = free.iter().sum();
    Ok(record(
        bank.cars
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let with = forecast::pessimistic_landing(c, Some(pickup), &b, clock);
                CandidateScore {
                    car: i,
                    w_bar: 0.0,
                    v_bar: 0.0,
                    score: base - free[i] + with,
                }
            })
            .collect(),
    ))
}

/// Dispatches to the selected scheduler.
pub fn decide(
    scheduler: Scheduler,
    bank: &BankState,
    call: &HallCall,
    building: &BuildingSpec,
    params: &SchedulerParams,
) -> Result<DecisionRecord> {
    match scheduler {
        Scheduler::Conventional => assign_conventional(bank, call, building),
        Scheduler::EsaDp => assign_esa_dp(bank, call, building, &params.forecast),
        Scheduler::EsaDpLa => assign_esa_dp_la(bank, call, building, params),
    }
}
