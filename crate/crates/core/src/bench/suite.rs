//! A fixed set of bank states captured from seeded trials, used to compare
//! the decisions of two scheduler configurations.

use serde::Serialize;

use crate::building::BuildingSpec;
use crate::car::BankState;
use crate::error::Result;
use crate::forecast::ForecastOptions;
use crate::policy::{decide, Scheduler, SchedulerParams};
use crate::sim::{generate_traffic, run_trial_observed, TrafficProfile, TrialOptions};
use crate::types::HallCall;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionCase {
    pub building: BuildingSpec,
    pub bank: BankState,
    pub call: HallCall,
    /// Lobby arrival rate the simulator would have fed the scheduler, 1/s.
    pub lobby_rate: f64,
}

/// (floors, cars, rate per hour, seed, cases taken)
const SOURCES: [(u32, usize, f64, u64, usize); 2] =
    [(15, 6, 2500.0, 7001, 60), (8, 3, 1200.0, 7002, 40)];

/// Forecast cap used when capturing and replaying suite decisions.
pub const SUITE_FORECAST_CAP: usize = 64;

/// Captures bank states from short ESA-DP trials. Only decisions with at
/// least one passenger already waiting are kept, spread evenly over each
/// trial. Deterministic.
pub fn decision_suite(size: usize) -> Result<Vec<DecisionCase>> {
    let total: usize = SOURCES.iter().map(|s| s.4).sum();
    let mut out = Vec::with_capacity(size);
    for (k, &(floors, cars, rate, seed, take)) in SOURCES.iter().enumerate() {
        let want = if k + 1 == SOURCES.len() {
            size - out.len()
        } else {
            size * take / total
        };
        let building = BuildingSpec::new(floors, cars)?;
        let profile = TrafficProfile {
            duration_s: 900.0,
            ..TrafficProfile::new(rate, seed)
        };
        let traffic = generate_traffic(&profile, &building)?;
        let params = SchedulerParams {
            forecast: ForecastOptions {
                cap: SUITE_FORECAST_CAP,
                seed,
            },
            ..Default::default()
        };
        let mut seen = Vec::new();
        run_trial_observed(
            &building,
            Scheduler::EsaDp,
            &traffic,
            &params,
            &TrialOptions::default(),
            |bank, call, p, _| {
                if bank.waiting_count() > 0 {
                    seen.push((bank.clone(), *call, p.lobby_rate));
                }
            },
        )?;
        if want == 0 || seen.is_empty() {
            continue;
        }
        let stride = (seen.len() / want).max(1);
        out.extend(
            seen.into_iter()
                .step_by(stride)
                .take(want)
                .map(|(bank, call, lobby_rate)| DecisionCase {
                    building: building.clone(),
                    bank,
                    call,
                    lobby_rate,
                }),
        );
    }
    Ok(out)
}

/// Number of cases on which two scheduler configurations choose different
/// cars. Each case's recorded lobby rate overrides `lobby_rate` in both
/// parameter sets.
pub fn count_disagreements(
    cases: &[DecisionCase],
    a: (Scheduler, &SchedulerParams),
    b: (Scheduler, &SchedulerParams),
) -> Result<usize> {
    let mut n = 0;
    for case in cases {
        let pa = SchedulerParams {
            lobby_rate: case.lobby_rate,
            ..*a.1
        };
        let pb = SchedulerParams {
            lobby_rate: case.lobby_rate,
            ..*b.1
        };
        let da = decide(a.0, &case.bank, &case.call, &case.building, &pa)?;
        let db = decide(b.0, &case.bank, &case.call, &case.building, &pb)?;
        if da.chosen_car != db.chosen_car {
            n += 1;
        }
    }
    Ok(n)
}
