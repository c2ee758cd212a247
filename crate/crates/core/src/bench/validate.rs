//! Oracle gates: each compares a production path against an independent
//! computation and reports the worst error seen.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::suite::{count_disagreements, decision_suite, SUITE_FORECAST_CAP};
use crate::building::BuildingSpec;
use crate::car::{CarState, Phase, Pickup, Rider};
use crate::error::{domain, Result};
use crate::forecast::{
    enumerate_scenarios, expected_profile, simulate_delivery, DestinationScenario, ForecastOptions,
};
use crate::lobby::{
    expected_lobby_wait, mc_lobby_wait, normalize_wait, quadrature_cost, transition_cost,
    LandingPattern,
};
use crate::policy::{Scheduler, SchedulerParams};
use crate::types::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidateOptions {
    /// Multiplies every gate tolerance; 0 demands exact agreement.
    pub tolerance_scale: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateResult {
    pub name: String,
    pub passed: bool,
    /// Worst error over the gate's cases, in the unit of `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub gates: Vec<GateResult>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn gate(&self, name: &str) -> Option<&GateResult> {
        self.gates.iter().find(|g| g.name == name)
    }
}

fn gate(name: &str, measured: f64, tolerance: f64, detail: String) -> GateResult {
    GateResult {
        name: name.into(),
        passed: measured <= tolerance,
        measured,
        tolerance,
        detail,
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub const QUADRATURE_TOL: f64 = 1e-8;
pub const PIN_J0_TOL: f64 = 1e-12;
pub const PIN_J1_TOL: f64 = 1e-10;
/// In standard errors.
pub const MC_SIGMAS: f64 = 3.0;
pub const MC_REPS: usize = 100_000;
pub const NORMALIZATION_TOL: f64 = 1e-3;
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;
pub const FORECAST_SAMPLES: usize = 10_000;
pub const SUITE_SIZE: usize = 100;

/// Largest relative error of the closed-form transition cost against
/// adaptive quadrature over the full parameter grid.
pub fn quadrature_gate(tol: f64) -> Result<GateResult> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    let mut cases = 0;
    for j in 0..=7u64 {
        for rate in [0.1, 0.7, 2.0] {
            for beta in [0.0, 0.01, 0.02, 0.1] {
                for dt in [0.5, 5.0, 30.0] {
                    for t0 in [0.0, 20.0] {
                        let cf = transition_cost(j, t0, dt, rate, beta)?;
                        let q = quadrature_cost(j, t0, dt, rate, beta, 1e-13)?;
                        let e = rel_err(cf, q);
                        cases += 1;
                        if e > worst {
                            worst = e;
                            at = format!("j={j} rate={rate} beta={beta} dt={dt} t0={t0}");
                        }
                    }
                }
            }
        }
    }
    Ok(gate(
        "quadrature",
        worst,
        tol,
        format!("{cases} cases; worst at {at}"),
    ))
}

/// Undiscounted costs for zero and one idle car against their closed forms.
pub fn analytic_pins_gate(scale: f64) -> Result<GateResult> {
    let mut worst_ratio = 0.0f64;
    let mut detail = Vec::new();
    for rate in [0.1, 0.7, 2.0] {
        for dt in [0.5, 5.0, 30.0] {
            let j0 = transition_cost(0, 0.0, dt, rate, 0.0)?;
            let e0 = rel_err(j0, rate * dt * dt / 2.0);
            let j1 = transition_cost(1, 0.0, dt, rate, 0.0)?;
            let e1 = rel_err(
                j1,
                rate * dt * dt / 2.0 - dt + (-(-rate * dt).exp_m1()) / rate,
            );
            worst_ratio = worst_ratio.max(e0 / PIN_J0_TOL).max(e1 / PIN_J1_TOL);
            if e0 > PIN_J0_TOL * scale || e1 > PIN_J1_TOL * scale {
                detail.push(format!("rate={rate} dt={dt}: j0 {e0:.2e}, j1 {e1:.2e}"));
            }
        }
    }
    // Measured in units of the per-pin tolerance.
    Ok(gate("analytic-pins", worst_ratio, scale, detail.join("; ")))
}

/// Deterministic random sorted patterns for the Monte-Carlo gate.
pub fn mc_patterns(count: usize, seed: u64) -> Vec<(LandingPattern, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let c = rng.gen_range(2..=6);
            let times: Vec<f64> = (0..c)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen_range(0.0..60.0)
                    }
                })
                .collect();
            let rate = rng.gen_range(0.1..1.0);
            let beta = if k % 2 == 0 { 0.0 } else { 0.02 };
            (
                LandingPattern::canonicalize(&times).expect("valid times"),
                rate,
                beta,
            )
        })
        .collect()
}

/// Grid value against direct simulation, in standard errors.
pub fn monte_carlo_gate(sigmas: f64, reps: usize) -> Result<GateResult> {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (k, (pattern, rate, beta)) in mc_patterns(10, 20_240_601).into_iter().enumerate() {
        let dp = expected_lobby_wait(&pattern, rate, beta)?;
        let (mc, se) = mc_lobby_wait(&pattern, rate, beta, reps, 31 + k as u64)?;
        let z = if se > 0.0 {
            (dp - mc).abs() / se
        } else if dp == mc {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
        detail.push(format!(
            "C={} dp={dp:.4} mc={mc:.4} z={z:.2}",
            pattern.cars()
        ));
    }
    Ok(gate("dp-vs-monte-carlo", worst, sigmas, detail.join("; ")))
}

/// One car landing at `T` with tiny discount: the normalized wait is `T/2`.
pub fn normalization_gate(tol: f64) -> Result<GateResult> {
    let mut worst = 0.0f64;
    for (t, rate) in [(30.0, 0.5), (10.0, 0.2), (60.0, 1.0)] {
        let beta = 1e-6;
        let p = LandingPattern::canonicalize(&[t])?;
        let v = normalize_wait(expected_lobby_wait(&p, rate, beta)?, beta, rate, t)?;
        worst = worst.max(rel_err(v, t / 2.0));
    }
    Ok(gate(
        "normalization",
        worst,
        tol,
        "single car, l = 0, beta = 1e-6".into(),
    ))
}

/// Exact zeros and exact permutation invariance; any difference fails.
pub fn degenerate_gate() -> Result<GateResult> {
    let mut worst = 0.0f64;
    let zeros = LandingPattern::canonicalize(&[0.0; 4])?;
    worst = worst.max(expected_lobby_wait(&zeros, 0.8, 0.02)?.abs());
    let p = LandingPattern::canonicalize(&[12.0, 3.0, 40.0])?;
    worst = worst.max(expected_lobby_wait(&p, 0.0, 0.02)?.abs());
    let base = expected_lobby_wait(&p, 0.6, 0.02)?;
    for perm in [[3.0, 12.0, 40.0], [40.0, 12.0, 3.0], [12.0, 40.0, 3.0]] {
        let q = LandingPattern::canonicalize(&perm)?;
        worst = worst.max((expected_lobby_wait(&q, 0.6, 0.02)? - base).abs());
    }
    Ok(gate(
        "degenerate",
        worst,
        0.0,
        "zero pattern, zero rate, permutations".into(),
    ))
}

/// The five small car states used by the forecast gate, in a 10-floor building.
pub fn forecast_cases() -> (BuildingSpec, Vec<(CarState, f64)>) {
    let b = BuildingSpec::new(10, 2).expect("valid building");
    let pick = |id, floor, direction, arrival_s| Pickup {
        passenger: id,
        floor,
        direction,
        arrival_s,
    };
    let mut cases = Vec::new();

    let mut c = CarState::idle_at(0, 2);
    c.phase = Phase::Moving;
    c.direction = Some(Direction::Up);
    c.ready_at = 1.0;
    c.assigned = vec![pick(1, 6, Direction::Down, 0.0)];
    cases.push((c, 0.0));

    let mut c = CarState::idle_at(0, 4);
    c.phase = Phase::Moving;
    c.direction = Some(Direction::Up);
    c.ready_at = 2.0;
    c.onboard = vec![Rider {
        passenger: 10,
        destination: 7,
    }];
    c.assigned = vec![
        pick(1, 5, Direction::Up, 0.5),
        pick(2, 8, Direction::Down, 1.0),
    ];
    cases.push((c, 1.0));

    let mut c = CarState::idle_at(0, 7);
    c.phase = Phase::Dwelling;
    c.direction = Some(Direction::Down);
    c.ready_at = 5.0;
    c.onboard = vec![Rider {
        passenger: 10,
        destination: 2,
    }];
    c.assigned = vec![
        pick(1, 5, Direction::Down, 0.0),
        pick(2, 3, Direction::Up, 2.0),
        pick(3, 9, Direction::Down, 3.0),
    ];
    cases.push((c, 3.0));

    let mut c = CarState::idle_at(0, 1);
    c.phase = Phase::Dwelling;
    c.direction = Some(Direction::Up);
    c.ready_at = 6.0;
    c.onboard = vec![
        Rider {
            passenger: 10,
            destination: 9,
        },
        Rider {
            passenger: 11,
            destination: 4,
        },
    ];
    c.assigned = vec![
        pick(1, 2, Direction::Up, 1.0),
        pick(2, 2, Direction::Up, 1.5),
    ];
    cases.push((c, 2.0));

    let mut c = CarState::idle_at(0, 9);
    c.phase = Phase::Moving;
    c.direction = Some(Direction::Down);
    c.ready_at = 11.0;
    c.assigned = vec![
        pick(1, 4, Direction::Up, 4.0),
        pick(2, 6, Direction::Down, 6.0),
        pick(3, 10, Direction::Down, 8.0),
    ];
    cases.push((c, 10.0));

    (b, cases)
}

/// Expected waits and landing time against seeded destination sampling, in
/// standard errors; also checks that exact scenario probabilities sum to one.
pub fn forecast_gate(
    sigmas: f64,
    prob_tol: f64,
    samples: usize,
) -> Result<(GateResult, GateResult)> {
    let (b, cases) = forecast_cases();
    let opts = ForecastOptions::default();
    let mut worst_z = 0.0f64;
    let mut worst_sum = 0.0f64;
    let mut detail = Vec::new();
    for (k, (car, clock)) in cases.iter().enumerate() {
        let exact = expected_profile(car, &b, *clock, &opts)?;
        if !exact.exact {
            return domain("forecast gate case is not enumerated exactly");
        }
        let scen = enumerate_scenarios(car, &b, opts.cap, 0)?;
        worst_sum = worst_sum.max((scen.iter().map(|s| s.probability).sum::<f64>() - 1.0).abs());

        let mut rng = ChaCha8Rng::seed_from_u64(900 + k as u64);
        let n_pass = car.assigned.len();
        let mut sums = vec![0.0; n_pass + 1];
        let mut sq = vec![0.0; n_pass + 1];
        for _ in 0..samples {
            let assignments = car
                .assigned
                .iter()
                .map(|p| {
                    let dest = match p.direction {
                        Direction::Up => rng.gen_range(p.floor + 1..=b.top_floor()),
                        Direction::Down => rng.gen_range(1..p.floor),
                    };
                    (p.passenger, dest)
                })
                .collect();
            let out = simulate_delivery(
                car,
                &DestinationScenario {
                    assignments,
                    probability: 1.0,
                },
                &b,
                *clock,
            )?;
            let mut vals: Vec<f64> = out.pickup_waits.iter().map(|w| w.1).collect();
            vals.push(out.landing_s);
            for (i, v) in vals.iter().enumerate() {
                sums[i] += v;
                sq[i] += v * v;
            }
        }
        let mut targets: Vec<f64> = exact.expected_waits.iter().map(|w| w.1).collect();
        targets.push(exact.expected_landing_s);
        let n = samples as f64;
        for i in 0..=n_pass {
            let m = sums[i] / n;
            let se = ((sq[i] / n - m * m).max(0.0) / (n - 1.0)).sqrt();
            let d = (targets[i] - m).abs();
            let z = if se > 1e-12 {
                d / se
            } else if d < 1e-9 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
        }
        detail.push(format!(
            "case {k}: landing {:.3} vs {:.3}",
            exact.expected_landing_s,
            sums[n_pass] / n
        ));
    }
    Ok((
        gate("forecast-vs-sampling", worst_z, sigmas, detail.join("; ")),
        gate(
            "scenario-probabilities",
            worst_sum,
            prob_tol,
            format!("{} cases", cases.len()),
        ),
    ))
}

/// Decision disagreements between the look-ahead and the existing-passengers
/// scheduler on the fixed suite, at `alpha = 1` and at `beta = 10`.
pub fn reduction_gates() -> Result<(GateResult, GateResult)> {
    let cases = decision_suite(SUITE_SIZE)?;
    let forecast = ForecastOptions {
        cap: SUITE_FORECAST_CAP,
        seed: 1,
    };
    let dp = SchedulerParams {
        forecast,
        ..Default::default()
    };
    let alpha_one = SchedulerParams { alpha: 1.0, ..dp };
    let beta_ten = SchedulerParams { beta: 10.0, ..dp };
    let a = count_disagreements(
        &cases,
        (Scheduler::EsaDpLa, &alpha_one),
        (Scheduler::EsaDp, &dp),
    )?;
    let b = count_disagreements(
        &cases,
        (Scheduler::EsaDpLa, &beta_ten),
        (Scheduler::EsaDp, &dp),
    )?;
    let n = cases.len();
    Ok((
        gate(
            "reduction-alpha-one",
            a as f64,
            0.0,
            format!("{a} of {n} decisions differ"),
        ),
        gate(
            "reduction-beta-ten",
            b as f64,
            0.0,
            format!("{b} of {n} decisions differ"),
        ),
    ))
}

/// Runs every gate with tolerances multiplied by `opts.tolerance_scale`.
/// Exact gates (degenerate cases, policy reductions) have zero tolerance.
pub fn validate_suite(opts: &ValidateOptions) -> Result<ValidationReport> {
    let s = opts.tolerance_scale;
    if !(s.is_finite() && s >= 0.0) {
        return domain(format!("tolerance scale must be finite and >= 0, got {s}"));
    }
    let mut gates = vec![
        quadrature_gate(QUADRATURE_TOL * s)?,
        analytic_pins_gate(s)?,
        monte_carlo_gate(MC_SIGMAS * s, MC_REPS)?,
        normalization_gate(NORMALIZATION_TOL * s)?,
        degenerate_gate()?,
    ];
    let (f, p) = forecast_gate(MC_SIGMAS * s, PROBABILITY_SUM_TOL * s, FORECAST_SAMPLES)?;
    gates.push(f);
    gates.push(p);
    let (a, b) = reduction_gates()?;
    gates.push(a);
    gates.push(b);
    let passed = gates.iter().all(|g| g.passed);
    Ok(ValidationReport { gates, passed })
}
