//! The semi-Markov lobby grid and its backward dynamic program.
//!
//! A state `(i, j, m)` counts cars yet to land (`i`), cars idle at the lobby
//! (`j`) and cars that left with passengers (`m`); `i + j + m = C`. Leaving a
//! state means waiting for the next landing. If at most `j` passengers arrive
//! meanwhile, each takes an idle car and nobody waits; if more arrive, the
//! surplus queues until the landing car takes all of them.

use serde::Serialize;

use super::cost::transition_cost_unchecked;
use super::poisson::{pmf_mu, upper_tail};
use super::LandingPattern;
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GridState {
    /// Cars that have yet to land at the lobby.
    pub to_land: usize,
    /// Cars idle at the lobby.
    pub idle: usize,
    /// Cars that departed from the lobby with passengers.
    pub departed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridTransition {
    /// Number of arrivals labelling the edge; for the costly edge this is
    /// the threshold `idle + 1` and `at_least` is set.
    pub arrivals: usize,
    pub at_least: bool,
    pub probability: f64,
    /// Expected cost given that this edge is taken.
    pub cost: f64,
    pub next: GridState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridNode {
    pub state: GridState,
    pub interval_start_s: f64,
    pub interval_s: f64,
    /// Unconditional expected discounted wait accrued before the next landing.
    pub expected_cost: f64,
    pub transitions: Vec<GridTransition>,
    pub cost_to_go: f64,
}

/// All `(C+1)(C+2)/2` states of the lobby chain for one landing pattern.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LobbyGrid {
    pub cars: usize,
    /// Nodes ordered by `to_land` ascending, then `departed` ascending.
    pub nodes: Vec<GridNode>,
}

fn row_offset(to_land: usize, cars: usize) -> usize {
    // Rows 0..to_land hold (cars + 1) + cars + ... entries.
    (0..to_land).map(|r| cars - r + 1).sum()
}

impl LobbyGrid {
    pub fn index(&self, state: GridState) -> usize {
        row_offset(state.to_land, self.cars) + state.departed
    }

    pub fn node(&self, state: GridState) -> &GridNode {
        &self.nodes[self.index(state)]
    }

    pub fn start_state(&self) -> GridState {
        GridState {
            to_land: self.cars,
            idle: 0,
            departed: 0,
        }
    }

    /// Cost-to-go of `(C, 0, 0)`.
    pub fn value(&self) -> f64 {
        self.node(self.start_state()).cost_to_go
    }
}

fn node_for(state: GridState, pattern: &LandingPattern, rate: f64, beta: f64) -> GridNode {
    let cars = pattern.cars();
    if state.to_land == 0 {
        return GridNode {
            state,
            interval_start_s: pattern.horizon_s(),
            interval_s: 0.0,
            expected_cost: 0.0,
            transitions: Vec::new(),
            cost_to_go: 0.0,
        };
    }
    let landing = cars - state.to_land;
    let start = if landing == 0 {
        0.0
    } else {
        pattern.times_s[landing - 1]
    };
    let dt = pattern.times_s[landing] - start;
    let mu = rate * dt;
    let j = state.idle;

    let mut transitions = Vec::with_capacity(j + 2);
    for x in 0..=j {
        transitions.push(GridTransition {
            arrivals: x,
            at_least: false,
            probability: pmf_mu(mu, x as u64),
            cost: 0.0,
            next: GridState {
                to_land: state.to_land - 1,
                idle: j - x + 1,
                departed: state.departed + x,
            },
        });
    }
    let p_bold = upper_tail(mu, j as u64 + 1);
    let expected_cost = transition_cost_unchecked(j as u64, start, dt, rate, beta);
    transitions.push(GridTransition {
        arrivals: j + 1,
        at_least: true,
        probability: p_bold,
        cost: if p_bold > 0.0 {
            expected_cost / p_bold
        } else {
            0.0
        },
        next: GridState {
            to_land: state.to_land - 1,
            idle: 0,
            departed: state.departed + j + 1,
        },
    });
    GridNode {
        state,
        interval_start_s: start,
        interval_s: dt,
        expected_cost,
        transitions,
        cost_to_go: 0.0,
    }
}

/// Builds the grid for a canonical pattern and solves it backwards.
///
/// Transition costs are already discounted to absolute time, so the backward
/// pass sums them without further discount factors.
pub fn build_grid(pattern: &LandingPattern, rate: f64, beta: f64) -> Result<LobbyGrid> {
    if !(rate.is_finite() && rate >= 0.0) || !(beta.is_finite() && beta >= 0.0) {
        return domain(format!(
            "rate and beta must be finite and >= 0 (rate={rate}, beta={beta})"
        ));
    }
    pattern.check_canonical()?;
    let cars = pattern.cars();
    let mut grid = LobbyGrid {
        cars,
        nodes: Vec::with_capacity((cars + 1) * (cars + 2) / 2),
    };
    for to_land in 0..=cars {
        for departed in 0..=(cars - to_land) {
            let state = GridState {
                to_land,
                idle: cars - to_land - departed,
                departed,
            };
            let mut node = node_for(state, pattern, rate, beta);
            if to_land > 0 {
                let future: f64 = node
                    .transitions
                    .iter()
                    .map(|t| t.probability * grid.node(t.next).cost_to_go)
                    .sum();
                node.cost_to_go = node.expected_cost + future;
            }
            grid.nodes.push(node);
        }
    }
    Ok(grid)
}
