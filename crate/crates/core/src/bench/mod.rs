//! Experiment harness: seeded sweeps, the oracle validation gates, a fixed
//! decision suite and plot-data emission.

mod plot;
mod stats;
mod suite;
mod sweep;
mod validate;

pub use plot::{beta_curve, emit_plot_data, scatter_points, BetaPoint, PlotKind, ScatterPoint};
pub use stats::{binomial_upper_tail, mean, sign_test, stderr, SignTest};
pub use suite::{count_disagreements, decision_suite, DecisionCase, SUITE_FORECAST_CAP};
pub use sweep::{
    read_rows, run_cell, run_sweep, write_rows, write_rows_to, SeedSet, SweepConfig, SweepRow,
    Variant, CSV_HEADER, SIM_FORECAST_CAP,
};
pub use validate::{
    analytic_pins_gate, degenerate_gate, forecast_cases, forecast_gate, mc_patterns,
    monte_carlo_gate, normalization_gate, quadrature_gate, reduction_gates, validate_suite,
    GateResult, ValidateOptions, ValidationReport, FORECAST_SAMPLES, MC_REPS, MC_SIGMAS,
    NORMALIZATION_TOL, PIN_J0_TOL, PIN_J1_TOL, PROBABILITY_SUM_TOL, QUADRATURE_TOL, SUITE_SIZE,
};
