use std::path::Path;

use elevator_lookahead::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["elevsim"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_inputs(dir: &Path) {
    std::fs::write(dir.join("building.toml"), "floors = 8\ncars = 3\n").unwrap();
    std::fs::write(
        dir.join("traffic.toml"),
        "rate_per_hour = 900.0\nduration_s = 600.0\nseed = 5\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("sweep.toml"),
        "rates = [600.0]\ntest_seeds = [1, 2]\nduration_s = 600.0\nforecast_cap = 8\noutput = \"rows.csv\"\n[[buildings]]\nfloors = 8\ncars = 3\n",
    )
    .unwrap();
}

#[test]
fn simulate_writes_one_row_and_echoes_the_config() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let out = dir.path().join("one.csv");
    let (code, stdout, _) = call(&[
        "simulate",
        "--building",
        s(&dir.path().join("building.toml")),
        "--traffic",
        s(&dir.path().join("traffic.toml")),
        "--scheduler",
        "esa-dp-la",
        "--alpha",
        "0.2",
        "--beta",
        "0.02",
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"alpha\": 0.2") && stdout.contains("\"beta\": 0.02"));
    assert!(stdout.contains("\"seed\": 3"));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn simulate_matches_the_library() {
    use elevator_lookahead::bench::read_rows;
    use elevator_lookahead::forecast::ForecastOptions;
    use elevator_lookahead::policy::{Scheduler, SchedulerParams};
    use elevator_lookahead::sim::{generate_traffic, run_trial, TrafficProfile, TrialOptions};
    use elevator_lookahead::BuildingSpec;

    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let out = dir.path().join("one.csv");
    let (code, _, _) = call(&[
        "simulate",
        "--building",
        s(&dir.path().join("building.toml")),
        "--traffic",
        s(&dir.path().join("traffic.toml")),
        "--scheduler",
        "esa-dp",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let row = &read_rows(&out).unwrap()[0];
    let b = BuildingSpec::new(8, 3).unwrap();
    let traffic = generate_traffic(
        &TrafficProfile {
            duration_s: 600.0,
            ..TrafficProfile::new(900.0, 5)
        },
        &b,
    )
    .unwrap();
    let params = SchedulerParams {
        forecast: ForecastOptions { cap: 64, seed: 5 },
        ..Default::default()
    };
    let lib = run_trial(
        &b,
        Scheduler::EsaDp,
        &traffic,
        &params,
        &TrialOptions::default(),
    )
    .unwrap();
    assert_eq!(row.avg_wait_s, lib.metrics.avg_wait_s);
    assert_eq!(row.served, lib.metrics.served);
}

#[test]
fn missing_or_malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let (code, _, err) = call(&[
        "simulate",
        "--building",
        s(&dir.path().join("nope.toml")),
        "--traffic",
        s(&dir.path().join("traffic.toml")),
        "--out",
        s(&dir.path().join("x.csv")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("nope.toml"));
    std::fs::write(
        dir.path().join("bad.toml"),
        "floors = 8\ncars = 3\nwheels = 4\n",
    )
    .unwrap();
    let (code, _, err) = call(&[
        "simulate",
        "--building",
        s(&dir.path().join("bad.toml")),
        "--traffic",
        s(&dir.path().join("traffic.toml")),
        "--out",
        s(&dir.path().join("x.csv")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.toml") && err.contains("wheels"), "{err}");
}

#[test]
fn unknown_flags_and_bad_values_exit_2() {
    assert_eq!(call(&["validate", "--fast"]).0, 2);
    assert_eq!(
        call(&["plot", "--in", "a", "--kind", "pie", "--out", "b"]).0,
        2
    );
    assert_eq!(call(&[]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let out = dir.path().join("run");
    let (code, stdout, _) = call(&[
        "sweep",
        "--config",
        s(&dir.path().join("sweep.toml")),
        "--out",
        s(&out),
        "--jobs",
        "2",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("effective config"));
    let csv = out.join("rows.csv");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 7);
    let plot = dir.path().join("scatter.csv");
    let (code, _, _) = call(&[
        "plot",
        "--in",
        s(&csv),
        "--kind",
        "scatter-conventional",
        "--out",
        s(&plot),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(plot).unwrap();
    assert!(text.starts_with(
        "building,floors,shafts,rate,alpha,beta,x_policy,x_wait_s,y_wait_s,speedup,seeds"
    ));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn plot_of_empty_csv_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    std::fs::write(&csv, elevator_lookahead::bench::CSV_HEADER.join(",") + "\n").unwrap();
    let plot = dir.path().join("beta.csv");
    let (code, _, _) = call(&[
        "plot",
        "--in",
        s(&csv),
        "--kind",
        "beta-curve",
        "--out",
        s(&plot),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(plot).unwrap().lines().count(), 1);
}

#[test]
fn validate_exit_code_is_the_gate_result() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let (code, stdout, _) = call(&["validate", "--report", s(&report)]);
    assert_eq!(code, 0, "{stdout}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    let (code, stdout, _) = call(&["validate", "--tolerance-scale", "0"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL quadrature"));
}
