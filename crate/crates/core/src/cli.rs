//! Command implementations behind the `elevsim` binary.
//!
//! Exit codes: 0 on success, 1 on a runtime failure or a failed validation
//! gate, 2 on a usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{
    emit_plot_data, mean, read_rows, run_sweep, validate_suite, write_rows, PlotKind, SeedSet,
    SweepConfig, SweepRow, ValidateOptions, SIM_FORECAST_CAP,
};
use crate::building::BuildingSpec;
use crate::config::load_toml;
use crate::error::{Error, Result};
use crate::forecast::ForecastOptions;
use crate::policy::{Scheduler, SchedulerParams};
use crate::sim::{generate_traffic, run_trial, traffic_hash, TrafficProfile, TrialOptions};

#[derive(Debug, Parser)]
#[command(
    name = "elevsim",
    about = "Elevator group scheduling simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one trial and write its metrics as a CSV row.
    Simulate(SimulateArgs),
    /// Run a seeded sweep described by a config file.
    Sweep(SweepArgs),
    /// Run the oracle validation gates.
    Validate(ValidateArgs),
    /// Turn sweep CSV into plot data.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Building config (TOML).
    #[arg(long)]
    building: PathBuf,
    /// Traffic profile config (TOML).
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long, default_value = "esa-dp-la")]
    scheduler: Scheduler,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.02)]
    beta: f64,
    /// Overrides the traffic file's seed; also seeds forecast sampling.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = SIM_FORECAST_CAP)]
    forecast_cap: usize,
    /// Simulator options (TOML), e.g. park_idle_at_lobby, drain_s.
    #[arg(long)]
    options: Option<PathBuf>,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Overrides the config's seed_set.
    #[arg(long, value_parser = parse_seed_set)]
    seed_set: Option<SeedSet>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_plot_kind)]
    kind: PlotKind,
    #[arg(long)]
    out: PathBuf,
}

fn parse_seed_set(s: &str) -> std::result::Result<SeedSet, String> {
    match s {
        "test" => Ok(SeedSet::Test),
        "fitting" => Ok(SeedSet::Fitting),
        _ => Err(format!("expected test or fitting, got {s:?}")),
    }
}

fn parse_plot_kind(s: &str) -> std::result::Result<PlotKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(Error),
    Runtime(Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Usage(e) | Failure::Runtime(e) => e,
        }
    }
}

fn usage<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn runtime<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Runtime)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn print_config<T: Serialize>(out: &mut dyn Write, config: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(config)
        .map_err(|e| Failure::Runtime(Error::Domain(e.to_string())))?;
    writeln!(out, "effective config:\n{text}")
        .map_err(|e| Failure::Runtime(io_err(Path::new("<stdout>"))(e)))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Validate(a) => validate(a, out),
        Command::Plot(a) => plot(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error());
            f.code()
        }
    }
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    building: &'a BuildingSpec,
    traffic: &'a TrafficProfile,
    scheduler: Scheduler,
    params: &'a SchedulerParams,
    options: &'a TrialOptions,
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let building: BuildingSpec = usage(load_toml(&a.building))?;
    usage(
        building
            .validate()
            .map_err(|e| config_error(&a.building, e)),
    )?;
    let mut traffic = usage(TrafficProfile::from_file(&a.traffic))?;
    usage(
        traffic
            .validate(&building)
            .map_err(|e| config_error(&a.traffic, e)),
    )?;
    if let Some(seed) = a.seed {
        traffic.seed = seed;
    }
    let options: TrialOptions = match &a.options {
        Some(p) => usage(load_toml(p))?,
        None => TrialOptions::default(),
    };
    let params = SchedulerParams {
        alpha: a.alpha,
        beta: a.beta,
        lobby_rate: 0.0,
        forecast: ForecastOptions {
            cap: a.forecast_cap,
            seed: traffic.seed,
        },
    };
    usage(params.validate())?;
    print_config(
        out,
        &SimulateConfig {
            building: &building,
            traffic: &traffic,
            scheduler: a.scheduler,
            params: &params,
            options: &options,
        },
    )?;

    let passengers = runtime(generate_traffic(&traffic, &building))?;
    let outcome = runtime(run_trial(
        &building,
        a.scheduler,
        &passengers,
        &params,
        &options,
    ))?;
    let la = a.scheduler == Scheduler::EsaDpLa;
    let row = SweepRow {
        building: building.label(),
        floors: building.num_floors,
        shafts: building.num_cars,
        rate: traffic.rate_per_hour,
        policy: a.scheduler,
        alpha: la.then_some(a.alpha),
        beta: la.then_some(a.beta),
        seed: traffic.seed,
        avg_wait_s: outcome.metrics.avg_wait_s,
        max_wait_s: outcome.metrics.max_wait_s,
        served: outcome.metrics.served,
        unserved: outcome.metrics.unserved,
        traffic_hash: traffic_hash(&passengers),
    };
    runtime(write_rows(std::slice::from_ref(&row), &a.out))?;
    writeln!(
        out,
        "{} served, {} unserved, mean wait {:.2} s; wrote {}",
        row.served,
        row.unserved,
        row.avg_wait_s,
        a.out.display()
    )
    .map_err(|e| Failure::Runtime(io_err(Path::new("<stdout>"))(e)))?;
    Ok(0)
}

fn config_error(path: &Path, e: Error) -> Error {
    Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let mut cfg = usage(SweepConfig::from_file(&a.config))?;
    if let Some(s) = a.seed_set {
        cfg.seed_set = s;
        usage(cfg.validate().map_err(|e| config_error(&a.config, e)))?;
    }
    if a.jobs == 0 {
        return Err(Failure::Usage(Error::Domain("--jobs must be >= 1".into())));
    }
    print_config(out, &cfg)?;
    runtime(std::fs::create_dir_all(&a.out).map_err(io_err(&a.out)))?;
    let rows = runtime(run_sweep(&cfg, a.jobs))?;
    let path = a.out.join(&cfg.output);
    runtime(write_rows(&rows, &path))?;
    write_summary(out, &rows).map_err(|e| Failure::Runtime(io_err(Path::new("<stdout>"))(e)))?;
    writeln!(out, "wrote {} rows to {}", rows.len(), path.display())
        .map_err(|e| Failure::Runtime(io_err(Path::new("<stdout>"))(e)))?;
    Ok(0)
}

/// Seed-averaged wait per building, rate and policy variant.
fn write_summary(out: &mut dyn Write, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut groups: Vec<((String, u64, String), Vec<f64>)> = Vec::new();
    for r in rows {
        let variant = match (r.alpha, r.beta) {
            (Some(al), Some(be)) => format!("{} a={al} b={be}", r.policy),
            _ => r.policy.to_string(),
        };
        let key = (r.building.clone(), r.rate.to_bits(), variant);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push(r.avg_wait_s),
            None => groups.push((key, vec![r.avg_wait_s])),
        }
    }
    for ((b, rate, v), waits) in groups {
        writeln!(
            out,
            "{b} rate={} {v}: mean wait {:.2} s over {} seeds",
            f64::from_bits(rate),
            mean(&waits),
            waits.len()
        )?;
    }
    Ok(())
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let opts = ValidateOptions {
        tolerance_scale: a.tolerance_scale,
    };
    if !(opts.tolerance_scale.is_finite() && opts.tolerance_scale >= 0.0) {
        return Err(Failure::Usage(Error::Domain(format!(
            "--tolerance-scale must be finite and >= 0, got {}",
            opts.tolerance_scale
        ))));
    }
    print_config(out, &opts)?;
    let report = runtime(validate_suite(&opts))?;
    let stdout = |e| Failure::Runtime(io_err(Path::new("<stdout>"))(e));
    for g in &report.gates {
        writeln!(
            out,
            "{} {}: measured {:.3e}, tolerance {:.3e}",
            if g.passed { "PASS" } else { "FAIL" },
            g.name,
            g.measured,
            g.tolerance
        )
        .map_err(stdout)?;
        if !g.passed && !g.detail.is_empty() {
            writeln!(out, "  {}", g.detail).map_err(stdout)?;
        }
    }
    if let Some(p) = &a.report {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| Failure::Runtime(Error::Domain(e.to_string())))?;
        runtime(std::fs::write(p, text).map_err(io_err(p)))?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn plot(a: PlotArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    #[derive(Serialize)]
    struct PlotConfig<'a> {
        input: &'a Path,
        kind: &'static str,
        out: &'a Path,
    }
    print_config(
        out,
        &PlotConfig {
            input: &a.input,
            kind: a.kind.name(),
            out: &a.out,
        },
    )?;
    let rows = usage(read_rows(&a.input))?;
    let file = runtime(std::fs::File::create(&a.out).map_err(io_err(&a.out)))?;
    runtime(emit_plot_data(&rows, a.kind, std::io::BufWriter::new(file)))?;
    Ok(0)
}
