//! Seeded sweeps over buildings, arrival rates and schedulers.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::mean;
use crate::building::BuildingSpec;
use crate::config::{load_toml, parse_toml};
use crate::error::{domain, Error, Result};
use crate::forecast::ForecastOptions;
use crate::policy::{Scheduler, SchedulerParams};
use crate::sim::{generate_traffic, run_trial, traffic_hash, TrafficProfile, TrialOptions};

/// Forecast cap used for simulator decisions unless configured otherwise.
pub const SIM_FORECAST_CAP: usize = 64;

fn default_policies() -> Vec<Scheduler> {
    Scheduler::ALL.to_vec()
}
fn default_alphas() -> Vec<f64> {
    vec![0.2]
}
fn default_betas() -> Vec<f64> {
    vec![0.02]
}
fn default_lobby_fraction() -> f64 {
    0.8
}
fn default_duration() -> f64 {
    3600.0
}
fn default_stop_wait() -> f64 {
    60.0
}
fn default_cap() -> usize {
    SIM_FORECAST_CAP
}
fn default_output() -> PathBuf {
    PathBuf::from("sweep.csv")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSet {
    #[default]
    Test,
    Fitting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub buildings: Vec<BuildingSpec>,
    /// Arrival rates, passengers per hour; run in ascending order.
    pub rates: Vec<f64>,
    #[serde(default = "default_policies")]
    pub policies: Vec<Scheduler>,
    pub test_seeds: Vec<u64>,
    #[serde(default)]
    pub fitting_seeds: Vec<u64>,
    /// Which seed list the sweep runs on.
    #[serde(default)]
    pub seed_set: SeedSet,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_lobby_fraction")]
    pub lobby_fraction: f64,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    /// A building's rate ladder stops after the first rate at which some
    /// policy's seed-averaged wait exceeds this.
    #[serde(default = "default_stop_wait")]
    pub stop_wait_s: f64,
    #[serde(default = "default_cap")]
    pub forecast_cap: usize,
    #[serde(default)]
    pub trial: TrialOptions,
    /// CSV file name, relative to the output directory.
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg: SweepConfig = load_toml(path)?;
        cfg.validate().map_err(|e| Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = parse_toml(text, "<sweep config>")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The desk-scale default: two buildings, four rates, twenty test seeds.
    pub fn desk_default() -> Self {
        SweepConfig {
            buildings: vec![
                BuildingSpec::new(8, 3).expect("valid"),
                BuildingSpec::new(15, 6).expect("valid"),
            ],
            rates: vec![600.0, 1200.0, 1800.0, 2500.0],
            policies: default_policies(),
            test_seeds: (1..=20).collect(),
            fitting_seeds: (1001..=1020).collect(),
            seed_set: SeedSet::Test,
            alphas: default_alphas(),
            betas: default_betas(),
            lobby_fraction: default_lobby_fraction(),
            duration_s: default_duration(),
            stop_wait_s: default_stop_wait(),
            forecast_cap: default_cap(),
            trial: TrialOptions::default(),
            output: default_output(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.buildings.is_empty() || self.rates.is_empty() || self.policies.is_empty() {
            return domain("buildings, rates and policies must be non-empty");
        }
        if self.alphas.is_empty() || self.betas.is_empty() {
            return domain("alphas and betas must be non-empty");
        }
        if self.active_seeds().is_empty() {
            return domain(format!("the {:?} seed list is empty", self.seed_set));
        }
        for b in &self.buildings {
            b.validate()?;
        }
        let test: BTreeSet<u64> = self.test_seeds.iter().copied().collect();
        if test.len() != self.test_seeds.len() {
            return domain("test_seeds contains duplicates");
        }
        if let Some(s) = self.fitting_seeds.iter().find(|s| test.contains(s)) {
            return domain(format!(
                "seed {s} appears in both test_seeds and fitting_seeds"
            ));
        }
        if let Some(r) = self.rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return domain(format!("rates must be finite and >= 0, got {r}"));
        }
        for &alpha in &self.alphas {
            for &beta in &self.betas {
                SchedulerParams {
                    alpha,
                    beta,
                    ..Default::default()
                }
                .validate()?;
            }
        }
        if self.forecast_cap == 0 {
            return domain("forecast_cap must be >= 1");
        }
        let probe = TrafficProfile {
            rate_per_hour: 0.0,
            lobby_fraction: self.lobby_fraction,
            duration_s: self.duration_s,
            seed: 0,
        };
        for b in &self.buildings {
            probe.validate(b)?;
        }
        Ok(())
    }

    pub fn active_seeds(&self) -> &[u64] {
        match self.seed_set {
            SeedSet::Test => &self.test_seeds,
            SeedSet::Fitting => &self.fitting_seeds,
        }
    }
}

/// One trial result; the CSV schema of sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub building: String,
    pub floors: u32,
    pub shafts: usize,
    pub rate: f64,
    pub policy: Scheduler,
    /// Empty for schedulers without these parameters.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub seed: u64,
    pub avg_wait_s: f64,
    pub max_wait_s: f64,
    pub served: usize,
    pub unserved: usize,
    pub traffic_hash: String,
}

/// A scheduler with its alpha and beta, `None` where they do not apply.
pub type Variant = (Scheduler, Option<f64>, Option<f64>);

/// (policy, alpha, beta) combinations of a sweep, in output order.
fn variants(cfg: &SweepConfig) -> Vec<Variant> {
    let mut out = Vec::new();
    for &p in &cfg.policies {
        if p == Scheduler::EsaDpLa {
            for &a in &cfg.alphas {
                for &b in &cfg.betas {
                    out.push((p, Some(a), Some(b)));
                }
            }
        } else {
            out.push((p, None, None));
        }
    }
    out
}

/// Runs one trial of a sweep cell.
pub fn run_cell(
    cfg: &SweepConfig,
    building: &BuildingSpec,
    rate: f64,
    seed: u64,
    variant: Variant,
) -> Result<SweepRow> {
    let profile = TrafficProfile {
        rate_per_hour: rate,
        lobby_fraction: cfg.lobby_fraction,
        duration_s: cfg.duration_s,
        seed,
    };
    let traffic = generate_traffic(&profile, building)?;
    let (policy, alpha, beta) = variant;
    let defaults = SchedulerParams::default();
    let params = SchedulerParams {
        alpha: alpha.unwrap_or(defaults.alpha),
        beta: beta.unwrap_or(defaults.beta),
        lobby_rate: 0.0,
        forecast: ForecastOptions {
            cap: cfg.forecast_cap,
            seed,
        },
    };
    let out = run_trial(building, policy, &traffic, &params, &cfg.trial)?;
    Ok(SweepRow {
        building: building.label(),
        floors: building.num_floors,
        shafts: building.num_cars,
        rate,
        policy,
        alpha,
        beta,
        seed,
        avg_wait_s: out.metrics.avg_wait_s,
        max_wait_s: out.metrics.max_wait_s,
        served: out.metrics.served,
        unserved: out.metrics.unserved,
        traffic_hash: traffic_hash(&traffic),
    })
}

/// Runs the sweep. Rows come out ordered by building, rate, seed and
/// variant regardless of `jobs`.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let mut rates = cfg.rates.clone();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    let variants = variants(cfg);
    let seeds = cfg.active_seeds();
    let mut rows = Vec::new();
    for building in &cfg.buildings {
        for &rate in &rates {
            let jobs: Vec<(u64, Variant)> = seeds
                .iter()
                .flat_map(|&s| variants.iter().map(move |&v| (s, v)))
                .collect();
            let cell: Vec<SweepRow> = pool.install(|| {
                jobs.par_iter()
                    .map(|&(seed, v)| run_cell(cfg, building, rate, seed, v))
                    .collect::<Result<Vec<_>>>()
            })?;
            let saturated = variants.iter().any(|v| {
                let waits: Vec<f64> = cell
                    .iter()
                    .filter(|r| (r.policy, r.alpha, r.beta) == *v)
                    .map(|r| r.avg_wait_s)
                    .collect();
                mean(&waits) > cfg.stop_wait_s
            });
            rows.extend(cell);
            if saturated {
                break;
            }
        }
    }
    Ok(rows)
}

pub fn write_rows(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_rows_to(rows, file)
}

pub fn write_rows_to<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv output>".into(),
        source,
    })?;
    Ok(())
}

pub const CSV_HEADER: [&str; 13] = [
    "building",
    "floors",
    "shafts",
    "rate",
    "policy",
    "alpha",
    "beta",
    "seed",
    "avg_wait_s",
    "max_wait_s",
    "served",
    "unserved",
    "traffic_hash",
];

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::Domain(format!("{}: {other:?}", path.display())),
    })?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    Ok(rows)
}
