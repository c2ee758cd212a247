//! Plot-ready CSV derived from sweep rows.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use super::stats::{mean, stderr};
use super::sweep::SweepRow;
use crate::error::{Error, Result};
use crate::policy::Scheduler;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Look-ahead against the round-trip baseline, one point per cell.
    ScatterConventional,
    /// Look-ahead against the existing-passengers-only scheduler.
    ScatterEsaDp,
    /// Seed-averaged look-ahead wait against beta, per building, rate and alpha.
    BetaCurve,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [
        PlotKind::ScatterConventional,
        PlotKind::ScatterEsaDp,
        PlotKind::BetaCurve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::ScatterConventional => "scatter-conventional",
            PlotKind::ScatterEsaDp => "scatter-esa-dp",
            PlotKind::BetaCurve => "beta-curve",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown plot kind {s:?} (expected scatter-conventional, scatter-esa-dp or beta-curve)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub building: String,
    pub floors: u32,
    pub shafts: usize,
    pub rate: f64,
    pub alpha: f64,
    pub beta: f64,
    pub x_policy: Scheduler,
    pub x_wait_s: f64,
    pub y_wait_s: f64,
    /// `(x - y) / x`; zero when `x` is zero.
    pub speedup: f64,
    /// Seeds present for both policies.
    pub seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaPoint {
    pub building: String,
    pub floors: u32,
    pub shafts: usize,
    pub rate: f64,
    pub alpha: f64,
    pub beta: f64,
    pub avg_wait_s: f64,
    pub stderr_s: f64,
    pub seeds: usize,
}

const SCATTER_HEADER: [&str; 11] = [
    "building", "floors", "shafts", "rate", "alpha", "beta", "x_policy", "x_wait_s", "y_wait_s",
    "speedup", "seeds",
];
const BETA_HEADER: [&str; 9] = [
    "building",
    "floors",
    "shafts",
    "rate",
    "alpha",
    "beta",
    "avg_wait_s",
    "stderr_s",
    "seeds",
];

/// Cell key: building, floors, shafts, rate as bits (rates sort by value
/// because they are non-negative).
type Cell = (String, u32, usize, u64);

fn cell(r: &SweepRow) -> Cell {
    (r.building.clone(), r.floors, r.shafts, r.rate.to_bits())
}

/// One point per (building, rate, alpha, beta): look-ahead mean wait `y`
/// against the `x_policy` mean wait over the seeds both have.
pub fn scatter_points(rows: &[SweepRow], x_policy: Scheduler) -> Vec<ScatterPoint> {
    let mut base: BTreeMap<Cell, BTreeMap<u64, f64>> = BTreeMap::new();
    let mut la: BTreeMap<(Cell, u64, u64), BTreeMap<u64, f64>> = BTreeMap::new();
    for r in rows {
        if r.policy == x_policy && x_policy != Scheduler::EsaDpLa {
            base.entry(cell(r))
                .or_default()
                .insert(r.seed, r.avg_wait_s);
        } else if r.policy == Scheduler::EsaDpLa {
            let (a, b) = (r.alpha.unwrap_or(f64::NAN), r.beta.unwrap_or(f64::NAN));
            la.entry((cell(r), a.to_bits(), b.to_bits()))
                .or_default()
                .insert(r.seed, r.avg_wait_s);
        }
    }
    let mut out = Vec::new();
    for ((c, a, b), ys) in &la {
        let Some(xs) = base.get(c) else { continue };
        let paired: Vec<(f64, f64)> = ys
            .iter()
            .filter_map(|(s, y)| xs.get(s).map(|x| (*x, *y)))
            .collect();
        if paired.is_empty() {
            continue;
        }
        let x = mean(&paired.iter().map(|p| p.0).collect::<Vec<_>>());
        let y = mean(&paired.iter().map(|p| p.1).collect::<Vec<_>>());
        out.push(ScatterPoint {
            building: c.0.clone(),
            floors: c.1,
            shafts: c.2,
            rate: f64::from_bits(c.3),
            alpha: f64::from_bits(*a),
            beta: f64::from_bits(*b),
            x_policy,
            x_wait_s: x,
            y_wait_s: y,
            speedup: if x > 0.0 { (x - y) / x } else { 0.0 },
            seeds: paired.len(),
        });
    }
    out
}

/// Seed-averaged look-ahead waits, sorted by cell, alpha, then beta.
pub fn beta_curve(rows: &[SweepRow]) -> Vec<BetaPoint> {
    let mut groups: BTreeMap<(Cell, u64, u64), Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.policy == Scheduler::EsaDpLa) {
        let (Some(a), Some(b)) = (r.alpha, r.beta) else {
            continue;
        };
        groups
            .entry((cell(r), a.to_bits(), b.to_bits()))
            .or_default()
            .push(r.avg_wait_s);
    }
    groups
        .into_iter()
        .map(|((c, a, b), waits)| BetaPoint {
            building: c.0,
            floors: c.1,
            shafts: c.2,
            rate: f64::from_bits(c.3),
            alpha: f64::from_bits(a),
            beta: f64::from_bits(b),
            avg_wait_s: mean(&waits),
            stderr_s: stderr(&waits),
            seeds: waits.len(),
        })
        .collect()
}

/// Writes the plot data of `kind` as CSV. Empty input gives a header-only file.
pub fn emit_plot_data<W: Write>(rows: &[SweepRow], kind: PlotKind, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match kind {
        PlotKind::ScatterConventional | PlotKind::ScatterEsaDp => {
            let x = if kind == PlotKind::ScatterConventional {
                Scheduler::Conventional
            } else {
                Scheduler::EsaDp
            };
            let pts = scatter_points(rows, x);
            if pts.is_empty() {
                w.write_record(SCATTER_HEADER)?;
            }
            for p in pts {
                w.serialize(p)?;
            }
        }
        PlotKind::BetaCurve => {
            let pts = beta_curve(rows);
            if pts.is_empty() {
                w.write_record(BETA_HEADER)?;
            }
            for p in pts {
                w.serialize(p)?;
            }
        }
    }
    w.flush().map_err(|source| Error::Io {
        path: "<plot output>".into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(policy: Scheduler, beta: Option<f64>, seed: u64, wait: f64) -> SweepRow {
        SweepRow {
            building: "15fl/6sh".into(),
            floors: 15,
            shafts: 6,
            rate: 2500.0,
            policy,
            alpha: beta.map(|_| 0.2),
            beta,
            seed,
            avg_wait_s: wait,
            max_wait_s: wait,
            served: 1,
            unserved: 0,
            traffic_hash: format!("h{seed}"),
        }
    }

    #[test]
    fn scatter_speedup() {
        let rows = vec![
            row(Scheduler::Conventional, None, 1, 40.0),
            row(Scheduler::Conventional, None, 2, 60.0),
            row(Scheduler::EsaDpLa, Some(0.02), 1, 20.0),
            row(Scheduler::EsaDpLa, Some(0.02), 2, 30.0),
        ];
        let pts = scatter_points(&rows, Scheduler::Conventional);
        assert_eq!(pts.len(), 1);
        assert_eq!(
            (pts[0].x_wait_s, pts[0].y_wait_s, pts[0].seeds),
            (50.0, 25.0, 2)
        );
        assert_eq!(pts[0].speedup, 0.5);
    }

    #[test]
    fn empty_input_gives_header() {
        for kind in PlotKind::ALL {
            let mut buf = Vec::new();
            emit_plot_data(&[], kind, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            assert_eq!(text.lines().count(), 1, "{}", kind.name());
        }
    }

    #[test]
    fn beta_curve_sorted_by_beta() {
        let rows = vec![
            row(Scheduler::EsaDpLa, Some(0.5), 1, 10.0),
            row(Scheduler::EsaDpLa, Some(0.001), 1, 30.0),
            row(Scheduler::EsaDpLa, Some(0.02), 1, 20.0),
        ];
        let betas: Vec<f64> = beta_curve(&rows).iter().map(|p| p.beta).collect();
        assert_eq!(betas, vec![0.001, 0.02, 0.5]);
    }
}
