//! CSV reports. Every writer is a pure function of its inputs and prints
//! numbers in shortest round-trip form, so re-emitting gives identical bytes.

use crate::engine::{HourlyCarbon, Mode, PlanningSolution};
use crate::sweep::SweepGrid;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("nothing to report")]
    Empty,
}

pub const BREAKDOWN_FILE: &str = "breakdown.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const PROFILE_FILE: &str = "carbon_profile.csv";

/// Metrics of the long-format sweep file, in column order of appearance.
pub const SWEEP_METRICS: [&str; 9] = [
    "invest_total",
    "total_cost",
    "y_sum",
    "emission",
    "capture",
    "storage",
    "utilization",
    "gap",
    "status",
];

/// A labelled solution, one column of the breakdown table.
#[derive(Debug, Clone, Copy)]
pub struct Case<'a> {
    pub label: &'a str,
    pub solution: &'a PlanningSolution,
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Hourly carbon of the scenario a solution reports on: the single scenario,
/// the probability-weighted mean, or the worst vertex.
pub fn daily_profile(solution: &PlanningSolution) -> Vec<HourlyCarbon> {
    let scenarios = &solution.scenarios;
    match solution.mode {
        Mode::Stochastic => {
            let mut out: Vec<HourlyCarbon> = scenarios[0]
                .profile
                .iter()
                .map(|h| HourlyCarbon {
                    hour: h.hour,
                    emission: 0.0,
                    capture: 0.0,
                    storage: 0.0,
                    utilization: 0.0,
                })
                .collect();
            for s in scenarios {
                for (acc, h) in out.iter_mut().zip(&s.profile) {
                    acc.emission += s.probability * h.emission;
                    acc.capture += s.probability * h.capture;
                    acc.storage += s.probability * h.storage;
                    acc.utilization += s.probability * h.utilization;
                }
            }
            out
        }
        Mode::Robust => {
            let worst = solution.worst_corner;
            scenarios
                .iter()
                .find(|s| Some((s.tax, s.price)) == worst)
                .unwrap_or(&scenarios[0])
                .profile
                .clone()
        }
        _ => scenarios[0].profile.clone(),
    }
}

/// Categories down, cases across.
pub fn breakdown_csv(cases: &[Case<'_>]) -> String {
    type Row = (&'static str, &'static str, fn(&PlanningSolution) -> f64);
    const ROWS: [Row; 17] = [
        ("investment", "ccus", |s| s.cost_breakdown.invest_ccus),
        ("investment", "ccus_sitings", |s| s.cost_breakdown.invest_siting),
        ("investment", "total", |s| s.cost_breakdown.investment()),
        ("operation", "gas_sources", |s| s.cost_breakdown.ope_gs),
        ("operation", "generators", |s| s.cost_breakdown.ope_gen),
        ("operation", "ptg", |s| s.cost_breakdown.ope_ptg),
        ("operation", "capture", |s| s.cost_breakdown.capture),
        ("operation", "storage", |s| s.cost_breakdown.storage),
        ("operation", "penalty", |s| s.cost_breakdown.penalty),
        ("revenue", "revenue", |s| s.cost_breakdown.revenue),
        ("operation", "total", |s| s.cost_breakdown.operation()),
        ("total_cost", "total", |s| s.cost_breakdown.total),
        ("carbon", "emission", |s| s.carbon_volumes.emission),
        ("carbon", "capture", |s| s.carbon_volumes.capture),
        ("carbon", "storage", |s| s.carbon_volumes.storage),
        ("carbon", "utilization", |s| s.carbon_volumes.utilization),
        ("planning", "ptg_modules", |s| s.y_sum() as f64),
    ];
    let mut out = String::from("category,index");
    for c in cases {
        out.push(',');
        out.push_str(&quote(c.label));
    }
    out.push('\n');
    for (category, index, get) in ROWS {
        out.push_str(category);
        out.push(',');
        out.push_str(index);
        for c in cases {
            out.push(',');
            out.push_str(&num(get(c.solution)));
        }
        out.push('\n');
    }
    out
}

pub fn carbon_profile_csv(cases: &[Case<'_>]) -> String {
    let mut out = String::from("hour,case,emission,capture,storage,utilization\n");
    for c in cases {
        for h in daily_profile(c.solution) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                h.hour,
                quote(c.label),
                num(h.emission),
                num(h.capture),
                num(h.storage),
                num(h.utilization)
            );
        }
    }
    out
}

/// Long format, cells in grid order, metrics in [`SWEEP_METRICS`] order.
/// Missing values are left empty.
pub fn sweep_csv(grid: &SweepGrid) -> String {
    let mut out = String::from("tax,price,metric,value\n");
    for cell in &grid.cells {
        let carbon = cell.carbon;
        let values = [
            cell.invest_total.map(num),
            cell.total_cost.map(num),
            cell.y_sum.map(|y| y.to_string()),
            carbon.map(|c| num(c.emission)),
            carbon.map(|c| num(c.capture)),
            carbon.map(|c| num(c.storage)),
            carbon.map(|c| num(c.utilization)),
            cell.gap.map(num),
            Some(cell.status.label()),
        ];
        for (metric, value) in SWEEP_METRICS.iter().zip(values) {
            let _ = writeln!(
                out,
                "{},{},{metric},{}",
                num(cell.tax),
                num(cell.price),
                value.unwrap_or_default()
            );
        }
    }
    out
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, ReportError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|source| ReportError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `breakdown.csv` and `carbon_profile.csv` for the cases and
/// `sweep.csv` for the grid, creating `out_dir` if needed.
pub fn emit_reports(out_dir: &Path, cases: &[Case<'_>], sweep: Option<&SweepGrid>) -> Result<Vec<PathBuf>, ReportError> {
    if cases.is_empty() && sweep.is_none() {
        return Err(ReportError::Empty);
    }
    std::fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if !cases.is_empty() {
        written.push(write(out_dir, BREAKDOWN_FILE, &breakdown_csv(cases))?);
        written.push(write(out_dir, PROFILE_FILE, &carbon_profile_csv(cases))?);
    }
    if let Some(grid) = sweep {
        written.push(write(out_dir, SWEEP_FILE, &sweep_csv(grid))?);
    }
    Ok(written)
}
