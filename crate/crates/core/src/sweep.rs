//! Tax × price sensitivity grids.

use crate::engine::{solve, CarbonVolumes, PlanningError, PlanningOptions, PlanningRequest};
use crate::instance::PlanningInstance;
use crate::milp::{SolveStatus, Solver};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("{axis} axis is empty")]
    EmptyAxis { axis: &'static str },
    #[error("{axis} axis is not strictly increasing at {value}")]
    NotIncreasing { axis: &'static str, value: f64 },
    #[error("{axis} axis holds a non-finite or negative value")]
    BadValue { axis: &'static str },
    #[error("cannot parse axis `{0}`; expected LO:HI:STEP or a comma list")]
    Parse(String),
}

/// Which problem every cell solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    #[default]
    Deterministic,
    NoCcus,
}

/// Outcome of one cell. Failures are recorded, never propagated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum CellStatus {
    Solved(SolveStatus),
    NoSolution(SolveStatus),
    Error(String),
}

impl CellStatus {
    pub fn is_solved(&self) -> bool {
        matches!(self, CellStatus::Solved(_))
    }

    pub fn label(&self) -> String {
        match self {
            CellStatus::Solved(s) | CellStatus::NoSolution(s) => s.to_string(),
            CellStatus::Error(_) => "error".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub tax: f64,
    pub price: f64,
    pub status: CellStatus,
    pub invest_total: Option<f64>,
    pub total_cost: Option<f64>,
    pub y_sum: Option<u32>,
    pub carbon: Option<CarbonVolumes>,
    pub gap: Option<f64>,
}

/// Rectangular grid, tax-major: cell `(i, j)` sits at `i * prices + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub mode: SweepMode,
    pub tax_axis: Vec<f64>,
    pub price_axis: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, tax_index: usize, price_index: usize) -> &SweepCell {
        &self.cells[tax_index * self.price_axis.len() + price_index]
    }

    pub fn solved(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.status.is_solved())
    }
}

fn check_axis(axis: &'static str, values: &[f64]) -> Result<(), SweepError> {
    if values.is_empty() {
        return Err(SweepError::EmptyAxis { axis });
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(SweepError::BadValue { axis });
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(SweepError::NotIncreasing { axis, value: w[1] });
    }
    Ok(())
}

/// Parses `LO:HI:STEP` (inclusive of `HI` when it lies on the step) or a
/// comma-separated list.
pub fn parse_axis(text: &str) -> Result<Vec<f64>, SweepError> {
    let err = || SweepError::Parse(text.to_string());
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if step.is_nan() || step <= 0.0 || hi < lo {
                return Err(err());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| lo + k as f64 * step).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(err()),
    }
}

fn solve_cell(
    instance: &PlanningInstance,
    mode: SweepMode,
    tax: f64,
    price: f64,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> SweepCell {
    let request = match mode {
        SweepMode::Deterministic => PlanningRequest::Deterministic { tax, price },
        SweepMode::NoCcus => PlanningRequest::NoCcus { tax },
    };
    let empty = |status| SweepCell {
        tax,
        price,
        status,
        invest_total: None,
        total_cost: None,
        y_sum: None,
        carbon: None,
        gap: None,
    };
    match solve(instance, &request, solver, options) {
        Ok(sol) => SweepCell {
            tax,
            price,
            status: CellStatus::Solved(sol.metadata.status),
            invest_total: Some(sol.cost_breakdown.investment()),
            total_cost: Some(sol.total()),
            y_sum: Some(sol.y_sum()),
            carbon: Some(sol.carbon_volumes),
            gap: sol.metadata.gap,
        },
        Err(PlanningError::NoSolution { status }) => empty(CellStatus::NoSolution(status)),
        Err(e) => empty(CellStatus::Error(e.to_string())),
    }
}

/// One solve per cell, `jobs` at a time (0 = all cores). The result does
/// not depend on `jobs`.
pub fn run_sweep(
    instance: &PlanningInstance,
    tax_axis: &[f64],
    price_axis: &[f64],
    mode: SweepMode,
    solver: &dyn Solver,
    options: &PlanningOptions,
    jobs: usize,
) -> Result<SweepGrid, SweepError> {
    check_axis("tax", tax_axis)?;
    check_axis("price", price_axis)?;
    let points: Vec<(f64, f64)> = tax_axis
        .iter()
        .flat_map(|&t| price_axis.iter().map(move |&p| (t, p)))
        .collect();
    let cells = crate::par::map(&points, jobs, |&(tax, price)| {
        solve_cell(instance, mode, tax, price, solver, options)
    });
    Ok(SweepGrid {
        mode,
        tax_axis: tax_axis.to_vec(),
        price_axis: price_axis.to_vec(),
        cells,
    })
}
