//! Assembly and solution of the four planning problems.
//!
//! * [`solve_no_ccus`]: the system as is, paying the carbon tax on every ton.
//! * [`solve_deterministic`]: retrofit sizing and siting at one (tax, price).
//! * [`solve_stochastic`]: shared investment over a weighted scenario grid.
//! * [`solve_robust`]: investment against the worst point of a box.

mod build;
mod extract;
mod modes;
mod uncertainty;

pub use build::{build_model, BuiltModel};
pub use extract::{CarbonVolumes, FirstStage, HourlyCarbon, ModuleDecision, ScenarioOutcome, SitingDecision};
pub use modes::{
    evaluate_fixed_first_stage, expected_cost_of_first_stage, solve, solve_deterministic, solve_no_ccus,
    solve_robust, solve_stochastic, Evaluation,
};
pub use uncertainty::{even_points, RobustMethod, Scenario, UncertaintySpec, PRICE_RANGE, TAX_RANGE};

use crate::formulation::CostBreakdown;
use crate::instance::PlanningInstance;
use crate::milp::{MilpError, SolveError, SolveOptions, SolveStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NoCcus,
    Deterministic,
    Stochastic,
    Robust,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::NoCcus => "no-ccus",
            Mode::Deterministic => "det",
            Mode::Stochastic => "stoch",
            Mode::Robust => "robust",
        })
    }
}

/// What to solve. Stored in every solution so the model can be rebuilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum PlanningRequest {
    NoCcus { tax: f64 },
    Deterministic { tax: f64, price: f64 },
    Stochastic { spec: UncertaintySpec },
    Robust { spec: UncertaintySpec, method: RobustMethod },
}

impl PlanningRequest {
    pub fn mode(&self) -> Mode {
        match self {
            PlanningRequest::NoCcus { .. } => Mode::NoCcus,
            PlanningRequest::Deterministic { .. } => Mode::Deterministic,
            PlanningRequest::Stochastic { .. } => Mode::Stochastic,
            PlanningRequest::Robust { .. } => Mode::Robust,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanningOptions {
    pub solve: SolveOptions,
    /// Uniform cap on PtG modules per plant; defaults to plant capacity over
    /// module size.
    pub module_cap: Option<u32>,
}

impl PlanningOptions {
    pub fn with_gap(mut self, gap: f64) -> Self {
        self.solve.gap_tol = gap;
        self
    }
}

#[derive(Debug, Error)]
pub enum PlanningError {
    #[error(transparent)]
    Model(#[from] MilpError),
    #[error(transparent)]
    Solver(#[from] SolveError),
    #[error("no solution: solver status {status}")]
    NoSolution { status: SolveStatus },
    #[error("operation is infeasible for the fixed investment at tax {tax}, price {price}")]
    InfeasibleRecourse { tax: f64, price: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid uncertainty specification: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveMetadata {
    pub solver: String,
    pub status: SolveStatus,
    pub objective: f64,
    pub gap: Option<f64>,
    pub wall_time: f64,
    pub num_vars: usize,
    pub num_constraints: usize,
    /// How scenario points were placed, when a grid was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_spacing: Option<String>,
}

/// Result of one planning solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningSolution {
    pub mode: Mode,
    pub request: PlanningRequest,
    #[serde(default)]
    pub module_cap: Option<u32>,
    pub first_stage: FirstStage,
    pub scenarios: Vec<ScenarioOutcome>,
    /// Deterministic: the solve. Stochastic: investment plus expected
    /// operation. Robust: investment plus the worst vertex.
    pub cost_breakdown: CostBreakdown,
    pub carbon_volumes: CarbonVolumes,
    /// `(tax, price)` of the worst box vertex (robust mode only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_corner: Option<(f64, f64)>,
    pub metadata: SolveMetadata,
    pub instance: PlanningInstance,
}

impl PlanningSolution {
    pub fn total(&self) -> f64 {
        self.cost_breakdown.total
    }

    pub fn y_sum(&self) -> u32 {
        self.first_stage.modules.iter().map(|m| m.modules).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Relative closeness used when comparing objective values.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
