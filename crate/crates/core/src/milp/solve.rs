use super::MilpModel;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative MIP gap at which the search stops.
    pub gap_tol: f64,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            time_limit: None,
            seed: 0,
        }
    }
}

impl SolveOptions {
    /// Looser gap used for sensitivity sweeps.
    pub fn sweep() -> Self {
        Self {
            gap_tol: 1e-4,
            ..Self::default()
        }
    }

    pub fn with_gap(mut self, gap_tol: f64) -> Self {
        self.gap_tol = gap_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    GapLimit,
    TimeLimit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::GapLimit => "gap-limit",
            SolveStatus::TimeLimit => "time-limit",
        })
    }
}

/// Outcome of one solve. `values` is indexed by variable handle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective_value: Option<f64>,
    pub values: Option<Vec<f64>>,
    /// Relative MIP gap; 0 for pure LPs.
    pub gap: Option<f64>,
    pub wall_time: f64,
}

impl SolveResult {
    pub fn has_solution(&self) -> bool {
        self.values.is_some()
    }

    pub fn no_solution(status: SolveStatus, wall_time: f64) -> Self {
        Self {
            status,
            objective_value: None,
            values: None,
            gap: None,
            wall_time,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver adapter unavailable: {0}")]
    AdapterUnavailable(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// One solve contract, many adapters.
pub trait Solver: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<SolveResult, SolveError>;
}

/// Adapter selection (`solver.backend`, `solver.path`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// `highs` (linked library) or `lp-file` (external executable).
    pub backend: String,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    solver: SolverConfig,
}

pub const ENV_BACKEND: &str = "CCUS_SOLVER_BACKEND";
pub const ENV_PATH: &str = "CCUS_SOLVER_PATH";

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backend: "highs".into(),
            path: None,
        }
    }
}

impl SolverConfig {
    /// Reads the `[solver]` table of a TOML file.
    pub fn from_toml_file(path: &Path) -> Result<Self, SolveError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SolveError> {
        let file: ConfigFile = toml::from_str(text)
            .map_err(|e| SolveError::AdapterUnavailable(format!("bad solver config: {e}")))?;
        Ok(file.solver)
    }

    /// Applies `CCUS_SOLVER_BACKEND` / `CCUS_SOLVER_PATH` overrides.
    pub fn with_env_overrides(self) -> Self {
        self.with_overrides(std::env::var(ENV_BACKEND).ok(), std::env::var(ENV_PATH).ok())
    }

    pub fn with_overrides(mut self, backend: Option<String>, path: Option<String>) -> Self {
        if let Some(b) = backend.filter(|b| !b.is_empty()) {
            self.backend = b;
        }
        if let Some(p) = path.filter(|p| !p.is_empty()) {
            self.path = Some(PathBuf::from(p));
        }
        self
    }

    pub fn build(&self) -> Result<Box<dyn Solver>, SolveError> {
        match self.backend.as_str() {
            "highs" => {
                #[cfg(feature = "highs")]
                {
                    Ok(Box::new(super::HighsSolver::new()))
                }
                #[cfg(not(feature = "highs"))]
                {
                    Err(SolveError::AdapterUnavailable(
                        "built without the `highs` feature".into(),
                    ))
                }
            }
            "lp-file" => {
                let path = self.path.clone().ok_or_else(|| {
                    SolveError::AdapterUnavailable("backend `lp-file` needs solver.path".into())
                })?;
                Ok(Box::new(super::LpFileSolver::new(path)?))
            }
            other => Err(SolveError::AdapterUnavailable(format!("unknown backend `{other}`"))),
        }
    }
}

/// The solver selected by defaults plus environment overrides.
pub fn default_solver() -> Result<Box<dyn Solver>, SolveError> {
    SolverConfig::default().with_env_overrides().build()
}
