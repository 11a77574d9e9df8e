//! Adapter that runs an external solver executable on an exported LP file.
//!
//! The executable is invoked with HiGHS command-line conventions
//! (`--model_file`, `--options_file`, `--solution_file`) and must write a
//! HiGHS text solution file.

use super::{export_lp, lp_name, MilpModel, SolveError, SolveOptions, SolveResult, SolveStatus, Solver};
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct LpFileSolver {
    executable: PathBuf,
}

impl LpFileSolver {
    pub fn new(executable: PathBuf) -> Result<Self, SolveError> {
        if !executable.is_file() {
            return Err(SolveError::AdapterUnavailable(format!(
                "solver executable {} not found",
                executable.display()
            )));
        }
        Ok(Self { executable })
    }
}

/// Parsed primal part of a HiGHS text solution file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub columns: Vec<(String, f64)>,
}

fn status_from_text(text: &str) -> Result<SolveStatus, SolveError> {
    Ok(match text.trim() {
        "Optimal" | "Empty" => SolveStatus::Optimal,
        "Infeasible" | "Primal infeasible or unbounded" => SolveStatus::Infeasible,
        "Unbounded" => SolveStatus::Unbounded,
        "Time limit reached" => SolveStatus::TimeLimit,
        "Objective bound" | "Solution limit reached" => SolveStatus::GapLimit,
        other => return Err(SolveError::SolverFailure(format!("solver reported `{other}`"))),
    })
}

/// Parses the model status and primal column values of a HiGHS solution file.
pub fn parse_highs_solution(text: &str) -> Result<ParsedSolution, SolveError> {
    let bad = |what: &str| SolveError::SolverFailure(format!("malformed solution file: {what}"));
    let mut lines = text.lines();
    let mut status = None;
    let mut objective = None;
    let mut columns = Vec::new();
    let mut expected = 0usize;
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line == "Model status" {
            status = Some(status_from_text(lines.next().ok_or_else(|| bad("status"))?)?);
        } else if line == "# Primal solution values" {
            let feasibility = lines.next().ok_or_else(|| bad("primal status"))?.trim();
            if feasibility != "Feasible" {
                break;
            }
            for line in lines.by_ref() {
                let line = line.trim();
                if let Some(v) = line.strip_prefix("Objective ") {
                    objective = Some(v.trim().parse::<f64>().map_err(|_| bad("objective"))?);
                } else if let Some(n) = line.strip_prefix("# Columns ") {
                    expected = n.trim().parse().map_err(|_| bad("column count"))?;
                    break;
                }
            }
            for _ in 0..expected {
                let line = lines.next().ok_or_else(|| bad("column values"))?;
                let mut parts = line.split_whitespace();
                let name = parts.next().ok_or_else(|| bad("column name"))?;
                let value: f64 = parts
                    .next()
                    .ok_or_else(|| bad("column value"))?
                    .parse()
                    .map_err(|_| bad("column value"))?;
                columns.push((name.to_string(), value));
            }
            break;
        }
    }
    Ok(ParsedSolution {
        status: status.ok_or_else(|| bad("missing model status"))?,
        objective,
        columns,
    })
}

impl Solver for LpFileSolver {
    fn name(&self) -> &str {
        "lp-file"
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<SolveResult, SolveError> {
        let started = Instant::now();
        let dir = tempfile::tempdir()?;
        let lp = dir.path().join("model.lp");
        let sol = dir.path().join("model.sol");
        let opts = dir.path().join("options.txt");
        std::fs::write(&lp, export_lp(model))?;
        let mut option_text = format!(
            "mip_rel_gap = {}\nrandom_seed = {}\n",
            options.gap_tol,
            options.seed % (i32::MAX as u64)
        );
        if let Some(limit) = options.time_limit {
            option_text.push_str(&format!("time_limit = {limit}\n"));
        }
        std::fs::write(&opts, option_text)?;
        let output = Command::new(&self.executable)
            .arg("--model_file")
            .arg(&lp)
            .arg("--options_file")
            .arg(&opts)
            .arg("--solution_file")
            .arg(&sol)
            .output()?;
        if !output.status.success() {
            return Err(SolveError::SolverFailure(format!(
                "{} exited with {}: {}",
                self.executable.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = std::fs::read_to_string(&sol)?;
        let parsed = parse_highs_solution(&text)?;
        let wall_time = started.elapsed().as_secs_f64();
        if parsed.columns.is_empty() || parsed.objective.is_none() {
            return Ok(SolveResult::no_solution(parsed.status, wall_time));
        }
        let columns: HashMap<_, _> = model
            .variables()
            .iter()
            .enumerate()
            .map(|(k, v)| (lp_name(&v.name), k))
            .collect();
        let mut values = vec![f64::NAN; model.num_vars()];
        for (name, value) in &parsed.columns {
            match columns.get(name.as_str()) {
                Some(&k) => values[k] = *value,
                None if name == "obj_constant__" => {}
                None => {
                    return Err(SolveError::SolverFailure(format!(
                        "solution names unknown column `{name}`"
                    )))
                }
            }
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            return Err(SolveError::SolverFailure(format!(
                "solution lacks column `{}`",
                model.variables()[missing].name
            )));
        }
        Ok(SolveResult {
            status: parsed.status,
            objective_value: parsed.objective,
            values: Some(values),
            gap: None,
            wall_time,
        })
    }
}
