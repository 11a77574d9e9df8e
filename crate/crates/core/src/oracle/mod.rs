//! Brute-force optimizer for desk-sized models.
//!
//! Integer domains are first tightened (bounds, activity propagation and LP
//! feasibility probing), then every remaining assignment is fixed in turn and
//! the leftover LP solved through the ordinary [`Solver`] contract.

pub mod domain;

pub use domain::{propagate, probe, Domain, Domains};

use crate::milp::{MilpModel, SolveError, SolveOptions, SolveStatus, Solver};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BUDGET: u128 = 4096;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{product} integer assignments exceed the budget of {limit}")]
    BudgetExceeded { product: u128, limit: u128 },
    #[error("integer variable `{0}` has an infinite bound")]
    UnboundedDomain(String),
    #[error("assignment LP is unbounded")]
    Unbounded,
    #[error("assignment LP ended with status {0}")]
    Incomplete(SolveStatus),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub budget: u128,
    pub jobs: usize,
    /// Options for every per-assignment LP.
    pub lp: SolveOptions,
    /// Run LP probing before counting the budget.
    pub probing: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            jobs: 0,
            lp: SolveOptions::default(),
            probing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub claimed: f64,
    pub abs_delta: f64,
    pub rel_delta: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `None` when no assignment is feasible.
    pub best_objective: Option<f64>,
    pub best_assignment: Vec<(String, i64)>,
    pub enumerated: u64,
    pub feasible: u64,
    /// Domain product straight from the variable bounds.
    pub bound_product: u128,
    /// Domain product after reduction; this is what gets enumerated.
    pub reduced_product: u128,
    pub agreement: Option<Agreement>,
}

impl OracleReport {
    pub fn agrees(&self) -> bool {
        self.agreement.as_ref().is_some_and(|a| a.agrees)
    }
}

/// `|oracle − claimed| ≤ max(1e-6, 1e-6·|oracle|)`.
pub fn agreement(oracle: f64, claimed: f64) -> Agreement {
    let abs_delta = (oracle - claimed).abs();
    let rel_delta = abs_delta / oracle.abs().max(1e-12);
    Agreement {
        claimed,
        abs_delta,
        rel_delta,
        agrees: abs_delta <= 1e-6_f64.max(1e-6 * oracle.abs()),
    }
}

/// Tightened integer domains, or `None` if the model is proven infeasible.
pub fn reduce_domains(
    model: &MilpModel,
    solver: &dyn Solver,
    options: &OracleOptions,
) -> Result<(u128, Option<Domains>), OracleError> {
    let mut doms = Domains::from_bounds(model).ok_or_else(|| {
        let name = model
            .integer_vars()
            .into_iter()
            .map(|v| model.variable(v))
            .find(|v| !v.lower.is_finite() || !v.upper.is_finite())
            .map(|v| v.name.clone())
            .unwrap_or_default();
        OracleError::UnboundedDomain(name)
    })?;
    let bound_product = doms.product();
    if doms.is_empty() || !propagate(model, &mut doms) {
        return Ok((bound_product, None));
    }
    if options.probing
        && doms.product() > 1
        && !probe(model, &mut doms, solver, &options.lp, options.jobs)?
    {
        return Ok((bound_product, None));
    }
    Ok((bound_product, Some(doms)))
}

/// Every assignment of the domains in lexicographic order over handle order.
fn assignments(doms: &Domains) -> Vec<Vec<i64>> {
    let values: Vec<Vec<i64>> = doms.domains.iter().map(|d| d.values().collect()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; values.len()];
    loop {
        out.push(idx.iter().zip(&values).map(|(&i, vs)| vs[i]).collect());
        let mut k = values.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < values[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Exact optimum over all integer assignments.
pub fn enumerate_optimum(
    model: &MilpModel,
    solver: &dyn Solver,
    options: &OracleOptions,
) -> Result<OracleReport, OracleError> {
    let (bound_product, doms) = reduce_domains(model, solver, options)?;
    let Some(doms) = doms else {
        return Ok(OracleReport {
            best_objective: None,
            best_assignment: Vec::new(),
            enumerated: 0,
            feasible: 0,
            bound_product,
            reduced_product: 0,
            agreement: None,
        });
    };
    let reduced_product = doms.product();
    if reduced_product > options.budget {
        return Err(OracleError::BudgetExceeded {
            product: reduced_product,
            limit: options.budget,
        });
    }
    let all = assignments(&doms);
    let outcomes = crate::par::map(&all, options.jobs, |values| {
        let fixes: Vec<_> = doms
            .vars
            .iter()
            .zip(values)
            .map(|(&v, &x)| (v, x as f64))
            .collect();
        solver.solve(&model.fixed_lp(&fixes), &options.lp)
    });
    let mut best: Option<(f64, usize)> = None;
    let mut feasible = 0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let r = outcome?;
        match r.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => return Err(OracleError::Unbounded),
            other => return Err(OracleError::Incomplete(other)),
        }
        let obj = r.objective_value.expect("optimal LP has an objective");
        feasible += 1;
        // Strict comparison keeps the lexicographically smallest on ties.
        if best.is_none_or(|(b, _)| obj < b) {
            best = Some((obj, i));
        }
    }
    let best_assignment = best
        .map(|(_, i)| {
            doms.vars
                .iter()
                .zip(&all[i])
                .map(|(&v, &x)| (model.variable(v).name.clone(), x))
                .collect()
        })
        .unwrap_or_default();
    Ok(OracleReport {
        best_objective: best.map(|(b, _)| b),
        best_assignment,
        enumerated: all.len() as u64,
        feasible,
        bound_product,
        reduced_product,
        agreement: None,
    })
}

/// Runs the oracle and compares its optimum with a claimed objective.
pub fn verify_solution(
    model: &MilpModel,
    claimed_objective: f64,
    solver: &dyn Solver,
    options: &OracleOptions,
) -> Result<OracleReport, OracleError> {
    let mut report = enumerate_optimum(model, solver, options)?;
    report.agreement = report
        .best_objective
        .map(|best| agreement(best, claimed_objective));
    Ok(report)
}
