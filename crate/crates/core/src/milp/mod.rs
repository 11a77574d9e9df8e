//! Solver-agnostic mixed-integer linear program representation.
//!
//! Variables and constraints are named; terms are stored merged and sorted
//! by handle so exports are reproducible. Solving goes through the
//! [`Solver`] contract; concrete adapters live in submodules.

mod expr;
#[cfg(feature = "highs")]
mod highs;
mod external;
mod lp_format;
mod solve;

pub use expr::LinExpr;
#[cfg(feature = "highs")]
pub use highs::HighsSolver;
pub use external::{parse_highs_solution, LpFileSolver};
pub use lp_format::{export_lp, lp_name};
pub use external::ParsedSolution;
pub use solve::{
    default_solver, SolveError, SolveOptions, SolveResult, SolveStatus, Solver, SolverConfig, ENV_BACKEND,
    ENV_PATH,
};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Absolute tolerance for row activity and integrality checks.
pub const FEAS_TOL: f64 = 1e-6;

/// Opaque, stable variable handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintId(pub(crate) usize);

impl ConstraintId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(f64, VarId)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Minimization objective `Σ c·x + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Objective {
    pub terms: Vec<(f64, VarId)>,
    pub constant: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum MilpError {
    #[error("variable name `{0}` is already registered")]
    DuplicateName(String),
    #[error("variable `{name}` has inverted bounds [{lower}, {upper}]")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("binary variable `{0}` must have bounds within [0, 1]")]
    BinaryBounds(String),
    #[error("`{context}` references unknown variable handle {handle}")]
    UnknownHandle { context: String, handle: usize },
    #[error("`{context}` has a non-finite coefficient or right-hand side")]
    NonFinite { context: String },
}

/// A row or bound that a candidate point violates.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub what: String,
    pub amount: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    name: String,
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Objective,
    by_name: HashMap<String, VarId>,
}

fn canonical_terms(
    terms: impl IntoIterator<Item = (f64, VarId)>,
    nvars: usize,
    context: &str,
) -> Result<Vec<(f64, VarId)>, MilpError> {
    let mut out: Vec<(f64, VarId)> = Vec::new();
    for (c, v) in terms {
        if v.0 >= nvars {
            return Err(MilpError::UnknownHandle {
                context: context.to_string(),
                handle: v.0,
            });
        }
        if !c.is_finite() {
            return Err(MilpError::NonFinite {
                context: context.to_string(),
            });
        }
        out.push((c, v));
    }
    out.sort_by_key(|&(_, v)| v);
    let mut merged: Vec<(f64, VarId)> = Vec::with_capacity(out.len());
    for (c, v) in out {
        match merged.last_mut() {
            Some(last) if last.1 == v => last.0 += c,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|&(c, _)| c != 0.0);
    Ok(merged)
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MilpError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MilpError::InvertedBounds { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(MilpError::BinaryBounds(name));
        }
        let id = VarId(self.variables.len());
        self.by_name.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (f64, VarId)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstraintId, MilpError> {
        let name = name.into();
        let terms = canonical_terms(terms, self.variables.len(), &name)?;
        if !rhs.is_finite() {
            return Err(MilpError::NonFinite { context: name });
        }
        let id = ConstraintId(self.constraints.len());
        self.constraints.push(LinearConstraint {
            name,
            terms,
            sense,
            rhs,
        });
        Ok(id)
    }

    /// Adds `expr (sense) rhs`, moving the expression constant to the right.
    pub fn add_expr_constraint(
        &mut self,
        name: impl Into<String>,
        expr: &LinExpr,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstraintId, MilpError> {
        self.add_constraint(name, expr.terms.iter().copied(), sense, rhs - expr.constant)
    }

    /// Replaces the (minimization) objective.
    pub fn set_objective(&mut self, expr: &LinExpr) -> Result<(), MilpError> {
        let terms = canonical_terms(expr.terms.iter().copied(), self.variables.len(), "objective")?;
        if !expr.constant.is_finite() {
            return Err(MilpError::NonFinite {
                context: "objective".into(),
            });
        }
        self.objective = Objective {
            terms,
            constant: expr.constant,
        };
        Ok(())
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: ConstraintId) -> &LinearConstraint {
        &self.constraints[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len()).map(VarId)
    }

    /// Integer and binary variables in handle order.
    pub fn integer_vars(&self) -> Vec<VarId> {
        self.var_ids()
            .filter(|&v| self.variables[v.0].kind.is_integral())
            .collect()
    }

    pub fn is_mip(&self) -> bool {
        self.variables.iter().any(|v| v.kind.is_integral())
    }

    /// Tightens the bounds of one variable in place.
    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<(), MilpError> {
        let var = &mut self.variables[id.0];
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MilpError::InvertedBounds {
                name: var.name.clone(),
                lower,
                upper,
            });
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    /// Copy with the given integer variables fixed and every remaining
    /// integrality requirement dropped.
    pub fn fixed_lp(&self, fixes: &[(VarId, f64)]) -> MilpModel {
        let mut lp = self.clone();
        for &(v, value) in fixes {
            let var = &mut lp.variables[v.0];
            var.lower = value;
            var.upper = value;
        }
        for var in &mut lp.variables {
            var.kind = VarKind::Continuous;
        }
        lp
    }

    pub fn row_activity(&self, c: &LinearConstraint, values: &[f64]) -> f64 {
        c.terms.iter().map(|&(a, v)| a * values[v.0]).sum()
    }

    pub fn objective_at(&self, values: &[f64]) -> f64 {
        self.objective.constant
            + self
                .objective
                .terms
                .iter()
                .map(|&(c, v)| c * values[v.0])
                .sum::<f64>()
    }

    /// Every bound, row and integrality violation larger than `tol`.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        for (var, &x) in self.variables.iter().zip(values) {
            let amount = (var.lower - x).max(x - var.upper).max(0.0);
            if amount > tol {
                out.push(Violation {
                    what: format!("bound {}", var.name),
                    amount,
                });
            }
            if var.kind.is_integral() && (x - x.round()).abs() > tol {
                out.push(Violation {
                    what: format!("integrality {}", var.name),
                    amount: (x - x.round()).abs(),
                });
            }
        }
        for c in &self.constraints {
            let act = self.row_activity(c, values);
            let amount = match c.sense {
                Sense::Le => act - c.rhs,
                Sense::Ge => c.rhs - act,
                Sense::Eq => (act - c.rhs).abs(),
            };
            if amount > tol {
                out.push(Violation {
                    what: format!("row {}", c.name),
                    amount,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_variable_contract() {
        let mut m = MilpModel::new("t");
        let y = m.add_variable("y[gen1]", VarKind::Integer, 0.0, 50.0).unwrap();
        let u = m.add_variable("u[gen1,t1]", VarKind::Binary, 0.0, 1.0).unwrap();
        assert_ne!(y, u);
        assert_eq!(
            m.add_variable("u[gen1,t1]", VarKind::Binary, 0.0, 1.0),
            Err(MilpError::DuplicateName("u[gen1,t1]".into()))
        );
        assert!(matches!(
            m.add_variable("z", VarKind::Continuous, 2.0, 1.0),
            Err(MilpError::InvertedBounds { .. })
        ));
        assert!(matches!(
            m.add_variable("b", VarKind::Binary, 0.0, 2.0),
            Err(MilpError::BinaryBounds(_))
        ));
        assert_eq!(m.var_by_name("y[gen1]"), Some(y));
    }

    #[test]
    fn add_constraint_merges_and_sorts() {
        let mut m = MilpModel::new("t");
        let x = m.add_variable("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        let y = m.add_variable("y", VarKind::Continuous, 0.0, 1.0).unwrap();
        let c = m.add_constraint("c", [(1.0, x), (-1.0, y)], Sense::Eq, 0.0).unwrap();
        assert_eq!(m.constraint(c).terms.len(), 2);
        let c = m.add_constraint("d", [(1.0, y), (1.0, x), (2.0, x)], Sense::Le, 1.0).unwrap();
        assert_eq!(m.constraint(c).terms, vec![(3.0, x), (1.0, y)]);
        assert!(matches!(
            m.add_constraint("e", [(f64::NAN, x)], Sense::Le, 1.0),
            Err(MilpError::NonFinite { .. })
        ));
        assert!(matches!(
            m.add_constraint("f", [(1.0, VarId(7))], Sense::Le, 1.0),
            Err(MilpError::UnknownHandle { handle: 7, .. })
        ));
    }

    #[test]
    fn violations_report_rows_and_integrality() {
        let mut m = MilpModel::new("t");
        let x = m.add_variable("x", VarKind::Integer, 0.0, 5.0).unwrap();
        m.add_constraint("cap", [(1.0, x)], Sense::Le, 2.0).unwrap();
        assert!(m.violations(&[2.0], FEAS_TOL).is_empty());
        let v = m.violations(&[2.5], FEAS_TOL);
        assert_eq!(v.len(), 2);
    }
}
