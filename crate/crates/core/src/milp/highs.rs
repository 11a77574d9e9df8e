//! Adapter for the HiGHS library through its C API.

use super::{MilpModel, Sense, SolveError, SolveOptions, SolveResult, SolveStatus, Solver, VarKind};
use highs_sys::*;
use std::ffi::{c_void, CString};
use std::path::Path;
use std::time::Instant;

struct Handle(*mut c_void);

impl Handle {
    fn new() -> Self {
        // SAFETY: Highs_create has no preconditions; ownership is released in Drop.
        let ptr = unsafe { Highs_create() };
        assert!(!ptr.is_null(), "Highs_create returned null");
        Self(ptr)
    }

    fn set_bool(&self, name: &str, value: bool) {
        let key = CString::new(name).unwrap();
        unsafe { Highs_setBoolOptionValue(self.0, key.as_ptr(), HighsInt::from(value)) };
    }

    fn set_double(&self, name: &str, value: f64) {
        let key = CString::new(name).unwrap();
        unsafe { Highs_setDoubleOptionValue(self.0, key.as_ptr(), value) };
    }

    fn set_int(&self, name: &str, value: HighsInt) {
        let key = CString::new(name).unwrap();
        unsafe { Highs_setIntOptionValue(self.0, key.as_ptr(), value) };
    }

    fn double_info(&self, name: &str) -> Option<f64> {
        let key = CString::new(name).unwrap();
        let mut out = 0.0;
        let status = unsafe { Highs_getDoubleInfoValue(self.0, key.as_ptr(), &mut out) };
        (status == kHighsStatusOk).then_some(out)
    }

    fn int_info(&self, name: &str) -> Option<HighsInt> {
        let key = CString::new(name).unwrap();
        let mut out: HighsInt = 0;
        let status = unsafe { Highs_getIntInfoValue(self.0, key.as_ptr(), &mut out) };
        (status == kHighsStatusOk).then_some(out)
    }

    fn configure(&self, options: &SolveOptions) {
        self.set_bool("output_flag", std::env::var_os("CCUS_HIGHS_LOG").is_some());
        self.set_double("mip_rel_gap", options.gap_tol);
        self.set_double("mip_feasibility_tolerance", 1e-7);
        self.set_double("primal_feasibility_tolerance", 1e-8);
        self.set_int("random_seed", (options.seed % (i32::MAX as u64)) as HighsInt);
        if let Some(limit) = options.time_limit {
            self.set_double("time_limit", limit);
        }
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.0) };
    }
}

// The handle is only ever used from the thread that created it.
unsafe impl Send for Handle {}

#[derive(Debug, Default, Clone)]
pub struct HighsSolver;

impl HighsSolver {
    pub fn new() -> Self {
        Self
    }

    /// Reads an LP/MPS file with the HiGHS reader and solves it. Used to
    /// cross-check exports against an independent parser.
    pub fn solve_file(&self, path: &Path, options: &SolveOptions) -> Result<(SolveStatus, Option<f64>), SolveError> {
        let h = Handle::new();
        h.configure(options);
        let file = CString::new(path.to_string_lossy().as_bytes())
            .map_err(|e| SolveError::SolverFailure(e.to_string()))?;
        let status = unsafe { Highs_readModel(h.0, file.as_ptr()) };
        if status == kHighsStatusError {
            return Err(SolveError::SolverFailure(format!(
                "HiGHS could not read {}",
                path.display()
            )));
        }
        unsafe { Highs_run(h.0) };
        let status = map_status(unsafe { Highs_getModelStatus(h.0) })?;
        let obj = matches!(status, SolveStatus::Optimal).then(|| unsafe { Highs_getObjectiveValue(h.0) });
        Ok((status, obj))
    }

    /// Solves and writes the HiGHS text solution file next to `path`.
    pub fn write_solution_file(&self, model: &MilpModel, path: &Path) -> Result<(), SolveError> {
        let h = Handle::new();
        h.configure(&SolveOptions::default());
        pass_model(&h, model)?;
        for (k, var) in model.variables().iter().enumerate() {
            let name = CString::new(super::lp_name(&var.name).as_bytes())
                .map_err(|e| SolveError::SolverFailure(e.to_string()))?;
            unsafe { Highs_passColName(h.0, k as HighsInt, name.as_ptr()) };
        }
        unsafe { Highs_run(h.0) };
        let file = CString::new(path.to_string_lossy().as_bytes())
            .map_err(|e| SolveError::SolverFailure(e.to_string()))?;
        unsafe { Highs_writeSolution(h.0, file.as_ptr()) };
        Ok(())
    }
}

fn map_status(code: HighsInt) -> Result<SolveStatus, SolveError> {
    Ok(match code {
        c if c == kHighsModelStatusOptimal || c == kHighsModelStatusModelEmpty => SolveStatus::Optimal,
        c if c == kHighsModelStatusInfeasible => SolveStatus::Infeasible,
        c if c == kHighsModelStatusUnbounded => SolveStatus::Unbounded,
        // Presolve could not tell which; with a bounded objective row set this
        // means there is no feasible point worth reporting.
        c if c == kHighsModelStatusUnboundedOrInfeasible => SolveStatus::Infeasible,
        c if c == kHighsModelStatusTimeLimit => SolveStatus::TimeLimit,
        c if c == kHighsModelStatusObjectiveBound || c == kHighsModelStatusSolutionLimit => {
            SolveStatus::GapLimit
        }
        other => {
            return Err(SolveError::SolverFailure(format!(
                "HiGHS model status {other}"
            )))
        }
    })
}

fn pass_model(h: &Handle, model: &MilpModel) -> Result<(), SolveError> {
    let inf = unsafe { Highs_getInfinity(h.0) };
    let clamp = |x: f64| x.clamp(-inf, inf);
    let ncol = model.num_vars();
    let nrow = model.num_constraints();
    let mut cost = vec![0.0; ncol];
    for &(c, v) in &model.objective().terms {
        cost[v.index()] += c;
    }
    let lower: Vec<f64> = model.variables().iter().map(|v| clamp(v.lower)).collect();
    let upper: Vec<f64> = model.variables().iter().map(|v| clamp(v.upper)).collect();
    let mut row_lower = Vec::with_capacity(nrow);
    let mut row_upper = Vec::with_capacity(nrow);
    let mut start: Vec<HighsInt> = Vec::with_capacity(nrow + 1);
    let mut index: Vec<HighsInt> = Vec::new();
    let mut value = Vec::new();
    for c in model.constraints() {
        start.push(index.len() as HighsInt);
        for &(a, v) in &c.terms {
            index.push(v.index() as HighsInt);
            value.push(a);
        }
        let (lo, hi) = match c.sense {
            Sense::Le => (-inf, c.rhs),
            Sense::Ge => (c.rhs, inf),
            Sense::Eq => (c.rhs, c.rhs),
        };
        row_lower.push(lo);
        row_upper.push(hi);
    }
    let integrality: Vec<HighsInt> = model
        .variables()
        .iter()
        .map(|v| match v.kind {
            VarKind::Continuous => kHighsVarTypeContinuous,
            _ => kHighsVarTypeInteger,
        })
        .collect();
    let status = unsafe {
        Highs_passMip(
            h.0,
            ncol as HighsInt,
            nrow as HighsInt,
            index.len() as HighsInt,
            kHighsMatrixFormatRowwise,
            kHighsObjSenseMinimize,
            model.objective().constant,
            cost.as_ptr(),
            lower.as_ptr(),
            upper.as_ptr(),
            row_lower.as_ptr(),
            row_upper.as_ptr(),
            start.as_ptr(),
            index.as_ptr(),
            value.as_ptr(),
            integrality.as_ptr(),
        )
    };
    if status == kHighsStatusError {
        return Err(SolveError::SolverFailure("HiGHS rejected the model".into()));
    }
    Ok(())
}

impl Solver for HighsSolver {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<SolveResult, SolveError> {
        let started = Instant::now();
        let h = Handle::new();
        h.configure(options);
        pass_model(&h, model)?;
        let run = unsafe { Highs_run(h.0) };
        if run == kHighsStatusError {
            return Err(SolveError::SolverFailure("HiGHS run returned an error".into()));
        }
        let status = map_status(unsafe { Highs_getModelStatus(h.0) })?;
        let wall_time = started.elapsed().as_secs_f64();
        let feasible = h.int_info("primal_solution_status") == Some(kHighsSolutionStatusFeasible);
        let keep = match status {
            SolveStatus::Optimal | SolveStatus::GapLimit => true,
            SolveStatus::TimeLimit => feasible,
            _ => false,
        };
        if !keep {
            return Ok(SolveResult::no_solution(status, wall_time));
        }
        let ncol = model.num_vars();
        let nrow = model.num_constraints();
        let mut col_value = vec![0.0; ncol];
        let mut col_dual = vec![0.0; ncol];
        let mut row_value = vec![0.0; nrow];
        let mut row_dual = vec![0.0; nrow];
        unsafe {
            Highs_getSolution(
                h.0,
                col_value.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            )
        };
        let gap = if model.is_mip() {
            h.double_info("mip_gap").map(|g| if g.is_finite() { g.max(0.0) } else { g })
        } else {
            Some(0.0)
        };
        let objective = unsafe { Highs_getObjectiveValue(h.0) };
        Ok(SolveResult {
            status,
            objective_value: Some(objective),
            values: Some(col_value),
            gap,
            wall_time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{parse_highs_solution, LinExpr, FEAS_TOL};

    fn bounded(lo: f64, hi: Option<f64>) -> MilpModel {
        let mut m = MilpModel::new("t");
        let x = m.add_variable("x", VarKind::Continuous, 0.0, f64::INFINITY).unwrap();
        m.add_constraint("lo", [(1.0, x)], Sense::Ge, lo).unwrap();
        if let Some(hi) = hi {
            m.add_constraint("hi", [(1.0, x)], Sense::Le, hi).unwrap();
        }
        m.set_objective(&LinExpr::term(1.0, x)).unwrap();
        m
    }

    #[test]
    fn trivial_lp_and_infeasible() {
        let r = HighsSolver.solve(&bounded(3.0, None), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective_value.unwrap() - 3.0).abs() < 1e-9);
        let r = HighsSolver.solve(&bounded(3.0, Some(2.0)), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.values.is_none());
    }

    #[test]
    fn small_mip_replays() {
        let mut m = MilpModel::new("knap");
        let a = m.add_variable("a", VarKind::Binary, 0.0, 1.0).unwrap();
        let b = m.add_variable("b", VarKind::Integer, 0.0, 4.0).unwrap();
        m.add_constraint("w", [(3.0, a), (2.0, b)], Sense::Le, 7.5).unwrap();
        let mut obj = LinExpr::new();
        obj.add(-5.0, a).add(-3.0, b).add_constant(1.0);
        m.set_objective(&obj).unwrap();
        let r = HighsSolver.solve(&m, &SolveOptions::default()).unwrap();
        let x = r.values.unwrap();
        assert!(m.violations(&x, FEAS_TOL).is_empty());
        assert!((m.objective_at(&x) - r.objective_value.unwrap()).abs() < 1e-9);
        assert!((r.objective_value.unwrap() + 10.0).abs() < 1e-9);
    }

    #[test]
    fn solution_file_parses_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.txt");
        HighsSolver.write_solution_file(&bounded(3.0, Some(5.0)), &path).unwrap();
        let parsed = parse_highs_solution(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(parsed.status, SolveStatus::Optimal);
        assert_eq!(parsed.columns.len(), 1);
        assert!((parsed.columns[0].1 - 3.0).abs() < 1e-9);
    }
}
