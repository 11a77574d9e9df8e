use super::build::require_ccus;
use super::extract::{first_stage, scenario_outcome, CarbonVolumes, FirstStage, ScenarioOutcome};
use super::{
    build_model, rel_close, BuiltModel, Mode, PlanningError, PlanningOptions, PlanningRequest, PlanningSolution,
    RobustMethod, SolveMetadata, UncertaintySpec,
};
use crate::formulation::CostBreakdown;
use crate::instance::PlanningInstance;
use crate::milp::{SolveResult, SolveStatus, Solver};

/// Objective values closer than this (relative) count as ties when picking
/// the worst box vertex.
const TIE_TOL: f64 = 1e-6;

fn run(
    instance: &PlanningInstance,
    request: &PlanningRequest,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<(BuiltModel, SolveResult, Vec<f64>), PlanningError> {
    let built = build_model(instance, request, options)?;
    let result = solver.solve(built.model(), &options.solve)?;
    match result.values.clone() {
        Some(values) => Ok((built, result, values)),
        None => Err(PlanningError::NoSolution { status: result.status }),
    }
}

fn assemble(
    instance: &PlanningInstance,
    request: &PlanningRequest,
    options: &PlanningOptions,
    solver: &dyn Solver,
    built: &BuiltModel,
    result: &SolveResult,
    values: &[f64],
) -> PlanningSolution {
    let scenarios: Vec<ScenarioOutcome> = (0..built.scenarios.len())
        .map(|k| scenario_outcome(instance, built, k, values))
        .collect();
    let invest = built.investment.evaluate(values);
    let mut breakdown = invest;
    let mut carbon = CarbonVolumes::default();
    for (k, s) in scenarios.iter().enumerate() {
        let op = built.operation[k].evaluate(values);
        breakdown = breakdown.combine(1.0, &op, s.probability);
        carbon.scaled_add(s.probability, &s.carbon);
    }
    breakdown.total = breakdown.recomputed_total();
    let grid_spacing = match request {
        PlanningRequest::Stochastic { spec } | PlanningRequest::Robust { spec, .. } => Some(spec.spacing_note()),
        _ => None,
    };
    PlanningSolution {
        mode: request.mode(),
        request: request.clone(),
        module_cap: options.module_cap,
        first_stage: first_stage(instance, &built.formulation.map, values),
        scenarios,
        cost_breakdown: breakdown,
        carbon_volumes: carbon,
        worst_corner: None,
        metadata: SolveMetadata {
            solver: solver.name().to_string(),
            status: result.status,
            objective: result.objective_value.unwrap_or_else(|| built.model().objective_at(values)),
            gap: result.gap,
            wall_time: result.wall_time,
            num_vars: built.model().num_vars(),
            num_constraints: built.model().num_constraints(),
            grid_spacing,
        },
        instance: instance.clone(),
    }
}

/// Solves any planning request.
pub fn solve(
    instance: &PlanningInstance,
    request: &PlanningRequest,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<PlanningSolution, PlanningError> {
    let (built, result, values) = run(instance, request, solver, options)?;
    let mut solution = assemble(instance, request, options, solver, &built, &result, &values);
    if let PlanningRequest::Robust { spec, method } = request {
        if *method == RobustMethod::Corner && !has_capture_cap(instance, &built) {
            return Err(PlanningError::Precondition(
                "corner method needs the capture cap on every plant-hour".into(),
            ));
        }
        attach_worst_vertex(instance, spec, solver, options, &mut solution)?;
    }
    Ok(solution)
}

/// The corner argument relies on `Q^{CC} ≤ Q^{EMI}` at every plant-hour.
fn has_capture_cap(instance: &PlanningInstance, built: &BuiltModel) -> bool {
    let plants = built.formulation.map.scenarios.iter().map(|s| s.ccpp.len()).sum::<usize>();
    let rows = built
        .model()
        .constraints()
        .iter()
        .filter(|c| c.name.contains("capture_cap["))
        .count();
    rows == plants * instance.horizon
}

/// Re-evaluates every box vertex at the chosen investment and records the
/// worst one. Ties go to the higher tax, then the lower price.
fn attach_worst_vertex(
    instance: &PlanningInstance,
    spec: &UncertaintySpec,
    solver: &dyn Solver,
    options: &PlanningOptions,
    solution: &mut PlanningSolution,
) -> Result<(), PlanningError> {
    let mut outcomes = Vec::new();
    for v in spec.scenarios() {
        let mut eval = evaluate_fixed_first_stage(instance, &solution.first_stage, v.tax, v.price, solver, options)?;
        eval.outcome.probability = v.probability;
        outcomes.push(eval.outcome);
    }
    let worst = outcomes
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            let (ta, tb) = (a.breakdown.total, b.breakdown.total);
            if rel_close(ta, tb, TIE_TOL) {
                a.tax
                    .total_cmp(&b.tax)
                    .then(b.price.total_cmp(&a.price))
            } else {
                ta.total_cmp(&tb)
            }
        })
        .map(|(k, _)| k)
        .expect("a box has at least one vertex");
    solution.cost_breakdown = outcomes[worst].breakdown;
    solution.carbon_volumes = outcomes[worst].carbon;
    solution.worst_corner = Some((outcomes[worst].tax, outcomes[worst].price));
    solution.scenarios = outcomes;
    Ok(())
}

/// Operation without CCUS: gas and electric blocks plus emission accounting.
pub fn solve_no_ccus(
    instance: &PlanningInstance,
    tax: f64,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<PlanningSolution, PlanningError> {
    solve(instance, &PlanningRequest::NoCcus { tax }, solver, options)
}

/// Retrofit sizing and siting at a single (tax, price).
pub fn solve_deterministic(
    instance: &PlanningInstance,
    tax: f64,
    price: f64,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<PlanningSolution, PlanningError> {
    solve(instance, &PlanningRequest::Deterministic { tax, price }, solver, options)
}

/// Extensive form over a scenario grid with shared investment.
pub fn solve_stochastic(
    instance: &PlanningInstance,
    spec: &UncertaintySpec,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<PlanningSolution, PlanningError> {
    solve(instance, &PlanningRequest::Stochastic { spec: spec.clone() }, solver, options)
}

/// Investment against the worst point of a (tax, price) box.
pub fn solve_robust(
    instance: &PlanningInstance,
    spec: &UncertaintySpec,
    method: RobustMethod,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<PlanningSolution, PlanningError> {
    solve(
        instance,
        &PlanningRequest::Robust {
            spec: spec.clone(),
            method,
        },
        solver,
        options,
    )
}

/// Recourse evaluation at a fixed investment.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Investment plus the optimal operation at (tax, price).
    pub breakdown: CostBreakdown,
    pub outcome: ScenarioOutcome,
    pub status: SolveStatus,
}

impl Evaluation {
    pub fn operation_cost(&self) -> f64 {
        self.breakdown.operation()
    }
}

fn check_first_stage(instance: &PlanningInstance, first: &FirstStage, cap: Option<u32>) -> Result<(), PlanningError> {
    let pre = |m: String| Err(PlanningError::Precondition(m));
    for m in &first.modules {
        let Some(j) = instance.generator_index(&m.plant) else {
            return pre(format!("unknown plant `{}`", m.plant));
        };
        if !instance.generators[j].ccpp_eligible {
            return pre(format!("plant `{}` cannot host capture", m.plant));
        }
        let limit = cap.unwrap_or_else(|| crate::formulation::default_module_cap(instance, j));
        if m.modules > limit {
            return pre(format!("plant `{}` has {} modules above the cap {limit}", m.plant, m.modules));
        }
    }
    for s in &first.siting {
        if !instance
            .siting_candidates
            .iter()
            .any(|c| c.gas_node == s.gas_node && c.plant == s.plant)
        {
            return pre(format!("({}, {}) is not a siting candidate", s.gas_node, s.plant));
        }
        if s.selected && first.modules_of(&s.plant) == 0 {
            return pre(format!(
                "site ({}, {}) selected while plant `{}` has no PtG modules",
                s.gas_node, s.plant, s.plant
            ));
        }
    }
    Ok(())
}

/// Solves the operation problem with `y` and `s` fixed.
pub fn evaluate_fixed_first_stage(
    instance: &PlanningInstance,
    first: &FirstStage,
    tax: f64,
    price: f64,
    solver: &dyn Solver,
    options: &PlanningOptions,
) -> Result<Evaluation, PlanningError> {
    require_ccus(instance)?;
    check_first_stage(instance, first, options.module_cap)?;
    let request = PlanningRequest::Deterministic { tax, price };
    let mut built = build_model(instance, &request, options)?;
    let fs = built
        .formulation
        .map
        .first_stage
        .clone()
        .expect("deterministic models carry a first stage");
    for &(j, y) in &fs.modules {
        let n = first.modules_of(&instance.generators[j].id) as f64;
        built.formulation.model.set_bounds(y, n, n)?;
    }
    for (c, &s) in instance.siting_candidates.iter().zip(&fs.siting) {
        let on = first
            .siting
            .iter()
            .any(|d| d.selected && d.gas_node == c.gas_node && d.plant == c.plant);
        let x = if on { 1.0 } else { 0.0 };
        built.formulation.model.set_bounds(s, x, x)?;
    }
    let result = solver.solve(built.model(), &options.solve)?;
    let Some(values) = result.values.as_deref() else {
        return match result.status {
            SolveStatus::Infeasible => Err(PlanningError::InfeasibleRecourse { tax, price }),
            status => Err(PlanningError::NoSolution { status }),
        };
    };
    let outcome = scenario_outcome(instance, &built, 0, values);
    Ok(Evaluation {
        breakdown: outcome.breakdown,
        outcome,
        status: result.status,
    })
}

/// `Σ_s P_s · total(first, s)`: the expected cost of committing to `first`.
pub fn expected_cost_of_first_stage(
    instance: &PlanningInstance,
    first: &FirstStage,
    spec: &UncertaintySpec,
    solver: &dyn Solver,
    options: &PlanningOptions,
    jobs: usize,
) -> Result<f64, PlanningError> {
    spec.validate()?;
    let scenarios = spec.scenarios();
    let evals = crate::par::map(&scenarios, jobs, |s| {
        evaluate_fixed_first_stage(instance, first, s.tax, s.price, solver, options)
            .map(|e| s.probability * e.breakdown.total)
    });
    evals.into_iter().sum()
}

impl PlanningSolution {
    /// Whether the solution was produced by `mode`.
    pub fn is(&self, mode: Mode) -> bool {
        self.mode == mode
    }
}
