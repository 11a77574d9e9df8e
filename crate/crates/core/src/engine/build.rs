use super::{PlanningError, PlanningOptions, PlanningRequest, RobustMethod, Scenario, UncertaintySpec};
use crate::formulation::{formulate, investment_terms, operation_terms, CostTerms, Formulation, FormulationSpec};
use crate::instance::PlanningInstance;
use crate::milp::{LinExpr, MilpModel, Sense, VarId, VarKind};

/// A planning model ready to solve, with the cost terms of each operation copy.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub formulation: Formulation,
    pub investment: CostTerms,
    /// Operation cost terms aligned with `scenarios`.
    pub operation: Vec<CostTerms>,
    pub scenarios: Vec<Scenario>,
    /// Worst-case recourse variable of the vertex formulation.
    pub epigraph: Option<VarId>,
}

impl BuiltModel {
    pub fn model(&self) -> &MilpModel {
        &self.formulation.model
    }
}

pub(crate) fn require_ccus(instance: &PlanningInstance) -> Result<(), PlanningError> {
    if instance.ptg_technology.is_none() {
        return Err(PlanningError::Precondition(
            "instance has no ptg_technology".into(),
        ));
    }
    if instance.siting_candidates.is_empty() {
        return Err(PlanningError::Precondition(
            "instance has no siting candidates".into(),
        ));
    }
    Ok(())
}

type BoxRanges = ((f64, f64), (f64, f64));

fn box_ranges(spec: &UncertaintySpec) -> Result<BoxRanges, PlanningError> {
    match spec {
        UncertaintySpec::Box { tax_range, price_range } => Ok((*tax_range, *price_range)),
        _ => Err(PlanningError::InvalidSpec("robust planning needs a box".into())),
    }
}

/// Builds the MILP for `request` with its objective set.
pub fn build_model(
    instance: &PlanningInstance,
    request: &PlanningRequest,
    options: &PlanningOptions,
) -> Result<BuiltModel, PlanningError> {
    let (ccus, scenarios, epigraph) = match request {
        PlanningRequest::NoCcus { tax } => (
            false,
            vec![Scenario {
                tax: *tax,
                price: 0.0,
                probability: 1.0,
            }],
            false,
        ),
        PlanningRequest::Deterministic { tax, price } => (
            true,
            vec![Scenario {
                tax: *tax,
                price: *price,
                probability: 1.0,
            }],
            false,
        ),
        PlanningRequest::Stochastic { spec } => {
            spec.validate()?;
            if !matches!(spec, UncertaintySpec::ScenarioGrid { .. }) {
                return Err(PlanningError::InvalidSpec(
                    "stochastic planning needs a scenario grid".into(),
                ));
            }
            (true, spec.scenarios(), false)
        }
        PlanningRequest::Robust { spec, method } => {
            spec.validate()?;
            let (tax, price) = box_ranges(spec)?;
            match method {
                RobustMethod::Corner => (
                    true,
                    vec![Scenario {
                        tax: tax.1,
                        price: price.0,
                        probability: 1.0,
                    }],
                    false,
                ),
                RobustMethod::VertexEpigraph => (true, spec.scenarios(), true),
            }
        }
    };
    for s in &scenarios {
        if !(s.tax.is_finite() && s.price.is_finite()) || s.tax < 0.0 || s.price < 0.0 {
            return Err(PlanningError::InvalidSpec(format!(
                "tax and price must be finite and nonnegative, got ({}, {})",
                s.tax, s.price
            )));
        }
    }
    if ccus {
        require_ccus(instance)?;
    }
    let spec = FormulationSpec {
        ccus,
        scenarios: scenarios.len(),
        module_cap: options.module_cap,
    };
    let name = format!("{}-{}", instance.meta.name, request.mode());
    let mut formulation = formulate(instance, spec, &name)?;
    let investment = investment_terms(instance, &formulation.map);
    let operation: Vec<CostTerms> = scenarios
        .iter()
        .enumerate()
        .map(|(k, s)| operation_terms(instance, &formulation.map, k, s.tax, s.price))
        .collect();

    let mut objective = investment.objective();
    let mut eta = None;
    if epigraph {
        let model = &mut formulation.model;
        let e = model.add_variable("eta", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY)?;
        for (k, op) in operation.iter().enumerate() {
            let cost = op.objective();
            // Scaled to unit largest coefficient to keep the row well conditioned.
            let scale = cost.terms.iter().fold(1.0_f64, |m, &(c, _)| m.max(c.abs()));
            let mut row = LinExpr::term(1.0 / scale, e);
            row.add_scaled(-1.0 / scale, &cost);
            model.add_expr_constraint(format!("epigraph[v{}]", k + 1), &row, Sense::Ge, 0.0)?;
        }
        objective.add(1.0, e);
        eta = Some(e);
    } else {
        for (op, s) in operation.iter().zip(&scenarios) {
            objective.add_scaled(s.probability, &op.objective());
        }
    }
    formulation.model.set_objective(&objective)?;
    Ok(BuiltModel {
        formulation,
        investment,
        operation,
        scenarios,
        epigraph: eta,
    })
}
