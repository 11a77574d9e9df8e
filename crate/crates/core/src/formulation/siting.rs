use super::VariableMap;
use crate::instance::PlanningInstance;
use crate::milp::{ConstraintId, MilpError, MilpModel, Sense};

/// First-stage link `Σ_m s_{m,j} ≤ M₁ · y_j` with `M₁` the number of gas nodes.
pub fn build_siting_link(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    map: &VariableMap,
) -> Result<Vec<ConstraintId>, MilpError> {
    let Some(fs) = map.first_stage.as_ref() else {
        return Ok(Vec::new());
    };
    let big_m = instance.gas_nodes.len() as f64;
    let mut rows = Vec::new();
    for &(j, y) in &fs.modules {
        let plant = &instance.generators[j].id;
        let mut terms: Vec<_> = instance
            .siting_candidates
            .iter()
            .zip(&fs.siting)
            .filter(|(c, _)| &c.plant == plant)
            .map(|(_, &s)| (1.0, s))
            .collect();
        if terms.is_empty() {
            continue;
        }
        terms.push((-big_m, y));
        rows.push(model.add_constraint(format!("site_link[{plant}]"), terms, Sense::Le, 0.0)?);
    }
    Ok(rows)
}

/// Per-scenario injection gating `V_{m,j,t} ≤ M₂ · s_{m,j}` and the split
/// `V_{j,t} = Σ_m V_{m,j,t}`. `M₂` is the methane output of a full-size PtG.
pub fn build_siting_block(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    map: &VariableMap,
    scenario: usize,
) -> Result<Vec<ConstraintId>, MilpError> {
    let ops = &map.scenarios[scenario];
    let pre = ops.prefix.as_str();
    let (Some(tech), Some(fs)) = (instance.ptg_technology.as_ref(), map.first_stage.as_ref()) else {
        return Ok(Vec::new());
    };
    let mut rows = Vec::new();
    for (c, cand) in instance.siting_candidates.iter().enumerate() {
        let j = instance.generator_index(&cand.plant).expect("validated");
        let (_, cap) = fs.modules_of(j).expect("candidate plant is a capture plant");
        let big_m = tech.methane_per_mw() * tech.per_module_output_max * cap as f64;
        for t in 1..=instance.horizon {
            rows.push(model.add_constraint(
                format!("{pre}site_gate[{},{},t{t}]", cand.gas_node, cand.plant),
                [(1.0, ops.injection[c][t - 1]), (-big_m, fs.siting[c])],
                Sense::Le,
                0.0,
            )?);
        }
    }
    for cc in &ops.ccpp {
        let plant = &instance.generators[cc.generator].id;
        for t in 1..=instance.horizon {
            let mut terms = vec![(1.0, cc.methane[t - 1])];
            for (c, cand) in instance.siting_candidates.iter().enumerate() {
                if &cand.plant == plant {
                    terms.push((-1.0, ops.injection[c][t - 1]));
                }
            }
            rows.push(model.add_constraint(format!("{pre}site_split[{plant},t{t}]"), terms, Sense::Eq, 0.0)?);
        }
    }
    Ok(rows)
}
