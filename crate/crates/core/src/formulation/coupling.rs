use super::VariableMap;
use crate::instance::PlanningInstance;
use crate::milp::{ConstraintId, MilpError, MilpModel, Sense};

/// Emission `Q^{EMI} = emi · P` of every generator, with or without CCUS.
pub fn build_emission_rows(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    map: &VariableMap,
    scenario: usize,
) -> Result<Vec<ConstraintId>, MilpError> {
    let ops = &map.scenarios[scenario];
    let el = &ops.electric;
    let mut rows = Vec::new();
    for (j, g) in instance.generators.iter().enumerate() {
        for t in 1..=instance.horizon {
            rows.push(model.add_constraint(
                format!("{}emission[{},t{t}]", ops.prefix, g.id),
                [(1.0, el.emission[j][t - 1]), (-g.emission_factor, el.output[j][t - 1])],
                Sense::Eq,
                0.0,
            )?);
        }
    }
    Ok(rows)
}

/// Power split, capture, carbon mass balance, methanation and PtG capacity
/// of every capture plant, plus the cap `Q^{CC} ≤ Q^{EMI}`.
pub fn build_coupling_block(
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
    let econ = &instance.economics;
    let co2 = tech.co2_per_mw();
    let methane = tech.methane_per_mw();
    let mut rows = Vec::new();
    for cc in &ops.ccpp {
        let j = cc.generator;
        let id = &instance.generators[j].id;
        let (y, _) = fs.modules_of(j).expect("capture plant has a module variable");
        for t in 1..=instance.horizon {
            let i = t - 1;
            let mut add = |name: &str, terms: Vec<(f64, _)>, sense, rhs| {
                model
                    .add_constraint(format!("{pre}{name}[{id},t{t}]"), terms, sense, rhs)
                    .map(|r| rows.push(r))
            };
            add(
                "split",
                vec![
                    (1.0, ops.electric.output[j][i]),
                    (-1.0, cc.net_output[i]),
                    (-1.0, cc.ptg_power[i]),
                    (-1.0, cc.capture_power[i]),
                ],
                Sense::Eq,
                0.0,
            )?;
            add(
                "capture",
                vec![(1.0, cc.captured[i]), (-1.0 / econ.capture_energy, cc.capture_power[i])],
                Sense::Eq,
                0.0,
            )?;
            add(
                "carbon_bal",
                vec![(1.0, cc.captured[i]), (-1.0, cc.stored[i]), (-1.0, cc.utilized[i])],
                Sense::Eq,
                0.0,
            )?;
            add(
                "utilize",
                vec![(1.0, cc.utilized[i]), (-co2, cc.ptg_power[i])],
                Sense::Eq,
                0.0,
            )?;
            add(
                "methanate",
                vec![(1.0, cc.methane[i]), (-methane, cc.ptg_power[i])],
                Sense::Eq,
                0.0,
            )?;
            add(
                "ptg_max",
                vec![(1.0, cc.ptg_power[i]), (-tech.per_module_output_max, y)],
                Sense::Le,
                0.0,
            )?;
            add(
                "ptg_min",
                vec![(1.0, cc.ptg_power[i]), (-tech.per_module_output_min, y)],
                Sense::Ge,
                0.0,
            )?;
            add(
                "capture_cap",
                vec![(1.0, cc.captured[i]), (-1.0, ops.electric.emission[j][i])],
                Sense::Le,
                0.0,
            )?;
        }
    }
    Ok(rows)
}
