use super::pwl::signed_square;
use super::VariableMap;
use crate::instance::{incidence, PlanningInstance};
use crate::milp::{ConstraintId, MilpError, MilpModel, Sense};

/// Weymouth linearization, source ramps and nodal gas balance for one scenario.
///
/// Pressure and source output limits are carried as variable bounds. The
/// balance includes methane injected at siting candidates when the scenario
/// has CCUS variables.
pub fn build_gas_block(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    map: &VariableMap,
    scenario: usize,
) -> Result<Vec<ConstraintId>, MilpError> {
    let ops = &map.scenarios[scenario];
    let pre = ops.prefix.as_str();
    let gas = &ops.gas;
    let mut rows = Vec::new();

    for (p, pipe) in instance.gas_pipelines.iter().enumerate() {
        let bp = &map.breakpoints[p];
        let a = instance.gas_node_index(&pipe.from_node).expect("validated");
        let b = instance.gas_node_index(&pipe.to_node).expect("validated");
        let w2 = pipe.weymouth_coeff.powi(2);
        for t in 1..=instance.horizon {
            let delta = &gas.fill[p][t - 1];
            let phi = &gas.open[p][t - 1];
            for k in 0..phi.len() {
                let tag = format!("{},t{t},k{}", pipe.id, k + 1);
                rows.push(model.add_constraint(
                    format!("{pre}fill_lo[{tag}]"),
                    [(1.0, phi[k]), (-1.0, delta[k])],
                    Sense::Le,
                    0.0,
                )?);
                rows.push(model.add_constraint(
                    format!("{pre}fill_hi[{tag}]"),
                    [(1.0, delta[k + 1]), (-1.0, phi[k])],
                    Sense::Le,
                    0.0,
                )?);
            }
            let mut terms = vec![(1.0, gas.flow[p][t - 1])];
            terms.extend(delta.iter().enumerate().map(|(k, &d)| (-bp.width(k), d)));
            rows.push(model.add_constraint(
                format!("{pre}flow[{},t{t}]", pipe.id),
                terms,
                Sense::Eq,
                bp.points[0],
            )?);
            let mut terms = vec![
                (w2, gas.pressure_sq[a][t - 1]),
                (-w2, gas.pressure_sq[b][t - 1]),
            ];
            terms.extend(
                delta
                    .iter()
                    .enumerate()
                    .map(|(k, &d)| (-(bp.images[k + 1] - bp.images[k]), d)),
            );
            rows.push(model.add_constraint(
                format!("{pre}weymouth[{},t{t}]", pipe.id),
                terms,
                Sense::Eq,
                signed_square(bp.points[0]),
            )?);
        }
    }

    for (i, src) in instance.gas_sources.iter().enumerate() {
        for t in 2..=instance.horizon {
            let (now, prev) = (gas.source[i][t - 1], gas.source[i][t - 2]);
            rows.push(model.add_constraint(
                format!("{pre}gs_ramp_up[{},t{t}]", src.id),
                [(1.0, now), (-1.0, prev)],
                Sense::Le,
                src.ramp_max,
            )?);
            rows.push(model.add_constraint(
                format!("{pre}gs_ramp_dn[{},t{t}]", src.id),
                [(1.0, prev), (-1.0, now)],
                Sense::Le,
                src.ramp_max,
            )?);
        }
    }

    let inc = incidence(instance);
    for (m, node) in instance.gas_nodes.iter().enumerate() {
        for t in 1..=instance.horizon {
            let mut terms: Vec<_> = inc
                .a
                .row(m).into_iter()
                .map(|(i, _)| (1.0, gas.source[i][t - 1]))
                .collect();
            // Flow leaves its start node and enters its end node.
            terms.extend(inc.b.row(m).into_iter().map(|(p, sign)| (-f64::from(sign), gas.flow[p][t - 1])));
            for (c, cand) in instance.siting_candidates.iter().enumerate() {
                if cand.gas_node == node.id && ops.has_ccus() {
                    terms.push((1.0, ops.injection[c][t - 1]));
                }
            }
            rows.push(model.add_constraint(
                format!("{pre}gas_bal[{},t{t}]", node.id),
                terms,
                Sense::Eq,
                node.load.at(t),
            )?);
        }
    }
    Ok(rows)
}
