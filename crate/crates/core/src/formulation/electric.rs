use super::VariableMap;
use crate::instance::{incidence, PlanningInstance};
use crate::milp::{ConstraintId, MilpError, MilpModel, Sense};

/// DC power flow, generator limits, unit commitment and nodal balance.
///
/// Units start cold (`u_0 = 0`), so the first hour carries
/// `u_1 = v_1 − w_1`. In CCUS scenarios capture plants feed the grid with
/// their net output.
pub fn build_electric_block(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    map: &VariableMap,
    scenario: usize,
) -> Result<Vec<ConstraintId>, MilpError> {
    let ops = &map.scenarios[scenario];
    let pre = ops.prefix.as_str();
    let el = &ops.electric;
    let horizon = instance.horizon;
    let mut rows = Vec::new();

    let r = instance.reference_bus();
    for t in 1..=horizon {
        rows.push(model.add_constraint(
            format!("{pre}ref[{},t{t}]", instance.buses[r].id),
            [(1.0, el.angle[r][t - 1])],
            Sense::Eq,
            0.0,
        )?);
    }

    for (l, line) in instance.lines.iter().enumerate() {
        let a = instance.bus_index(&line.from_bus).expect("validated");
        let b = instance.bus_index(&line.to_bus).expect("validated");
        let s = 1.0 / line.reactance;
        for t in 1..=horizon {
            rows.push(model.add_constraint(
                format!("{pre}dcflow[{},t{t}]", line.id),
                [
                    (1.0, el.line_flow[l][t - 1]),
                    (-s, el.angle[a][t - 1]),
                    (s, el.angle[b][t - 1]),
                ],
                Sense::Eq,
                0.0,
            )?);
        }
    }

    for (j, g) in instance.generators.iter().enumerate() {
        let (p, u, v, w) = (&el.output[j], &el.on[j], &el.startup[j], &el.shutdown[j]);
        let id = &g.id;
        for t in 1..=horizon {
            let i = t - 1;
            rows.push(model.add_constraint(
                format!("{pre}pmax[{id},t{t}]"),
                [(1.0, p[i]), (-g.output_max, u[i])],
                Sense::Le,
                0.0,
            )?);
            rows.push(model.add_constraint(
                format!("{pre}pmin[{id},t{t}]"),
                [(1.0, p[i]), (-g.output_min, u[i])],
                Sense::Ge,
                0.0,
            )?);
            if t >= 2 {
                rows.push(model.add_constraint(
                    format!("{pre}ramp_up[{id},t{t}]"),
                    [(1.0, p[i]), (-1.0, p[i - 1])],
                    Sense::Le,
                    g.ramp_max,
                )?);
                rows.push(model.add_constraint(
                    format!("{pre}ramp_dn[{id},t{t}]"),
                    [(1.0, p[i - 1]), (-1.0, p[i])],
                    Sense::Le,
                    g.ramp_max,
                )?);
            }
            let on_min = g.min_up as usize;
            if t >= on_min {
                let mut terms: Vec<_> = (t + 1 - on_min..=t).map(|s| (1.0, v[s - 1])).collect();
                terms.push((-1.0, u[i]));
                rows.push(model.add_constraint(format!("{pre}minup[{id},t{t}]"), terms, Sense::Le, 0.0)?);
            }
            let off_min = g.min_down as usize;
            if t >= off_min {
                let mut terms: Vec<_> = (t + 1 - off_min..=t).map(|s| (1.0, w[s - 1])).collect();
                terms.push((1.0, u[i]));
                rows.push(model.add_constraint(format!("{pre}mindn[{id},t{t}]"), terms, Sense::Le, 1.0)?);
            }
            let mut logic = vec![(1.0, u[i]), (-1.0, v[i]), (1.0, w[i])];
            if t >= 2 {
                logic.push((-1.0, u[i - 1]));
            }
            rows.push(model.add_constraint(format!("{pre}commit[{id},t{t}]"), logic, Sense::Eq, 0.0)?);
            rows.push(model.add_constraint(
                format!("{pre}switch[{id},t{t}]"),
                [(1.0, v[i]), (1.0, w[i])],
                Sense::Le,
                1.0,
            )?);
        }
    }

    let inc = incidence(instance);
    for (n, bus) in instance.buses.iter().enumerate() {
        for t in 1..=horizon {
            let mut terms: Vec<_> = inc
                .c
                .row(n)
                .into_iter()
                .map(|(j, _)| match ops.ccpp_for(j) {
                    Some(cc) => (1.0, cc.net_output[t - 1]),
                    None => (1.0, el.output[j][t - 1]),
                })
                .collect();
            terms.extend(
                inc.d
                    .row(n)
                    .into_iter()
                    .map(|(l, sign)| (-f64::from(sign), el.line_flow[l][t - 1])),
            );
            rows.push(model.add_constraint(
                format!("{pre}ele_bal[{},t{t}]", bus.id),
                terms,
                Sense::Eq,
                bus.load.at(t),
            )?);
        }
    }

    Ok(rows)
}
