use super::{InstanceError, PlanningInstance, TimeSeries};
use std::collections::HashSet;

type Result<T> = std::result::Result<T, InstanceError>;

fn check(cond: bool, path: impl FnOnce() -> String, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(InstanceError::invalid(path(), msg()))
    }
}

fn finite_nonneg(value: f64, path: &str) -> Result<()> {
    check(
        value.is_finite() && value >= 0.0,
        || path.to_string(),
        || format!("must be a finite non-negative number, got {value}"),
    )
}

fn finite_pos(value: f64, path: &str) -> Result<()> {
    check(
        value.is_finite() && value > 0.0,
        || path.to_string(),
        || format!("must be a finite positive number, got {value}"),
    )
}

// Ids end up inside variable names of the LP export, so they are kept to a
// conservative character set.
fn valid_id(id: &str, path: &str) -> Result<()> {
    check(
        !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
        || path.to_string(),
        || format!("id `{id}` must be non-empty and use only [A-Za-z0-9_]"),
    )
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>, section: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for (k, id) in ids.enumerate() {
        valid_id(id, &format!("{section}[{k}].id"))?;
        if !seen.insert(id) {
            return Err(InstanceError::invalid(
                format!("{section}[{k}].id"),
                format!("duplicate id `{id}`"),
            ));
        }
    }
    Ok(())
}

fn series(ts: &TimeSeries, horizon: usize, path: &str) -> Result<()> {
    check(
        ts.len() == horizon,
        || path.to_string(),
        || format!("series has {} values, horizon is {horizon}", ts.len()),
    )?;
    for (k, v) in ts.iter().enumerate() {
        finite_nonneg(v, &format!("{path}[{k}]"))?;
    }
    Ok(())
}

/// Checks every structural and numeric invariant of an instance.
pub fn validate(inst: &PlanningInstance) -> Result<()> {
    let t = inst.horizon;
    check(t >= 1, || "horizon".into(), || "horizon must be at least 1 hour".into())?;
    check(
        inst.pwl_segments >= 1,
        || "pwl_segments".into(),
        || "at least one segment is required".into(),
    )?;

    unique_ids(inst.gas_nodes.iter().map(|n| n.id.as_str()), "gas_nodes")?;
    unique_ids(inst.gas_pipelines.iter().map(|p| p.id.as_str()), "gas_pipelines")?;
    unique_ids(inst.gas_sources.iter().map(|s| s.id.as_str()), "gas_sources")?;
    unique_ids(inst.buses.iter().map(|b| b.id.as_str()), "buses")?;
    unique_ids(inst.lines.iter().map(|l| l.id.as_str()), "lines")?;
    unique_ids(inst.generators.iter().map(|g| g.id.as_str()), "generators")?;

    check(
        !inst.gas_nodes.is_empty(),
        || "gas_nodes".into(),
        || "at least one gas node is required".into(),
    )?;
    for (k, n) in inst.gas_nodes.iter().enumerate() {
        let p = format!("gas_nodes[{k}]");
        finite_nonneg(n.pressure_min, &format!("{p}.pressure_min"))?;
        finite_nonneg(n.pressure_max, &format!("{p}.pressure_max"))?;
        check(
            n.pressure_min <= n.pressure_max,
            || format!("{p}.pressure_min"),
            || {
                format!(
                    "node `{}`: pressure_min {} exceeds pressure_max {}",
                    n.id, n.pressure_min, n.pressure_max
                )
            },
        )?;
        series(&n.load, t, &format!("{p}.load"))?;
    }

    for (k, pipe) in inst.gas_pipelines.iter().enumerate() {
        let p = format!("gas_pipelines[{k}]");
        for (field, id) in [("from_node", &pipe.from_node), ("to_node", &pipe.to_node)] {
            check(
                inst.gas_node_index(id).is_some(),
                || format!("{p}.{field}"),
                || format!("pipeline `{}` references unknown gas node `{id}`", pipe.id),
            )?;
        }
        check(
            pipe.from_node != pipe.to_node,
            || format!("{p}.to_node"),
            || format!("pipeline `{}` starts and ends at the same node", pipe.id),
        )?;
        finite_pos(pipe.weymouth_coeff, &format!("{p}.weymouth_coeff"))?;
        check(
            pipe.flow_min.is_finite() && pipe.flow_max.is_finite() && pipe.flow_min < pipe.flow_max,
            || format!("{p}.flow_max"),
            || format!("pipeline `{}`: flow range must be finite and non-empty", pipe.id),
        )?;
        check(
            pipe.flow_min >= 0.0 || pipe.flow_max > 0.0,
            || format!("{p}.flow_max"),
            || format!("pipeline `{}`: a signed range must contain zero in its interior", pipe.id),
        )?;
    }

    for (k, s) in inst.gas_sources.iter().enumerate() {
        let p = format!("gas_sources[{k}]");
        check(
            inst.gas_node_index(&s.node).is_some(),
            || format!("{p}.node"),
            || format!("gas source `{}` references unknown gas node `{}`", s.id, s.node),
        )?;
        finite_nonneg(s.output_min, &format!("{p}.output_min"))?;
        finite_nonneg(s.output_max, &format!("{p}.output_max"))?;
        check(
            s.output_min <= s.output_max,
            || format!("{p}.output_min"),
            || format!("gas source `{}`: output_min exceeds output_max", s.id),
        )?;
        finite_nonneg(s.ramp_max, &format!("{p}.ramp_max"))?;
        finite_nonneg(s.unit_cost, &format!("{p}.unit_cost"))?;
    }

    check(
        inst.buses.iter().filter(|b| b.is_reference).count() == 1,
        || "buses".into(),
        || "exactly one bus must be the reference bus".into(),
    )?;
    for (k, b) in inst.buses.iter().enumerate() {
        series(&b.load, t, &format!("buses[{k}].load"))?;
    }

    for (k, l) in inst.lines.iter().enumerate() {
        let p = format!("lines[{k}]");
        for (field, id) in [("from_bus", &l.from_bus), ("to_bus", &l.to_bus)] {
            check(
                inst.bus_index(id).is_some(),
                || format!("{p}.{field}"),
                || format!("line `{}` references unknown bus `{id}`", l.id),
            )?;
        }
        check(
            l.from_bus != l.to_bus,
            || format!("{p}.to_bus"),
            || format!("line `{}` starts and ends at the same bus", l.id),
        )?;
        finite_pos(l.reactance, &format!("{p}.reactance"))?;
        finite_pos(l.capacity, &format!("{p}.capacity"))?;
    }

    for (k, g) in inst.generators.iter().enumerate() {
        let p = format!("generators[{k}]");
        check(
            inst.bus_index(&g.bus).is_some(),
            || format!("{p}.bus"),
            || format!("generator `{}` references unknown bus `{}`", g.id, g.bus),
        )?;
        finite_nonneg(g.output_min, &format!("{p}.output_min"))?;
        finite_nonneg(g.output_max, &format!("{p}.output_max"))?;
        check(
            g.output_min <= g.output_max,
            || format!("{p}.output_min"),
            || format!("generator `{}`: output_min exceeds output_max", g.id),
        )?;
        finite_nonneg(g.ramp_max, &format!("{p}.ramp_max"))?;
        check(
            g.min_up >= 1 && g.min_down >= 1,
            || format!("{p}.min_up"),
            || format!("generator `{}`: min_up and min_down must be at least 1", g.id),
        )?;
        finite_nonneg(g.unit_cost, &format!("{p}.unit_cost"))?;
        finite_nonneg(g.emission_factor, &format!("{p}.emission_factor"))?;
    }

    if let Some(tech) = &inst.ptg_technology {
        let p = "ptg_technology";
        finite_pos(tech.module_size, &format!("{p}.module_size"))?;
        finite_nonneg(tech.per_module_output_min, &format!("{p}.per_module_output_min"))?;
        finite_nonneg(tech.per_module_output_max, &format!("{p}.per_module_output_max"))?;
        check(
            tech.per_module_output_min <= tech.per_module_output_max,
            || format!("{p}.per_module_output_min"),
            || "per_module_output_min exceeds per_module_output_max".into(),
        )?;
        check(
            tech.conversion_efficiency > 0.0 && tech.conversion_efficiency <= 1.0,
            || format!("{p}.conversion_efficiency"),
            || format!("efficiency must lie in (0, 1], got {}", tech.conversion_efficiency),
        )?;
        finite_nonneg(tech.co2_per_mwh, &format!("{p}.co2_per_mwh"))?;
        finite_pos(tech.methane_calorific, &format!("{p}.methane_calorific"))?;
        finite_nonneg(tech.unit_invest_cost, &format!("{p}.unit_invest_cost"))?;
        finite_nonneg(tech.unit_op_cost, &format!("{p}.unit_op_cost"))?;
        check(
            tech.lifetime >= 1,
            || format!("{p}.lifetime"),
            || "lifetime must be at least one year".into(),
        )?;
    }

    let mut pairs = HashSet::new();
    for (k, c) in inst.siting_candidates.iter().enumerate() {
        let p = format!("siting_candidates[{k}]");
        check(
            inst.gas_node_index(&c.gas_node).is_some(),
            || format!("{p}.gas_node"),
            || format!("candidate references unknown gas node `{}`", c.gas_node),
        )?;
        let plant = inst.generator_index(&c.plant).ok_or_else(|| {
            InstanceError::invalid(
                format!("{p}.plant"),
                format!("candidate references unknown generator `{}`", c.plant),
            )
        })?;
        check(
            inst.generators[plant].ccpp_eligible,
            || format!("{p}.plant"),
            || format!("generator `{}` is not ccpp_eligible", c.plant),
        )?;
        check(
            pairs.insert((c.gas_node.as_str(), c.plant.as_str())),
            || p.clone(),
            || format!("duplicate candidate ({}, {})", c.gas_node, c.plant),
        )?;
        finite_nonneg(c.invest_cost, &format!("{p}.invest_cost"))?;
        check(
            c.lifetime >= 1,
            || format!("{p}.lifetime"),
            || "lifetime must be at least one year".into(),
        )?;
    }

    let e = &inst.economics;
    finite_pos(e.discount_rate, "economics.discount_rate")?;
    finite_nonneg(e.capture_cost, "economics.capture_cost")?;
    finite_nonneg(e.storage_cost, "economics.storage_cost")?;
    finite_nonneg(e.carbon_tax, "economics.carbon_tax")?;
    finite_nonneg(e.carbon_price, "economics.carbon_price")?;
    finite_pos(e.capture_energy, "economics.capture_energy")?;
    finite_pos(e.day_weight, "economics.day_weight")?;
    Ok(())
}
