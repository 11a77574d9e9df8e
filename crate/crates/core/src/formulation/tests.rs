use super::*;
use crate::instance::{builtin_instance, PlanningInstance};
use crate::milp::{LinExpr, Sense, FEAS_TOL};
use approx::assert_relative_eq;
use proptest::prelude::*;
use std::collections::HashSet;

fn shortened(name: &str, horizon: usize) -> PlanningInstance {
    let mut inst = builtin_instance(name).unwrap();
    inst.horizon = horizon;
    for n in &mut inst.gas_nodes {
        n.load.0.truncate(horizon);
    }
    for b in &mut inst.buses {
        b.load.0.truncate(horizon);
    }
    inst
}

fn rows_named<'a>(f: &'a Formulation, prefix: &'a str) -> impl Iterator<Item = &'a crate::milp::LinearConstraint> {
    f.model.constraints().iter().filter(move |c| c.name.starts_with(prefix))
}

/// Closed-form variable and row counts of a single-scenario model.
fn expected_counts(inst: &PlanningInstance, map: &VariableMap, ccus: bool) -> (usize, usize) {
    let t = inst.horizon;
    let ks: Vec<usize> = map.breakpoints.iter().map(|b| b.segments()).collect();
    let (ns, np, nn) = (inst.gas_sources.len(), inst.gas_pipelines.len(), inst.gas_nodes.len());
    let (nb, nl, ng) = (inst.buses.len(), inst.lines.len(), inst.generators.len());
    let nccpp = if ccus { inst.ccpp_indices().len() } else { 0 };
    let ncand = if ccus { inst.siting_candidates.len() } else { 0 };
    let mut vars = t * (ns + np + nn + nb + nl + 5 * ng) + t * ks.iter().map(|k| 2 * k - 1).sum::<usize>();
    vars += nccpp + ncand + t * (7 * nccpp + ncand);
    let mut rows = t * ks.iter().map(|k| 2 * k).sum::<usize>() + 2 * (t - 1) * ns + t * nn;
    rows += t + t * nl + t * nb + t * ng;
    for g in &inst.generators {
        let runs = |m: u32| (t + 1).saturating_sub(m as usize);
        rows += 2 * t + 2 * (t - 1) + runs(g.min_up) + runs(g.min_down) + 2 * t;
    }
    rows += 8 * t * nccpp + t * ncand + t * nccpp;
    if ccus {
        rows += inst
            .ccpp_indices()
            .iter()
            .filter(|&&j| inst.siting_candidates.iter().any(|c| c.plant == inst.generators[j].id))
            .count();
    }
    (vars, rows)
}

#[test]
fn gas_counts_for_one_pipeline_one_hour() {
    let mut inst = shortened("toy3", 1);
    inst.gas_pipelines.truncate(1);
    for k in 1..6 {
        inst.pwl_segments = k;
        inst.gas_pipelines[0].flow_min = 0.0;
        let f = formulate(&inst, FormulationSpec::single(false), "t").unwrap();
        let ops = &f.map.scenarios[0];
        assert_eq!(ops.gas.fill[0][0].len(), k);
        assert_eq!(ops.gas.open[0][0].len(), k - 1);
        assert_eq!(rows_named(&f, "fill_").count(), 2 * (k - 1));
        assert_eq!(rows_named(&f, "flow[").count(), 1);
        assert_eq!(rows_named(&f, "weymouth[").count(), 1);
    }
}

#[test]
fn builtin_counts_match_closed_form() {
    for name in crate::instance::BUILTIN_NAMES {
        for ccus in [false, true] {
            let inst = builtin_instance(name).unwrap();
            let f = formulate(&inst, FormulationSpec::single(ccus), name).unwrap();
            let ccus = ccus && inst.ptg_technology.is_some();
            assert_eq!(
                (f.model.num_vars(), f.model.num_constraints()),
                expected_counts(&inst, &f.map, ccus),
                "{name} ccus={ccus}"
            );
        }
    }
}

#[test]
fn min_up_rows_follow_index_range() {
    let mut inst = builtin_instance("toy3").unwrap();
    inst.generators[0].min_up = 3;
    let f = formulate(&inst, FormulationSpec::single(false), "t").unwrap();
    let id = &inst.generators[0].id;
    assert_eq!(rows_named(&f, &format!("minup[{id},")).count(), 22);
}

/// Violations among the commitment rows of generator 0, with only u/v/w set.
fn uc_violations(inst: &PlanningInstance, u: &[f64], v: &[f64], w: &[f64]) -> Vec<String> {
    let f = formulate(inst, FormulationSpec::single(false), "t").unwrap();
    let el = &f.map.scenarios[0].electric;
    let mut x = vec![0.0; f.model.num_vars()];
    for t in 0..inst.horizon {
        x[el.on[0][t].index()] = u[t];
        x[el.startup[0][t].index()] = v[t];
        x[el.shutdown[0][t].index()] = w[t];
    }
    let id = &inst.generators[0].id;
    f.model
        .violations(&x, FEAS_TOL)
        .into_iter()
        .map(|v| v.what)
        .filter(|what| {
            ["commit", "switch", "minup", "mindn"]
                .iter()
                .any(|r| what.starts_with(&format!("row {r}[{id},")))
        })
        .collect()
}

#[test]
fn startup_in_second_hour_is_consistent() {
    let mut inst = shortened("toy3", 3);
    inst.generators[0].min_up = 1;
    inst.generators[0].min_down = 1;
    assert!(uc_violations(&inst, &[0.0, 1.0, 1.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]).is_empty());
}

#[test]
fn one_hour_off_breaks_min_down_three() {
    let mut inst = shortened("toy3", 3);
    inst.generators[0].min_up = 1;
    inst.generators[0].min_down = 3;
    let bad = uc_violations(&inst, &[1.0, 0.0, 1.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]);
    assert!(bad.iter().any(|w| w.contains("mindn")), "{bad:?}");
}

fn coefficient(f: &Formulation, row: &str, var: crate::milp::VarId) -> f64 {
    let c = f.model.constraints().iter().find(|c| c.name == row).unwrap();
    c.terms.iter().find(|(_, v)| *v == var).map_or(0.0, |(a, _)| *a)
}

#[test]
fn coupling_coefficients() {
    let inst = builtin_instance("toy3-ccus").unwrap();
    let f = formulate(&inst, FormulationSpec::single(true), "t").unwrap();
    let cc = &f.map.scenarios[0].ccpp[0];
    let id = &inst.generators[cc.generator].id;
    // 10 MW of PtG for one hour consumes 1.2 t of CO2 and yields 6e-4 Mm³.
    let cu = -coefficient(&f, &format!("utilize[{id},t1]"), cc.ptg_power[0]);
    assert_relative_eq!(cu * 10.0, 1.2, max_relative = 1e-12);
    let ch4 = -coefficient(&f, &format!("methanate[{id},t1]"), cc.ptg_power[0]);
    assert_relative_eq!(ch4 * 10.0, 6e-4, max_relative = 1e-12);
    // 26.9 MWh of capture energy captures 100 t.
    let cc_per_mwh = -coefficient(&f, &format!("capture[{id},t1]"), cc.capture_power[0]);
    assert_relative_eq!(cc_per_mwh * 26.9, 100.0, max_relative = 1e-12);
    let cap = f.model.constraints().iter().filter(|c| c.name.starts_with("capture_cap[")).count();
    assert_eq!(cap, inst.horizon);
}

#[test]
fn siting_counts() {
    let inst = builtin_instance("toy3-ccus").unwrap();
    assert_eq!(inst.siting_candidates.len(), 2);
    assert_eq!(inst.ccpp_indices().len(), 1);
    let f = formulate(&inst, FormulationSpec::single(true), "t").unwrap();
    assert_eq!(rows_named(&f, "site_gate[").count(), 48);
    assert_eq!(rows_named(&f, "site_split[").count(), 24);
    assert_eq!(rows_named(&f, "site_link[").count(), 1);
    let link = rows_named(&f, "site_link[").next().unwrap();
    let y = f.map.first_stage.as_ref().unwrap().modules[0].1;
    assert!(link.terms.contains(&(-(inst.gas_nodes.len() as f64), y)));
    assert_eq!(link.sense, Sense::Le);
}

#[test]
fn handles_are_total_and_unique() {
    for name in crate::instance::BUILTIN_NAMES {
        let inst = builtin_instance(name).unwrap();
        let spec = FormulationSpec {
            ccus: true,
            scenarios: 3,
            module_cap: None,
        };
        let f = formulate(&inst, spec, name).unwrap();
        let all = f.map.all_handles();
        let unique: HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), all.len());
        assert_eq!(all.len(), f.model.num_vars());
    }
}

fn point_with(f: &Formulation, set: &[(crate::milp::VarId, f64)]) -> Vec<f64> {
    let mut x = vec![0.0; f.model.num_vars()];
    for &(v, val) in set {
        x[v.index()] = val;
    }
    x
}

#[test]
fn penalty_and_revenue_arithmetic() {
    let mut inst = builtin_instance("toy3-ccus").unwrap();
    inst.economics.day_weight = 1.0;
    let f = formulate(&inst, FormulationSpec::single(true), "t").unwrap();
    let ops = &f.map.scenarios[0];
    let terms = build_cost_terms(&inst, &f.map, 0, 50.0, 40.0);
    let x = point_with(&f, &[(ops.electric.emission[0][0], 6.0), (ops.electric.emission[1][3], 4.0)]);
    let b = terms.evaluate(&x);
    assert_relative_eq!(b.penalty, 500.0);
    let cc = &ops.ccpp[0];
    let x = point_with(&f, &[(cc.stored[0], 1.5), (cc.stored[5], 0.5)]);
    let revenue = terms.group(CostGroup::Revenue).unwrap();
    assert_relative_eq!(revenue.eval(&x), -80.0);
    assert_relative_eq!(terms.evaluate(&x).revenue, 80.0);
    let zero = terms.evaluate(&vec![0.0; f.model.num_vars()]);
    assert_eq!(zero.investment(), 0.0);
    assert_eq!(zero.total, 0.0);
}

#[test]
fn objective_equals_breakdown_total() {
    let inst = builtin_instance("toy3-ccus").unwrap();
    let f = formulate(&inst, FormulationSpec::single(true), "t").unwrap();
    let terms = build_cost_terms(&inst, &f.map, 0, 50.0, 40.0);
    let x: Vec<f64> = (0..f.model.num_vars()).map(|i| (i % 7) as f64 * 0.5).collect();
    let obj: LinExpr = terms.objective();
    assert_relative_eq!(obj.eval(&x), terms.evaluate(&x).total, max_relative = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn counts_match_on_random_variants(
        which in 0usize..3,
        horizon in 1usize..7,
        seg in 1usize..5,
        up in 1u32..5,
        down in 1u32..5,
        unidirectional in any::<bool>(),
        ccus in any::<bool>(),
    ) {
        let name = crate::instance::BUILTIN_NAMES[which];
        let mut inst = shortened(name, horizon);
        inst.pwl_segments = seg;
        for g in &mut inst.generators {
            g.min_up = up;
            g.min_down = down;
        }
        if unidirectional {
            inst.gas_pipelines[0].flow_min = 0.0;
        }
        let f = formulate(&inst, FormulationSpec::single(ccus), "p").unwrap();
        let ccus = ccus && inst.ptg_technology.is_some();
        prop_assert_eq!(
            (f.model.num_vars(), f.model.num_constraints()),
            expected_counts(&inst, &f.map, ccus)
        );
    }
}
