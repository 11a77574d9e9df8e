use super::VariableMap;
use crate::instance::{annualization_coefficient, PlanningInstance};
use crate::milp::LinExpr;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostGroup {
    InvestPtg,
    InvestSiting,
    OpeGs,
    OpeGen,
    OpePtg,
    Capture,
    Storage,
    Penalty,
    Revenue,
}

impl CostGroup {
    pub const ALL: [CostGroup; 9] = [
        CostGroup::InvestPtg,
        CostGroup::InvestSiting,
        CostGroup::OpeGs,
        CostGroup::OpeGen,
        CostGroup::OpePtg,
        CostGroup::Capture,
        CostGroup::Storage,
        CostGroup::Penalty,
        CostGroup::Revenue,
    ];

    pub fn is_investment(self) -> bool {
        matches!(self, CostGroup::InvestPtg | CostGroup::InvestSiting)
    }
}

/// Annual cost figures. `revenue` is income and is subtracted in `total`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub invest_ccus: f64,
    pub invest_siting: f64,
    pub ope_gs: f64,
    pub ope_gen: f64,
    pub ope_ptg: f64,
    pub capture: f64,
    pub storage: f64,
    pub penalty: f64,
    pub revenue: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn investment(&self) -> f64 {
        self.invest_ccus + self.invest_siting
    }

    pub fn operation(&self) -> f64 {
        self.total - self.investment()
    }

    /// Sum of the groups with revenue subtracted.
    pub fn recomputed_total(&self) -> f64 {
        self.invest_ccus + self.invest_siting + self.ope_gs + self.ope_gen + self.ope_ptg + self.capture
            + self.storage
            + self.penalty
            - self.revenue
    }

    /// `self·a + other·b`, group by group.
    pub fn combine(&self, a: f64, other: &CostBreakdown, b: f64) -> CostBreakdown {
        let mix = |x: f64, y: f64| a * x + b * y;
        CostBreakdown {
            invest_ccus: mix(self.invest_ccus, other.invest_ccus),
            invest_siting: mix(self.invest_siting, other.invest_siting),
            ope_gs: mix(self.ope_gs, other.ope_gs),
            ope_gen: mix(self.ope_gen, other.ope_gen),
            ope_ptg: mix(self.ope_ptg, other.ope_ptg),
            capture: mix(self.capture, other.capture),
            storage: mix(self.storage, other.storage),
            penalty: mix(self.penalty, other.penalty),
            revenue: mix(self.revenue, other.revenue),
            total: mix(self.total, other.total),
        }
    }

    fn slot(&mut self, group: CostGroup) -> &mut f64 {
        match group {
            CostGroup::InvestPtg => &mut self.invest_ccus,
            CostGroup::InvestSiting => &mut self.invest_siting,
            CostGroup::OpeGs => &mut self.ope_gs,
            CostGroup::OpeGen => &mut self.ope_gen,
            CostGroup::OpePtg => &mut self.ope_ptg,
            CostGroup::Capture => &mut self.capture,
            CostGroup::Storage => &mut self.storage,
            CostGroup::Penalty => &mut self.penalty,
            CostGroup::Revenue => &mut self.revenue,
        }
    }

    pub fn get(&self, group: CostGroup) -> f64 {
        match group {
            CostGroup::InvestPtg => self.invest_ccus,
            CostGroup::InvestSiting => self.invest_siting,
            CostGroup::OpeGs => self.ope_gs,
            CostGroup::OpeGen => self.ope_gen,
            CostGroup::OpePtg => self.ope_ptg,
            CostGroup::Capture => self.capture,
            CostGroup::Storage => self.storage,
            CostGroup::Penalty => self.penalty,
            CostGroup::Revenue => self.revenue,
        }
    }
}

/// Objective contributions by group. The revenue group already carries its
/// negative sign.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostTerms {
    pub groups: Vec<(CostGroup, LinExpr)>,
}

impl CostTerms {
    pub fn group(&self, group: CostGroup) -> Option<&LinExpr> {
        self.groups.iter().find(|(g, _)| *g == group).map(|(_, e)| e)
    }

    pub fn objective(&self) -> LinExpr {
        let mut out = LinExpr::new();
        for (_, e) in &self.groups {
            out.add_scaled(1.0, e);
        }
        out
    }

    pub fn extend(&mut self, other: CostTerms) {
        self.groups.extend(other.groups);
    }

    /// Evaluates every group at `values`, revenue reported as income.
    pub fn evaluate(&self, values: &[f64]) -> CostBreakdown {
        let mut out = CostBreakdown::default();
        for (g, e) in &self.groups {
            let v = e.eval(values);
            *out.slot(*g) += if *g == CostGroup::Revenue { -v } else { v };
        }
        out.total = out.recomputed_total();
        out
    }
}

/// Annualized PtG and siting investment.
pub fn investment_terms(instance: &PlanningInstance, map: &VariableMap) -> CostTerms {
    let mut terms = CostTerms::default();
    let (Some(fs), Some(tech)) = (map.first_stage.as_ref(), instance.ptg_technology.as_ref()) else {
        return terms;
    };
    let dr = instance.economics.discount_rate;
    let per_module =
        annualization_coefficient(dr, tech.lifetime) * tech.unit_invest_cost * tech.module_size;
    let mut ptg = LinExpr::new();
    for &(_, y) in &fs.modules {
        ptg.add(per_module, y);
    }
    let mut siting = LinExpr::new();
    for (cand, &s) in instance.siting_candidates.iter().zip(&fs.siting) {
        siting.add(annualization_coefficient(dr, cand.lifetime) * cand.invest_cost, s);
    }
    terms.groups.push((CostGroup::InvestPtg, ptg));
    terms.groups.push((CostGroup::InvestSiting, siting));
    terms
}

/// Annual operation cost groups of one scenario at the given tax and price.
pub fn operation_terms(
    instance: &PlanningInstance,
    map: &VariableMap,
    scenario: usize,
    tax: f64,
    price: f64,
) -> CostTerms {
    let ops = &map.scenarios[scenario];
    let econ = &instance.economics;
    let omega = econ.day_weight;
    let mut gs = LinExpr::new();
    for (src, hourly) in instance.gas_sources.iter().zip(&ops.gas.source) {
        for &p in hourly {
            gs.add(omega * src.unit_cost, p);
        }
    }
    let mut gen = LinExpr::new();
    let mut penalty = LinExpr::new();
    for (j, g) in instance.generators.iter().enumerate() {
        for t in 0..instance.horizon {
            gen.add(omega * g.unit_cost, ops.electric.output[j][t]);
            penalty.add(omega * tax, ops.electric.emission[j][t]);
        }
    }
    let mut ptg = LinExpr::new();
    let mut capture = LinExpr::new();
    let mut storage = LinExpr::new();
    let mut revenue = LinExpr::new();
    let op_cost = instance.ptg_technology.as_ref().map_or(0.0, |t| t.unit_op_cost);
    for cc in &ops.ccpp {
        for t in 0..instance.horizon {
            ptg.add(omega * op_cost, cc.ptg_power[t]);
            capture.add(omega * econ.capture_cost, cc.captured[t]);
            storage.add(omega * econ.storage_cost, cc.stored[t]);
            penalty.add(-omega * tax, cc.captured[t]);
            revenue.add(-omega * price, cc.stored[t]);
        }
    }
    CostTerms {
        groups: vec![
            (CostGroup::OpeGs, gs),
            (CostGroup::OpeGen, gen),
            (CostGroup::OpePtg, ptg),
            (CostGroup::Capture, capture),
            (CostGroup::Storage, storage),
            (CostGroup::Penalty, penalty),
            (CostGroup::Revenue, revenue),
        ],
    }
}

/// Investment plus one scenario's operation groups.
pub fn build_cost_terms(
    instance: &PlanningInstance,
    map: &VariableMap,
    scenario: usize,
    tax: f64,
    price: f64,
) -> CostTerms {
    let mut terms = investment_terms(instance, map);
    terms.extend(operation_terms(instance, map, scenario, tax, price));
    terms
}
