use super::BuiltModel;
use crate::formulation::{CostBreakdown, OperationVars, VariableMap};
use crate::instance::PlanningInstance;
use crate::milp::MilpModel;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleDecision {
    pub plant: String,
    pub modules: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SitingDecision {
    pub gas_node: String,
    pub plant: String,
    pub selected: bool,
}

/// Investment decisions `y_j` and `s_{m,j}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FirstStage {
    pub modules: Vec<ModuleDecision>,
    pub siting: Vec<SitingDecision>,
}

impl FirstStage {
    /// No modules and no sites for every capture plant and candidate.
    pub fn nothing(instance: &PlanningInstance) -> Self {
        Self {
            modules: instance
                .ccpp_indices()
                .into_iter()
                .map(|j| ModuleDecision {
                    plant: instance.generators[j].id.clone(),
                    modules: 0,
                })
                .collect(),
            siting: instance
                .siting_candidates
                .iter()
                .map(|c| SitingDecision {
                    gas_node: c.gas_node.clone(),
                    plant: c.plant.clone(),
                    selected: false,
                })
                .collect(),
        }
    }

    pub fn modules_of(&self, plant: &str) -> u32 {
        self.modules
            .iter()
            .find(|m| m.plant == plant)
            .map_or(0, |m| m.modules)
    }

    pub fn y_sum(&self) -> u32 {
        self.modules.iter().map(|m| m.modules).sum()
    }
}

/// Carbon quantities in tons over the horizon. `emission` is what reaches
/// the atmosphere, i.e. generated minus captured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CarbonVolumes {
    pub emission: f64,
    pub capture: f64,
    pub storage: f64,
    pub utilization: f64,
}

impl CarbonVolumes {
    pub fn scaled_add(&mut self, w: f64, other: &CarbonVolumes) {
        self.emission += w * other.emission;
        self.capture += w * other.capture;
        self.storage += w * other.storage;
        self.utilization += w * other.utilization;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyCarbon {
    pub hour: usize,
    pub emission: f64,
    pub capture: f64,
    pub storage: f64,
    pub utilization: f64,
}

/// Operation outcome of one scenario (or box vertex).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub tax: f64,
    pub price: f64,
    pub probability: f64,
    /// Investment plus this scenario's operation.
    pub breakdown: CostBreakdown,
    pub carbon: CarbonVolumes,
    pub profile: Vec<HourlyCarbon>,
    /// Hourly values keyed by symbol and element, e.g. `P[g1]`.
    pub schedule: BTreeMap<String, Vec<f64>>,
}

pub(crate) fn first_stage(instance: &PlanningInstance, map: &VariableMap, values: &[f64]) -> FirstStage {
    let Some(fs) = &map.first_stage else {
        return FirstStage::nothing(instance);
    };
    FirstStage {
        modules: fs
            .modules
            .iter()
            .map(|&(j, y)| ModuleDecision {
                plant: instance.generators[j].id.clone(),
                modules: values[y.index()].round().max(0.0) as u32,
            })
            .collect(),
        siting: instance
            .siting_candidates
            .iter()
            .zip(&fs.siting)
            .map(|(c, s)| SitingDecision {
                gas_node: c.gas_node.clone(),
                plant: c.plant.clone(),
                selected: values[s.index()] > 0.5,
            })
            .collect(),
    }
}

/// Drops the scenario prefix and the hour index from a variable name.
fn series_key(name: &str, prefix: &str) -> Option<String> {
    let name = name.strip_prefix(prefix)?;
    let open = name.find('[')?;
    let inner = name[open + 1..].strip_suffix(']')?;
    let is_hour = |part: &str| part.len() > 1 && part.starts_with('t') && part[1..].bytes().all(|b| b.is_ascii_digit());
    let mut kept: Vec<&str> = inner.split(',').collect();
    let hour = kept.iter().rposition(|p| is_hour(p))?;
    kept.remove(hour);
    Some(format!("{}[{}]", &name[..open], kept.join(",")))
}

fn schedule(model: &MilpModel, ops: &OperationVars, values: &[f64]) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for v in ops.handles() {
        if let Some(key) = series_key(&model.variable(v).name, &ops.prefix) {
            out.entry(key).or_default().push(values[v.index()]);
        }
    }
    out
}

pub(crate) fn carbon_profile(instance: &PlanningInstance, ops: &OperationVars, values: &[f64]) -> Vec<HourlyCarbon> {
    let val = |v: crate::milp::VarId| values[v.index()];
    (1..=instance.horizon)
        .map(|t| {
            let i = t - 1;
            let generated: f64 = ops.electric.emission.iter().map(|h| val(h[i])).sum();
            let capture: f64 = ops.ccpp.iter().map(|c| val(c.captured[i])).sum();
            HourlyCarbon {
                hour: t,
                emission: generated - capture,
                capture,
                storage: ops.ccpp.iter().map(|c| val(c.stored[i])).sum(),
                utilization: ops.ccpp.iter().map(|c| val(c.utilized[i])).sum(),
            }
        })
        .collect()
}

pub(crate) fn volumes(profile: &[HourlyCarbon]) -> CarbonVolumes {
    profile.iter().fold(CarbonVolumes::default(), |mut acc, h| {
        acc.emission += h.emission;
        acc.capture += h.capture;
        acc.storage += h.storage;
        acc.utilization += h.utilization;
        acc
    })
}

pub(crate) fn scenario_outcome(
    instance: &PlanningInstance,
    built: &BuiltModel,
    k: usize,
    values: &[f64],
) -> ScenarioOutcome {
    let ops = &built.formulation.map.scenarios[k];
    let invest = built.investment.evaluate(values);
    let op = built.operation[k].evaluate(values);
    let mut breakdown = invest.combine(1.0, &op, 1.0);
    breakdown.total = breakdown.recomputed_total();
    let profile = carbon_profile(instance, ops, values);
    let s = built.scenarios[k];
    ScenarioOutcome {
        tax: s.tax,
        price: s.price,
        probability: s.probability,
        breakdown,
        carbon: volumes(&profile),
        profile,
        schedule: schedule(built.model(), ops, values),
    }
}
