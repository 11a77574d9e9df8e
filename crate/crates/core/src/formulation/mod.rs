//! Translation of a [`PlanningInstance`] into MILP blocks.
//!
//! Variables are declared first ([`declare_first_stage`],
//! [`declare_operation`]) and recorded in a [`VariableMap`]; each block
//! builder then emits its rows for one scenario of that map.

mod costs;
mod coupling;
mod electric;
mod gas;
pub mod pwl;
mod siting;
mod vars;

pub use costs::{build_cost_terms, investment_terms, operation_terms, CostBreakdown, CostGroup, CostTerms};
pub use coupling::{build_coupling_block, build_emission_rows};
pub use electric::build_electric_block;
pub use gas::build_gas_block;
pub use pwl::{compute_breakpoints, PwlBreakpoints};
pub use siting::{build_siting_block, build_siting_link};
pub use vars::{
    declare_first_stage, declare_operation, default_module_cap, CcppVars, ElectricVars, FirstStageVars,
    GasVars, Hourly, OperationVars, VariableMap,
};

use crate::instance::PlanningInstance;
use crate::milp::{MilpError, MilpModel};

/// A model together with the map of its variables.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub model: MilpModel,
    pub map: VariableMap,
}

/// Shape of the model to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulationSpec {
    /// Include investment, coupling and siting blocks.
    pub ccus: bool,
    /// Number of operation copies sharing the first stage.
    pub scenarios: usize,
    /// Uniform override for `y_j`'s upper bound.
    pub module_cap: Option<u32>,
}

impl FormulationSpec {
    pub fn single(ccus: bool) -> Self {
        Self {
            ccus,
            scenarios: 1,
            module_cap: None,
        }
    }
}

/// Name prefix of scenario `k` (0-based) in a model with `count` scenarios.
pub fn scenario_prefix(k: usize, count: usize) -> String {
    if count == 1 {
        String::new()
    } else {
        format!("sc{}.", k + 1)
    }
}

/// Declares all variables and emits all constraint blocks. The objective is
/// left to the caller.
pub fn formulate(
    instance: &PlanningInstance,
    spec: FormulationSpec,
    name: &str,
) -> Result<Formulation, MilpError> {
    let mut model = MilpModel::new(name);
    let mut map = VariableMap::new(instance);
    let ccus = spec.ccus && instance.ptg_technology.is_some();
    if ccus {
        map.first_stage = Some(declare_first_stage(&mut model, instance, spec.module_cap)?);
    }
    for k in 0..spec.scenarios.max(1) {
        let prefix = scenario_prefix(k, spec.scenarios.max(1));
        let ops = declare_operation(&mut model, instance, &map, &prefix, map.first_stage.as_ref())?;
        map.scenarios.push(ops);
    }
    build_siting_link(&mut model, instance, &map)?;
    for k in 0..map.scenarios.len() {
        build_gas_block(&mut model, instance, &map, k)?;
        build_electric_block(&mut model, instance, &map, k)?;
        build_emission_rows(&mut model, instance, &map, k)?;
        build_coupling_block(&mut model, instance, &map, k)?;
        build_siting_block(&mut model, instance, &map, k)?;
    }
    Ok(Formulation { model, map })
}

#[cfg(test)]
mod tests;
