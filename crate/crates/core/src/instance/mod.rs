//! Problem-instance data model: gas network, electric network, retrofit
//! candidates and economics for one representative day.
//!
//! Instances are validated on construction and immutable afterwards. The
//! node/element incidence structure is derived from the id references in
//! [`incidence`], never stored.

mod builtin;
mod incidence;
mod io;
mod validate;

pub use builtin::{builtin_instance, BUILTIN_NAMES};
pub use incidence::{incidence, Incidence, SparseIncidence};
pub use io::{load_instance, parse_instance, to_json};
pub use validate::validate;

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

/// Errors raised while loading or validating an instance.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read instance file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed instance document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("unknown builtin instance `{0}` (known: toy3, toy3-ccus, mesh6)")]
    UnknownBuiltin(String),
}

impl InstanceError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Hourly values over the planning horizon. Hours are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeSeries(pub Vec<f64>);

impl TimeSeries {
    /// Value in hour `hour` (1-based).
    pub fn at(&self, hour: usize) -> f64 {
        self.0[hour - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub name: String,
    #[serde(default)]
    pub version: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasNode {
    pub id: String,
    /// bar
    pub pressure_min: f64,
    /// bar
    pub pressure_max: f64,
    /// Mm³/h
    pub load: TimeSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasPipeline {
    pub id: String,
    pub from_node: String,
    pub to_node: String,
    /// Mm³/(h·bar)
    pub weymouth_coeff: f64,
    /// Signed flow bounds in Mm³/h; positive flow runs from `from_node` to `to_node`.
    pub flow_min: f64,
    pub flow_max: f64,
}

impl GasPipeline {
    pub fn is_bidirectional(&self) -> bool {
        self.flow_min < 0.0 && self.flow_max > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSource {
    pub id: String,
    pub node: String,
    /// Mm³/h
    pub output_min: f64,
    pub output_max: f64,
    /// Mm³/h per hour
    pub ramp_max: f64,
    /// $/Mm³
    pub unit_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectricBus {
    pub id: String,
    /// MW
    pub load: TimeSeries,
    #[serde(default)]
    pub is_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionLine {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Ω
    pub reactance: f64,
    /// MW
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    /// MW
    pub output_min: f64,
    pub output_max: f64,
    /// MW/h
    pub ramp_max: f64,
    /// hours
    pub min_up: u32,
    pub min_down: u32,
    /// $/MWh
    pub unit_cost: f64,
    /// ton CO₂/MWh of gross output
    pub emission_factor: f64,
    #[serde(default)]
    pub ccpp_eligible: bool,
}

/// Power-to-gas module technology shared by every retrofit site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtgTechnology {
    /// MW per module
    pub module_size: f64,
    /// MW per installed module
    pub per_module_output_min: f64,
    pub per_module_output_max: f64,
    pub conversion_efficiency: f64,
    /// ton CO₂ consumed per MWh of PtG input
    pub co2_per_mwh: f64,
    /// MJ/m³
    pub methane_calorific: f64,
    /// $/MW
    pub unit_invest_cost: f64,
    /// $/MWh
    pub unit_op_cost: f64,
    /// years
    pub lifetime: u32,
}

impl PtgTechnology {
    /// Methane output in Mm³/h per MW of PtG electric input:
    /// η · 3600 MJ/MWh / H (MJ/m³) · 10⁻⁶ Mm³/m³.
    pub fn methane_per_mw(&self) -> f64 {
        self.conversion_efficiency * 3600.0 / self.methane_calorific * 1e-6
    }

    /// CO₂ consumed per MW of PtG input over one hour (ton).
    pub fn co2_per_mw(&self) -> f64 {
        self.co2_per_mwh * self.conversion_efficiency
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitingCandidate {
    pub gas_node: String,
    /// Id of a ccpp-eligible generator.
    pub plant: String,
    /// $
    pub invest_cost: f64,
    /// years
    pub lifetime: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicParams {
    pub discount_rate: f64,
    /// $/ton
    pub capture_cost: f64,
    /// $/ton
    pub storage_cost: f64,
    /// $/ton, default when a mode does not override it
    pub carbon_tax: f64,
    /// $/ton, default when a mode does not override it
    pub carbon_price: f64,
    /// MWh/ton
    pub capture_energy: f64,
    /// Representative days per year.
    #[serde(default = "default_day_weight")]
    pub day_weight: f64,
}

fn default_day_weight() -> f64 {
    365.0
}

/// A complete, validated planning instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningInstance {
    pub meta: Meta,
    pub gas_nodes: Vec<GasNode>,
    pub gas_pipelines: Vec<GasPipeline>,
    pub gas_sources: Vec<GasSource>,
    pub buses: Vec<ElectricBus>,
    pub lines: Vec<TransmissionLine>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub ptg_technology: Option<PtgTechnology>,
    #[serde(default)]
    pub siting_candidates: Vec<SitingCandidate>,
    pub economics: EconomicParams,
    /// hours
    pub horizon: usize,
    pub pwl_segments: usize,
}

impl PlanningInstance {
    /// 1..=T
    pub fn hours(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.horizon
    }

    pub fn gas_node_index(&self, id: &str) -> Option<usize> {
        self.gas_nodes.iter().position(|n| n.id == id)
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn reference_bus(&self) -> usize {
        self.buses
            .iter()
            .position(|b| b.is_reference)
            .expect("validated instance has a reference bus")
    }

    /// Indices of generators that may be retrofitted.
    pub fn ccpp_indices(&self) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.ccpp_eligible)
            .map(|(j, _)| j)
            .collect()
    }

    /// Siting candidates as (gas node index, generator index) pairs, in file order.
    pub fn candidate_pairs(&self) -> Vec<(usize, usize)> {
        self.siting_candidates
            .iter()
            .map(|c| {
                (
                    self.gas_node_index(&c.gas_node).expect("validated"),
                    self.generator_index(&c.plant).expect("validated"),
                )
            })
            .collect()
    }

    /// Returns a copy with a different operation-to-annual scaling.
    pub fn with_day_weight(&self, day_weight: f64) -> Result<Self, InstanceError> {
        let mut inst = self.clone();
        inst.economics.day_weight = day_weight;
        validate(&inst)?;
        Ok(inst)
    }
}

/// Annuity factor `dr(1+dr)^L / ((1+dr)^L − 1)`; `1/L` at a zero rate.
pub fn annualization_coefficient(discount_rate: f64, lifetime: u32) -> f64 {
    assert!(lifetime >= 1, "lifetime must be at least one year");
    let l = f64::from(lifetime);
    if discount_rate == 0.0 {
        return 1.0 / l;
    }
    let growth = (1.0 + discount_rate).powf(l);
    discount_rate * growth / (growth - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn annualization_examples() {
        let direct = 0.08 * 1.08f64.powi(20) / (1.08f64.powi(20) - 1.0);
        assert_relative_eq!(annualization_coefficient(0.08, 20), direct, epsilon = 1e-15);
        assert!((annualization_coefficient(0.08, 20) - 0.101852).abs() < 1e-6);
        assert_eq!(annualization_coefficient(0.0, 10), 0.1);
        assert_relative_eq!(annualization_coefficient(0.05, 1), 1.05, epsilon = 1e-12);
    }

    #[test]
    fn annualization_monotone_on_grid() {
        let rates = [0.01, 0.03, 0.05, 0.08, 0.1, 0.15];
        for &dr in &rates {
            for l in 1..40 {
                assert!(annualization_coefficient(dr, l) > annualization_coefficient(dr, l + 1));
            }
        }
        for l in [1, 5, 10, 20, 30] {
            for w in rates.windows(2) {
                assert!(annualization_coefficient(w[0], l) < annualization_coefficient(w[1], l));
            }
        }
    }

    #[test]
    fn methane_conversion() {
        let tech = builtin_instance("toy3-ccus").unwrap().ptg_technology.unwrap();
        // 10 MW for one hour at η=0.6, H=36 MJ/m³ gives 600 m³.
        assert_relative_eq!(10.0 * tech.methane_per_mw(), 6e-4, epsilon = 1e-15);
        assert_relative_eq!(10.0 * tech.co2_per_mw(), 1.2, epsilon = 1e-12);
    }
}
