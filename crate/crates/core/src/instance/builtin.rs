use super::{parse_instance, InstanceError, PlanningInstance};

pub const BUILTIN_NAMES: [&str; 3] = ["toy3", "toy3-ccus", "mesh6"];

const TOY3: &str = include_str!("../../instances/toy3.json");
const TOY3_CCUS: &str = include_str!("../../instances/toy3-ccus.json");
const MESH6: &str = include_str!("../../instances/mesh6.json");

/// Versioned desk-scale instances shipped with the crate.
pub fn builtin_instance(name: &str) -> Result<PlanningInstance, InstanceError> {
    let text = match name {
        "toy3" => TOY3,
        "toy3-ccus" => TOY3_CCUS,
        "mesh6" => MESH6,
        other => return Err(InstanceError::UnknownBuiltin(other.to_string())),
    };
    parse_instance(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy3_shape() {
        let inst = builtin_instance("toy3").unwrap();
        assert_eq!(inst.gas_nodes.len(), 3);
        assert_eq!(inst.buses.len(), 3);
        assert_eq!(inst.gas_sources.len(), 1);
        assert_eq!(inst.generators.len(), 2);
        assert_eq!(inst.horizon, 24);
        assert!(inst.ptg_technology.is_none());
    }

    #[test]
    fn toy3_ccus_extends_toy3() {
        let base = builtin_instance("toy3").unwrap();
        let inst = builtin_instance("toy3-ccus").unwrap();
        assert_eq!(inst.gas_nodes, base.gas_nodes);
        assert_eq!(inst.generators, base.generators);
        assert_eq!(inst.siting_candidates.len(), 2);
        let tech = inst.ptg_technology.as_ref().unwrap();
        assert_eq!(tech.conversion_efficiency, 0.6);
        assert_eq!(tech.co2_per_mwh, 0.2);
        assert_eq!(tech.methane_calorific, 36.0);
        assert_eq!(tech.module_size, 1.0);
        assert_eq!(inst.economics.capture_energy, 0.269);
        let ccpp = &inst.generators[inst.ccpp_indices()[0]];
        assert_eq!(ccpp.emission_factor, 1.005);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            builtin_instance("bad"),
            Err(InstanceError::UnknownBuiltin(n)) if n == "bad"
        ));
    }
}
