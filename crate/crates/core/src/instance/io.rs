use super::{validate, InstanceError, PlanningInstance};
use std::path::Path;

/// Reads and validates an instance document from disk.
pub fn load_instance(path: impl AsRef<Path>) -> Result<PlanningInstance, InstanceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_instance(&text)
}

/// Parses and validates an instance document. Unknown keys are rejected.
pub fn parse_instance(text: &str) -> Result<PlanningInstance, InstanceError> {
    let inst: PlanningInstance = serde_json::from_str(text)?;
    validate(&inst)?;
    Ok(inst)
}

/// Pretty-printed JSON in the instance file schema.
pub fn to_json(inst: &PlanningInstance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{builtin_instance, BUILTIN_NAMES};

    #[test]
    fn round_trip_builtins() {
        for name in BUILTIN_NAMES {
            let inst = builtin_instance(name).unwrap();
            let again = parse_instance(&to_json(&inst)).unwrap();
            assert_eq!(inst, again, "{name}");
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let inst = builtin_instance("toy3").unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&to_json(&inst)).unwrap();
        doc["colour"] = serde_json::json!("blue");
        assert!(matches!(
            parse_instance(&doc.to_string()),
            Err(InstanceError::Parse(_))
        ));
        let mut doc: serde_json::Value = serde_json::from_str(&to_json(&inst)).unwrap();
        doc["generators"][0]["colour"] = serde_json::json!("blue");
        assert!(matches!(
            parse_instance(&doc.to_string()),
            Err(InstanceError::Parse(_))
        ));
    }

    #[test]
    fn malformed_and_missing_files() {
        assert!(matches!(parse_instance("{ not json"), Err(InstanceError::Parse(_))));
        assert!(matches!(
            load_instance("/definitely/not/here.json"),
            Err(InstanceError::Io { .. })
        ));
    }

    #[test]
    fn pressure_bound_violation_from_file() {
        let inst = builtin_instance("toy3").unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&to_json(&inst)).unwrap();
        doc["gas_nodes"][0]["pressure_min"] = serde_json::json!(500.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, doc.to_string()).unwrap();
        let err = load_instance(&path).unwrap_err();
        assert!(matches!(err, InstanceError::Validation { ref path, .. } if path == "gas_nodes[0].pressure_min"));
    }
}
