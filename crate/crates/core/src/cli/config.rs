//! Scenario files: JSON, versioned, unknown keys rejected.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::simulator::Scenario;

/// Configs shipped with the crate, addressed as `bundled:<name>`.
pub const BUNDLED: [(&str, &str); 3] = [
    ("reference_sbr", include_str!("../../configs/reference_sbr.json")),
    ("desk_settle", include_str!("../../configs/desk_settle.json")),
    ("desk_asm1", include_str!("../../configs/desk_asm1.json")),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("at '{path}': {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("no bundled config named '{0}' (available: reference_sbr, desk_settle, desk_asm1)")]
    UnknownBundled(String),
}

/// Parses and validates a scenario document.
pub fn parse_config_str(text: &str) -> Result<Scenario, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    scenario.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(scenario)
}

/// Reads a scenario from a file, or from a bundled config when `spec` has
/// the form `bundled:<name>`.
pub fn parse_config(spec: &str) -> Result<Scenario, ConfigError> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        return bundled(name);
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config_str(&text)
}

pub fn bundled(name: &str) -> Result<Scenario, ConfigError> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ConfigError::UnknownBundled(name.to_string()))?;
    parse_config_str(text)
}

/// Pretty JSON that parses back to the same scenario.
pub fn to_config_string(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{Regime, StageKind};

    #[test]
    fn reference_cycle_schedule() {
        let sc = bundled("reference_sbr").unwrap();
        let spans: Vec<(f64, f64)> = sc.stages.iter().map(|s| (s.start_h, s.end_h)).collect();
        assert_eq!(spans, vec![(0.0, 1.0), (1.0, 3.0), (3.0, 5.0), (5.0, 5.5), (5.5, 6.0)]);
        let kinds: Vec<StageKind> = sc.stages.iter().map(|s| s.kind).collect();
        use StageKind::*;
        assert_eq!(kinds, vec![Fill, React, Settle, Draw, Idle]);
        assert_eq!(sc.stages[1].regime, Regime::Ode);
        assert!((sc.stages[0].flows(6, 6).q_f - 790.0 / 3600.0).abs() < 1e-15);
        assert_eq!(sc.stages[0].flows(6, 6).c_f[1], 5.0 * 0.5091);
        assert_eq!(sc.geometry.cells, 100);
    }

    #[test]
    fn all_bundled_parse() {
        for (name, _) in BUNDLED {
            bundled(name).unwrap();
        }
        assert!(matches!(bundled("nope"), Err(ConfigError::UnknownBundled(_))));
    }

    fn edited(f: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(BUNDLED[1].1).unwrap();
        f(&mut v);
        v.to_string()
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = edited(|v| {
            v["geometry"]["colour"] = "red".into();
        });
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Schema { path, message } => {
                assert!(path.starts_with("geometry"), "{path}");
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("{other}"),
        }
        let text = edited(|v| {
            v["stages"][0]["q_f_m3h"] = "fast".into();
        });
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Schema { path, .. } => assert_eq!(path, "stages[0].q_f_m3h"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn overlapping_stages_named() {
        let text = edited(|v| {
            let mut second = v["stages"][0].clone();
            v["stages"][0]["end_h"] = 1.0.into();
            second["name"] = "second".into();
            second["start_h"] = 0.5.into();
            second["end_h"] = 2.0.into();
            v["stages"].as_array_mut().unwrap().push(second);
        });
        let msg = parse_config_str(&text).unwrap_err().to_string();
        assert!(msg.contains("'settle'") && msg.contains("'second'") && msg.contains("overlap"), "{msg}");
    }

    #[test]
    fn fill_and_draw_together_rejected() {
        let text = edited(|v| {
            v["stages"][0]["q_f_m3h"] = 1.0.into();
            v["stages"][0]["q_e_m3h"] = 1.0.into();
            v["stages"][0]["feed"] = serde_json::json!({"x_f": 0.0, "c_fractions": vec![0.0; 6], "s": vec![0.0; 6]});
        });
        let msg = parse_config_str(&text).unwrap_err().to_string();
        assert!(msg.contains("cannot fill and draw"), "{msg}");
    }

    #[test]
    fn wrong_version_rejected() {
        let text = edited(|v| v["schema_version"] = 2.into());
        assert!(parse_config_str(&text).unwrap_err().to_string().contains("schema_version"));
    }

    #[test]
    fn serialization_round_trips() {
        for (name, _) in BUNDLED {
            let sc = bundled(name).unwrap();
            assert_eq!(parse_config_str(&to_config_string(&sc)).unwrap(), sc);
        }
    }
}
