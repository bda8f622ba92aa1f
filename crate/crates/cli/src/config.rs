//! Scenario files: `{"scenario": name, "seed": u64, "params": {...}}`.

use crate::scenarios::find;
use crate::CliError;
use serde::Deserialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Seed used when neither the file nor the command line gives one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    scenario: String,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    params: Option<Value>,
}

/// A parsed scenario with every parameter default filled in.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub name: &'static str,
    pub seed: u64,
    pub params: Value,
    /// Hex SHA-256 of the canonical `(scenario, seed, params)` document.
    pub hash: String,
    /// Directory relative paths inside `params` are resolved against.
    pub base_dir: PathBuf,
}

impl ResolvedScenario {
    /// Seed for sub-task `index`, derived from the master seed.
    pub fn sub_seed(&self, index: u64) -> u64 {
        derive_seed(self.seed, index)
    }
}

/// First eight bytes of `SHA-256(master ‖ index)`, little-endian.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    let d = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    u64::from_le_bytes(b)
}

fn scenario_hash(name: &str, seed: u64, params: &Value) -> String {
    let canonical = serde_json::json!({ "scenario": name, "seed": seed, "params": params });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses scenario text. `seed_override` wins over the file's seed.
pub fn parse_scenario(text: &str, seed_override: Option<u64>, base_dir: &Path) -> Result<ResolvedScenario, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Schema("file is empty".into()));
    }
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    let entry = find(&raw.scenario).ok_or_else(|| CliError::UnknownScenario(raw.scenario.clone()))?;
    let params = match raw.params {
        None | Some(Value::Null) => Value::Object(Default::default()),
        Some(p) => p,
    };
    let params = entry.resolve(params)?;
    let seed = seed_override.or(raw.seed).unwrap_or(DEFAULT_SEED);
    Ok(ResolvedScenario {
        name: entry.name,
        seed,
        hash: scenario_hash(entry.name, seed, &params),
        params,
        base_dir: base_dir.to_path_buf(),
    })
}

pub fn load_scenario(path: &Path, seed_override: Option<u64>) -> Result<ResolvedScenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scenario(&text, seed_override, &base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_garbage_are_schema_errors() {
        for text in ["", "  \n", "{", "[]", "{\"seed\": 1}"] {
            let e = parse_scenario(text, None, Path::new(".")).unwrap_err();
            assert_eq!(e.exit_code(), 3, "{text:?}: {e}");
        }
    }

    #[test]
    fn unknown_scenario_is_exit_two() {
        let e = parse_scenario(r#"{"scenario": "fig9"}"#, None, Path::new(".")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        let top = r#"{"scenario": "methods_t1_limit", "colour": 1}"#;
        let nested = r#"{"scenario": "methods_t1_limit", "params": {"r_ohm": 5}}"#;
        for text in [top, nested] {
            assert_eq!(parse_scenario(text, None, Path::new(".")).unwrap_err().exit_code(), 3);
        }
    }

    #[test]
    fn hash_tracks_seed_and_params() {
        let a = parse_scenario(r#"{"scenario": "methods_t1_limit"}"#, None, Path::new(".")).unwrap();
        let b = parse_scenario(
            r#"{"scenario": "methods_t1_limit", "params": {}}"#,
            None,
            Path::new("."),
        )
        .unwrap();
        let c = parse_scenario(r#"{"scenario": "methods_t1_limit"}"#, Some(7), Path::new(".")).unwrap();
        let d = parse_scenario(
            r#"{"scenario": "methods_t1_limit", "params": {"t_eff_k": 4}}"#,
            None,
            Path::new("."),
        )
        .unwrap();
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
        assert_ne!(a.hash, d.hash);
        assert_eq!(a.hash.len(), 64);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
