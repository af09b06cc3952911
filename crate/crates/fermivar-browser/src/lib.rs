//! Browser entry points. Each takes or returns plain strings so the page
//! needs no bindings beyond the generated glue.

use fermivar_cli::config::{ExperimentConfig, ExperimentKind};
use fermivar_cli::{evaluate, results_json};
use wasm_bindgen::prelude::*;

/// Experiment names in menu order.
#[wasm_bindgen]
pub fn experiments() -> Vec<String> {
    ExperimentKind::ALL.iter().map(|k| k.name().to_string()).collect()
}

/// The configuration file with every default spelled out.
#[wasm_bindgen(js_name = defaultConfig)]
pub fn default_config(experiment: &str) -> Result<String, JsError> {
    default_config_text(experiment).map_err(|e| JsError::new(&e))
}

/// Runs a configuration and returns `{"record": …, "tables": {file: csv}}`.
#[wasm_bindgen(js_name = runExperiment)]
pub fn run_experiment(config_toml: &str) -> Result<String, JsError> {
    run_text(config_toml).map_err(|e| JsError::new(&e))
}

fn default_config_text(experiment: &str) -> Result<String, String> {
    let kind = ExperimentKind::ALL
        .into_iter()
        .find(|k| k.name() == experiment)
        .ok_or_else(|| format!("unknown experiment `{experiment}`"))?;
    Ok(ExperimentConfig::defaults(kind, 1).to_toml())
}

fn run_text(config_toml: &str) -> Result<String, String> {
    let config = ExperimentConfig::parse(config_toml).map_err(|e| e.to_string())?;
    let (record, tables) = evaluate(&config);
    let record: serde_json::Value = serde_json::from_slice(&results_json(&record)).map_err(|e| e.to_string())?;
    let tables: serde_json::Map<String, serde_json::Value> =
        tables.iter().map(|t| (t.file_name(), String::from_utf8_lossy(&t.to_bytes()).into_owned().into())).collect();
    Ok(serde_json::json!({ "record": record, "tables": tables }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_run_in_memory() {
        let text = default_config_text("interaction").unwrap();
        let out: serde_json::Value = serde_json::from_str(&run_text(&text).unwrap()).unwrap();
        assert_eq!(out["record"]["status"], "pass");
        assert!(out["tables"]["interaction.csv"].as_str().unwrap().starts_with("coupling,"));
    }

    #[test]
    fn errors_are_messages() {
        assert!(default_config_text("alchemy").unwrap_err().contains("alchemy"));
        assert!(run_text("experiment = \"vacuum\"\n").is_err());
        assert_eq!(experiments().len(), 7);
    }
}
