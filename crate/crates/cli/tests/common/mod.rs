#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::Registry;
use serde_json::Value;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Run the binary without the oracle-limit override from the environment.
pub fn stablecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablecut"))
        .args(args)
        .env_remove("STABLECUT_ORACLE_LIMIT")
        .output()
        .expect("binary runs")
}

pub fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn load(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

/// Errors from validating `report` against `schema/<name>`.
pub fn schema_errors(name: &str, report: &Value) -> Vec<String> {
    let common = load("common.schema.json");
    let id = common["$id"].as_str().unwrap().to_string();
    let registry = Registry::new().add(id, common).unwrap().prepare().unwrap();
    let validator = jsonschema::options()
        .with_registry(&registry)
        .build(&load(name))
        .expect("schema compiles");
    validator.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path())).collect()
}
