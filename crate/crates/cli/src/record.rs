use serde::Serialize;
use serde_json::Value;

use crate::commands::Command;
use crate::scenario::{Decomposition, Scenario};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct ScenarioEcho {
    pub name: String,
    pub sha256: String,
    pub f: String,
    pub s0: Vec<u64>,
    pub s_prime: Vec<u64>,
    pub levi_semisimple: Option<bool>,
    pub decomposition: Option<Decomposition>,
    pub parameters: Value,
    pub budgets: Value,
}

/// Everything needed to replay a run; no clocks, hostnames or paths.
#[derive(Debug, Serialize)]
pub struct Record {
    pub command: String,
    pub scenario: Option<ScenarioEcho>,
    pub inputs: Value,
    pub outputs: Value,
    pub budgets_hit: Vec<String>,
    pub version: &'static str,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Other(format!("serialization: {e}")))
}

impl Record {
    pub fn new(cmd: &Command, scenario: Option<&Scenario>, outputs: Value, budgets_hit: Vec<String>) -> Result<Record, CliError> {
        let scenario = match scenario {
            Some(s) => Some(ScenarioEcho {
                name: s.file.name.clone(),
                sha256: s.hash.clone(),
                f: s.file.f.clone(),
                s0: s.file.s0.clone(),
                s_prime: s.file.s_prime.clone(),
                levi_semisimple: s.file.levi_semisimple,
                decomposition: s.file.decomposition.clone(),
                parameters: to_value(&s.file.parameters)?,
                budgets: to_value(&s.file.budgets)?,
            }),
            None => None,
        };
        Ok(Record {
            command: cmd.name().to_string(),
            scenario,
            inputs: to_value(cmd)?,
            outputs,
            budgets_hit,
            version: env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Other(format!("serialization: {e}")))
    }
}
