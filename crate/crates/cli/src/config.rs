//! Optional TOML configuration. Top-level `seed` and `threads`, plus one
//! table per subcommand whose keys are the long flag names with `_` for `-`.
//! Flags given on the command line win over file values.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub construct: Option<toml::Table>,
    pub analyze: Option<toml::Table>,
    pub bounds: Option<toml::Table>,
    pub sim: Option<toml::Table>,
    pub percolate: Option<toml::Table>,
    pub decode: Option<toml::Table>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn section(&self, name: &str) -> Option<&toml::Table> {
        match name {
            "construct" => self.construct.as_ref(),
            "analyze" => self.analyze.as_ref(),
            "bounds" => self.bounds.as_ref(),
            "sim" => self.sim.as_ref(),
            "percolate" => self.percolate.as_ref(),
            "decode" => self.decode.as_ref(),
            _ => None,
        }
    }
}

/// Overlays the non-null fields of `flags` on the file section and
/// deserializes the result, rejecting unknown keys.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, section: Option<&toml::Table>, name: &str) -> Result<T, CliError> {
    let mut merged = match section {
        Some(t) => match serde_json::to_value(t).map_err(|e| CliError::Config(e.to_string()))? {
            Value::Object(m) => m,
            _ => Map::new(),
        },
        None => Map::new(),
    };
    if let Value::Object(given) = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(format!("[{name}]: {e}")))
}
