//! Config loading: JSON file or built-in default, dotted-path overrides,
//! and typed parsing with field-path diagnostics.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Anything wrong with the user's configuration. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// A config document before typing, and the directory relative paths in it
/// resolve against.
pub struct RawConfig {
    pub value: Value,
    pub base_dir: Option<PathBuf>,
}

impl RawConfig {
    pub fn load<D: Serialize>(path: Option<&Path>, default: impl FnOnce() -> D) -> Result<Self, ConfigError> {
        match path {
            None => {
                let value = serde_json::to_value(default()).map_err(|e| err(format!("default config: {e}")))?;
                Ok(RawConfig { value, base_dir: None })
            }
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| err(format!("cannot read {}: {e}", p.display())))?;
                let value = serde_json::from_str(&text).map_err(|e| err(format!("{}: {e}", p.display())))?;
                Ok(RawConfig { value, base_dir: p.parent().map(Path::to_path_buf) })
            }
        }
    }

    pub fn apply_all(&mut self, assignments: &[String]) -> Result<(), ConfigError> {
        for a in assignments {
            set_path(&mut self.value, a)?;
        }
        Ok(())
    }

    pub fn parse<T: DeserializeOwned>(&self) -> Result<T, ConfigError> {
        serde_path_to_error::deserialize(&self.value).map_err(|e| {
            let path = e.path().to_string();
            err(format!("at `{path}`: {}", e.into_inner()))
        })
    }
}

/// Applies `a.b.0.c=value`. The value is parsed as JSON and falls back to
/// a bare string. Missing object keys are created; the typed parse rejects
/// them later if they are not part of the schema.
pub fn set_path(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| err(format!("override `{assignment}` has no `=`")))?;
    if path.is_empty() {
        return Err(err(format!("override `{assignment}` has an empty path")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.entry(key).or_insert(Value::Null),
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| err(format!("`{path}`: `{key}` is not an array index")))?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| err(format!("`{path}`: index {i} out of range (length {len})")))?
            }
            Value::Null => {
                *node = Value::Object(Default::default());
                node.as_object_mut().unwrap().entry(key).or_insert(Value::Null)
            }
            _ => return Err(err(format!("`{path}`: cannot descend into a scalar at `{key}`"))),
        };
    }
    *node = value;
    Ok(())
}
