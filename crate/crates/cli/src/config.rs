use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Overlays the flags given on the command line onto a JSON config object.
/// Keys absent from both keep their defaults; flags win.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let Value::Object(given) = serde_json::to_value(flags)? else {
        bail!("arguments must serialize to an object");
    };
    let mut merged = match config {
        None => serde_json::Map::new(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            match serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
            {
                Value::Object(map) => map,
                _ => bail!("config {} must hold a JSON object", path.display()),
            }
        }
    };
    if let Some(key) = merged.keys().find(|k| !given.contains_key(*k)) {
        bail!("unknown config key '{key}'");
    }
    for (k, v) in given {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).context("invalid config value")
}
