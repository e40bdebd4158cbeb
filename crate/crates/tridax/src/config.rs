//! Device profiles and DSE grids from JSON or `key = value` files.

use std::path::{Path, PathBuf};
use std::{env, fs};

use serde::de::DeserializeOwned;
use serde_json::{Map, Number, Value};
use thiserror::Error;
use tridax_core::perfmodel::{DeviceProfile, ParameterGrid};

/// Directory searched for `<name>.json` and `<name>.conf` profiles.
pub const DEVICE_DIR_VAR: &str = "TRIDAX_DEVICE_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown device profile `{0}`")]
    UnknownDevice(String),
    #[error("invalid device profile: {0}")]
    InvalidDevice(&'static str),
}

fn scalar(text: &str) -> Value {
    let t = text.trim().trim_matches('"');
    if let Ok(i) = t.parse::<u64>() {
        return Value::Number(i.into());
    }
    if let Ok(f) = t.parse::<f64>() {
        if let Some(n) = Number::from_f64(f) {
            return Value::Number(n);
        }
    }
    match t {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(t.to_string()),
    }
}

/// Parses `key = value` lines. `#` starts a comment; values with commas
/// become lists, as do the keys named in `lists`.
pub fn parse_key_values(text: &str, lists: &[&str]) -> Result<Value, ConfigError> {
    let mut map = Map::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or(ConfigError::Syntax { line: n + 1 })?;
        let key = key.trim().replace('-', "_");
        let value = if value.contains(',') || lists.contains(&key.as_str()) {
            Value::Array(
                value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(scalar)
                    .collect(),
            )
        } else {
            scalar(value)
        };
        map.insert(key, value);
    }
    Ok(Value::Object(map))
}

fn parse<T: DeserializeOwned>(text: &str, lists: &[&str]) -> Result<T, ConfigError> {
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str(text)?)
    } else {
        Ok(serde_json::from_value(parse_key_values(text, lists)?)?)
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a profile. Missing keys keep the U280 values.
pub fn parse_device(text: &str) -> Result<DeviceProfile, ConfigError> {
    let device: DeviceProfile = parse(text, &[])?;
    device.validate().map_err(ConfigError::InvalidDevice)?;
    Ok(device)
}

/// Resolves a built-in name, a file path, or a name in `TRIDAX_DEVICE_DIR`.
pub fn resolve_device(spec: &str) -> Result<DeviceProfile, ConfigError> {
    if let Some(d) = DeviceProfile::builtin(spec) {
        return Ok(d);
    }
    let direct = Path::new(spec);
    if direct.is_file() {
        return parse_device(&read(direct)?);
    }
    if let Some(dir) = env::var_os(DEVICE_DIR_VAR) {
        for ext in ["json", "conf"] {
            let p = Path::new(&dir).join(format!("{spec}.{ext}"));
            if p.is_file() {
                return parse_device(&read(&p)?);
            }
        }
    }
    Err(ConfigError::UnknownDevice(spec.to_string()))
}

const GRID_LISTS: [&str; 8] = [
    "kinds",
    "groups",
    "vectors",
    "unrolls",
    "tiles",
    "compute_units",
    "partitions",
    "frequencies_hz",
];

/// Parses a grid; missing keys keep the default ranges.
pub fn parse_grid(text: &str) -> Result<ParameterGrid, ConfigError> {
    parse(text, &GRID_LISTS)
}

pub fn load_grid(path: &Path) -> Result<ParameterGrid, ConfigError> {
    parse_grid(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tridax_core::perfmodel::DesignKind;

    #[test]
    fn key_value_device() {
        let d = parse_device("# small board\nname = small\nuram_bytes = 1000\nhbm_ports = 8\n").unwrap();
        assert_eq!(d.name, "small");
        assert_eq!(d.uram_bytes, 1000);
        assert_eq!(d.hbm_ports, 8);
        assert_eq!(d.dsp_count, 8490);
        assert!(parse_device("hbm_ports = 0").is_err());
        assert!(matches!(parse_device("nonsense"), Err(ConfigError::Syntax { line: 1 })));
    }

    #[test]
    fn json_device() {
        let d = parse_device(r#"{"name": "x", "frequency_hz": 250e6}"#).unwrap();
        assert_eq!(d.frequency_hz, 250e6);
    }

    #[test]
    fn grid_lists() {
        let g = parse_grid("kinds = thomas-thomas, thomas-pcr\nvectors = 8\ntiles = 4\n").unwrap();
        assert_eq!(g.kinds, [DesignKind::ThomasThomas, DesignKind::ThomasPcr]);
        assert_eq!(g.vectors, [8]);
        assert_eq!(g.tiles, [4]);
        assert_eq!(g.unrolls, ParameterGrid::default().unrolls);
    }

    #[test]
    fn unknown_device() {
        assert!(matches!(resolve_device("no-such-board"), Err(ConfigError::UnknownDevice(_))));
        assert_eq!(resolve_device("u280").unwrap(), DeviceProfile::u280());
    }
}
