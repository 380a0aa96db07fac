//! Flat JSON experiment configs. A command-line flag always wins over the
//! config key of the same name (dashes become underscores).

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::bad_input(format!("config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(values)) => {
                if let Some((k, _)) = values.iter().find(|(_, v)| v.is_object()) {
                    return Err(CliError::bad_input(format!("config key {k:?} must not be nested")));
                }
                Ok(Config { values })
            }
            Ok(_) => Err(CliError::bad_input("config must be a JSON object")),
            Err(e) => Err(CliError::bad_input(format!("config: {e}"))),
        }
    }

    /// `flag` if given, else the config value under `key`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::bad_input(format!("config key {key:?}: {e}"))),
        }
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::bad_input(format!("missing --{}", key.replace('_', "-"))))
    }

    /// A size list: `"a:b"` or `"a:b:step"` (inclusive), `"a,b,c"`, or a JSON array.
    pub fn sizes(&self, flag: Option<String>, key: &str) -> CliResult<Vec<usize>> {
        if let Some(s) = flag {
            return parse_sizes(&s);
        }
        match self.values.get(key) {
            Some(Value::String(s)) => parse_sizes(s),
            Some(v @ Value::Array(_)) => serde_json::from_value(v.clone())
                .map_err(|e| CliError::bad_input(format!("config key {key:?}: {e}"))),
            Some(_) => Err(CliError::bad_input(format!("config key {key:?} must be a string or an array"))),
            None => Err(CliError::bad_input(format!("missing --{}", key.replace('_', "-")))),
        }
    }
}

pub fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::bad_input(format!("cannot parse size list {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let out: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(bad()),
        };
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<CliResult<_>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// A list of reals such as `"0,0.5,1"`.
pub fn parse_reals(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::bad_input(format!("cannot parse number {t:?}")))
        })
        .collect()
}
