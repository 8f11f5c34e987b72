//! Optional JSON config whose keys mirror the long flag names. Flags given on
//! the command line win over file values.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Default)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(values)) => Ok(Config { values }),
            Ok(_) => Err(CliError::usage(format!("{}: config must be a JSON object", path.display()))),
            Err(e) => Err(CliError::usage(format!("{}: {e}", path.display()))),
        }
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn bad(key: &str, want: &str) -> CliError {
        CliError::usage(format!("config key `{key}` must be {want}"))
    }

    pub fn f64(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key).map(|v| v.as_f64().ok_or_else(|| Self::bad(key, "a number"))).transpose()
    }

    pub fn req_f64(&self, key: &str, flag: Option<f64>) -> Result<f64, CliError> {
        self.f64(key, flag)?.ok_or_else(|| CliError::usage(format!("missing --{key}")))
    }

    pub fn f64_or(&self, key: &str, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key, flag)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, flag: Option<usize>, default: usize) -> Result<usize, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|n| n as usize).ok_or_else(|| Self::bad(key, "a non-negative integer")),
        }
    }

    pub fn u64_or(&self, key: &str, flag: Option<u64>, default: u64) -> Result<u64, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| Self::bad(key, "a non-negative integer")),
        }
    }

    pub fn string(&self, key: &str, flag: Option<String>) -> Result<Option<String>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| Self::bad(key, "a string")))
            .transpose()
    }

    pub fn path(&self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
        Ok(self.string(key, flag.map(|p| p.to_string_lossy().into_owned()))?.map(PathBuf::from))
    }

    pub fn f64_list(&self, key: &str, flag: Vec<f64>) -> Result<Vec<f64>, CliError> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| Self::bad(key, "an array of numbers")))
                .collect(),
            Some(_) => Err(Self::bad(key, "an array of numbers")),
        }
    }
}
