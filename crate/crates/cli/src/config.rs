//! Settings resolution: command-line flag, then config file, then default.
//!
//! The config file is TOML. Top-level keys apply to every subcommand and a
//! table named after the subcommand overrides them. Keys use the long flag
//! names (`train-fraction`, `lambda`, ...). Arrays become comma-separated
//! lists, matching the list syntax of the sweep flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::UsageError;

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn scalar(value: &toml::Value) -> Option<String> {
    match value {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        toml::Value::Array(items) => items.iter().map(scalar).collect::<Option<Vec<_>>>().map(|v| v.join(",")),
        _ => None,
    }
}

impl Settings {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, command).map_err(|e| UsageError(format!("config {}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str, command: &str) -> Result<Self, UsageError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| UsageError(e.message().to_owned()))?;
        let mut values = BTreeMap::new();
        let mut section = None;
        for (key, value) in &table {
            match value {
                toml::Value::Table(t) if key == command => section = Some(t),
                toml::Value::Table(_) => {}
                v => {
                    let s = scalar(v).ok_or_else(|| UsageError(format!("unsupported value for {key}")))?;
                    values.insert(key.clone(), s);
                }
            }
        }
        for (key, value) in section.into_iter().flatten() {
            let s = scalar(value).ok_or_else(|| UsageError(format!("unsupported value for {command}.{key}")))?;
            values.insert(key.clone(), s);
        }
        Ok(Self { values })
    }

    /// The flag if given, else the config entry, else `None`.
    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|raw| raw.parse::<T>().map_err(|e| UsageError(format!("config key {key} = {raw:?}: {e}"))))
            .transpose()
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.opt(flag, key)?.ok_or_else(|| UsageError(format!("missing --{key}")))
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, UsageError> {
        Ok(flag || self.opt::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Parses a comma-separated list.
pub fn list<T>(raw: &str, key: &str) -> Result<Vec<T>, UsageError>
where
    T: FromStr,
    T::Err: Display,
{
    let items: Vec<T> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| UsageError(format!("--{key}: {s:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(UsageError(format!("--{key} needs at least one value")));
    }
    Ok(items)
}
