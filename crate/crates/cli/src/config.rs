//! Run configuration resolved from three layers: command-line flags, then an
//! optional `key = value` config file, then built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use blepin::channel::{CompositeScenario, Scenario, COMBINED_OFFSET_DB};
use blepin::protocol::Pin;

use crate::error::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "distance_m",
    "seed",
    "pin",
    "max_count",
    "lockout_ms",
    "out",
    "trials",
    "from",
    "to",
    "points",
    "spacing",
    "distances",
    "sigma",
    "rssi0",
    "boundary",
    "boundary_offset",
    "horizon_ms",
    "telemetry_ms",
];

/// Parsed `key = value` file. Blank lines and lines starting with `#` are skipped.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        Self::parse(&text).map_err(|msg| CliError::usage(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!("line {}: unknown key `{key}`", i + 1));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Resolves one setting: flag, else config file, else `default`.
pub struct Layers<'a> {
    pub file: &'a ConfigFile,
}

impl Layers<'_> {
    pub fn resolve<T: FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        Ok(self.resolve_opt(key, flag)?.unwrap_or(default))
    }

    pub fn resolve_opt<T: FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse `{raw}`"))),
        }
    }
}

pub fn load_layers(config: Option<&PathBuf>) -> Result<ConfigFile, CliError> {
    match config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

pub const DEFAULT_PIN: &str = "12AB";
pub const DEFAULT_SCENARIO: &str = "indoor";
pub const DEFAULT_SEED: u64 = 1;

pub fn parse_pin(s: &str) -> Result<Pin, CliError> {
    s.parse()
        .map_err(|e| CliError::usage(format!("invalid PIN `{s}`: {e}")))
}

/// Builds a scenario from a preset name plus optional overrides.
pub struct ScenarioSpec {
    pub name: String,
    pub sigma: Option<f64>,
    pub rssi0: Option<f64>,
    pub boundary: Option<f64>,
    pub boundary_offset: Option<f64>,
}

impl ScenarioSpec {
    pub fn build(&self) -> Result<Scenario, CliError> {
        let mut params = blepin::channel::scenario_preset(&self.name)?;
        if let Some(sigma) = self.sigma {
            params.sigma_db = sigma;
        }
        if let Some(rssi0) = self.rssi0 {
            params.rssi_at_d0 = rssi0;
        }
        params.validate()?;
        let scenario = match self.boundary {
            Some(b) => CompositeScenario::with_boundary(
                params,
                b,
                self.boundary_offset.unwrap_or(COMBINED_OFFSET_DB),
            )?
            .into(),
            None => {
                if self.boundary_offset.is_some() {
                    return Err(CliError::usage("--boundary-offset requires --boundary"));
                }
                params.into()
            }
        };
        Ok(scenario)
    }
}
