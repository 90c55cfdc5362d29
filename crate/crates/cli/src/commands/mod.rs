pub mod figures;
pub mod fit;
pub mod interactive;
pub mod session;
pub mod sweep;

use std::path::Path;

use blepin::channel::Scenario;

use crate::cli::{ChannelArgs, CommonArgs};
use crate::config::{Layers, ScenarioSpec, DEFAULT_SCENARIO, DEFAULT_SEED};
use crate::error::CliError;

pub(crate) fn resolve_scenario(
    layers: &Layers<'_>,
    common: &CommonArgs,
    channel: &ChannelArgs,
) -> Result<Scenario, CliError> {
    ScenarioSpec {
        name: layers.resolve(
            "scenario",
            common.scenario.clone(),
            DEFAULT_SCENARIO.to_string(),
        )?,
        sigma: layers.resolve_opt("sigma", channel.sigma)?,
        rssi0: layers.resolve_opt("rssi0", channel.rssi0)?,
        boundary: layers.resolve_opt("boundary", channel.boundary)?,
        boundary_offset: layers.resolve_opt("boundary_offset", channel.boundary_offset)?,
    }
    .build()
}

pub(crate) fn resolve_seed(layers: &Layers<'_>, flag: Option<u64>) -> Result<u64, CliError> {
    layers.resolve("seed", flag, DEFAULT_SEED)
}

/// Fails early if `path` cannot be created because its directory is missing.
pub(crate) fn check_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::io(
            format!("cannot write {}", path.display()),
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "parent directory does not exist",
            ),
        )),
        _ => Ok(()),
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}
