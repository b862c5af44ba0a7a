use std::path::Path;

use serde::Deserialize;

use super::{BoundsArgs, CliError, CliResult, RateArgs, RecoverArgs, UstatArgs};

/// A config file: one optional table per subcommand, keys named like the
/// long flags with `_` for `-`.
///
/// ```toml
/// [ustat]
/// law = "gaussian"
/// m = 25
/// n = [25, 100]
/// kernel = "eigmin"
/// grid = "0:2:0.05"
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub ustat: Option<UstatArgs>,
    pub rate: Option<RateArgs>,
    pub recover: Option<RecoverArgs>,
    pub bounds: Option<BoundsArgs>,
}

/// Parses config text; errors carry the line and column of the problem.
pub fn parse(text: &str, origin: &str) -> CliResult<ConfigFile> {
    toml::from_str(text).map_err(|e| {
        let at = e
            .span()
            .map(|s| {
                let line = text[..s.start].matches('\n').count() + 1;
                format!(" at line {line}")
            })
            .unwrap_or_default();
        CliError::config(format!("{origin}{at}: {}", e.message()))
    })
}

pub fn load(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}
