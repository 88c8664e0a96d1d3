//! `key = value` batch files.
//!
//! Each non-empty line that does not start with `#` names a long flag of the
//! selected subcommand, without the leading dashes. Repeating a key repeats
//! the flag, which is how sweep grids are written. `true` turns a switch on.
//!
//! ```text
//! # sweep.conf
//! family = loglog
//! family = nqt
//! subvectors = 1
//! subvectors = 8
//! ```

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use nvq::NvqError;

/// Turns a config file into command-line arguments.
pub fn config_args(path: &Path) -> Result<Vec<OsString>, NvqError> {
    let text = fs::read_to_string(path)?;
    parse(&text)
}

fn parse(text: &str) -> Result<Vec<OsString>, NvqError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(NvqError::Config(format!(
                "config line {}: expected key = value",
                no + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || key.starts_with('-') || key == "config" {
            return Err(NvqError::Config(format!(
                "config line {}: invalid key {key:?}",
                no + 1
            )));
        }
        out.push(OsString::from(format!("--{key}")));
        if value != "true" {
            out.push(OsString::from(value));
        }
    }
    Ok(out)
}
