//! `key=value` config files folded into the argument list.
//!
//! Keys name long flags of the selected command (`max_power` and
//! `max-power` are equivalent). A key is used only when the flag is absent
//! from the command line; keys the command does not accept are ignored.

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::Command;

use super::THREADS_ENV;
use crate::error::{Error, Result};

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn flag_present(argv: &[OsString], long: &str) -> bool {
    let exact = format!("--{long}");
    let with_value = format!("--{long}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == exact || s.starts_with(&with_value)
    })
}

/// Appends config-file values for flags missing from `argv`.
pub fn apply_config(root: &Command, argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.to_string_lossy())))?;
    let values = parse_config(&text)?;

    // follow subcommand names to the command that will receive the flags
    let mut cmd = root;
    for a in argv.iter().skip(1) {
        if let Some(sub) = cmd.find_subcommand(a.to_string_lossy().as_ref()) {
            cmd = sub;
        }
    }
    let mut accepted: Vec<(String, bool)> = cmd
        .get_arguments()
        .chain(root.get_arguments())
        .filter_map(|arg| {
            let takes_value = arg.get_action().takes_values();
            arg.get_long().map(|l| (l.to_string(), takes_value))
        })
        .collect();
    accepted.dedup();

    let mut out = argv;
    for (key, value) in values {
        if key == "config" || flag_present(&out, &key) {
            continue;
        }
        if key == "threads" && std::env::var_os(THREADS_ENV).is_some() {
            continue;
        }
        let Some((_, takes_value)) = accepted.iter().find(|(l, _)| *l == key) else {
            continue;
        };
        if *takes_value {
            out.push(format!("--{key}").into());
            out.push(value.into());
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                other => {
                    return Err(Error::Parse(format!(
                        "config key {key}: expected a boolean, got {other:?}"
                    )))
                }
            }
        }
    }
    Ok(out)
}
