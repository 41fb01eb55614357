//! Flat `key = value` config files that expand into command-line flags.
//!
//! Keys are flag names without the leading dashes. `#` starts a comment.
//! The expanded flags are placed right after the subcommand, so flags given
//! on the command line win.

use std::fs;
use std::path::Path;

pub fn parse(text: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim();
        if key.is_empty() || key.starts_with('-') || key.contains(char::is_whitespace) {
            return Err(format!("line {}: bad key {key:?}", n + 1));
        }
        if key == "config" {
            return Err(format!("line {}: config files cannot include other config files", n + 1));
        }
        let value = value.trim();
        match value {
            "true" => args.push(format!("--{key}")),
            _ => args.push(format!("--{key}={value}")),
        }
    }
    Ok(args)
}

fn config_path(args: &[String]) -> Option<&str> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if arg == "--" {
            break;
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(path);
        }
        if arg == "--config" {
            return iter.next().map(String::as_str);
        }
    }
    None
}

/// Splices the flags from `--config <file>` into `args` after the subcommand.
pub fn expand(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = fs::read_to_string(Path::new(path)).map_err(|e| format!("cannot read config file {path}: {e}"))?;
    let extra = parse(&text).map_err(|e| format!("{path}: {e}"))?;
    let at = args
        .iter()
        .position(|a| subcommands.contains(&a.as_str()))
        .ok_or("--config needs a subcommand")?;
    let mut out = args[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}
