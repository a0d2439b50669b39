//! `key=value` preset files merged into the argument list.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;

use crate::Cli;

/// Parse a preset file. Blank lines and `#` comments are skipped; keys are
/// flag names without the leading dashes.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", n + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Remove `--config <file>` from `args` and splice the file's settings in
/// right after the subcommand, so later command-line flags override them.
/// Keys the chosen subcommand does not know are skipped with a warning.
pub fn expand_args(mut args: Vec<String>) -> Result<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            bail!("--config needs a file argument");
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("reading config file {path}"))?;
    let entries = parse_config(&text)?;

    // locate the (possibly nested) subcommand
    let mut cmd = Cli::command();
    let mut insert_at = 1;
    while let Some(sub) = args.get(insert_at).and_then(|name| cmd.find_subcommand(name).cloned()) {
        cmd = sub;
        insert_at += 1;
    }
    let mut injected = Vec::new();
    for (key, value) in entries {
        let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            log::warn!("config key '{key}' does not apply to this command; ignored");
            continue;
        };
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}"));
            injected.push(value);
        } else if value.eq_ignore_ascii_case("true") || value == "1" {
            injected.push(format!("--{key}"));
        }
    }
    args.splice(insert_at..insert_at, injected);
    Ok(args)
}
