//! Flat `key = value` config files merged under explicit flags.

use std::fs;
use std::path::Path;

use crate::CliError;

/// Top-level flags that take a value.
const VALUED_GLOBALS: [&str; 4] = ["--out", "--format", "--check", "--config"];
const GROUPS: [&str; 3] = ["fock", "coeffs", "jw"];

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", k + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", k + 1)));
        }
        let value = value.trim().trim_matches('"');
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

fn take_config(argv: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let mut found = None;
    let mut k = 1;
    while k < argv.len() {
        if argv[k] == "--config" {
            if k + 1 >= argv.len() {
                return Err(CliError::Usage("--config needs a file".into()));
            }
            found = Some(argv.remove(k + 1));
            argv.remove(k);
        } else if let Some(path) = argv[k].strip_prefix("--config=") {
            found = Some(path.to_string());
            argv.remove(k);
        } else {
            k += 1;
        }
    }
    Ok(found)
}

/// Index just past the subcommand path, where config flags are spliced in.
fn leaf_end(argv: &[String]) -> usize {
    let mut k = 1;
    let mut depth = 0;
    while k < argv.len() {
        let a = &argv[k];
        if VALUED_GLOBALS.contains(&a.as_str()) {
            k += 2;
            continue;
        }
        if a.starts_with('-') {
            if depth > 0 {
                return k;
            }
            k += 1;
            continue;
        }
        if depth == 0 {
            depth = 1;
            k += 1;
            if !GROUPS.contains(&a.as_str()) {
                return k;
            }
        } else {
            return k + 1;
        }
    }
    k.min(argv.len())
}

/// Removes `--config FILE` from `argv` and splices the file's settings in
/// front of the user's flags, so that explicit flags take precedence.
pub fn merge(mut argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = take_config(&mut argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Input(format!("cannot read config {path}: {e}")))?;
    let mut extra = Vec::new();
    for (key, value) in parse(&text)? {
        match value.as_str() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => {
                extra.push(format!("--{key}"));
                extra.push(value);
            }
        }
    }
    let at = leaf_end(&argv);
    argv.splice(at..at, extra);
    Ok(argv)
}
