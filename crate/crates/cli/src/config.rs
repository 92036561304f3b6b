//! `--config` files: flat `key=value` lines whose keys are the long flag
//! names of the chosen command. They are spliced into the argument list right
//! after the subcommand, so flags given on the command line override them.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::CommandFactory;

use crate::cli::Cli;

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.to_str().and_then(|s| s.strip_prefix("--config=")) {
            return Some(p.into());
        }
    }
    None
}

/// Index of the subcommand token: the first argument naming a subcommand
/// that is not the value of `--config`.
fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let cmd = Cli::command();
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            i += 2;
            continue;
        }
        if a.to_str().is_some_and(|s| cmd.find_subcommand(s).is_some()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Whether `--key` appears among the explicit arguments.
fn given(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    args.iter().any(|a| a.to_str().is_some_and(|s| s == flag || s.starts_with(&prefix)))
}

/// Long flag names accepted by a subcommand.
pub fn valid_keys(command: &str) -> Option<Vec<String>> {
    let cmd = Cli::command();
    let sub = cmd.find_subcommand(command)?;
    let mut keys: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| *l != "help" && *l != "config")
        .map(String::from)
        .collect();
    keys.sort();
    Some(keys)
}

pub fn parse_pairs(text: &str, origin: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("{origin}:{}: expected key=value, got `{line}`", no + 1));
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Splice the config file (if any) into `args`.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let shown = Path::new(&path).display().to_string();
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {shown}: {e}"))?;
    let mut pairs = parse_pairs(&text, &shown)?;

    let mut args = args;
    let from_file = pairs.iter().position(|(k, _)| k == "command").map(|i| pairs.remove(i).1);
    let at = match (subcommand_index(&args), from_file) {
        (Some(i), Some(c)) if args[i] != c.as_str() => {
            return Err(format!(
                "config {shown} sets command={c} but the command line asks for {}",
                args[i].to_string_lossy()
            ))
        }
        (Some(i), _) => i,
        (None, Some(c)) => {
            args.insert(1, c.into());
            1
        }
        // Let clap report the missing subcommand.
        (None, None) => return Ok(args),
    };
    let command = args[at].to_string_lossy().into_owned();
    // Unknown subcommands are also clap's to report.
    let Some(keys) = valid_keys(&command) else {
        return Ok(args);
    };
    for (k, _) in &pairs {
        if !keys.iter().any(|v| v == k) {
            return Err(format!(
                "unknown key `{k}` in {shown}; valid keys for {command}: command, {}",
                keys.join(", ")
            ));
        }
    }
    let spliced: Vec<OsString> = pairs
        .into_iter()
        .filter(|(k, _)| !given(&args, k))
        .map(|(k, v)| format!("--{k}={v}").into())
        .collect();
    args.splice(at + 1..at + 1, spliced);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_skip_comments_and_blank_lines() {
        let p = parse_pairs("# run\nfamily = hp\n\nd=4\n", "x").unwrap();
        assert_eq!(p, vec![("family".into(), "hp".into()), ("d".into(), "4".into())]);
        assert!(parse_pairs("family hp", "x").is_err());
    }

    #[test]
    fn verify_keys_include_family_and_domain() {
        let k = valid_keys("verify").unwrap();
        for key in ["family", "d", "alpha", "N", "rin", "rout", "nodes", "format", "output"] {
            assert!(k.iter().any(|v| v == key), "{key}");
        }
        assert!(valid_keys("nope").is_none());
    }

    #[test]
    fn subcommand_skips_config_value() {
        let a: Vec<OsString> = ["x", "--config", "f.cfg", "verify", "--d", "3"].iter().map(OsString::from).collect();
        assert_eq!(subcommand_index(&a), Some(3));
        assert_eq!(config_path(&a), Some("f.cfg".into()));
    }
}
