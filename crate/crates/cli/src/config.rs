//! `key=value` config files merged under the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};

use crate::Cli;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("config {path} line {line}: {msg}")]
    Bad { path: String, line: usize, msg: String },
}

impl ParseError {
    pub fn exit_code(&self) -> u8 {
        match self {
            ParseError::Read { .. } => 4,
            _ => 2,
        }
    }
}

/// Keys written by manifests that describe a run rather than configure it.
fn informational(key: &str) -> bool {
    key == "version" || key.starts_with("result.")
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_pairs(text: &str, path: &str) -> Result<Vec<(usize, String, String)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ParseError::Bad {
            path: path.to_string(),
            line: i + 1,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn from_command_line(m: &ArgMatches, id: &str) -> bool {
    matches!(m.try_get_raw(id), Ok(Some(_))) && m.value_source(id) == Some(ValueSource::CommandLine)
}

pub fn parse_args(args: Vec<OsString>) -> Result<Cli, ParseError> {
    let root = Cli::command();
    // A lenient first pass finds the config file; required flags may still be
    // missing until its values are merged in.
    let lenient = root.clone().ignore_errors(true).try_get_matches_from(&args)?;
    let path = lenient.get_one::<std::path::PathBuf>("config").cloned();
    let (Some(path), Some((sub_name, sub_matches))) = (path, lenient.subcommand()) else {
        return Ok(Cli::from_arg_matches(&root.try_get_matches_from(&args)?)?);
    };
    let matches = &lenient;
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|source| ParseError::Read {
        path: shown.clone(),
        source,
    })?;
    let sub = root.find_subcommand(sub_name).expect("matched subcommand exists");
    let bad = |line: usize, msg: String| ParseError::Bad {
        path: shown.clone(),
        line,
        msg,
    };

    let mut extra: Vec<OsString> = Vec::new();
    for (line, key, value) in read_pairs(&text, &shown)? {
        if informational(&key) {
            continue;
        }
        if key == "command" {
            if value != sub_name {
                return Err(bad(line, format!("written for `{value}`, not `{sub_name}`")));
            }
            continue;
        }
        if key == "config" {
            return Err(bad(line, "config files cannot include other config files".into()));
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = arg else {
            let elsewhere = root
                .get_subcommands()
                .any(|c| c.get_arguments().any(|a| a.get_long() == Some(key.as_str())));
            if elsewhere {
                continue;
            }
            return Err(bad(line, format!("unknown key `{key}`")));
        };
        let id = arg.get_id().as_str();
        if from_command_line(sub_matches, id) || from_command_line(matches, id) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{key}={value}").into());
        } else {
            match value.as_str() {
                "true" => extra.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(bad(line, format!("`{key}` takes true or false"))),
            }
        }
    }
    let mut merged = args;
    merged.extend(extra);
    let matches = root.try_get_matches_from(merged)?;
    Ok(Cli::from_arg_matches(&matches)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_skip_comments_and_trim() {
        let p = read_pairs("# x\n\n a = 1 \nb=c=d\n", "t").unwrap();
        assert_eq!(p, vec![(3, "a".into(), "1".into()), (4, "b".into(), "c=d".into())]);
        assert!(read_pairs("novalue\n", "t").is_err());
    }
}
