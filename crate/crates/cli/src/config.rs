//! `key = value` experiment files. Each key is the long name of a flag; the
//! pairs are spliced in right after the subcommand so that flags given on the
//! command line win.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::error::CliError;
use crate::Cli;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Parses a config file. `#` starts a comment; blank lines are skipped.
pub fn parse(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`, got `{raw}`", i + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key or value", i + 1)));
        }
        out.push(Entry { line: i + 1, key, value });
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<Entry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

fn long_names(cmd: &clap::Command) -> BTreeSet<String> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect()
}

/// Removes `--config <file>` from `args` and splices its entries in after the
/// subcommand. Keys owned by another subcommand are ignored; unknown keys are
/// a usage error.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    if let Some(program) = it.next() {
        rest.push(program);
    }
    while let Some(arg) = it.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            let path = it
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            config = Some(path);
        } else if let Some(path) = text.strip_prefix("--config=") {
            config = Some(OsString::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let entries = load(Path::new(&path))?;

    let cmd = Cli::command();
    let position = rest
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| !a.to_string_lossy().starts_with('-'))
        .map(|(i, _)| i);
    let Some(position) = position else {
        return Ok(rest);
    };
    let name = rest[position].to_string_lossy().into_owned();
    let Some(sub) = cmd.find_subcommand(&name) else {
        return Ok(rest);
    };
    let own = long_names(sub);
    let known: BTreeSet<String> = cmd.get_subcommands().flat_map(long_names).collect();

    let mut injected = Vec::new();
    for e in entries {
        if own.contains(&e.key) {
            injected.push(OsString::from(format!("--{}", e.key)));
            injected.push(OsString::from(e.value));
        } else if !known.contains(&e.key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{}`",
                e.line, e.key
            )));
        }
    }
    rest.splice(position + 1..position + 1, injected);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let e = parse("# experiment\nshape = peanut\n\nbeta_frac = 0.8  # trailing\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].key, "shape");
        assert_eq!(e[1].key, "beta-frac");
        assert_eq!(e[1].value, "0.8");
        assert!(parse("shape peanut").is_err());
        assert!(parse("shape =").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let path = file.path();
        std::fs::write(path, "seed = 4\ndelta = 0.2\nshape = kite\n").unwrap();
        let args: Vec<OsString> = ["ldsm", "image", "--config", path.to_str().unwrap(), "--delta", "0.1"]
            .iter()
            .map(OsString::from)
            .collect();
        let out = expand(args).unwrap();
        let out: Vec<String> = out.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(out, ["ldsm", "image", "--seed", "4", "--delta", "0.2", "--delta", "0.1"]);

        std::fs::write(path, "sede = 4\n").unwrap();
        let args: Vec<OsString> = ["ldsm", "image", "--config", path.to_str().unwrap()]
            .iter()
            .map(OsString::from)
            .collect();
        assert!(matches!(expand(args), Err(CliError::Usage(_))));
    }
}
