//! Flat `key = value` configuration files and their layering under flags.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
    used: RefCell<BTreeSet<String>>,
}

/// `n_max` and `n-max` name the same key.
fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl ConfigFile {
    pub fn parse(path: &Path, text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Invalid(format!(
                    "{}:{}: expected key = value, found {line:?}",
                    path.display(),
                    i + 1
                )));
            };
            let key = normalize(k);
            if key.is_empty() {
                return Err(CliError::Invalid(format!("{}:{}: empty key", path.display(), i + 1)));
            }
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CliError::Invalid(format!(
                    "{}:{}: duplicate key {key:?}",
                    path.display(),
                    i + 1
                )));
            }
        }
        Ok(ConfigFile {
            path: path.to_path_buf(),
            entries,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(path, &text)
    }

    fn value<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        let Some((line, v)) = self.entries.get(key) else {
            return Ok(None);
        };
        self.used.borrow_mut().insert(key.to_string());
        v.parse()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("{}:{line}: invalid value {v:?} for {key}", self.path.display())))
    }

    /// Every key must have been consumed by the command.
    pub fn reject_unknown(&self) -> CliResult<()> {
        let used = self.used.borrow();
        match self.entries.iter().find(|(k, _)| !used.contains(*k)) {
            Some((k, (line, _))) => Err(CliError::Invalid(format!(
                "{}:{line}: unknown key {k:?}",
                self.path.display()
            ))),
            None => Ok(()),
        }
    }
}

/// Flag value if given, else the config file value.
pub struct Layers<'a> {
    file: Option<&'a ConfigFile>,
}

impl<'a> Layers<'a> {
    pub fn new(file: Option<&'a ConfigFile>) -> Self {
        Layers { file }
    }

    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        let from_file = match self.file {
            Some(f) => f.value(key)?,
            None => None,
        };
        Ok(flag.or(from_file))
    }

    pub fn finish(&self) -> CliResult<()> {
        self.file.map_or(Ok(()), ConfigFile::reject_unknown)
    }
}
