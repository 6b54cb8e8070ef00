//! Parameter resolution with precedence flags > config file > defaults, and
//! the run manifest that records where every value came from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{HsapError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    Config,
    Default,
}

impl Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Flag => "flag",
            Source::Config => "config",
            Source::Default => "default",
        })
    }
}

/// A `key = value` file. `#` starts a comment; blank lines are ignored.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HsapError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| {
                HsapError::InvalidParameter(format!("{}:{}: {msg}", path.display(), idx + 1))
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value"))?;
            let key = key.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            {
                return Err(bad(&format!("invalid key {key:?}")));
            }
            if key == "config" {
                return Err(bad("a config file cannot name another config file"));
            }
            if entries
                .insert(key.to_string(), (value.trim().to_string(), idx + 1))
                .is_some()
            {
                return Err(bad(&format!("duplicate key {key:?}")));
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    source: Source,
}

/// Collects resolved parameters in the order they are asked for.
#[derive(Debug, Default)]
pub struct Settings {
    file: Option<ConfigFile>,
    used: BTreeSet<String>,
    entries: Vec<Entry>,
    notes: Vec<String>,
}

impl Settings {
    pub fn new(file: Option<ConfigFile>) -> Self {
        Self {
            file,
            ..Self::default()
        }
    }

    fn lookup<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<(T, Source)>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        if let Some(v) = flag {
            return Ok(Some((v, Source::Flag)));
        }
        let Some(file) = &self.file else {
            return Ok(None);
        };
        let Some((raw, line)) = file.entries.get(key) else {
            return Ok(None);
        };
        raw.parse::<T>()
            .map(|v| Some((v, Source::Config)))
            .map_err(|e| {
                HsapError::InvalidParameter(format!("{}:{line}: {key}: {e}", file.path.display()))
            })
    }

    fn record(&mut self, key: &str, value: String, source: Source) {
        debug_assert!(
            self.entries.iter().all(|e| e.key != key),
            "{key} resolved twice"
        );
        self.entries.push(Entry {
            key: key.to_string(),
            value,
            source,
        });
    }

    /// Resolves `key`, falling back to `default`.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let (v, source) = self
            .lookup(key, flag)?
            .unwrap_or((default, Source::Default));
        self.record(key, v.to_string(), source);
        Ok(v)
    }

    /// Resolves `key` when it was given at all; absent keys are not recorded.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        Ok(self.lookup(key, flag)?.map(|(v, source)| {
            self.record(key, v.to_string(), source);
            v
        }))
    }

    /// Resolves a required `key`.
    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.optional(key, flag)?.ok_or_else(|| {
            HsapError::InvalidParameter(format!("--{} is required", key.replace('_', "-")))
        })
    }

    /// Records a value that was filled in without being asked for.
    pub fn derived(&mut self, key: &str, value: impl Display) {
        self.record(key, value.to_string(), Source::Default);
    }

    /// Adds a comment line to the manifest header.
    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Warns about config keys this command did not consume.
    pub fn finish(&self) {
        if let Some(file) = &self.file {
            for key in file.entries.keys().filter(|k| !self.used.contains(*k)) {
                log::warn!(
                    "{}: key {key:?} is not used by this command",
                    file.path.display()
                );
            }
        }
    }

    /// Manifest in config-file syntax, so it can be passed back via
    /// `--config` to repeat the run.
    pub fn manifest(&self, command: &str) -> String {
        let mut out = format!(
            "# hsap {}\n# command = {command}\n",
            env!("CARGO_PKG_VERSION")
        );
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        for e in &self.entries {
            let _ = writeln!(out, "{} = {}  # {}", e.key, e.value, e.source);
        }
        out
    }
}

/// Lowercase hex SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| HsapError::io(path, e))?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}
