//! Line-oriented configuration files.
//!
//! Grammar (documented in the README):
//!
//! ```text
//! # comment                (also allowed after values? no - whole lines only)
//! [section]
//! key = value
//! ```
//!
//! Blank lines and `#` lines are ignored. Keys must appear inside a
//! section; a key may appear once per section. Unknown sections or keys are
//! rejected so typos fail loudly. Values are plain scalars or
//! comma-separated lists, parsed on access.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Known sections and their keys.
const KNOWN: &[(&str, &[&str])] = &[
    ("experiment", &["id", "seeds", "out", "full"]),
    (
        "stimulus",
        &["family", "n", "g", "k", "j0", "j1", "xi0", "xi1", "radial", "nu", "burn_in", "thin"],
    ),
    ("train", &["tau", "steps", "batch_size", "init_variance", "snapshot_stride"]),
    ("flow", &["dt", "steps", "tau", "record_stride", "c"]),
    ("ica", &["components", "max_iter", "tol"]),
];

/// A parsed configuration document.
#[derive(Debug, Clone, Default)]
pub struct ConfigDoc {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

/// Parse the text of a config file.
pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    let mut doc = ConfigDoc::default();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {}: unterminated section header", lineno + 1)))?
                .trim()
                .to_string();
            if !KNOWN.iter().any(|(s, _)| *s == name) {
                return Err(Error::Config(format!("line {}: unknown section [{name}]", lineno + 1)));
            }
            doc.sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let section = current
            .as_ref()
            .ok_or_else(|| Error::Config(format!("line {}: key outside a section", lineno + 1)))?;
        let allowed = KNOWN.iter().find(|(s, _)| s == section).expect("validated").1;
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "line {}: unknown key {key:?} in section [{section}]",
                lineno + 1
            )));
        }
        let entries = doc.sections.get_mut(section).expect("section exists");
        if entries.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key {key:?} in section [{section}]",
                lineno + 1
            )));
        }
    }
    Ok(doc)
}

impl ConfigDoc {
    pub fn is_empty(&self) -> bool {
        self.sections.values().all(|s| s.is_empty())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("[{section}] {key} = {v:?} is not a number")))
            })
            .transpose()
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("[{section}] {key} = {v:?} is not an integer")))
            })
            .transpose()
    }

    pub fn get_bool(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.get(section, key)
            .map(|v| match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::Config(format!("[{section}] {key} = {other:?} is not a bool"))),
            })
            .transpose()
    }

    /// Comma-separated unsigned integers (seed lists).
    pub fn get_u64_list(&self, section: &str, key: &str) -> Result<Option<Vec<u64>>> {
        self.get(section, key)
            .map(|v| {
                v.split(',')
                    .map(|piece| {
                        piece.trim().parse::<u64>().map_err(|_| {
                            Error::Config(format!("[{section}] {key}: {piece:?} is not an integer"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// Canonical text used for config hashing: sorted sections and keys.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for (section, entries) in &self.sections {
            for (k, v) in entries {
                out.push_str(section);
                out.push('.');
                out.push_str(k);
                out.push('=');
                out.push_str(v);
                out.push('\n');
            }
        }
        out
    }
}

/// FNV-1a hash of canonical config text; recorded in every output file.
pub fn config_hash(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
