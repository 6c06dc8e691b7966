//! Sweep configuration files and K-list parsing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Experiment;
use crate::error::{HosError, Result};

/// Parses a K list: comma-separated items, each either a single value or an
/// inclusive range `start:stop[:step]` (step defaults to 1).
///
/// `"5,20:30:5"` gives `[5, 20, 25, 30]`.
pub fn parse_k_list(text: &str) -> Result<Vec<usize>> {
    let bad = |item: &str| HosError::InvalidConfig(format!("cannot parse K item {item:?}"));
    let mut ks = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        let nums: Vec<usize> =
            parts.iter().map(|p| p.parse::<usize>().map_err(|_| bad(item))).collect::<Result<_>>()?;
        match nums.as_slice() {
            [k] => ks.push(*k),
            [start, stop] => ks.extend(*start..=*stop),
            [start, stop, step] if *step > 0 => ks.extend((*start..=*stop).step_by(*step)),
            _ => return Err(bad(item)),
        }
    }
    if ks.is_empty() {
        return Err(HosError::InvalidConfig(format!("K list {text:?} is empty")));
    }
    Ok(ks)
}

/// A K list in a config file: either a list of integers or a string in the
/// [`parse_k_list`] syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    List(Vec<usize>),
    Text(String),
}

impl KSpec {
    pub fn resolve(&self) -> Result<Vec<usize>> {
        match self {
            KSpec::List(ks) => Ok(ks.clone()),
            KSpec::Text(text) => parse_k_list(text),
        }
    }
}

/// Key-value sweep configuration mirroring the `sweep` flags. Read as JSON
/// when the file ends in `.json`, TOML otherwise.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub experiment: Option<Experiment>,
    pub q: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<KSpec>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub max_iters: Option<usize>,
    pub threshold: Option<f64>,
    pub serial: Option<bool>,
    pub out: Option<PathBuf>,
}

impl SweepFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HosError::Io { path: path.to_path_buf(), source })?;
        let format_err = |message: String| HosError::Format { path: path.to_path_buf(), message };
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| format_err(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| format_err(e.to_string()))
        }
    }
}
