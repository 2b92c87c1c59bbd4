//! Run configuration: a flat `key = value` file, overridden by flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use asborder::events::Transform;
use asborder::ingest::Family;

/// Bad invocation, configuration or input data. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mrt: Vec<PathBuf>,
    pub tables: Vec<PathBuf>,
    pub delegations: Vec<PathBuf>,
    pub asrel: Option<PathBuf>,
    pub siblings: Option<PathBuf>,
    pub asnames: Option<PathBuf>,
    /// Canonical table written by `ingest`; defaults to `<out>/rib.txt`.
    pub rib: Option<PathBuf>,
    pub prune_min_obs: u32,
    pub major_min_prefixes: usize,
    pub coverage_target: f64,
    pub min_vis: usize,
    pub learn_window: usize,
    pub level: f64,
    pub transform: Transform,
    pub family: Family,
    pub strict: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mrt: Vec::new(),
            tables: Vec::new(),
            delegations: Vec::new(),
            asrel: None,
            siblings: None,
            asnames: None,
            rib: None,
            prune_min_obs: 3,
            major_min_prefixes: 5,
            coverage_target: 0.9,
            min_vis: 3,
            learn_window: 7,
            level: 0.95,
            transform: Transform::LogLog,
            family: Family::V4,
            strict: false,
            out: PathBuf::from("out"),
        }
    }
}

pub fn parse_transform(s: &str) -> Result<Transform, String> {
    match s {
        "loglog" | "log" => Ok(Transform::LogLog),
        "identity" | "linear" => Ok(Transform::Identity),
        _ => Err(format!("unknown transform {s:?} (expected loglog or identity)")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("expected a boolean, found {s:?}")),
    }
}

fn num<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse().map_err(|e| format!("{s:?}: {e}"))
}

impl RunConfig {
    pub fn rib_path(&self) -> PathBuf {
        self.rib.clone().unwrap_or_else(|| self.out.join("rib.txt"))
    }

    /// Applies one setting. Relative paths are taken from `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), String> {
        let path = |v: &str| base.join(v.trim());
        let list = |v: &str| -> Vec<PathBuf> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(path).collect()
        };
        match key {
            "mrt" => self.mrt = list(value),
            "tables" => self.tables = list(value),
            "delegations" => self.delegations = list(value),
            "asrel" => self.asrel = Some(path(value)),
            "siblings" => self.siblings = Some(path(value)),
            "asnames" => self.asnames = Some(path(value)),
            "rib" => self.rib = Some(path(value)),
            "out" => self.out = path(value),
            "prune_min_obs" => self.prune_min_obs = num(value)?,
            "major_min_prefixes" => self.major_min_prefixes = num(value)?,
            "coverage_target" => self.coverage_target = num(value)?,
            "min_vis" => self.min_vis = num(value)?,
            "learn_window" => self.learn_window = num(value)?,
            "level" => self.level = num(value)?,
            "transform" => self.transform = parse_transform(value)?,
            "family" => self.family = value.parse().map_err(|e| format!("{e}"))?,
            "strict" => self.strict = parse_bool(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Reads a configuration file. Blank lines and `#` comments are ignored.
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                usage(format!("{}:{}: expected key = value", path.display(), i + 1))
            })?;
            cfg.set(k.trim(), v.trim(), base)
                .map_err(|e| usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.coverage_target > 0.0 && self.coverage_target <= 1.0) {
            return Err(format!("coverage_target {} is outside (0, 1]", self.coverage_target));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(format!("level {} is outside (0, 1)", self.level));
        }
        if self.learn_window == 0 {
            return Err("learn_window must be at least 1".into());
        }
        Ok(())
    }
}

/// Fails with a usage error unless every path exists.
pub fn require_existing<'a>(what: &str, paths: impl IntoIterator<Item = &'a PathBuf>) -> anyhow::Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(usage(format!("{what} {} does not exist", p.display())));
        }
    }
    Ok(())
}
