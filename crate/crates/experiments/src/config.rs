//! Flat `key = value` experiment configuration.
//!
//! Values are kept as raw strings until [`ExperimentConfig::resolve`] fills
//! in per-experiment defaults, so file entries and command-line overrides
//! share one parser.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{config_error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentKind {
    Simulate,
    LocalStationarity,
    Stabilization,
    Coalescence,
    Exponents,
    QueueCheck,
    BoundCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Simulate,
        ExperimentKind::LocalStationarity,
        ExperimentKind::Stabilization,
        ExperimentKind::Coalescence,
        ExperimentKind::Exponents,
        ExperimentKind::QueueCheck,
        ExperimentKind::BoundCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::LocalStationarity => "local-stationarity",
            ExperimentKind::Stabilization => "stabilization",
            ExperimentKind::Coalescence => "coalescence",
            ExperimentKind::Exponents => "exponents",
            ExperimentKind::QueueCheck => "queue-check",
            ExperimentKind::BoundCheck => "bound-check",
        }
    }

    /// Keys this experiment reads besides the common ones.
    fn keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Simulate => &["n", "xi", "rho"],
            ExperimentKind::LocalStationarity => &["n", "c", "r", "rho"],
            ExperimentKind::Stabilization => &["n", "m", "xi", "anchor"],
            ExperimentKind::Coalescence => &["n", "k", "R", "a", "alpha", "xi"],
            ExperimentKind::Exponents => &["n", "l", "r", "c", "xi"],
            ExperimentKind::QueueCheck => &["n", "lambda", "rho"],
            ExperimentKind::BoundCheck => &["n", "m", "r", "rho"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = crate::error::ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| config_error("experiment", format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Density offset for coupled pairs, or a list of plain values for
/// experiments that read `r` as a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Radius {
    /// Offset tied to the box scale: `r = (xi_1 M)^{-1/8} N^{1/12}`.
    Balanced,
    Values(Vec<f64>),
}

const COMMON_KEYS: [&str; 7] = ["experiment", "seed", "reps", "jobs", "out", "format", "budget-seconds"];

/// Unresolved `key -> value` entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped; a key may appear once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(&format!("line {}", i + 1), format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if raw.entries.contains_key(key) {
                return Err(config_error(key, "given twice"));
            }
            raw.set(key, value.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error("config", format!("{}: {e}", path.display())))?;
        RawConfig::parse(&text)
    }

    /// Sets or overrides one entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let known = COMMON_KEYS.contains(&key) || ExperimentKind::ALL.iter().any(|k| k.keys().contains(&key));
        if !known {
            return Err(config_error(key, "unknown key"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub reps: usize,
    pub n: Vec<f64>,
    pub c: Vec<f64>,
    pub m: Vec<f64>,
    pub r: Radius,
    pub k: Vec<f64>,
    pub big_r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub a: Vec<f64>,
    pub l: Vec<usize>,
    pub rho: Option<f64>,
    pub lambda: f64,
    pub xi: (f64, f64),
    pub anchor: f64,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub budget_seconds: Option<u64>,
}

impl ExperimentConfig {
    /// Defaults for `kind`, as used by the acceptance runs.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            experiment: kind,
            seed: 1,
            reps: 400,
            n: vec![2000.0],
            c: vec![],
            m: vec![],
            r: Radius::Values(vec![]),
            k: vec![],
            big_r: vec![],
            alpha: vec![],
            a: vec![],
            l: vec![],
            rho: None,
            lambda: 0.4,
            xi: (0.5, 0.5),
            anchor: 4.0,
            jobs: 0,
            out: None,
            format: OutputFormat::Csv,
            budget_seconds: None,
        };
        match kind {
            ExperimentKind::Simulate => ExperimentConfig {
                reps: 1,
                n: vec![100.0],
                ..base
            },
            ExperimentKind::LocalStationarity => ExperimentConfig {
                c: vec![0.05, 0.1, 0.2, 0.4],
                r: Radius::Balanced,
                rho: Some(0.5),
                ..base
            },
            ExperimentKind::Stabilization => ExperimentConfig {
                m: vec![4.0, 8.0, 16.0, 32.0],
                ..base
            },
            ExperimentKind::Coalescence => ExperimentConfig {
                reps: 2000,
                n: vec![4000.0],
                k: vec![8.0],
                big_r: vec![2.0, 4.0, 8.0, 16.0],
                a: vec![1.0],
                alpha: vec![0.02, 0.04, 0.08, 0.15, 0.3],
                ..base
            },
            ExperimentKind::Exponents => ExperimentConfig {
                reps: 2000,
                n: vec![250.0, 500.0, 1000.0, 2000.0],
                l: vec![50, 100, 200],
                r: Radius::Values(vec![0.5, 1.0, 1.5, 2.0, 3.0]),
                c: vec![0.1],
                ..base
            },
            ExperimentKind::QueueCheck => ExperimentConfig {
                reps: 200,
                n: vec![100_000.0],
                rho: Some(0.6),
                ..base
            },
            ExperimentKind::BoundCheck => ExperimentConfig {
                reps: 2000,
                m: vec![4.0, 16.0, 64.0, 256.0],
                r: Radius::Values(vec![1.0, 2.0]),
                rho: Some(0.5),
                ..base
            },
        }
    }

    /// Resolves raw entries over the defaults of the experiment they name.
    /// Keys that the experiment does not read are rejected.
    pub fn resolve(raw: &RawConfig) -> Result<Self> {
        let kind: ExperimentKind = raw.get("experiment").ok_or_else(|| config_error("experiment", "missing"))?.parse()?;
        let mut cfg = ExperimentConfig::defaults(kind);
        for (key, value) in &raw.entries {
            let key = key.as_str();
            if !COMMON_KEYS.contains(&key) && !kind.keys().contains(&key) {
                return Err(config_error(key, format!("not used by {kind}")));
            }
            match key {
                "experiment" => {}
                "seed" => cfg.seed = parse_scalar(key, value)?,
                "reps" => {
                    cfg.reps = parse_scalar(key, value)?;
                    if cfg.reps == 0 {
                        return Err(config_error(key, "at least one replica is needed"));
                    }
                }
                "jobs" => cfg.jobs = parse_scalar(key, value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => {
                    cfg.format = match value.as_str() {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        _ => return Err(config_error(key, format!("`{value}` is neither csv nor json"))),
                    }
                }
                "budget-seconds" => cfg.budget_seconds = Some(parse_scalar(key, value)?),
                "n" => {
                    cfg.n = parse_grid(key, value)?;
                    if let Some(bad) = cfg.n.iter().find(|n| **n < 1.0) {
                        return Err(config_error(key, format!("{bad} is below 1")));
                    }
                }
                "c" => cfg.c = parse_grid(key, value)?,
                "m" => cfg.m = parse_grid(key, value)?,
                "k" => cfg.k = parse_grid(key, value)?,
                "R" => cfg.big_r = parse_grid(key, value)?,
                "alpha" => cfg.alpha = parse_grid(key, value)?,
                "a" => cfg.a = parse_grid(key, value)?,
                "l" => {
                    cfg.l = parse_grid(key, value)?
                        .into_iter()
                        .map(|x| {
                            if x >= 1.0 && x.fract() == 0.0 {
                                Ok(x as usize)
                            } else {
                                Err(config_error(key, format!("{x} is not a positive integer")))
                            }
                        })
                        .collect::<Result<_>>()?
                }
                "r" => {
                    cfg.r = if value.trim() == "balanced" {
                        Radius::Balanced
                    } else {
                        Radius::Values(parse_grid(key, value)?)
                    }
                }
                "rho" => cfg.rho = Some(parse_scalar(key, value)?),
                "lambda" => cfg.lambda = parse_scalar(key, value)?,
                "xi" => {
                    let v = parse_list(key, value)?;
                    if v.len() != 2 || v.iter().any(|x| !(*x > 0.0)) {
                        return Err(config_error(key, format!("`{value}` is not two positive numbers")));
                    }
                    cfg.xi = (v[0], v[1]);
                }
                "anchor" => {
                    cfg.anchor = parse_scalar(key, value)?;
                    if !(cfg.anchor >= 1.0) {
                        return Err(config_error(key, "must be at least 1"));
                    }
                }
                _ => unreachable!("key set is checked in RawConfig::set"),
            }
        }
        if kind == ExperimentKind::Exponents && cfg.r == Radius::Balanced {
            return Err(config_error("r", "exponents reads r as tail thresholds; give numbers"));
        }
        Ok(cfg)
    }

    /// Grid values of `r`, or an error when the radius is tied to the box.
    pub fn r_values(&self) -> Result<&[f64]> {
        match &self.r {
            Radius::Values(v) => Ok(v),
            Radius::Balanced => Err(config_error("r", "expected numbers, got `balanced`")),
        }
    }

    /// Canonical one-line form of every value that affects the results.
    /// The output path, thread count and format are left out: they change
    /// where and how the table is written, not what it contains.
    pub fn canonical(&self) -> String {
        let mut parts = vec![
            format!("experiment={}", self.experiment),
            format!("seed={}", self.seed),
            format!("reps={}", self.reps),
            format!("budget-seconds={}", self.budget_seconds.map_or("none".to_string(), |b| b.to_string())),
        ];
        for key in self.experiment.keys() {
            let value = match *key {
                "n" => join(&self.n),
                "c" => join(&self.c),
                "m" => join(&self.m),
                "k" => join(&self.k),
                "R" => join(&self.big_r),
                "alpha" => join(&self.alpha),
                "a" => join(&self.a),
                "l" => self.l.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","),
                "r" => match &self.r {
                    Radius::Balanced => "balanced".to_string(),
                    Radius::Values(v) => join(v),
                },
                "rho" => self.rho.map_or("none".to_string(), |r| r.to_string()),
                "lambda" => self.lambda.to_string(),
                "xi" => format!("{},{}", self.xi.0, self.xi.1),
                "anchor" => self.anchor.to_string(),
                _ => unreachable!(),
            };
            parts.push(format!("{key}={value}"));
        }
        parts.join("; ")
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| config_error(key, format!("cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let x: f64 = parse_scalar(key, s)?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(config_error(key, format!("`{s}` is not finite")))
            }
        })
        .collect()
}

/// A comma list, or `start:stop:count` for `count` geometrically spaced
/// values from `start` to `stop`. An empty value is an empty grid.
pub fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>> {
    if !value.contains(':') {
        return parse_list(key, value);
    }
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(config_error(key, format!("`{value}` is not start:stop:count")));
    }
    let start: f64 = parse_scalar(key, parts[0])?;
    let stop: f64 = parse_scalar(key, parts[1])?;
    let count: usize = parse_scalar(key, parts[2])?;
    if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
        return Err(config_error(key, "geometric ranges need positive finite ends"));
    }
    Ok(match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let ratio = (stop / start).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { stop } else { start * (ratio * i as f64).exp() })
                .collect()
        }
    })
}
