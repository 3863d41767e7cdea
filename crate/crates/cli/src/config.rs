//! Run configuration: INI files, flag overrides and the emitted manifest.
//!
//! Layers are merged key by key: built-in defaults, then the `[run]`, `[common]`
//! and `[<command>]` sections of `--config`, then command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use motzkin_core::rational::{parse_rational, to_pq};
use motzkin_core::{BoundaryMeasure, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Exact,
    Sample,
    Limit,
    Verify,
    Converge,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Exact => "exact",
            CommandKind::Sample => "sample",
            CommandKind::Limit => "limit",
            CommandKind::Verify => "verify",
            CommandKind::Converge => "converge",
        }
    }
}

impl FromStr for CommandKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "exact" => Ok(CommandKind::Exact),
            "sample" => Ok(CommandKind::Sample),
            "limit" => Ok(CommandKind::Limit),
            "verify" => Ok(CommandKind::Verify),
            "converge" => Ok(CommandKind::Converge),
            _ => Err(ConfigError::new(format!("unknown command {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ConfigError::new(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Sections = BTreeMap<String, BTreeMap<String, String>>;

/// Parses `[section]` headers and `key = value` lines; `#` and `;` start comment lines.
/// Keys before any header land in the `run` section.
pub fn parse_ini(text: &str) -> Result<Sections, ConfigError> {
    let mut out = Sections::new();
    let mut section = String::from("run");
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(format!("line {}: unterminated section header", i + 1)))?;
            section = name.trim().to_string();
            if section.is_empty() {
                return Err(ConfigError::new(format!("line {}: empty section name", i + 1)));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::new(format!("line {}: empty key", i + 1)));
        }
        let entries = out.entry(section.clone()).or_default();
        if entries.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(ConfigError::new(format!("line {}: duplicate key {key:?} in [{section}]", i + 1)));
        }
    }
    Ok(out)
}

/// Every recognized key; anything else is rejected.
pub const KEYS: &[&str] = &[
    "sigma", "alpha", "beta", "length", "ladder", "k", "rho1", "seed", "samples", "tol", "out",
    "format", "theorem", "certificates", "tightness_level",
];

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// One value for model commands; a grid (possibly empty) for `verify`.
    pub sigma: Vec<Q>,
    pub alpha: BoundaryMeasure,
    pub beta: BoundaryMeasure,
    /// `L` (one entry), the ladder for `converge`, or the maximal lengths for `verify`.
    pub lengths: Vec<usize>,
    pub k: usize,
    /// At most one value for model commands; a ρ grid for `verify`.
    pub rho1: Vec<Q>,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
    pub out: PathBuf,
    pub format: Format,
    pub theorem: String,
    pub certificates: Vec<String>,
    pub tightness_level: usize,
}

fn list<T, F>(key: &str, value: &str, parse: F) -> Result<Vec<T>, ConfigError>
where
    F: Fn(&str) -> Option<T>,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| parse(s.trim()).ok_or_else(|| ConfigError::new(format!("{key}: cannot parse {s:?}"))))
        .collect()
}

fn one<T, F>(key: &str, value: &str, parse: F) -> Result<T, ConfigError>
where
    F: Fn(&str) -> Option<T>,
{
    parse(value.trim()).ok_or_else(|| ConfigError::new(format!("{key}: cannot parse {value:?}")))
}

fn rationals(key: &str, value: &str) -> Result<Vec<Q>, ConfigError> {
    let v = list(key, value, |s| parse_rational(s).ok())?;
    if v.iter().any(|x| x < &Q::from_integer(0.into())) {
        return Err(ConfigError::new(format!("{key} must be >= 0")));
    }
    Ok(v)
}

fn measure(key: &str, value: &str) -> Result<BoundaryMeasure, ConfigError> {
    value
        .parse()
        .map_err(|e| ConfigError::new(format!("{key}: {e} (expected e.g. finite:1,1 or geom:0.5)")))
}

impl RunConfig {
    /// Resolves merged key-value pairs for `command`.
    pub fn resolve(command: CommandKind, kv: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        if let Some(bad) = kv.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(format!("unknown key {bad:?}; known keys: {}", KEYS.join(", "))));
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let model = command != CommandKind::Verify;

        let mut sigma = rationals("sigma", get("sigma").unwrap_or(""))?;
        if model {
            if sigma.is_empty() {
                sigma.push(Q::from_integer(1.into()));
            }
            if sigma.len() != 1 {
                return Err(ConfigError::new(format!("{} takes a single sigma", command.name())));
            }
        }
        let rho1 = rationals("rho1", get("rho1").unwrap_or(""))?;
        if model && rho1.len() > 1 {
            return Err(ConfigError::new(format!("{} takes a single rho1", command.name())));
        }

        let parse_usize = |s: &str| s.parse::<usize>().ok();
        let mut lengths = match (get("length"), get("ladder")) {
            (Some(_), Some(_)) => return Err(ConfigError::new("give either length or ladder, not both")),
            (Some(l), None) => vec![one("length", l, parse_usize)?],
            (None, Some(l)) => list("ladder", l, parse_usize)?,
            (None, None) => Vec::new(),
        };
        if lengths.is_empty() {
            lengths = match command {
                CommandKind::Converge => vec![8, 16, 32, 64],
                CommandKind::Verify => Vec::new(),
                _ => vec![8],
            };
        }
        if model && command != CommandKind::Converge && lengths.len() != 1 {
            return Err(ConfigError::new(format!("{} takes a single length", command.name())));
        }
        if lengths.contains(&0) {
            return Err(ConfigError::new("lengths must be >= 1"));
        }
        if command == CommandKind::Converge && lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::new("ladder lengths must be strictly increasing"));
        }

        let default_k = match command {
            CommandKind::Converge => 1,
            _ => lengths.first().copied().unwrap_or(3).min(3),
        };
        let k = match get("k") {
            Some(v) => one("K", v, parse_usize)?,
            None => default_k,
        };
        let tol = match get("tol") {
            Some(v) if !v.is_empty() => {
                let t = one("tol", v, |s| s.parse::<f64>().ok())?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(ConfigError::new("tol must be a positive number"));
                }
                Some(t)
            }
            _ => None,
        };
        let certificates = list("certificates", get("certificates").unwrap_or(""), |s| Some(s.to_string()))?;

        Ok(Self {
            command,
            sigma,
            alpha: measure("alpha", get("alpha").unwrap_or("finite:1"))?,
            beta: measure("beta", get("beta").unwrap_or("finite:1"))?,
            lengths,
            k,
            rho1,
            seed: one("seed", get("seed").unwrap_or("0"), |s| s.parse().ok())?,
            samples: one("samples", get("samples").unwrap_or("1000"), parse_usize)?,
            tol,
            out: PathBuf::from(get("out").unwrap_or("out")),
            format: get("format").unwrap_or("json").parse()?,
            theorem: get("theorem").unwrap_or("theorem1").to_string(),
            certificates,
            tightness_level: one("tightness_level", get("tightness_level").unwrap_or("10"), parse_usize)?,
        })
    }

    /// Merges config-file sections and flag overrides, then resolves.
    pub fn from_layers(
        command: CommandKind,
        file: Option<&Sections>,
        flags: &BTreeMap<String, String>,
    ) -> Result<Self, ConfigError> {
        let mut kv = BTreeMap::new();
        if let Some(sections) = file {
            for name in ["run", "common", command.name()] {
                if let Some(entries) = sections.get(name) {
                    for (k, v) in entries {
                        if k != "command" {
                            kv.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
        }
        for (k, v) in flags {
            kv.insert(k.clone(), v.clone());
        }
        Self::resolve(command, &kv)
    }

    /// The single model length.
    pub fn length(&self) -> usize {
        self.lengths[0]
    }

    pub fn sigma(&self) -> &Q {
        &self.sigma[0]
    }

    pub fn to_kv(&self) -> BTreeMap<String, String> {
        let join = |v: &[Q]| v.iter().map(to_pq).collect::<Vec<_>>().join(",");
        let mut kv = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            kv.insert(k.to_string(), v);
        };
        put("sigma", join(&self.sigma));
        put("alpha", self.alpha.to_string());
        put("beta", self.beta.to_string());
        let lengths = self.lengths.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        if self.command == CommandKind::Exact || self.command == CommandKind::Sample || self.command == CommandKind::Limit {
            put("length", lengths);
        } else {
            put("ladder", lengths);
        }
        put("k", self.k.to_string());
        put("rho1", join(&self.rho1));
        put("seed", self.seed.to_string());
        put("samples", self.samples.to_string());
        put("tol", self.tol.map(|t| format!("{t:e}")).unwrap_or_default());
        put("out", self.out.display().to_string());
        put("format", self.format.to_string());
        put("theorem", self.theorem.clone());
        put("certificates", self.certificates.join(","));
        put("tightness_level", self.tightness_level.to_string());
        kv
    }

    /// INI text that re-parses to this configuration.
    pub fn manifest(&self) -> String {
        let mut out = format!("[run]\ncommand = {}\n", self.command.name());
        for (k, v) in self.to_kv() {
            out.push_str(format!("{k} = {v}").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn from_manifest(text: &str) -> Result<Self, ConfigError> {
        let sections = parse_ini(text)?;
        let run = sections
            .get("run")
            .ok_or_else(|| ConfigError::new("manifest has no [run] section"))?;
        let command: CommandKind = run
            .get("command")
            .ok_or_else(|| ConfigError::new("manifest has no command"))?
            .parse()?;
        Self::from_layers(command, Some(&sections), &BTreeMap::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ini_basics() {
        let s = parse_ini("# c\nsigma = 1/2\n[exact]\n length= 4 \n; x\n").unwrap();
        assert_eq!(s["run"]["sigma"], "1/2");
        assert_eq!(s["exact"]["length"], "4");
        assert!(parse_ini("[exact\n").is_err());
        assert!(parse_ini("novalue\n").is_err());
        assert!(parse_ini("a = 1\na = 2\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_ini("[common]\nsigma = 0.5\nlength = 4\n[exact]\nlength = 6\n").unwrap();
        let mut flags = BTreeMap::new();
        flags.insert("seed".to_string(), "9".to_string());
        let c = RunConfig::from_layers(CommandKind::Exact, Some(&file), &flags).unwrap();
        assert_eq!(c.sigma(), &Q::new(1.into(), 2.into()));
        assert_eq!(c.length(), 6);
        assert_eq!(c.seed, 9);
        assert_eq!(c.k, 3);
    }

    #[test]
    fn manifest_roundtrip() {
        for command in [CommandKind::Exact, CommandKind::Verify, CommandKind::Converge] {
            let mut kv = BTreeMap::new();
            kv.insert("alpha".to_string(), "geom:0.25".to_string());
            kv.insert("beta".to_string(), "geom:2".to_string());
            kv.insert("tol".to_string(), "1e-9".to_string());
            let c = RunConfig::resolve(command, &kv).unwrap();
            assert_eq!(RunConfig::from_manifest(&c.manifest()).unwrap(), c);
        }
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |k: &str, v: &str| {
            let mut kv = BTreeMap::new();
            kv.insert(k.to_string(), v.to_string());
            RunConfig::resolve(CommandKind::Exact, &kv).is_err()
        };
        assert!(bad("sigma", "-1"));
        assert!(bad("sigma", "1,2"));
        assert!(bad("alpha", "uniform"));
        assert!(bad("length", "0"));
        assert!(bad("format", "xml"));
        assert!(bad("colour", "red"));
        assert!(bad("tol", "-1"));
    }
}
