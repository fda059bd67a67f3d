//! `key=value` experiment configuration.
//!
//! ```text
//! # comment
//! scheme = underlay1
//! cell_type = 3
//! snapshots = 200
//! ```
//!
//! Unknown keys and malformed values are errors. Command-line flags are
//! applied on top of the file through [`Overrides`].

use std::fmt::Write as _;
use std::path::PathBuf;

use d2dsim_core::sim::{SimConfig, DEFAULT_CALIBRATION_SAMPLES, DEFAULT_GAIN_WEIGHT};
use d2dsim_core::{CellType, SchedulerPolicy, SharingScheme};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("`{key}`: invalid value {value:?}, expected {expected}")]
    Value {
        key: &'static str,
        value: String,
        expected: &'static str,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SharingScheme,
    pub cell_type: CellType,
    pub n_cues: usize,
    pub n_pairs: usize,
    pub snapshots: u64,
    pub replications: u64,
    pub seed: u64,
    pub policy: SchedulerPolicy,
    pub out: Option<PathBuf>,
    pub a1: f64,
    pub a2: f64,
    pub boundary_interference: bool,
    pub calibration_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            scheme: sim.scheme,
            cell_type: sim.cell_type,
            n_cues: sim.n_cues,
            n_pairs: sim.n_pairs,
            snapshots: sim.snapshots,
            replications: 1,
            seed: sim.seed,
            policy: sim.policy,
            out: None,
            a1: DEFAULT_GAIN_WEIGHT,
            a2: DEFAULT_GAIN_WEIGHT,
            boundary_interference: sim.boundary_interference,
            calibration_samples: DEFAULT_CALIBRATION_SAMPLES,
        }
    }
}

impl ExperimentConfig {
    /// Simulation settings of replication `rep`; its seed is `seed + rep`.
    pub fn sim_config(&self, rep: u64) -> SimConfig {
        SimConfig {
            scheme: self.scheme,
            cell_type: self.cell_type,
            n_cues: self.n_cues,
            n_pairs: self.n_pairs,
            snapshots: self.snapshots,
            seed: self.seed.wrapping_add(rep),
            policy: self.policy,
            boundary_interference: self.boundary_interference,
            calibration_samples: self.calibration_samples,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let value = |key, value: String, expected| Err(ConfigError::Value { key, value, expected });
        if self.snapshots == 0 {
            return value("snapshots", "0".into(), "an integer >= 1");
        }
        if self.replications == 0 {
            return value("replications", "0".into(), "an integer >= 1");
        }
        if self.n_cues + self.n_pairs == 0 {
            return value("n_pairs", "0".into(), "at least one CUE or pair in total");
        }
        for (key, w) in [("a1", self.a1), ("a2", self.a2)] {
            if !(w >= 0.0 && w.is_finite()) {
                return value(key, w.to_string(), "a finite number >= 0");
            }
        }
        if self.boundary_interference && self.calibration_samples < 100 {
            return value(
                "calibration_samples",
                self.calibration_samples.to_string(),
                "an integer >= 100",
            );
        }
        Ok(())
    }
}

/// Values given on the command line; `None` leaves the file value alone.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub scheme: Option<String>,
    pub cell_type: Option<String>,
    pub n_cues: Option<String>,
    pub n_pairs: Option<String>,
    pub snapshots: Option<String>,
    pub replications: Option<String>,
    pub seed: Option<String>,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 13] = [
    "scheme",
    "cell_type",
    "n_cues",
    "n_pairs",
    "snapshots",
    "replications",
    "seed",
    "policy",
    "out",
    "a1",
    "a2",
    "boundary_interference",
    "calibration_samples",
];

fn set(cfg: &mut ExperimentConfig, key: &str, raw: &str) -> Result<(), ConfigError> {
    fn bad(key: &'static str, raw: &str, expected: &'static str) -> ConfigError {
        ConfigError::Value {
            key,
            value: raw.to_string(),
            expected,
        }
    }
    fn count<T: std::str::FromStr>(key: &'static str, raw: &str, expected: &'static str) -> Result<T, ConfigError> {
        raw.parse().map_err(|_| bad(key, raw, expected))
    }
    match key {
        "scheme" => {
            cfg.scheme =
                SharingScheme::parse(raw).ok_or_else(|| bad("scheme", raw, "overlay, underlay1 or underlay2"))?
        }
        "cell_type" => {
            let id: u8 = count("cell_type", raw, "an integer in 1..=5")?;
            cfg.cell_type = CellType::from_id(id).map_err(|_| bad("cell_type", raw, "an integer in 1..=5"))?;
        }
        "n_cues" => cfg.n_cues = count("n_cues", raw, "an integer >= 0")?,
        "n_pairs" => cfg.n_pairs = count("n_pairs", raw, "an integer >= 0")?,
        "snapshots" => {
            cfg.snapshots = count("snapshots", raw, "an integer >= 1")?;
            if cfg.snapshots == 0 {
                return Err(bad("snapshots", raw, "an integer >= 1"));
            }
        }
        "replications" => {
            cfg.replications = count("replications", raw, "an integer >= 1")?;
            if cfg.replications == 0 {
                return Err(bad("replications", raw, "an integer >= 1"));
            }
        }
        "seed" => cfg.seed = count("seed", raw, "an unsigned 64-bit integer")?,
        "policy" => {
            cfg.policy =
                SchedulerPolicy::parse(raw).ok_or_else(|| bad("policy", raw, "round_robin or proportional_fair"))?
        }
        "out" => cfg.out = if raw.is_empty() { None } else { Some(PathBuf::from(raw)) },
        "a1" | "a2" => {
            let k = if key == "a1" { "a1" } else { "a2" };
            let w: f64 = count(k, raw, "a finite number >= 0")?;
            if !(w >= 0.0 && w.is_finite()) {
                return Err(bad(k, raw, "a finite number >= 0"));
            }
            if k == "a1" {
                cfg.a1 = w;
            } else {
                cfg.a2 = w;
            }
        }
        "boundary_interference" => {
            cfg.boundary_interference = match raw {
                "true" | "1" | "yes" | "on" => true,
                "false" | "0" | "no" | "off" => false,
                _ => return Err(bad("boundary_interference", raw, "true or false")),
            }
        }
        "calibration_samples" => cfg.calibration_samples = count("calibration_samples", raw, "an integer >= 100")?,
        _ => unreachable!("key checked by the caller"),
    }
    Ok(())
}

/// Parses a configuration file body. An empty text gives the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_with_overrides(text, &Overrides::default())
}

pub fn parse_with_overrides(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        seen.push(key.to_string());
        set(&mut cfg, key, value.trim())?;
    }
    let flags = [
        ("scheme", &overrides.scheme),
        ("cell_type", &overrides.cell_type),
        ("n_cues", &overrides.n_cues),
        ("n_pairs", &overrides.n_pairs),
        ("snapshots", &overrides.snapshots),
        ("replications", &overrides.replications),
        ("seed", &overrides.seed),
    ];
    for (key, v) in flags {
        if let Some(v) = v {
            set(&mut cfg, key, v.trim())?;
        }
    }
    if let Some(out) = &overrides.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Configuration file text that parses back to `cfg`.
pub fn to_config_text(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scheme={}", cfg.scheme.as_str());
    let _ = writeln!(s, "cell_type={}", cfg.cell_type.id);
    let _ = writeln!(s, "n_cues={}", cfg.n_cues);
    let _ = writeln!(s, "n_pairs={}", cfg.n_pairs);
    let _ = writeln!(s, "snapshots={}", cfg.snapshots);
    let _ = writeln!(s, "replications={}", cfg.replications);
    let _ = writeln!(s, "seed={}", cfg.seed);
    let _ = writeln!(s, "policy={}", cfg.policy.as_str());
    if let Some(out) = &cfg.out {
        let _ = writeln!(s, "out={}", out.display());
    }
    let _ = writeln!(s, "a1={}", cfg.a1);
    let _ = writeln!(s, "a2={}", cfg.a2);
    let _ = writeln!(s, "boundary_interference={}", cfg.boundary_interference);
    let _ = writeln!(s, "calibration_samples={}", cfg.calibration_samples);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.scheme, SharingScheme::Overlay);
        assert_eq!(cfg.cell_type.id, 1);
        assert_eq!(cfg.policy, SchedulerPolicy::RoundRobin);
        assert_eq!((cfg.a1, cfg.a2), (0.5, 0.5));
        assert_eq!((cfg.n_cues, cfg.n_pairs), (36, 36));
    }

    #[test]
    fn enum_values_parse() {
        let cfg = parse_config("scheme=underlay2\ncell_type=5\n").unwrap();
        assert_eq!(cfg.scheme, SharingScheme::Underlay2);
        assert_eq!(cfg.cell_type.id, 5);
        let cfg = parse_config("  scheme = Underlay1   # trailing comment\n# only a comment\n").unwrap();
        assert_eq!(cfg.scheme, SharingScheme::Underlay1);
    }

    #[test]
    fn zero_snapshots_rejected() {
        let err = parse_config("snapshots=0").unwrap_err();
        assert!(matches!(err, ConfigError::Value { key: "snapshots", .. }));
        assert!(err.to_string().contains(">= 1"));
    }

    #[test]
    fn malformed_input_names_the_key() {
        assert!(matches!(
            parse_config("cell_type=7"),
            Err(ConfigError::Value { key: "cell_type", .. })
        ));
        assert!(matches!(
            parse_config("a1=-1"),
            Err(ConfigError::Value { key: "a1", .. })
        ));
        assert!(matches!(
            parse_config("seed=abc"),
            Err(ConfigError::Value { key: "seed", .. })
        ));
        assert_eq!(
            parse_config("colour=blue"),
            Err(ConfigError::UnknownKey {
                line: 1,
                key: "colour".into()
            })
        );
        assert!(matches!(
            parse_config("snapshots"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("seed=1\nseed=2"),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
        assert!(parse_config("n_cues=0\nn_pairs=0").is_err());
    }

    #[test]
    fn flags_override_file() {
        let o = Overrides {
            scheme: Some("overlay".into()),
            snapshots: Some("10".into()),
            out: Some("x.csv".into()),
            ..Overrides::default()
        };
        let cfg = parse_with_overrides("scheme=underlay1\nsnapshots=50\nseed=9\n", &o).unwrap();
        assert_eq!(cfg.scheme, SharingScheme::Overlay);
        assert_eq!(cfg.snapshots, 10);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.out, Some(PathBuf::from("x.csv")));
        let bad = Overrides {
            replications: Some("0".into()),
            ..Overrides::default()
        };
        assert!(parse_with_overrides("", &bad).is_err());
    }

    #[test]
    fn round_trip() {
        let d = ExperimentConfig::default();
        assert_eq!(parse_config(&to_config_text(&d)).unwrap(), d);
        let c = ExperimentConfig {
            scheme: SharingScheme::Underlay2,
            cell_type: CellType::from_id(4).unwrap(),
            n_pairs: 12,
            replications: 30,
            seed: 123,
            policy: SchedulerPolicy::ProportionalFairness,
            out: Some("run.csv".into()),
            a1: 0.25,
            a2: 0.75,
            boundary_interference: false,
            ..d
        };
        assert_eq!(parse_config(&to_config_text(&c)).unwrap(), c);
    }

    #[test]
    fn replication_seeds_are_consecutive() {
        let c = ExperimentConfig {
            seed: 40,
            ..ExperimentConfig::default()
        };
        assert_eq!(c.sim_config(0).seed, 40);
        assert_eq!(c.sim_config(3).seed, 43);
    }
}
