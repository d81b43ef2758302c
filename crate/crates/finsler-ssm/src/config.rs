//! Run configuration: defaults, a flat `key=value` file layer and command
//! line overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use finsler_ssm_core::PhiModel;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

/// Default tolerance for every named check family.
pub const DEFAULT_TOLERANCES: [(&str, f64); 10] = [
    ("oracle_rel", 1e-9),
    ("identity_rel", 1e-10),
    ("theorem1_rel", 1e-8),
    ("partition_abs", 1e-9),
    ("randers_q", 1e-7),
    ("planar_rel", 1e-8),
    ("landsberg_y_rel", 1e-9),
    ("leg_rel", 1e-8),
    ("theorem2_rel", 1e-6),
    ("fd_rel", 1e-4),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub metric: String,
    pub params: BTreeMap<String, f64>,
    pub dimension: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// Minimum of `λ_min(g) / ‖g‖` accepted by the sampler.
    pub domain_margin: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metric: "euclidean".into(),
            params: BTreeMap::new(),
            dimension: 3,
            sample_count: 100,
            seed: 0,
            domain_margin: 1e-6,
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            output_path: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
    })
}

/// Splits `k=v`, trimming both sides.
pub fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    (!k.is_empty()).then_some((k, v.trim()))
}

impl RunConfig {
    /// Applies one setting. Keys: `metric`, `n`, `samples`, `seed`,
    /// `domain_margin`, `out`, `param.<name>`, `tol.<name>`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if let Some(name) = key.strip_prefix("param.") {
            self.params.insert(name.into(), parse_num(key, value)?);
            return Ok(());
        }
        if let Some(name) = key.strip_prefix("tol.") {
            return self.set_tolerance(name, parse_num(key, value)?);
        }
        match key {
            "metric" => self.metric = value.into(),
            "n" | "dimension" => self.dimension = parse_num(key, value)?,
            "samples" => self.sample_count = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "domain_margin" => self.domain_margin = parse_num(key, value)?,
            "out" => self.output_path = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        let name = name.replace('-', "_");
        match self.tolerances.get_mut(&name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(ConfigError::UnknownTolerance(name)),
        }
    }

    /// Applies a flat `key=value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_pair(line).ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                msg: "expected key=value".into(),
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        self.apply_file_text(&text)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn model(&self) -> Result<PhiModel, ConfigError> {
        PhiModel::from_name(&self.metric, &self.params).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sample_count < 1 {
            return Err(ConfigError::Invalid("samples must be at least 1".into()));
        }
        if self.dimension < 2 {
            return Err(ConfigError::Invalid("n must be at least 2".into()));
        }
        if !(self.domain_margin >= 0.0 && self.domain_margin < 1.0) {
            return Err(ConfigError::Invalid("domain_margin must lie in [0, 1)".into()));
        }
        if let Some((k, _)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(ConfigError::Invalid(format!(
                "tolerance `{k}` must be positive and finite"
            )));
        }
        self.model()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = RunConfig::default();
        c.apply_file_text("metric = shen\n# comment\nparam.a=0.2\nsamples=5\ntol.theorem2_rel=1e-5\n")
            .unwrap();
        c.set("samples", "9").unwrap();
        assert_eq!(c.metric, "shen");
        assert_eq!(c.params["a"], 0.2);
        assert_eq!(c.sample_count, 9);
        assert_eq!(c.tolerance("theorem2_rel"), 1e-5);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(matches!(
            c.apply_file_text("nonsense"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert_eq!(c.set("colour", "red"), Err(ConfigError::UnknownKey("colour".into())));
        assert!(matches!(c.set("seed", "-1"), Err(ConfigError::InvalidValue { .. })));
        assert_eq!(
            c.set_tolerance("bogus", 1.0),
            Err(ConfigError::UnknownTolerance("bogus".into()))
        );
        c.sample_count = 0;
        assert!(c.validate().is_err());
        c.sample_count = 1;
        c.set_tolerance("fd-rel", -1.0).unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig {
            metric: "hyperbolic".into(),
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
