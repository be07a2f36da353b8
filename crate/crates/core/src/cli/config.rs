//! JSON experiment configuration.

use serde::Deserialize;

use crate::distributions::{Family, Instance};
use crate::estimators::EstimatorKind;
use crate::policies::{PolicyConfig, DEFAULT_ETA, DEFAULT_W_MIN};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    family: String,
    means: Vec<f64>,
    variances: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    kind: String,
    eta: Option<f64>,
    w_min: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    instance: RawInstance,
    #[serde(rename = "T")]
    budget: u64,
    policy: RawPolicy,
    estimator: Option<String>,
    #[serde(rename = "R")]
    replications: Option<u64>,
    seed: Option<u64>,
    grid: Option<Vec<f64>>,
    budgets: Option<Vec<u64>>,
}

pub const DEFAULT_REPLICATIONS: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub instance: Instance<f64>,
    pub budget: u64,
    pub policy: PolicyConfig<f64>,
    pub estimator: EstimatorKind,
    pub replications: u64,
    pub seed: Option<u64>,
    pub grid: Option<Vec<f64>>,
    pub budgets: Option<Vec<u64>>,
}

fn pair<T: Copy>(v: &[T], key: &str) -> Result<[T; 2], ConfigError> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(ConfigError::new(key, format!("expected exactly 2 values, got {}", v.len()))),
    }
}

/// serde_json messages look like "missing field `T` at line 3 column 1".
fn key_from_serde(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("<document>").to_string()
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        ConfigError::new(key_from_serde(&msg), msg)
    })?;

    let means = pair(&raw.instance.means, "instance.means")?;
    let instance = match raw.instance.family.as_str() {
        "gaussian" => {
            let vars = raw
                .instance
                .variances
                .as_deref()
                .ok_or_else(|| ConfigError::new("instance.variances", "required for gaussian arms"))?;
            Instance::gaussian(means, pair(vars, "instance.variances")?)
        }
        "bernoulli" => {
            if raw.instance.variances.is_some() {
                return Err(ConfigError::new(
                    "instance.variances",
                    "bernoulli variances follow from the means and must be omitted",
                ));
            }
            Instance::bernoulli(means)
        }
        other => return Err(ConfigError::new("instance.family", format!("unknown family {other:?}"))),
    }
    .map_err(|e| ConfigError::new("instance", e.to_string()))?;

    let p = &raw.policy;
    let reject = |present: bool, field: &str| {
        if present {
            Err(ConfigError::new(
                format!("policy.{field}"),
                format!("not a parameter of policy {:?}", p.kind),
            ))
        } else {
            Ok(())
        }
    };
    let policy = match p.kind.as_str() {
        "adaptive_neyman" => {
            reject(p.sigma1.is_some(), "sigma1")?;
            reject(p.sigma2.is_some(), "sigma2")?;
            PolicyConfig::adaptive_neyman_clamped(p.eta.unwrap_or(DEFAULT_ETA), p.w_min.unwrap_or(DEFAULT_W_MIN))
        }
        "oracle_neyman" => {
            reject(p.eta.is_some(), "eta")?;
            reject(p.w_min.is_some(), "w_min")?;
            let sd = instance.std_devs();
            PolicyConfig::oracle_neyman(p.sigma1.unwrap_or(sd[0]), p.sigma2.unwrap_or(sd[1]))
        }
        "uniform" => {
            for (present, f) in [
                (p.eta.is_some(), "eta"),
                (p.w_min.is_some(), "w_min"),
                (p.sigma1.is_some(), "sigma1"),
                (p.sigma2.is_some(), "sigma2"),
            ] {
                reject(present, f)?;
            }
            Ok(PolicyConfig::Uniform)
        }
        other => return Err(ConfigError::new("policy.kind", format!("unknown policy {other:?}"))),
    }
    .map_err(|e| match e {
        crate::Error::InvalidParameter { name, reason } => ConfigError::new(format!("policy.{name}"), reason),
        other => ConfigError::new("policy", other.to_string()),
    })?;

    let estimator = match raw.estimator.as_deref() {
        None | Some("aipw") => EstimatorKind::Aipw,
        Some("ipw") => EstimatorKind::Ipw,
        Some("sample_mean") => EstimatorKind::SampleMean,
        Some(other) => return Err(ConfigError::new("estimator", format!("unknown estimator {other:?}"))),
    };

    if raw.budget < 2 {
        return Err(ConfigError::new("T", format!("must be >= 2, got {}", raw.budget)));
    }
    let replications = raw.replications.unwrap_or(DEFAULT_REPLICATIONS);
    if replications < 1 {
        return Err(ConfigError::new("R", "must be >= 1"));
    }
    if let Some(g) = &raw.grid {
        if g.is_empty() || g.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(ConfigError::new("grid", "must be a non-empty list of positive multipliers"));
        }
    }
    if let Some(b) = &raw.budgets {
        if b.is_empty() || b.iter().any(|t| *t < 2) {
            return Err(ConfigError::new("budgets", "must be a non-empty list of budgets >= 2"));
        }
    }

    Ok(Config {
        instance,
        budget: raw.budget,
        policy,
        estimator,
        replications,
        seed: raw.seed,
        grid: raw.grid,
        budgets: raw.budgets,
    })
}

impl Config {
    pub fn family(&self) -> Family {
        self.instance.arm(crate::Arm::One).family()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"instance": {"family": "gaussian", "means": [0.1, 0.0], "variances": [1.0, 1.0]},
        "T": 1000, "policy": {"kind": "adaptive_neyman", "eta": 0.001}, "estimator": "aipw", "R": 500}"#;

    #[test]
    fn parses_example() {
        let c = parse_config(BASE).unwrap();
        assert_eq!(c.budget, 1000);
        assert_eq!(c.replications, 500);
        assert_eq!(c.policy, PolicyConfig::adaptive_neyman(0.001).unwrap());
        assert_eq!(c.estimator, EstimatorKind::Aipw);
    }

    #[test]
    fn bad_eta_names_key() {
        let e = parse_config(&BASE.replace("0.001", "1.5")).unwrap_err();
        assert_eq!(e.key, "policy.eta");
    }

    #[test]
    fn missing_budget() {
        let e = parse_config(&BASE.replace("\"T\": 1000,", "")).unwrap_err();
        assert_eq!(e.key, "T");
    }

    #[test]
    fn unknown_field() {
        let e = parse_config(&BASE.replace("\"R\": 500", "\"R\": 500, \"extra\": 1")).unwrap_err();
        assert_eq!(e.key, "extra");
    }

    #[test]
    fn bernoulli_rejects_variances() {
        let text = r#"{"instance": {"family": "bernoulli", "means": [0.5, 0.4], "variances": [0.25, 0.24]},
            "T": 100, "policy": {"kind": "uniform"}}"#;
        assert_eq!(parse_config(text).unwrap_err().key, "instance.variances");
    }

    #[test]
    fn oracle_defaults_to_true_sigmas() {
        let text = r#"{"instance": {"family": "gaussian", "means": [0.0, 0.0], "variances": [4.0, 1.0]},
            "T": 100, "policy": {"kind": "oracle_neyman"}, "estimator": "sample_mean"}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.policy, PolicyConfig::oracle_neyman(2.0, 1.0).unwrap());
    }

    #[test]
    fn not_an_object() {
        assert!(parse_config("[1, 2]").is_err());
        assert!(parse_config("").is_err());
    }
}
