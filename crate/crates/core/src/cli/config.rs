//! JSON model configuration.
//!
//! ```json
//! {
//!   "signal": { "nominal": 1.0, "responses": { "sig_eff": { "kind": "log_normal", "kappa": 1.2 } } },
//!   "backgrounds": [
//!     { "name": "ttbar", "nominal": 1.5, "responses": { "bkg_norm": { "kind": "linear", "delta": 0.1 } } }
//!   ],
//!   "nuisances": [
//!     { "name": "sig_eff", "prior": { "kind": "standard_normal" } },
//!     { "name": "bkg_norm", "prior": { "kind": "normal", "mean": 0.0, "sd": 1.0 } }
//!   ],
//!   "correlation": [[1.0, 0.2], [0.2, 1.0]],
//!   "n_obs": 3
//! }
//! ```
//!
//! Unknown keys are rejected anywhere in the document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{ConstraintPrior, CountingModel, ModelBuilder, ResponseFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub signal: SignalConfig,
    #[serde(default)]
    pub backgrounds: Vec<BackgroundConfig>,
    #[serde(default)]
    pub nuisances: Vec<NuisanceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<Vec<Vec<f64>>>,
    pub n_obs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub nominal: f64,
    #[serde(default)]
    pub responses: BTreeMap<String, ResponseConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundConfig {
    pub name: String,
    pub nominal: f64,
    #[serde(default)]
    pub responses: BTreeMap<String, ResponseConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuisanceConfig {
    pub name: String,
    pub prior: PriorConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorConfig {
    StandardNormal,
    Normal { mean: f64, sd: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ResponseConfig {
    Identity,
    LogNormal { kappa: f64 },
    Linear { delta: f64 },
}

impl From<PriorConfig> for ConstraintPrior<f64> {
    fn from(p: PriorConfig) -> Self {
        match p {
            PriorConfig::StandardNormal => ConstraintPrior::StandardNormal,
            PriorConfig::Normal { mean, sd } => ConstraintPrior::Normal { mean, sd },
            PriorConfig::LogNormal { mu, sigma } => ConstraintPrior::LogNormal { mu, sigma },
        }
    }
}

impl From<ConstraintPrior<f64>> for PriorConfig {
    fn from(p: ConstraintPrior<f64>) -> Self {
        match p {
            ConstraintPrior::StandardNormal => PriorConfig::StandardNormal,
            ConstraintPrior::Normal { mean, sd } => PriorConfig::Normal { mean, sd },
            ConstraintPrior::LogNormal { mu, sigma } => PriorConfig::LogNormal { mu, sigma },
        }
    }
}

impl From<ResponseConfig> for ResponseFunction<f64> {
    fn from(r: ResponseConfig) -> Self {
        match r {
            ResponseConfig::Identity => ResponseFunction::Identity,
            ResponseConfig::LogNormal { kappa } => ResponseFunction::LogNormal { kappa },
            ResponseConfig::Linear { delta } => ResponseFunction::Linear { delta },
        }
    }
}

impl From<ResponseFunction<f64>> for ResponseConfig {
    fn from(r: ResponseFunction<f64>) -> Self {
        match r {
            ResponseFunction::Identity => ResponseConfig::Identity,
            ResponseFunction::LogNormal { kappa } => ResponseConfig::LogNormal { kappa },
            ResponseFunction::Linear { delta } => ResponseConfig::Linear { delta },
        }
    }
}

/// Parses a configuration, reporting the JSON path of the first error.
pub fn parse_config(text: &str) -> Result<ModelConfig, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        if path == "." {
            format!("config: {inner}")
        } else {
            format!("config at `{path}`: {inner}")
        }
    })
}

impl ModelConfig {
    pub fn to_model(&self) -> crate::Result<CountingModel<f64>> {
        let mut builder: ModelBuilder<f64> = CountingModel::builder(self.signal.nominal, self.n_obs);
        for n in &self.nuisances {
            builder = builder.nuisance(n.name.clone(), n.prior.into());
        }
        for (name, r) in &self.signal.responses {
            builder = builder.signal_response(name.clone(), (*r).into());
        }
        for b in &self.backgrounds {
            builder = builder.background_with(
                b.name.clone(),
                b.nominal,
                b.responses.iter().map(|(n, r)| (n.clone(), ResponseFunction::from(*r))),
            );
        }
        if let Some(matrix) = &self.correlation {
            builder = builder.correlation(matrix.clone());
        }
        builder.build()
    }

    pub fn from_model(model: &CountingModel<f64>) -> Self {
        let sys = model.systematics();
        let names = |responses: &[(usize, ResponseFunction<f64>)]| {
            responses
                .iter()
                .map(|&(j, r)| (sys.nuisances()[j].name.clone(), ResponseConfig::from(r)))
                .collect::<BTreeMap<_, _>>()
        };
        ModelConfig {
            signal: SignalConfig {
                nominal: model.s_nom(),
                responses: names(sys.signal_responses()),
            },
            backgrounds: model
                .backgrounds()
                .iter()
                .map(|b| BackgroundConfig {
                    name: b.name().to_string(),
                    nominal: b.nominal(),
                    responses: names(b.responses()),
                })
                .collect(),
            nuisances: sys
                .nuisances()
                .iter()
                .map(|n| NuisanceConfig {
                    name: n.name.clone(),
                    prior: n.prior.into(),
                })
                .collect(),
            correlation: sys.correlation().map(|c| c.matrix().to_vec()),
            n_obs: model.n_obs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "signal": { "nominal": 1.0, "responses": { "eff": { "kind": "log_normal", "kappa": 1.2 } } },
        "backgrounds": [
            { "name": "a", "nominal": 1.5, "responses": { "norm": { "kind": "linear", "delta": 0.1 } } },
            { "name": "b", "nominal": 0.5 }
        ],
        "nuisances": [
            { "name": "eff", "prior": { "kind": "standard_normal" } },
            { "name": "norm", "prior": { "kind": "normal", "mean": 0.0, "sd": 1.0 } },
            { "name": "shape", "prior": { "kind": "log_normal", "mu": 0.0, "sigma": 0.1 } }
        ],
        "correlation": [[1.0, 0.2], [0.2, 1.0]],
        "n_obs": 3
    }"#;

    #[test]
    fn parses_full_schema() {
        let cfg = parse_config(FULL).unwrap();
        let model = cfg.to_model().unwrap();
        assert_eq!(model.n_nuisances(), 3);
        assert_eq!(model.backgrounds().len(), 2);
        assert!(model.signal_uncertain());
        assert_eq!(ModelConfig::from_model(&model), cfg);
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let err = parse_config(r#"{"signall": {"nominal": 1.0}, "n_obs": 0}"#).unwrap_err();
        assert!(err.contains("signall"), "{err}");

        let err = parse_config(
            r#"{"signal": {"nominal": 1.0}, "backgrounds": [{"name": "a", "nominal": 1.0, "respnses": {}}], "n_obs": 0}"#,
        )
        .unwrap_err();
        assert!(err.contains("backgrounds[0]") && err.contains("respnses"), "{err}");

        let err = parse_config(
            r#"{"signal": {"nominal": 1.0}, "nuisances": [{"name": "x", "prior": {"kind": "normal", "mean": 0, "sd": 1, "width": 2}}], "n_obs": 0}"#,
        )
        .unwrap_err();
        assert!(err.contains("nuisances[0].prior") && err.contains("width"), "{err}");
    }

    #[test]
    fn missing_and_mistyped_fields() {
        assert!(parse_config(r#"{"signal": {"nominal": 1.0}}"#)
            .unwrap_err()
            .contains("n_obs"));
        assert!(parse_config(r#"{"signal": {"nominal": 1.0}, "n_obs": -1}"#).is_err());
        assert!(
            parse_config(r#"{"signal": {"nominal": 1.0, "responses": {"x": {"kind": "cubic"}}}, "n_obs": 1}"#).is_err()
        );
    }
}
