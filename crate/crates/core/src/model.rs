//! Versioned JSON model files.
//!
//! A file stores the trained learner together with the z-score parameters that
//! were fitted on its training split, the label mapping and where it came
//! from. Floats are written in shortest round-trip form, so loading a file
//! gives back bit-identical weights.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baseline::{predict_fnn, FnnModel, PcaTransform};
use crate::dataset::NormParams;
use crate::ecnn::CascadeNetwork;
use crate::error::{Error, Result};
use crate::gmdh::PolyNetwork;
use crate::lmdt::{wta_classify, LinearMachine, PairwiseTree};
use crate::ruletree::{classify_rule, RuleTree};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnnPayload {
    pub network: FnnModel,
    /// Optional projection applied after normalisation.
    pub pca: Option<PcaTransform>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "payload", rename_all = "kebab-case")]
pub enum Learner {
    Ecnn(CascadeNetwork),
    GmdhLayered(PolyNetwork),
    GmdhRoulette(PolyNetwork),
    Lm(LinearMachine),
    PairwiseDt(PairwiseTree),
    Ruletree(RuleTree),
    Fnn(FnnPayload),
}

impl Learner {
    pub fn method(&self) -> &'static str {
        match self {
            Learner::Ecnn(_) => "ecnn",
            Learner::GmdhLayered(_) => "gmdh-layered",
            Learner::GmdhRoulette(_) => "gmdh-roulette",
            Learner::Lm(_) => "lm",
            Learner::PairwiseDt(_) => "pairwise-dt",
            Learner::Ruletree(_) => "ruletree",
            Learner::Fnn(_) => "fnn",
        }
    }

    /// Class and a method-specific score for an already normalised row.
    pub fn predict(&self, x: &[f64]) -> Result<(usize, f64)> {
        match self {
            Learner::Ecnn(net) => net.predict(x),
            Learner::GmdhLayered(net) | Learner::GmdhRoulette(net) => net.predict(x),
            Learner::Lm(lm) => {
                let class = wta_classify(lm, x)?;
                Ok((class, lm.discriminants(x)?[class]))
            }
            Learner::PairwiseDt(tree) => {
                let (g, class) = tree.scores(x)?;
                Ok((class, g[class]))
            }
            Learner::Ruletree(tree) => {
                let class = classify_rule(tree, x)?;
                Ok((class, class as f64))
            }
            Learner::Fnn(p) => match &p.pca {
                Some(pca) => predict_fnn(&p.network, &pca.transform_row(x)?),
                None => predict_fnn(&p.network, x),
            },
        }
    }

    /// Input columns the model actually reads, ascending.
    pub fn selected_features(&self, m: usize) -> Vec<usize> {
        match self {
            Learner::Ecnn(net) => net.selected_features(),
            Learner::GmdhLayered(net) | Learner::GmdhRoulette(net) => net.selected_features(),
            Learner::PairwiseDt(tree) => {
                let mut f: Vec<usize> = tree.tests.iter().flat_map(|p| p.test.features.clone()).collect();
                f.sort_unstable();
                f.dedup();
                f
            }
            Learner::Lm(_) | Learner::Ruletree(_) | Learner::Fnn(_) => (0..m).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub split: String,
    /// SHA-256 of the raw training file contents as parsed.
    pub dataset_fingerprint: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    #[serde(flatten)]
    pub learner: Learner,
    pub label_column: String,
    pub feature_names: Vec<String>,
    /// `class_names[k]` is the raw label of class `k`.
    pub class_names: Vec<String>,
    pub normalization: NormParams,
    pub provenance: Provenance,
}

impl ModelFile {
    /// Normalises a raw row with the stored parameters and predicts.
    pub fn predict_raw(&self, x: &[f64]) -> Result<(usize, f64)> {
        self.learner.predict(&self.normalization.apply_row(x)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::ModelFormat(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        match probe.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => return Err(Error::ModelFormat(format!("unsupported format_version {v}"))),
            None => return Err(Error::ModelFormat("missing format_version".into())),
        }
        serde_json::from_value(probe).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmdt::LinearMachine;

    fn sample() -> ModelFile {
        ModelFile {
            format_version: FORMAT_VERSION,
            learner: Learner::Lm(
                LinearMachine::from_weights(vec![vec![0.1, 1.0 / 3.0], vec![-0.1, -2.0f64.sqrt()]]).unwrap(),
            ),
            label_column: "y".into(),
            feature_names: vec!["x1".into()],
            class_names: vec!["a".into(), "b".into()],
            normalization: NormParams {
                mean: vec![0.7],
                sd: vec![1.0 / 7.0],
            },
            provenance: Provenance {
                seed: 3,
                split: "2/3:1/3".into(),
                dataset_fingerprint: "00".into(),
                config: serde_json::json!({"epochs": null}),
            },
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = sample();
        let text = m.to_json().unwrap();
        assert!(text.contains("\"method\": \"lm\""));
        let back = ModelFile::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn rejects_other_versions() {
        let text = sample().to_json().unwrap().replace("\"format_version\": 1", "\"format_version\": 99");
        assert!(matches!(ModelFile::from_json(&text), Err(Error::ModelFormat(_))));
        assert!(ModelFile::from_json("{}").is_err());
        assert!(ModelFile::from_json("not json").is_err());
    }

    #[test]
    fn raw_prediction_normalises() {
        let m = sample();
        let raw = [1.0];
        let z = (1.0 - 0.7) * 7.0;
        assert_eq!(m.predict_raw(&raw).unwrap(), m.learner.predict(&[z]).unwrap());
    }
}
