//! RBF-kernel support vector regression model: file format and inference.
//!
//! Model files are JSON documents:
//!
//! ```json
//! {
//!   "version": "lab-vmaf-svr/1",
//!   "feature_names": ["vif_scale0", "...", "motion"],
//!   "norm": [{"slope": 2.0, "intercept": -1.0, "clip_low": null, "clip_high": null}],
//!   "gamma": 0.5,
//!   "bias": 0.1,
//!   "support_vectors": [[0.0, 0.0]],
//!   "dual_coefs": [1.0],
//!   "score_slope": 50.0,
//!   "score_intercept": 50.0,
//!   "score_clip": [0.0, 100.0],
//!   "score_transform": null
//! }
//! ```
//!
//! `norm` has one entry per feature. The SVR output lives in normalized score
//! space and is mapped back with `score_slope`/`score_intercept`, then through
//! the optional affine `score_transform`, then clamped to `score_clip`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vmaf::{FeatureVector, FEATURE_NAMES};

pub const MODEL_VERSION: &str = "lab-vmaf-svr/1";

const BUNDLED_MODEL: &str = include_str!("../../models/lab_vmaf_v1.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureNorm {
    pub slope: f64,
    pub intercept: f64,
    #[serde(default)]
    pub clip_low: Option<f64>,
    #[serde(default)]
    pub clip_high: Option<f64>,
}

impl FeatureNorm {
    pub fn identity() -> Self {
        Self {
            slope: 1.0,
            intercept: 0.0,
            clip_low: None,
            clip_high: None,
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        let mut v = self.slope * x + self.intercept;
        if let Some(lo) = self.clip_low {
            v = v.max(lo);
        }
        if let Some(hi) = self.clip_high {
            v = v.min(hi);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreTransform {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: String,
    feature_names: Vec<String>,
    norm: Vec<FeatureNorm>,
    gamma: f64,
    bias: f64,
    support_vectors: Vec<Vec<f64>>,
    dual_coefs: Vec<f64>,
    score_slope: f64,
    score_intercept: f64,
    score_clip: [f64; 2],
    #[serde(default)]
    score_transform: Option<ScoreTransform>,
}

/// Parsed, validated regression model. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct VmafModel {
    file: ModelFile,
    feature_index: Vec<usize>,
}

/// One frame's regression output before and after score mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub raw_svr: f64,
    pub score: f64,
}

impl VmafModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        feature_names: Vec<String>,
        norm: Vec<FeatureNorm>,
        gamma: f64,
        bias: f64,
        support_vectors: Vec<Vec<f64>>,
        dual_coefs: Vec<f64>,
        score_slope: f64,
        score_intercept: f64,
        score_transform: Option<ScoreTransform>,
    ) -> Result<Self> {
        Self::from_file(ModelFile {
            version: MODEL_VERSION.to_owned(),
            feature_names,
            norm,
            gamma,
            bias,
            support_vectors,
            dual_coefs,
            score_slope,
            score_intercept,
            score_clip: [0.0, 100.0],
            score_transform,
        })
    }

    fn from_file(file: ModelFile) -> Result<Self> {
        if file.version != MODEL_VERSION {
            return Err(Error::Schema(format!(
                "unsupported model version {:?} (expected {MODEL_VERSION:?})",
                file.version
            )));
        }
        let feature_index = file
            .feature_names
            .iter()
            .map(|name| {
                FEATURE_NAMES
                    .iter()
                    .position(|known| known == name)
                    .ok_or_else(|| Error::Schema(format!("unknown feature {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let n_features = file.feature_names.len();
        if n_features == 0 {
            return Err(Error::Schema("model lists no features".into()));
        }
        if file.norm.len() != n_features {
            return Err(Error::Schema(format!(
                "{} norm entries for {n_features} features",
                file.norm.len()
            )));
        }
        if file.support_vectors.is_empty() {
            return Err(Error::Schema("model has no support vectors".into()));
        }
        if file.dual_coefs.len() != file.support_vectors.len() {
            return Err(Error::Schema(format!(
                "{} dual coefficients for {} support vectors",
                file.dual_coefs.len(),
                file.support_vectors.len()
            )));
        }
        if let Some((i, sv)) = file
            .support_vectors
            .iter()
            .enumerate()
            .find(|(_, sv)| sv.len() != n_features)
        {
            return Err(Error::Schema(format!(
                "support vector {i} has {} entries, expected {n_features}",
                sv.len()
            )));
        }
        if !(file.gamma > 0.0 && file.gamma.is_finite()) {
            return Err(Error::Schema(format!("gamma must be positive, got {}", file.gamma)));
        }
        let [lo, hi] = file.score_clip;
        if !(0.0..=100.0).contains(&lo) || !(0.0..=100.0).contains(&hi) || lo >= hi {
            return Err(Error::Schema(format!(
                "score_clip [{lo}, {hi}] must be an increasing range within [0, 100]"
            )));
        }
        Ok(Self { file, feature_index })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("malformed model file: {e}")))?;
        Self::from_file(file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("model serializes")
    }

    /// The regression model shipped with this crate.
    pub fn bundled() -> Self {
        Self::from_json_str(BUNDLED_MODEL).expect("bundled model is valid")
    }

    pub fn bundled_json() -> &'static str {
        BUNDLED_MODEL
    }

    pub fn feature_names(&self) -> &[String] {
        &self.file.feature_names
    }

    pub fn n_features(&self) -> usize {
        self.file.feature_names.len()
    }

    pub fn n_support_vectors(&self) -> usize {
        self.file.support_vectors.len()
    }

    pub fn gamma(&self) -> f64 {
        self.file.gamma
    }

    pub fn bias(&self) -> f64 {
        self.file.bias
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.file.support_vectors
    }

    pub fn dual_coefs(&self) -> &[f64] {
        &self.file.dual_coefs
    }

    pub fn score_clip(&self) -> [f64; 2] {
        self.file.score_clip
    }

    /// Scales and clips each model feature, in `feature_names` order.
    pub fn normalize_features(&self, fv: &FeatureVector) -> Vec<f64> {
        let values = fv.to_array();
        self.feature_index
            .iter()
            .zip(&self.file.norm)
            .map(|(&i, norm)| norm.apply(values[i]))
            .collect()
    }

    /// `Σ αᵢ·exp(−γ‖x − svᵢ‖²) + b`.
    pub fn svr_predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n_features());
        let gamma = self.file.gamma;
        self.file
            .support_vectors
            .iter()
            .zip(&self.file.dual_coefs)
            .map(|(sv, coef)| {
                let dist2: f64 = sv.iter().zip(x).map(|(s, v)| (s - v) * (s - v)).sum();
                coef * (-gamma * dist2).exp()
            })
            .sum::<f64>()
            + self.file.bias
    }

    /// Maps a raw regression output onto the clamped score scale.
    pub fn map_score(&self, raw_svr: f64) -> f64 {
        let mut score = self.file.score_slope * raw_svr + self.file.score_intercept;
        if let Some(t) = self.file.score_transform {
            score = t.a * score + t.b;
        }
        let [lo, hi] = self.file.score_clip;
        if score.is_nan() {
            return lo;
        }
        score.clamp(lo, hi)
    }

    pub fn frame_score(&self, fv: &FeatureVector) -> FrameScore {
        let raw_svr = self.svr_predict(&self.normalize_features(fv));
        FrameScore {
            raw_svr,
            score: self.map_score(raw_svr),
        }
    }
}

pub fn parse_model(path: impl AsRef<Path>) -> Result<VmafModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    VmafModel::from_json_str(&text)
}
