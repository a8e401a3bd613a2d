//! Self-contained VMAF engine: elementary features (VIF at four scales,
//! detail loss, motion) fused per frame by an RBF support vector regressor.

mod dlm;
mod model;
mod motion;
mod vif;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::media::Clip;
use crate::metrics::{MetricId, MetricScore};
use crate::plane::Plane;

pub use dlm::{db2_highpass, db2_lowpass, dlm, DLM_MIN_SIZE};
pub use model::{parse_model, FeatureNorm, FrameScore, ScoreTransform, VmafModel, MODEL_VERSION};
pub use motion::motion;
pub use vif::vif_scale;

pub const FEATURE_NAMES: [&str; 6] = ["vif_scale0", "vif_scale1", "vif_scale2", "vif_scale3", "dlm", "motion"];

/// Every constant the feature extractors depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub vif_noise_var: f64,
    pub vif_window_sigma: f64,
    pub vif_window_taps: usize,
    pub vif_eps: f64,
    pub vif_scales: usize,
    pub dlm_levels: usize,
    pub dlm_border: usize,
    pub motion_sigma: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            vif_noise_var: 2.0,
            vif_window_sigma: 1.5,
            vif_window_taps: 9,
            vif_eps: 1e-10,
            vif_scales: 4,
            dlm_levels: 4,
            dlm_border: 1,
            motion_sigma: 1.0,
        }
    }
}

impl EngineConfig {
    /// Short stable fingerprint of the engine settings plus a model, for
    /// labelling reports.
    pub fn fingerprint(&self, model: &VmafModel) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(self).expect("config serializes"));
        hasher.update(model.to_json_string().as_bytes());
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A feature value plus whether it fell back to its degenerate-input default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureValue {
    pub value: f64,
    pub degenerate: bool,
}

impl FeatureValue {
    pub fn new(value: f64) -> Self {
        Self {
            value,
            degenerate: false,
        }
    }

    pub fn degenerate(value: f64) -> Self {
        Self {
            value,
            degenerate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub vif_scale0: f64,
    pub vif_scale1: f64,
    pub vif_scale2: f64,
    pub vif_scale3: f64,
    pub dlm: f64,
    pub motion: f64,
}

impl FeatureVector {
    /// Features of an undistorted, static frame.
    pub fn identity() -> Self {
        Self {
            vif_scale0: 1.0,
            vif_scale1: 1.0,
            vif_scale2: 1.0,
            vif_scale3: 1.0,
            dlm: 1.0,
            motion: 0.0,
        }
    }

    /// Values in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.vif_scale0,
            self.vif_scale1,
            self.vif_scale2,
            self.vif_scale3,
            self.dlm,
            self.motion,
        ]
    }

    pub fn vif(&self) -> [f64; 4] {
        [self.vif_scale0, self.vif_scale1, self.vif_scale2, self.vif_scale3]
    }
}

/// Features for one frame pair; `prev_dist` feeds the motion term.
pub fn frame_features(
    reference: &Plane<f64>,
    distorted: &Plane<f64>,
    prev_dist: Option<&Plane<f64>>,
    cfg: &EngineConfig,
) -> Result<FeatureVector> {
    let mut vif = [0.0; 4];
    for (scale, slot) in vif.iter_mut().enumerate().take(cfg.vif_scales) {
        *slot = vif_scale(reference, distorted, scale, cfg)?.value;
    }
    Ok(FeatureVector {
        vif_scale0: vif[0],
        vif_scale1: vif[1],
        vif_scale2: vif[2],
        vif_scale3: vif[3],
        dlm: dlm(reference, distorted, cfg)?.value,
        motion: motion(prev_dist, distorted, cfg)?,
    })
}

/// Per-frame features; motion is measured on the distorted clip.
pub fn extract_features(reference: &Clip, distorted: &Clip, cfg: &EngineConfig) -> Result<Vec<FeatureVector>> {
    reference.check_compatible(distorted)?;
    let refs: Vec<Plane<f64>> = reference.frames().par_iter().map(|f| f.luma().to_f64()).collect();
    let dists: Vec<Plane<f64>> = distorted.frames().par_iter().map(|f| f.luma().to_f64()).collect();
    (0..refs.len())
        .into_par_iter()
        .map(|i| {
            let prev = i.checked_sub(1).map(|p| &dists[p]);
            frame_features(&refs[i], &dists[i], prev, cfg)
        })
        .collect()
}

/// Per-frame model outputs for a clip pair.
pub fn frame_scores(
    reference: &Clip,
    distorted: &Clip,
    model: &VmafModel,
    cfg: &EngineConfig,
) -> Result<Vec<FrameScore>> {
    let features = extract_features(reference, distorted, cfg)?;
    Ok(features.iter().map(|fv| model.frame_score(fv)).collect())
}

/// Pooled VMAF (arithmetic mean of per-frame scores).
pub fn score_clip_pair(
    reference: &Clip,
    distorted: &Clip,
    model: &VmafModel,
    cfg: &EngineConfig,
) -> Result<MetricScore> {
    let per_frame = frame_scores(reference, distorted, model, cfg)?
        .into_iter()
        .map(|s| s.score)
        .collect();
    Ok(MetricScore::from_frames(MetricId::Vmaf, per_frame))
}
