//! Study orchestration: baseline, parameter search, optional external
//! encoding, and report artifacts.

mod compare;
mod encode;
mod report;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::enhance::{apply_transform, TransformFamily, TransformParams, DEFAULT_KERNEL_SIZE};
use crate::error::{Error, Result};
use crate::media::{load_clip, Clip};
use crate::metrics::{psnr_clip, ssim_clip};
use crate::nsga2::{evolve, fast_nondominated_sort, memo_key, Bounds, EvolveConfig};
use crate::vmaf::{parse_model, score_clip_pair, EngineConfig, VmafModel, MODEL_VERSION};

pub use compare::{
    checkerboard, emit_checkerboard, emit_histogram, histogram_csv, luma_histogram, render_histogram_svg,
};
pub use encode::{encode_external, parse_template};
pub use report::{
    emit_csv, emit_front_csv, emit_scatter, fixed6, parse_csv, render_scatter, scatter_points, CsvRow, ScatterPoint,
    CSV_HEADER,
};

/// Artifact names inside the output directory.
pub const REPORT_CSV: &str = "report.csv";
pub const FRONT_CSV: &str = "front.csv";
pub const SCATTER_SVG: &str = "scatter.svg";
pub const CONFIG_ECHO: &str = "config.echo";
pub const TIMING_CSV: &str = "timing.csv";

/// NSGA-II settings. The defaults are this tool's choice; none of them is
/// taken from a published configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// `None` means 1 / number of genes.
    pub mutation_prob: Option<f64>,
    pub eta_c: f64,
    pub eta_m: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let d = EvolveConfig::default();
        Self {
            pop_size: d.pop_size,
            generations: d.generations,
            crossover_prob: d.crossover_prob,
            mutation_prob: d.mutation_prob,
            eta_c: d.eta_c,
            eta_m: d.eta_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ref_path: PathBuf,
    pub transform_family: TransformFamily,
    /// `None` selects the bundled model.
    pub model_path: Option<PathBuf>,
    pub encoder_cmd: Option<String>,
    pub decoder_cmd: Option<String>,
    /// Bits per second, substituted for `{bitrate}`.
    pub target_bitrate: Option<u64>,
    pub optimizer: OptimizerSettings,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Evaluate every k-th frame only.
    pub subsample: usize,
    /// Tiles per dimension for histeq (not searched).
    pub kernel_size: usize,
    /// Overrides the family's default search box.
    pub bounds: Option<Vec<(f64, f64)>>,
}

/// Default search box per family: unsharp (radius, amount), histeq
/// (clip_limit).
pub fn default_bounds(family: TransformFamily) -> Vec<(f64, f64)> {
    match family {
        TransformFamily::Unsharp => vec![(0.5, 10.0), (0.0, 1.0)],
        TransformFamily::Histeq => vec![(0.001, 0.05)],
    }
}

fn gene_names(family: TransformFamily) -> &'static [&'static str] {
    match family {
        TransformFamily::Unsharp => &["radius", "amount"],
        TransformFamily::Histeq => &["clip_limit"],
    }
}

impl RunConfig {
    pub fn new(ref_path: impl Into<PathBuf>, family: TransformFamily, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            ref_path: ref_path.into(),
            transform_family: family,
            model_path: None,
            encoder_cmd: None,
            decoder_cmd: None,
            target_bitrate: None,
            optimizer: OptimizerSettings::default(),
            output_dir: output_dir.into(),
            seed: 0,
            subsample: 1,
            kernel_size: DEFAULT_KERNEL_SIZE,
            bounds: None,
        }
    }

    pub fn encoding_enabled(&self) -> bool {
        self.encoder_cmd.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.encoder_cmd, self.target_bitrate) {
            (Some(_), None) => return Err(Error::Config("an encoder command needs a target bitrate".into())),
            (None, Some(_)) => return Err(Error::Config("a target bitrate needs an encoder command".into())),
            (Some(tpl), Some(rate)) => {
                parse_template(tpl, &["{input}", "{output}"])?;
                if rate == 0 {
                    return Err(Error::Config("target bitrate must be positive".into()));
                }
            }
            (None, None) => {}
        }
        if let Some(tpl) = &self.decoder_cmd {
            if self.encoder_cmd.is_none() {
                return Err(Error::Config("a decoder command needs an encoder command".into()));
            }
            parse_template(tpl, &["{input}", "{output}"])?;
        }
        if self.subsample == 0 {
            return Err(Error::Config("subsample step must be at least 1".into()));
        }
        if self.kernel_size == 0 {
            return Err(Error::Config("histeq kernel_size must be at least 1".into()));
        }
        let bounds = self.search_bounds()?;
        let low: Vec<f64> = bounds.genes().iter().map(|g| g.low).collect();
        let high: Vec<f64> = bounds.genes().iter().map(|g| g.high).collect();
        self.params_from_genes(&low).validate()?;
        self.params_from_genes(&high).validate()?;
        self.evolve_config(bounds.len()).validate()
    }

    pub fn search_bounds(&self) -> Result<Bounds> {
        let genes = self
            .bounds
            .clone()
            .unwrap_or_else(|| default_bounds(self.transform_family));
        let expected = gene_names(self.transform_family).len();
        if genes.len() != expected {
            return Err(Error::Config(format!(
                "{} search takes {expected} bound pair(s), got {}",
                self.transform_family,
                genes.len()
            )));
        }
        Bounds::new(genes)
    }

    pub fn params_from_genes(&self, genes: &[f64]) -> TransformParams {
        match self.transform_family {
            TransformFamily::Unsharp => TransformParams::UnsharpMask {
                radius: genes[0],
                amount: genes[1],
            },
            TransformFamily::Histeq => TransformParams::HistEq {
                kernel_size: self.kernel_size,
                clip_limit: genes[0],
            },
        }
    }

    pub fn evolve_config(&self, n_genes: usize) -> EvolveConfig {
        let o = &self.optimizer;
        EvolveConfig {
            pop_size: o.pop_size,
            generations: o.generations,
            crossover_prob: o.crossover_prob,
            mutation_prob: Some(o.mutation_prob.unwrap_or(1.0 / n_genes.max(1) as f64)),
            eta_c: o.eta_c,
            eta_m: o.eta_m,
            seed: self.seed,
            n_objectives: 2,
        }
    }

    pub fn load_model(&self) -> Result<VmafModel> {
        match &self.model_path {
            Some(p) => parse_model(p),
            None => Ok(VmafModel::bundled()),
        }
    }

    /// The reference clip as it is evaluated (after subsampling).
    pub fn load_reference(&self) -> Result<Clip> {
        Ok(load_clip(&self.ref_path, None, None)?.subsample(self.subsample))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub params: TransformParams,
    pub vmaf: f64,
    pub ssim: f64,
    pub psnr: f64,
    pub delta_vmaf: f64,
    pub delta_ssim: f64,
    pub encoded: bool,
    /// Wall-clock seconds spent on this evaluation.
    pub timing: f64,
}

/// A candidate whose evaluation failed; the search continued without it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCandidate {
    pub params: TransformParams,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoReport {
    /// `records[0]`.
    pub baseline: EvalRecord,
    /// Baseline first, then every distinct candidate in evaluation order.
    pub records: Vec<EvalRecord>,
    /// Indices into `records` of the non-dominated candidates, ascending.
    pub front: Vec<usize>,
    pub failures: Vec<FailedCandidate>,
    pub config_echo: String,
    pub engine_hash: String,
}

impl ParetoReport {
    pub fn front_records(&self) -> impl Iterator<Item = &EvalRecord> {
        self.front.iter().map(|&i| &self.records[i])
    }
}

struct Measured {
    vmaf: f64,
    ssim: f64,
    psnr: f64,
}

fn measure(reference: &Clip, params: &TransformParams, cfg: &RunConfig, model: &VmafModel) -> Result<Measured> {
    let mut distorted = apply_transform(reference, params)?;
    if cfg.encoding_enabled() {
        distorted = encode_external(&distorted, cfg)?;
    }
    let engine = EngineConfig::default();
    Ok(Measured {
        vmaf: score_clip_pair(reference, &distorted, model, &engine)?.pooled,
        ssim: ssim_clip(reference, &distorted)?.pooled,
        psnr: psnr_clip(reference, &distorted)?.pooled,
    })
}

/// The identity transform through the same pipeline: `ref` vs `ref`, or `ref`
/// vs the encoded `ref` when encoding is on. Deltas are 0 by definition.
pub fn evaluate_baseline(reference: &Clip, cfg: &RunConfig, model: &VmafModel) -> Result<EvalRecord> {
    let start = Instant::now();
    let m = measure(reference, &TransformParams::identity(), cfg, model)?;
    Ok(EvalRecord {
        params: TransformParams::identity(),
        vmaf: m.vmaf,
        ssim: m.ssim,
        psnr: m.psnr,
        delta_vmaf: 0.0,
        delta_ssim: 0.0,
        encoded: cfg.encoding_enabled(),
        timing: start.elapsed().as_secs_f64(),
    })
}

/// Transforms `reference`, optionally round-trips it through the external
/// encoder, scores it against `reference` and takes deltas against
/// `baseline`.
pub fn evaluate_candidate(
    reference: &Clip,
    params: &TransformParams,
    cfg: &RunConfig,
    model: &VmafModel,
    baseline: &EvalRecord,
) -> Result<EvalRecord> {
    let start = Instant::now();
    let m = measure(reference, params, cfg, model)?;
    Ok(EvalRecord {
        params: *params,
        vmaf: m.vmaf,
        ssim: m.ssim,
        psnr: m.psnr,
        delta_vmaf: m.vmaf - baseline.vmaf,
        delta_ssim: m.ssim - baseline.ssim,
        encoded: cfg.encoding_enabled(),
        timing: start.elapsed().as_secs_f64(),
    })
}

/// Indices (into `records`, skipping the baseline) of candidates not
/// dominated in (−ΔVMAF, −ΔSSIM) by any other candidate. Of several
/// candidates with identical deltas only the first is kept.
fn pareto_indices(records: &[EvalRecord]) -> Vec<usize> {
    let objectives: Vec<Vec<f64>> = records[1..]
        .iter()
        .map(|r| vec![-r.delta_vmaf, -r.delta_ssim])
        .collect();
    if objectives.is_empty() {
        return Vec::new();
    }
    let mut first = fast_nondominated_sort(&objectives).swap_remove(0);
    first.sort_unstable();
    let mut kept: Vec<usize> = Vec::new();
    for i in first {
        if !kept.iter().any(|&k| objectives[k] == objectives[i]) {
            kept.push(i);
        }
    }
    kept.into_iter().map(|i| i + 1).collect()
}

fn label_default<T: PartialEq + std::fmt::Display>(value: T, default: T) -> String {
    if value == default {
        format!("{value} (tool default)")
    } else {
        format!("{value}")
    }
}

fn config_echo(cfg: &RunConfig, engine_hash: &str, reference: &Clip, report: &ParetoReport) -> String {
    let d = OptimizerSettings::default();
    let o = &cfg.optimizer;
    let n_genes = gene_names(cfg.transform_family).len();
    let bounds = cfg
        .bounds
        .clone()
        .unwrap_or_else(|| default_bounds(cfg.transform_family));
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("ref_path", cfg.ref_path.display().to_string());
    let meta = reference.meta();
    kv(
        "ref_format",
        format!(
            "{}x{} {}-bit chroma {}",
            meta.width, meta.height, meta.bit_depth, meta.chroma_format
        ),
    );
    kv("transform_family", cfg.transform_family.to_string());
    kv("transform_plane", "luma only (chroma passed through)".to_string());
    kv(
        "model",
        match &cfg.model_path {
            Some(p) => p.display().to_string(),
            None => "bundled".to_string(),
        },
    );
    kv("model_version", MODEL_VERSION.to_string());
    kv("engine_hash", engine_hash.to_string());
    kv(
        "encoding",
        if cfg.encoding_enabled() { "on" } else { "off" }.to_string(),
    );
    kv("transform_order", "before encoding".to_string());
    if let Some(c) = &cfg.encoder_cmd {
        kv("encoder_cmd", c.clone());
    }
    if let Some(c) = &cfg.decoder_cmd {
        kv("decoder_cmd", c.clone());
    }
    if let Some(b) = cfg.target_bitrate {
        kv("target_bitrate", format!("{b} bit/s"));
    }
    kv(
        "subsample",
        if cfg.subsample == 1 {
            "1 (every frame evaluated)".to_string()
        } else {
            format!("{k} (SUBSAMPLED: only every {k}-th frame evaluated)", k = cfg.subsample)
        },
    );
    kv("frames_evaluated", reference.len().to_string());
    if cfg.transform_family == TransformFamily::Histeq {
        kv(
            "kernel_size",
            format!("{} tiles per dimension (fixed, not searched)", cfg.kernel_size),
        );
    }
    for (name, (lo, hi)) in gene_names(cfg.transform_family).iter().zip(&bounds) {
        kv(&format!("bounds.{name}"), format!("[{lo}, {hi}]"));
    }
    kv("objectives", "minimize (-delta_vmaf, -delta_ssim)".to_string());
    kv("pop_size", label_default(o.pop_size, d.pop_size));
    kv("generations", label_default(o.generations, d.generations));
    kv("crossover_prob", label_default(o.crossover_prob, d.crossover_prob));
    kv(
        "mutation_prob",
        match o.mutation_prob {
            Some(p) => format!("{p}"),
            None => format!("{} (tool default: 1/n_genes)", 1.0 / n_genes as f64),
        },
    );
    kv("eta_c", label_default(o.eta_c, d.eta_c));
    kv("eta_m", label_default(o.eta_m, d.eta_m));
    kv("seed", cfg.seed.to_string());
    kv("evaluated_candidates", (report.records.len() - 1).to_string());
    kv("failed_candidates", report.failures.len().to_string());
    kv("front_size", report.front.len().to_string());
    for f in &report.failures {
        kv("failure", format!("{}: {}", f.params, f.message));
    }
    s
}

/// Runs the whole study for one reference clip and transform family and
/// writes `report.csv`, `front.csv`, `scatter.svg`, `config.echo` and
/// `timing.csv` into the output directory.
pub fn run_search(cfg: &RunConfig) -> Result<ParetoReport> {
    cfg.validate()?;
    let model = cfg.load_model()?;
    let reference = cfg.load_reference()?;
    let engine_hash = EngineConfig::default().fingerprint(&model);
    let bounds = cfg.search_bounds()?;
    let baseline = evaluate_baseline(&reference, cfg, &model)?;

    let done: Mutex<HashMap<Vec<i64>, Result<EvalRecord>>> = Mutex::new(HashMap::new());
    let evaluate = |genes: &[f64]| -> std::result::Result<Vec<f64>, String> {
        let params = cfg.params_from_genes(genes);
        let outcome = evaluate_candidate(&reference, &params, cfg, &model, &baseline);
        let objectives = match &outcome {
            Ok(r) => Ok(vec![-r.delta_vmaf, -r.delta_ssim]),
            Err(e) => Err(e.to_string()),
        };
        done.lock().expect("record table").insert(memo_key(genes), outcome);
        objectives
    };
    let evolution = evolve(evaluate, &bounds, &cfg.evolve_config(bounds.len()))?;
    let mut done = done.into_inner().expect("record table");

    let mut records = vec![baseline.clone()];
    let mut failures = Vec::new();
    let mut first_error = None;
    for entry in &evolution.archive {
        let params = cfg.params_from_genes(&entry.genes);
        match done.remove(&memo_key(&entry.genes)) {
            Some(Ok(record)) => records.push(record),
            Some(Err(e)) => {
                failures.push(FailedCandidate {
                    params,
                    message: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
            None => failures.push(FailedCandidate {
                params,
                message: entry
                    .error
                    .clone()
                    .unwrap_or_else(|| "evaluation produced no record".into()),
            }),
        }
    }
    if records.len() == 1 {
        // Nothing succeeded: report the first failure with its own category.
        return Err(first_error.unwrap_or_else(|| Error::Config("every candidate evaluation failed".into())));
    }

    let front = pareto_indices(&records);
    let mut report = ParetoReport {
        baseline,
        records,
        front,
        failures,
        config_echo: String::new(),
        engine_hash: engine_hash.clone(),
    };
    report.config_echo = config_echo(cfg, &engine_hash, &reference, &report);
    write_artifacts(&report, &cfg.output_dir)?;
    Ok(report)
}

pub fn write_artifacts(report: &ParetoReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::write(dir, e))?;
    emit_csv(report, dir.join(REPORT_CSV))?;
    emit_front_csv(report, dir.join(FRONT_CSV))?;
    emit_scatter(report, dir.join(SCATTER_SVG))?;
    let echo = dir.join(CONFIG_ECHO);
    std::fs::write(&echo, &report.config_echo).map_err(|e| Error::write(&echo, e))?;
    let mut timing = String::from("index,seconds\n");
    for (i, r) in report.records.iter().enumerate() {
        let _ = writeln!(timing, "{i},{:.6}", r.timing);
    }
    let path = dir.join(TIMING_CSV);
    std::fs::write(&path, timing).map_err(|e| Error::write(&path, e))
}
