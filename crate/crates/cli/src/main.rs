//! `lab`: search enhancement parameters that move VMAF, score clip pairs, and
//! render comparison images.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lab_core::enhance::TransformFamily;
use lab_core::harness::{self, emit_checkerboard, emit_histogram, OptimizerSettings, RunConfig};
use lab_core::metrics::{psnr_clip, ssim_clip};
use lab_core::synthetic::{generate, SyntheticKind, SyntheticSpec};
use lab_core::vmaf::{parse_model, score_clip_pair, EngineConfig, VmafModel};
use lab_core::{load_clip, save_clip, ContainerFormat, Error, ErrorKind};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lab", version, about = "VMAF/SSIM enhancement study toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search transform parameters that raise VMAF while holding SSIM.
    Search(SearchArgs),
    /// Score a distorted clip against its reference.
    Score(ScoreArgs),
    /// Write a checkerboard composite and luma histograms for one frame.
    Compare(CompareArgs),
    /// Write one of the bundled synthetic clips as Y4M.
    Synth(SynthArgs),
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    family: TransformFamily,
    /// Model JSON; the bundled model when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Encoder template with {input}, {output} and optionally {bitrate} / {bitrate_kbps}.
    #[arg(long)]
    encode_cmd: Option<String>,
    /// Decoder template with {input} (bitstream) and {output} (Y4M).
    #[arg(long)]
    decode_cmd: Option<String>,
    /// Target bitrate in bits per second.
    #[arg(long)]
    bitrate: Option<u64>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluate every k-th frame only.
    #[arg(long, default_value_t = 1)]
    subsample: usize,
    /// Histeq tiles per dimension.
    #[arg(long, default_value_t = lab_core::enhance::DEFAULT_KERNEL_SIZE)]
    kernel_size: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ScoreArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompareArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long, default_value_t = 0)]
    frame: usize,
    /// Checkerboard block size in pixels.
    #[arg(long, default_value_t = 16)]
    tile: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    kind: SyntheticKind,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn load_model(path: Option<&Path>) -> lab_core::Result<VmafModel> {
    match path {
        Some(p) => parse_model(p),
        None => Ok(VmafModel::bundled()),
    }
}

fn search(args: SearchArgs) -> lab_core::Result<serde_json::Value> {
    let defaults = OptimizerSettings::default();
    let mut cfg = RunConfig::new(args.reference, args.family, args.out);
    cfg.model_path = args.model;
    cfg.encoder_cmd = args.encode_cmd;
    cfg.decoder_cmd = args.decode_cmd;
    cfg.target_bitrate = args.bitrate;
    cfg.optimizer = OptimizerSettings {
        pop_size: args.pop.unwrap_or(defaults.pop_size),
        generations: args.gens.unwrap_or(defaults.generations),
        ..defaults
    };
    cfg.seed = args.seed;
    cfg.subsample = args.subsample;
    cfg.kernel_size = args.kernel_size;
    let report = harness::run_search(&cfg)?;
    Ok(json!({
        "output_dir": cfg.output_dir,
        "engine_hash": report.engine_hash,
        "baseline": report.baseline,
        "evaluated": report.records.len() - 1,
        "failed": report.failures.len(),
        "front": report.front_records().collect::<Vec<_>>(),
    }))
}

fn score(args: ScoreArgs) -> lab_core::Result<serde_json::Value> {
    let model = load_model(args.model.as_deref())?;
    let reference = load_clip(&args.reference, None, None)?;
    let distorted = load_clip(&args.dist, None, None)?;
    let engine = EngineConfig::default();
    let vmaf = score_clip_pair(&reference, &distorted, &model, &engine)?;
    let ssim = ssim_clip(&reference, &distorted)?;
    let psnr = psnr_clip(&reference, &distorted)?;
    Ok(json!({
        "frames": reference.len(),
        "engine_hash": engine.fingerprint(&model),
        "vmaf": vmaf.pooled,
        "ssim": ssim.pooled,
        "psnr": psnr.pooled,
        "per_frame": { "vmaf": vmaf.per_frame, "ssim": ssim.per_frame, "psnr": psnr.per_frame },
    }))
}

fn compare(args: CompareArgs) -> lab_core::Result<serde_json::Value> {
    let reference = load_clip(&args.reference, None, None)?;
    let distorted = load_clip(&args.dist, None, None)?;
    let pick = |clip: &lab_core::Clip, what: &str| {
        clip.frames().get(args.frame).cloned().ok_or_else(|| {
            Error::Config(format!(
                "{what} clip has {} frames; frame {} requested",
                clip.len(),
                args.frame
            ))
        })
    };
    let (r, d) = (pick(&reference, "reference")?, pick(&distorted, "distorted")?);
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Write {
        path: args.out.clone(),
        source: e,
    })?;
    let checker = args.out.join("checkerboard.pgm");
    let ref_hist = args.out.join("ref_histogram.csv");
    let dist_hist = args.out.join("dist_histogram.csv");
    emit_checkerboard(&r, &d, args.tile, &checker)?;
    emit_histogram(&r, &ref_hist)?;
    emit_histogram(&d, &dist_hist)?;
    Ok(json!({
        "frame": args.frame,
        "checkerboard": checker,
        "histograms": [ref_hist, ref_hist.with_extension("svg"), dist_hist, dist_hist.with_extension("svg")],
    }))
}

fn synth(args: SynthArgs) -> lab_core::Result<serde_json::Value> {
    let mut spec = SyntheticSpec::bundled(args.kind);
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let clip = generate(&spec)?;
    save_clip(&clip, &args.out, ContainerFormat::Y4m)?;
    Ok(json!({ "kind": args.kind, "path": args.out, "frames": clip.len() }))
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Media => 3,
        ErrorKind::Encoder => 4,
        ErrorKind::Other => 1,
    }
}

fn fail(kind: ErrorKind, message: String, diagnostics: Option<String>) -> ExitCode {
    let record = json!({ "error": { "kind": kind.as_str(), "message": message, "diagnostics": diagnostics } });
    eprintln!("{record}");
    ExitCode::from(exit_code(kind))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(ErrorKind::Config, e.render().to_string().trim().to_string(), None),
    };
    let result = match cli.command {
        Command::Search(a) => search(a),
        Command::Score(a) => score(a),
        Command::Compare(a) => compare(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(summary) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let diagnostics = match &e {
                Error::Encoder { diagnostics, .. } => Some(diagnostics.clone()),
                _ => None,
            };
            fail(e.kind(), e.to_string(), diagnostics)
        }
    }
}
