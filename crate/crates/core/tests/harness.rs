//! Study pipeline: candidate evaluation, the external encoder bridge, search
//! runs and every emitted artifact.

use std::path::{Path, PathBuf};

use lab_core::enhance::{TransformFamily, TransformParams};
use lab_core::harness::{
    checkerboard, emit_checkerboard, emit_histogram, encode_external, evaluate_baseline, evaluate_candidate, fixed6,
    parse_csv, render_scatter, run_search, RunConfig, ScatterPoint, CONFIG_ECHO, CSV_HEADER, FRONT_CSV, REPORT_CSV,
    SCATTER_SVG,
};
use lab_core::media::{Frame, VideoMeta};
use lab_core::plane::Plane;
use lab_core::synthetic::{generate, SyntheticKind, SyntheticSpec};
use lab_core::vmaf::VmafModel;
use lab_core::{save_clip, Clip, ContainerFormat, Error};

fn small_clip(kind: SyntheticKind) -> Clip {
    generate(&SyntheticSpec {
        kind,
        width: 64,
        height: 48,
        frames: 4,
        seed: 5,
    })
    .unwrap()
}

fn write_clip(dir: &Path, clip: &Clip) -> PathBuf {
    let path = dir.join("ref.y4m");
    save_clip(clip, &path, ContainerFormat::Y4m).unwrap();
    path
}

fn quick_config(ref_path: PathBuf, family: TransformFamily, out: PathBuf) -> RunConfig {
    let mut cfg = RunConfig::new(ref_path, family, out);
    cfg.optimizer.pop_size = 8;
    cfg.optimizer.generations = 3;
    cfg.seed = 42;
    cfg
}

#[test]
fn identity_candidate_has_zero_deltas() {
    let clip = small_clip(SyntheticKind::LowContrast);
    let cfg = RunConfig::new("unused.y4m", TransformFamily::Unsharp, "unused");
    let model = VmafModel::bundled();
    let baseline = evaluate_baseline(&clip, &cfg, &model).unwrap();
    assert_eq!(baseline.ssim, 1.0);
    assert_eq!(baseline.psnr, 100.0);
    let same = evaluate_candidate(&clip, &TransformParams::identity(), &cfg, &model, &baseline).unwrap();
    assert_eq!((same.delta_vmaf, same.delta_ssim), (0.0, 0.0));
    assert!(!same.encoded);

    let sharp = TransformParams::UnsharpMask {
        radius: 2.843,
        amount: 0.179,
    };
    let a = evaluate_candidate(&clip, &sharp, &cfg, &model, &baseline).unwrap();
    let b = evaluate_candidate(&clip, &sharp, &cfg, &model, &baseline).unwrap();
    assert_eq!((a.delta_vmaf, a.delta_ssim), (b.delta_vmaf, b.delta_ssim));
    assert_eq!(a.delta_vmaf, a.vmaf - baseline.vmaf);
    assert!(a.delta_ssim < 0.0);
}

#[cfg(unix)]
mod encoder {
    use super::*;

    fn encoding_config(encode: &str, decode: Option<&str>) -> RunConfig {
        let mut cfg = RunConfig::new("unused.y4m", TransformFamily::Unsharp, "unused");
        cfg.encoder_cmd = Some(encode.to_string());
        cfg.decoder_cmd = decode.map(str::to_string);
        cfg.target_bitrate = Some(3_000_000);
        cfg
    }

    #[test]
    fn pass_through_encoder_is_lossless() {
        let clip = small_clip(SyntheticKind::Texture);
        let cfg = encoding_config("cp {input} {output}", None);
        assert_eq!(encode_external(&clip, &cfg).unwrap(), clip);
        let cfg = encoding_config("cp {input} {output}", Some("cp {input} {output}"));
        assert_eq!(encode_external(&clip, &cfg).unwrap(), clip);

        let model = VmafModel::bundled();
        let baseline = evaluate_baseline(&clip, &cfg, &model).unwrap();
        assert!(baseline.encoded);
        assert_eq!(baseline.ssim, 1.0);
    }

    #[test]
    fn missing_output_placeholder_fails_before_spawning() {
        let dir = tempfile::tempdir().unwrap();
        let marker = dir.path().join("spawned");
        let cfg = encoding_config(&format!("touch {} {{input}}", marker.display()), None);
        let err = encode_external(&small_clip(SyntheticKind::Texture), &cfg).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        assert!(!marker.exists());
    }

    #[test]
    fn failing_encoder_reports_diagnostics() {
        let cfg = encoding_config(
            "sh -c 'echo rate control exploded >&2; exit 3' sh {input} {output} {bitrate}",
            None,
        );
        match encode_external(&small_clip(SyntheticKind::Texture), &cfg) {
            Err(Error::Encoder { diagnostics, .. }) => {
                assert!(diagnostics.contains("rate control exploded"), "{diagnostics}");
            }
            other => panic!("expected an encoder error, got {other:?}"),
        }
    }

    #[test]
    fn missing_program_and_garbage_output_are_encoder_errors() {
        let clip = small_clip(SyntheticKind::Texture);
        let cfg = encoding_config("definitely-not-an-encoder-xyz {input} {output}", None);
        assert!(matches!(encode_external(&clip, &cfg), Err(Error::Encoder { .. })));
        let cfg = encoding_config("sh -c 'echo junk > \"$1\"' sh {output} {input}", None);
        assert!(matches!(encode_external(&clip, &cfg), Err(Error::Encoder { .. })));
    }
}

#[test]
fn identity_bounds_give_a_single_origin_member() {
    let dir = tempfile::tempdir().unwrap();
    let ref_path = write_clip(dir.path(), &small_clip(SyntheticKind::LowContrast));
    let mut cfg = quick_config(ref_path, TransformFamily::Unsharp, dir.path().join("out"));
    cfg.bounds = Some(vec![(1.0, 1.0), (0.0, 0.0)]);
    let report = run_search(&cfg).unwrap();
    assert_eq!(report.records.len(), 2);
    assert_eq!(report.front, vec![1]);
    let member = &report.records[1];
    assert_eq!((member.delta_vmaf, member.delta_ssim), (0.0, 0.0));

    let svg = std::fs::read_to_string(cfg.output_dir.join(SCATTER_SVG)).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let markers: Vec<_> = doc
        .descendants()
        .filter(|n| {
            n.attribute("class")
                .is_some_and(|c| c.split(' ').any(|t| t == "marker"))
        })
        .collect();
    assert_eq!(markers.len(), 1);
    let axis = |class: &str| {
        doc.descendants()
            .find(|n| n.attribute("class").is_some_and(|c| c.contains(class)))
            .unwrap()
    };
    assert_eq!(markers[0].attribute("cx"), axis("y-axis").attribute("x1"));
    assert_eq!(markers[0].attribute("cy"), axis("x-axis").attribute("y1"));
}

#[test]
fn report_files_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let ref_path = write_clip(dir.path(), &small_clip(SyntheticKind::Contrasted));
    let cfg = quick_config(ref_path, TransformFamily::Histeq, dir.path().join("out"));
    let report = run_search(&cfg).unwrap();

    let text = std::fs::read_to_string(cfg.output_dir.join(REPORT_CSV)).unwrap();
    assert_eq!(text.lines().count(), report.records.len() + 1);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));

    let rows = parse_csv(cfg.output_dir.join(REPORT_CSV)).unwrap();
    assert_eq!(rows.len(), report.records.len());
    assert_eq!(rows[0].role, "baseline");
    assert_eq!(
        (fixed6(rows[0].delta_vmaf), fixed6(rows[0].delta_ssim)),
        ("0.000000".into(), "0.000000".into())
    );
    for (row, line) in rows.iter().zip(text.lines().skip(1)) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fixed6(row.vmaf), fields[7]);
        assert_eq!(fixed6(row.ssim), fields[8]);
        assert_eq!(fixed6(row.psnr), fields[9]);
        assert_eq!(fixed6(row.delta_vmaf), fields[10]);
        assert_eq!(fixed6(row.delta_ssim), fields[11]);
        if let Some(c) = row.clip_limit {
            assert_eq!(c.to_string(), fields[6]);
            assert_eq!(row.kernel_size, Some(8));
        }
    }
    for (i, (row, record)) in rows.iter().zip(&report.records).enumerate() {
        assert_eq!(row.pareto, report.front.contains(&i));
        assert_eq!(fixed6(row.delta_vmaf), fixed6(record.delta_vmaf));
    }

    let front_rows = parse_csv(cfg.output_dir.join(FRONT_CSV)).unwrap();
    assert_eq!(front_rows.len(), report.front.len());
    assert!(front_rows.iter().all(|r| r.pareto && report.front.contains(&r.index)));
    for a in report.front_records() {
        for b in report.front_records() {
            let dominated = a.delta_vmaf >= b.delta_vmaf
                && a.delta_ssim >= b.delta_ssim
                && (a.delta_vmaf > b.delta_vmaf || a.delta_ssim > b.delta_ssim);
            assert!(!dominated);
        }
    }

    let echo = std::fs::read_to_string(cfg.output_dir.join(CONFIG_ECHO)).unwrap();
    assert!(echo.contains("kernel_size = 8 tiles per dimension"));
    assert!(echo.contains("pop_size = 8\n"));
    assert!(echo.contains("eta_c = 15 (tool default)"));
    assert!(echo.contains(&format!("engine_hash = {}", report.engine_hash)));
    assert!(echo.contains("encoding = off"));
    assert!(echo.contains("ref_format = 64x48 8-bit chroma 420"));
    assert!(echo.contains("transform_plane = luma only"));
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let ref_path = write_clip(dir.path(), &small_clip(SyntheticKind::LowContrast));
    let mut a = quick_config(ref_path.clone(), TransformFamily::Unsharp, dir.path().join("a"));
    a.subsample = 2;
    let b = RunConfig {
        output_dir: dir.path().join("b"),
        ..a.clone()
    };
    run_search(&a).unwrap();
    run_search(&b).unwrap();
    for name in [REPORT_CSV, FRONT_CSV, SCATTER_SVG, CONFIG_ECHO] {
        let x = std::fs::read(a.output_dir.join(name)).unwrap();
        let y = std::fs::read(b.output_dir.join(name)).unwrap();
        assert!(x == y, "{name} differs between identical runs");
    }
    let echo = std::fs::read_to_string(a.output_dir.join(CONFIG_ECHO)).unwrap();
    assert!(echo.contains("SUBSAMPLED"));
}

#[test]
fn bad_configs_are_rejected_up_front() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(
        dir.path().join("missing.y4m"),
        TransformFamily::Unsharp,
        dir.path().join("o"),
    );
    assert!(matches!(run_search(&cfg), Err(Error::Read { .. })));
    cfg.optimizer.pop_size = 3;
    assert!(matches!(run_search(&cfg), Err(Error::Config(_))));
    cfg.optimizer.pop_size = 8;
    cfg.target_bitrate = Some(1000);
    assert!(matches!(run_search(&cfg), Err(Error::Config(_))));
}

#[test]
fn scatter_keeps_every_quadrant_in_view() {
    let points: Vec<ScatterPoint> = [(-0.02, 3.0), (0.01, 2.0), (0.015, -4.0), (-0.001, -0.5)]
        .iter()
        .enumerate()
        .map(|(i, &(s, v))| ScatterPoint {
            delta_ssim: s,
            delta_vmaf: v,
            family: if i % 2 == 0 {
                TransformFamily::Unsharp
            } else {
                TransformFamily::Histeq
            },
            pareto: i == 0,
        })
        .collect();
    let svg = render_scatter(&points, "quadrants & <edge> cases");
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    let vb: Vec<f64> = root
        .attribute("viewBox")
        .unwrap()
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    let markers: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("class").is_some_and(|c| c.starts_with("marker")))
        .collect();
    assert_eq!(markers.len(), 4);
    assert_eq!(markers.iter().filter(|m| m.tag_name().name() == "circle").count(), 2);
    assert_eq!(markers.iter().filter(|m| m.tag_name().name() == "rect").count(), 2);
    assert_eq!(
        markers
            .iter()
            .filter(|m| m.attribute("class").unwrap().contains("pareto"))
            .count(),
        1
    );
    for m in markers {
        let (x, y) = match m.tag_name().name() {
            "circle" => (m.attribute("cx").unwrap(), m.attribute("cy").unwrap()),
            _ => (m.attribute("x").unwrap(), m.attribute("y").unwrap()),
        };
        let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
        assert!(x >= vb[0] && x <= vb[2] && y >= vb[1] && y <= vb[3]);
    }
}

fn luma_frame(w: usize, h: usize, f: impl Fn(usize, usize) -> u16) -> Frame {
    Frame::new(VideoMeta::luma8(w, h), Plane::from_fn(w, h, f), None).unwrap()
}

#[test]
fn checkerboard_cases() {
    let textured = luma_frame(12, 6, |x, y| (x * 20 + y) as u16);
    assert_eq!(&checkerboard(&textured, &textured, 3).unwrap(), textured.luma());

    let black = luma_frame(8, 4, |_, _| 0);
    let white = luma_frame(8, 4, |_, _| 255);
    let cb = checkerboard(&black, &white, 4).unwrap();
    assert!((0..4).all(|y| (0..8).all(|x| cb.get(x, y) == if x < 4 { 0 } else { 255 })));
    let dir = tempfile::tempdir().unwrap();
    emit_checkerboard(&black, &white, 2, dir.path().join("c.pgm")).unwrap();
    assert!(matches!(
        emit_checkerboard(&black, &luma_frame(8, 5, |_, _| 0), 2, dir.path().join("d.pgm")),
        Err(Error::Shape(_))
    ));
}

#[test]
fn histogram_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = luma_frame(10, 7, |x, _| (x * 25) as u16);
    let path = dir.path().join("h.csv");
    emit_histogram(&f, &path).unwrap();
    let mut r = csv::Reader::from_path(&path).unwrap();
    let counts: Vec<(usize, u64)> = r.deserialize().map(|row| row.unwrap()).collect();
    assert_eq!(counts.len(), 256);
    assert_eq!(counts.iter().map(|c| c.1).sum::<u64>(), 70);
    assert_eq!(counts[25], (25, 7));
    let svg = std::fs::read_to_string(path.with_extension("svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let bars = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("bar"))
        .count();
    assert_eq!(bars, 10);
}
