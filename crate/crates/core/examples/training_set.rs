//! Writes the feature table the bundled regression model is fitted on.
//!
//! Each row is one distorted frame: synthetic content, a distortion with a
//! strength, its opinion-score target, and the six engine features.
//! Targets come only from the distortion schedule below, never from the
//! features themselves.
//!
//!     cargo run --release -p lab-core --example training_set > training.csv

use std::io::Write;

use lab_core::filter::gaussian_blur;
use lab_core::media::{Clip, Frame};
use lab_core::plane::Plane;
use lab_core::synthetic::{generate, SyntheticKind, SyntheticSpec};
use lab_core::vmaf::{extract_features, EngineConfig, FEATURE_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDENTITY_SCORE: f64 = 97.0;

#[derive(Clone, Copy)]
enum Distortion {
    Identity,
    Blur(f64),
    Noise(f64),
    Quantize(f64),
    Rescale(usize),
    BlurNoise(f64, f64),
}

impl Distortion {
    fn name(&self) -> (&'static str, f64) {
        match *self {
            Distortion::Identity => ("identity", 0.0),
            Distortion::Blur(s) => ("blur", s),
            Distortion::Noise(s) => ("noise", s),
            Distortion::Quantize(q) => ("quantize", q),
            Distortion::Rescale(f) => ("rescale", f as f64),
            Distortion::BlurNoise(s, _) => ("blur_noise", s),
        }
    }

    /// Synthetic opinion score on a 0–100 scale.
    fn target(&self) -> f64 {
        let loss = match *self {
            Distortion::Identity => 0.0,
            Distortion::Blur(s) => 30.0 * (1.0 + s).ln(),
            Distortion::Noise(s) => 16.0 * (1.0 + s / 2.0).ln(),
            Distortion::Quantize(q) => 14.0 * (1.0 + q / 2.0).ln(),
            Distortion::Rescale(f) => 25.0 * (f as f64).ln(),
            Distortion::BlurNoise(s, n) => 30.0 * (1.0 + s).ln() + 16.0 * (1.0 + n / 2.0).ln(),
        };
        (IDENTITY_SCORE - loss).max(0.0)
    }

    fn apply(&self, p: &Plane<f64>, rng: &mut ChaCha8Rng) -> Plane<f64> {
        match *self {
            Distortion::Identity => p.clone(),
            Distortion::Blur(s) => gaussian_blur(p, s),
            Distortion::Noise(s) => p.map(|v| v + s * gauss(rng)),
            Distortion::Quantize(q) => p.map(|v| (v / q).round() * q),
            Distortion::Rescale(f) => rescale(p, f),
            Distortion::BlurNoise(s, n) => gaussian_blur(p, s).map(|v| v + n * gauss(rng)),
        }
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Box-average downscale by `f`, bilinear upscale back.
fn rescale(p: &Plane<f64>, f: usize) -> Plane<f64> {
    let (w, h) = p.dims();
    let (sw, sh) = (w.div_ceil(f), h.div_ceil(f));
    let small = Plane::from_fn(sw, sh, |x, y| {
        let (mut acc, mut n) = (0.0, 0.0);
        for yy in y * f..((y + 1) * f).min(h) {
            for xx in x * f..((x + 1) * f).min(w) {
                acc += p.get(xx, yy);
                n += 1.0;
            }
        }
        acc / n
    });
    Plane::from_fn(w, h, |x, y| {
        let fx = ((x as f64 + 0.5) / f as f64 - 0.5).clamp(0.0, (sw - 1) as f64);
        let fy = ((y as f64 + 0.5) / f as f64 - 0.5).clamp(0.0, (sh - 1) as f64);
        let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(sw - 1), (y0 + 1).min(sh - 1));
        let (ax, ay) = (fx - x0 as f64, fy - y0 as f64);
        let top = (1.0 - ax) * small.get(x0, y0) + ax * small.get(x1, y0);
        let bottom = (1.0 - ax) * small.get(x0, y1) + ax * small.get(x1, y1);
        (1.0 - ay) * top + ay * bottom
    })
}

fn distort_clip(clip: &Clip, d: Distortion, rng: &mut ChaCha8Rng) -> Clip {
    let frames = clip
        .frames()
        .iter()
        .map(|f| {
            let out = d.apply(&f.luma().to_f64(), rng);
            f.with_luma(out.map(|v| v.round().clamp(0.0, 255.0) as u16)).unwrap()
        })
        .collect::<Vec<Frame>>();
    Clip::new(*clip.meta(), frames).unwrap()
}

fn main() {
    let cfg = EngineConfig::default();
    let mut distortions = vec![Distortion::Identity; 4];
    distortions.extend([0.4, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0].map(Distortion::Blur));
    distortions.extend([1.0, 2.0, 4.0, 8.0, 16.0].map(Distortion::Noise));
    distortions.extend([2.0, 4.0, 8.0, 16.0, 32.0].map(Distortion::Quantize));
    distortions.extend([2, 3, 4].map(Distortion::Rescale));
    distortions.extend([(0.7, 2.0), (1.5, 4.0), (3.0, 2.0)].map(|(s, n)| Distortion::BlurNoise(s, n)));

    let mut contents = Vec::new();
    for (i, kind) in [
        SyntheticKind::LowContrast,
        SyntheticKind::Contrasted,
        SyntheticKind::Texture,
    ]
    .into_iter()
    .enumerate()
    {
        for k in 0..4u64 {
            contents.push(SyntheticSpec {
                kind,
                width: 160,
                height: 96,
                frames: 3,
                seed: 1000 + 100 * i as u64 + k,
            });
        }
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(
        out,
        "content,seed,distortion,strength,target,{}",
        FEATURE_NAMES.join(",")
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    for spec in &contents {
        let reference = generate(spec).unwrap();
        for d in &distortions {
            let distorted = distort_clip(&reference, *d, &mut rng);
            let features = extract_features(&reference, &distorted, &cfg).unwrap();
            // rounding can erase a light distortion entirely
            let target = if distorted == reference {
                IDENTITY_SCORE
            } else {
                d.target()
            };
            let (name, strength) = d.name();
            for fv in features {
                let values: Vec<String> = fv.to_array().iter().map(|v| format!("{v:.10}")).collect();
                writeln!(
                    out,
                    "{},{},{name},{strength},{:.4},{}",
                    spec.kind,
                    spec.seed,
                    target,
                    values.join(",")
                )
                .unwrap();
            }
        }
    }
}
