//! Bridge to external encoder / decoder command lines.
//!
//! Templates are split into words shell-style first and placeholders are
//! substituted per word afterwards, so paths never need quoting. No shell is
//! involved.

use std::path::Path;
use std::process::Command;

use super::RunConfig;
use crate::error::{Error, Result};
use crate::media::{load_clip, save_clip, Clip, ContainerFormat};

/// Keep at most this many bytes of captured tool output.
const DIAGNOSTICS_LIMIT: usize = 4096;

/// Splits `template` into words and checks that every `required`
/// placeholder occurs in it.
pub fn parse_template(template: &str, required: &[&str]) -> Result<Vec<String>> {
    let words = shell_words::split(template)
        .map_err(|e| Error::Config(format!("cannot parse command template {template:?}: {e}")))?;
    if words.is_empty() {
        return Err(Error::Config("command template is empty".into()));
    }
    for placeholder in required {
        if !words.iter().any(|w| w.contains(placeholder)) {
            return Err(Error::Config(format!(
                "command template {template:?} lacks the {placeholder} placeholder"
            )));
        }
    }
    Ok(words)
}

fn substitute(words: &[String], vars: &[(&str, String)]) -> Vec<String> {
    words
        .iter()
        .map(|w| vars.iter().fold(w.clone(), |acc, (k, v)| acc.replace(k, v)))
        .collect()
}

fn tail(bytes: &[u8]) -> String {
    let text = String::from_utf8_lossy(bytes);
    let text = text.trim();
    if text.len() <= DIAGNOSTICS_LIMIT {
        return text.to_string();
    }
    let mut start = text.len() - DIAGNOSTICS_LIMIT;
    while !text.is_char_boundary(start) {
        start += 1;
    }
    format!("...{}", &text[start..])
}

fn run(stage: &str, argv: &[String], workdir: &Path) -> Result<()> {
    let output = Command::new(&argv[0])
        .args(&argv[1..])
        .current_dir(workdir)
        .output()
        .map_err(|e| Error::Encoder {
            message: format!("{stage}: cannot start {:?}: {e}", argv[0]),
            diagnostics: String::new(),
        })?;
    if output.status.success() {
        return Ok(());
    }
    let mut diagnostics = tail(&output.stderr);
    let stdout = tail(&output.stdout);
    if !stdout.is_empty() {
        if !diagnostics.is_empty() {
            diagnostics.push('\n');
        }
        diagnostics.push_str(&stdout);
    }
    Err(Error::Encoder {
        message: format!("{stage} command {:?} failed ({})", argv[0], output.status),
        diagnostics,
    })
}

/// Encodes `clip` with the configured encoder and decodes the result back.
///
/// The clip is written as Y4M to a private temp directory. The encode
/// template gets `{input}`, `{output}`, `{bitrate}` (bits/s) and
/// `{bitrate_kbps}`. Without a decode template the encoder output must itself
/// be Y4M; with one, the decoder turns the bitstream (`{input}`) into Y4M
/// (`{output}`). The directory is removed on success and kept on failure,
/// with its path appended to the diagnostics.
pub fn encode_external(clip: &Clip, cfg: &RunConfig) -> Result<Clip> {
    let template = cfg
        .encoder_cmd
        .as_deref()
        .ok_or_else(|| Error::Config("encoding requested without an encoder command".into()))?;
    let bitrate = cfg
        .target_bitrate
        .ok_or_else(|| Error::Config("encoding requested without a target bitrate".into()))?;
    let encode = parse_template(template, &["{input}", "{output}"])?;
    let decode = cfg
        .decoder_cmd
        .as_deref()
        .map(|t| parse_template(t, &["{input}", "{output}"]))
        .transpose()?;

    let dir = tempfile::Builder::new()
        .prefix("lab-encode-")
        .tempdir()
        .map_err(|e| Error::Encoder {
            message: format!("cannot create a temporary directory: {e}"),
            diagnostics: String::new(),
        })?;
    let source = dir.path().join("source.y4m");
    let bitstream = dir
        .path()
        .join(if decode.is_some() { "encoded.bin" } else { "encoded.y4m" });
    let decoded = dir.path().join("decoded.y4m");

    let result = (|| {
        save_clip(clip, &source, ContainerFormat::Y4m)?;
        let vars = [
            ("{input}", source.display().to_string()),
            ("{output}", bitstream.display().to_string()),
            ("{bitrate_kbps}", (bitrate / 1000).to_string()),
            ("{bitrate}", bitrate.to_string()),
        ];
        run("encode", &substitute(&encode, &vars), dir.path())?;
        let final_path = match &decode {
            Some(words) => {
                let vars = [
                    ("{input}", bitstream.display().to_string()),
                    ("{output}", decoded.display().to_string()),
                ];
                run("decode", &substitute(words, &vars), dir.path())?;
                &decoded
            }
            None => &bitstream,
        };
        let out = load_clip(final_path, Some(ContainerFormat::Y4m), None).map_err(|e| Error::Encoder {
            message: format!("cannot read the decoded clip: {e}"),
            diagnostics: String::new(),
        })?;
        clip.check_compatible(&out).map_err(|e| Error::Encoder {
            message: format!("decoded clip does not match its source: {e}"),
            diagnostics: String::new(),
        })?;
        Ok(out)
    })();

    match result {
        Ok(out) => Ok(out),
        Err(Error::Encoder { message, diagnostics }) => {
            let kept = dir.keep();
            let mut diagnostics = diagnostics;
            if !diagnostics.is_empty() {
                diagnostics.push('\n');
            }
            diagnostics.push_str(&format!("temporary files kept in {}", kept.display()));
            Err(Error::Encoder { message, diagnostics })
        }
        Err(e) => Err(e),
    }
}
