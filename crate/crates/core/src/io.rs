//! Frame files and result records.
//!
//! Frames are PNG or binary PPM, decoded to 8-bit RGB. A frame directory is
//! read in lexicographic file-name order. Results are written one JSON object
//! per line.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::image::RgbImage;
use crate::pipeline::FrameResult;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot decode {path}: {reason}")]
    Decode { path: String, reason: String },
    #[error("cannot encode {path}: {reason}")]
    Encode { path: String, reason: String },
    #[error("{0} contains no .png or .ppm frames")]
    NoFrames(String),
    #[error("line {line}: {reason}")]
    Record { line: usize, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> InputError + '_ {
    move |source| InputError::Io { path: path.display().to_string(), source }
}

/// True for the extensions the decoder accepts.
pub fn is_frame_file(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(), Some("png" | "ppm"))
}

/// Frame files of `input`: the file itself, or the frames of a directory in
/// lexicographic order.
pub fn list_frames(input: &Path) -> Result<Vec<PathBuf>, InputError> {
    if !input.is_dir() {
        fs::metadata(input).map_err(io_err(input))?;
        return Ok(vec![input.to_path_buf()]);
    }
    let mut frames: Vec<PathBuf> = fs::read_dir(input)
        .map_err(io_err(input))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_frame_file(p))
        .collect();
    if frames.is_empty() {
        return Err(InputError::NoFrames(input.display().to_string()));
    }
    frames.sort();
    Ok(frames)
}

/// Decodes a PNG or PPM file; deeper channels are quantised to 8 bits.
pub fn read_image(path: &Path) -> Result<RgbImage, InputError> {
    let decode = |reason: String| InputError::Decode { path: path.display().to_string(), reason };
    let bytes = fs::read(path).map_err(io_err(path))?;
    let decoded = image::load_from_memory(&bytes).map_err(|e| decode(e.to_string()))?.to_rgb8();
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    RgbImage::from_raw(w, h, decoded.as_raw()).map_err(|e| decode(e.to_string()))
}

/// Encodes by extension: `.ppm` as binary PPM, anything else as PNG.
pub fn write_image(path: &Path, img: &RgbImage) -> Result<(), InputError> {
    let encode = |reason: String| InputError::Encode { path: path.display().to_string(), reason };
    let buffer = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.to_raw())
        .ok_or_else(|| encode("buffer size mismatch".into()))?;
    let is_ppm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
    let format = if is_ppm { image::ImageFormat::Pnm } else { image::ImageFormat::Png };
    buffer.save_with_format(path, format).map_err(|e| encode(e.to_string()))
}

/// One JSON line, no trailing newline.
pub fn to_json_line(result: &FrameResult) -> String {
    serde_json::to_string(result).expect("frame results always serialize")
}

pub fn write_jsonl<W: Write>(mut out: W, results: &[FrameResult]) -> std::io::Result<()> {
    for r in results {
        writeln!(out, "{}", to_json_line(r))?;
    }
    Ok(())
}

/// Parses newline-delimited records, skipping blank lines.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<FrameResult>, InputError> {
    let mut out = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line.map_err(|e| InputError::Record { line: k + 1, reason: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| InputError::Record { line: k + 1, reason: e.to_string() })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{FrameStatus, StageTimings};

    fn sample() -> RgbImage {
        let mut img = RgbImage::filled(7, 5, [10, 20, 30]).unwrap();
        img.put(crate::image::Point::new(2, 3), [250, 128, 0]);
        img
    }

    #[test]
    fn png_and_ppm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a.png", "b.ppm"] {
            let path = dir.path().join(name);
            write_image(&path, &sample()).unwrap();
            assert_eq!(read_image(&path).unwrap(), sample());
        }
        let frames = list_frames(dir.path()).unwrap();
        let names: Vec<_> = frames.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert_eq!(names, ["a.png", "b.ppm"]);
    }

    #[test]
    fn garbage_is_a_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.png");
        fs::write(&path, b"not an image").unwrap();
        assert!(matches!(read_image(&path), Err(InputError::Decode { .. })));
        assert!(matches!(list_frames(&dir.path().join("missing")), Err(InputError::Io { .. })));
    }

    #[test]
    fn empty_directory_has_no_frames() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(list_frames(dir.path()), Err(InputError::NoFrames(_))));
    }

    #[test]
    fn jsonl_round_trip() {
        let r = FrameResult {
            frame_id: 4,
            source: Some("f.png".into()),
            reference: false,
            status: FrameStatus::NoHandsFound,
            hands: Vec::new(),
            timings: StageTimings::default(),
        };
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &[r.clone(), r.clone()]).unwrap();
        assert_eq!(read_jsonl(&buf[..]).unwrap(), vec![r.clone(), r]);
        assert!(read_jsonl(&b"{"[..]).is_err());
    }
}
