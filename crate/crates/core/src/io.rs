//! File formats for frames, frame sequences and flow fields.
//!
//! - 8-bit PGM (`P5`, maxval 255) for viewing and interchange.
//! - `PF-GRAY` float rasters: the line `PF-GRAY`, a line `<width> <height>`,
//!   then `width * height` little-endian `f32` values, row-major.
//! - Sequences: numbered frame files plus `manifest.txt`, one
//!   `<timestamp_us> <file name>` line per frame.
//! - `FLO-GRAY` flows: the 8 magic bytes, `u32` width, `u32` height, then
//!   `width * height` `(u, v)` pairs of little-endian `f32`, row-major.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::motion::FlowField;

pub const MANIFEST_NAME: &str = "manifest.txt";
const PF_MAGIC: &str = "PF-GRAY";
const FLO_MAGIC: &[u8; 8] = b"FLO-GRAY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFormat {
    Pgm8,
    Float32,
}

impl FrameFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FrameFormat::Pgm8 => "pgm",
            FrameFormat::Float32 => "pfg",
        }
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_pgm(path: &Path, frame: &Frame) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    bytes.extend(frame.data().iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    write_bytes(path, &bytes)
}

/// Splits off `count` whitespace-separated header tokens, honouring `#`
/// comments; returns the tokens and the offset just past the single
/// whitespace byte that ends the last one.
fn header_tokens(path: &Path, bytes: &[u8], count: usize) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::with_capacity(count);
    let mut i = 0;
    while tokens.len() < count {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return Err(Error::parse(path, 1, "truncated header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
    }
    if i >= bytes.len() {
        return Err(Error::parse(path, 1, "missing raster data"));
    }
    Ok((tokens, i + 1))
}

fn parse_dim(path: &Path, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(path, 1, format!("invalid dimension `{tok}`")))
}

pub fn read_pgm(path: &Path) -> Result<Frame> {
    let bytes = read_bytes(path)?;
    let (tok, off) = header_tokens(path, &bytes, 4)?;
    if tok[0] != "P5" {
        return Err(Error::parse(path, 1, "not a binary PGM (P5)"));
    }
    let (w, h) = (parse_dim(path, &tok[1])?, parse_dim(path, &tok[2])?);
    if tok[3] != "255" {
        return Err(Error::parse(path, 1, "only 8-bit PGM is supported"));
    }
    let raster = &bytes[off..];
    if raster.len() != w * h {
        return Err(Error::parse(path, 1, format!("expected {} raster bytes, found {}", w * h, raster.len())));
    }
    Frame::new(w, h, raster.iter().map(|&b| b as f64 / 255.0).collect())
}

pub fn write_float(path: &Path, frame: &Frame) -> Result<()> {
    let mut bytes = format!("{PF_MAGIC}\n{} {}\n", frame.width(), frame.height()).into_bytes();
    for v in frame.data() {
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    write_bytes(path, &bytes)
}

pub fn read_float(path: &Path) -> Result<Frame> {
    let bytes = read_bytes(path)?;
    let (tok, off) = header_tokens(path, &bytes, 3)?;
    if tok[0] != PF_MAGIC {
        return Err(Error::parse(path, 1, "missing PF-GRAY header"));
    }
    let (w, h) = (parse_dim(path, &tok[1])?, parse_dim(path, &tok[2])?);
    let raster = &bytes[off..];
    if raster.len() != 4 * w * h {
        return Err(Error::parse(path, 2, format!("expected {} raster bytes, found {}", 4 * w * h, raster.len())));
    }
    let data = raster
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Frame::new(w, h, data)
}

pub fn write_frame(path: &Path, frame: &Frame, format: FrameFormat) -> Result<()> {
    match format {
        FrameFormat::Pgm8 => write_pgm(path, frame),
        FrameFormat::Float32 => write_float(path, frame),
    }
}

/// Reads either frame format, chosen by the leading bytes.
pub fn read_frame(path: &Path) -> Result<Frame> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(PF_MAGIC.as_bytes()) {
        read_float(path)
    } else if bytes.starts_with(b"P5") {
        read_pgm(path)
    } else {
        Err(Error::parse(path, 1, "unrecognised frame format"))
    }
}

/// Writes `frame_0000.<ext>`, ... and the manifest into `dir`, creating it.
/// Returns the manifest path.
pub fn write_sequence(dir: &Path, seq: &FrameSequence, format: FrameFormat) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::new();
    for (i, (frame, t)) in seq.frames().iter().zip(seq.timestamps()).enumerate() {
        let name = format!("frame_{i:04}.{}", format.extension());
        write_frame(&dir.join(&name), frame, format)?;
        manifest.push_str(&format!("{t} {name}\n"));
    }
    let path = dir.join(MANIFEST_NAME);
    write_bytes(&path, manifest.as_bytes())?;
    Ok(path)
}

/// Reads a sequence from a manifest file, or from a directory containing one.
pub fn read_sequence(path: &Path) -> Result<FrameSequence> {
    let manifest = if path.is_dir() { path.join(MANIFEST_NAME) } else { path.to_path_buf() };
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let text = fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
    let mut frames = Vec::new();
    let mut stamps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, char::is_whitespace);
        let t = parts
            .next()
            .and_then(|t| t.parse::<u64>().ok())
            .ok_or_else(|| Error::parse(&manifest, i + 1, "invalid timestamp"))?;
        let name = parts
            .next()
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .ok_or_else(|| Error::parse(&manifest, i + 1, "missing file name"))?;
        frames.push(read_frame(&dir.join(name))?);
        stamps.push(t);
    }
    FrameSequence::new(frames, stamps).map_err(|e| Error::parse(&manifest, 0, e.to_string()))
}

pub fn write_flow(path: &Path, flow: &FlowField) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + 8 * flow.u().len());
    bytes.extend_from_slice(FLO_MAGIC);
    bytes.extend_from_slice(&(flow.width() as u32).to_le_bytes());
    bytes.extend_from_slice(&(flow.height() as u32).to_le_bytes());
    for (u, v) in flow.u().iter().zip(flow.v()) {
        bytes.extend_from_slice(&(*u as f32).to_le_bytes());
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    write_bytes(path, &bytes)
}

pub fn read_flow(path: &Path) -> Result<FlowField> {
    let bytes = read_bytes(path)?;
    if bytes.len() < 16 || &bytes[..8] != FLO_MAGIC {
        return Err(Error::parse(path, 1, "missing FLO-GRAY header"));
    }
    let w = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let raster = &bytes[16..];
    if raster.len() != 8 * w * h {
        return Err(Error::parse(path, 1, format!("expected {} raster bytes, found {}", 8 * w * h, raster.len())));
    }
    let vals: Vec<f64> = raster
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let u = vals.iter().step_by(2).copied().collect();
    let v = vals.iter().skip(1).step_by(2).copied().collect();
    FlowField::new(w, h, u, v).map_err(|e| Error::parse(path, 1, e.to_string()))
}

/// Writes `flow_00.flo`, `flow_01.flo`, ... into `dir`.
pub fn write_flows(dir: &Path, flows: &[FlowField]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, f) in flows.iter().enumerate() {
        write_flow(&dir.join(format!("flow_{i:02}.flo")), f)?;
    }
    Ok(())
}

/// Reads every `*.flo` file in `dir`, in file-name order.
pub fn read_flows(dir: &Path) -> Result<Vec<FlowField>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "flo"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::parse(dir, 0, "no .flo files found"));
    }
    paths.iter().map(|p| read_flow(p)).collect()
}
