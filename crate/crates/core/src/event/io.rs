//! Event file formats.
//!
//! Text: header `t_us,x,y,p`, then one `t,x,y,p` line per event with
//! `p` in `{1,-1}`.
//!
//! Binary (little-endian): magic `EVT1`, `u32` width, `u32` height,
//! `u64` t_start, `u64` t_end, `u64` count, then `count` 16-byte records of
//! `u64 t, u16 x, u16 y, i8 p` followed by three zero pad bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Event, EventStream, Polarity};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"EVT1";
const TEXT_HEADER: &str = "t_us,x,y,p";
const RECORD_BYTES: usize = 16;

pub fn write_events_text(path: &Path, stream: &EventStream) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut body = String::with_capacity(16 * (stream.len() + 1));
    body.push_str(TEXT_HEADER);
    body.push('\n');
    for e in stream.events() {
        body.push_str(&format!("{},{},{},{}\n", e.t, e.x, e.y, e.p.sign()));
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads the text format. The sensor size is taken from `dims` when given,
/// otherwise from the largest coordinates seen; the window spans the first
/// to last timestamp (or `[0, 0]` for an empty file).
pub fn read_events_text(path: &Path, dims: Option<(usize, usize)>) -> Result<EventStream> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut events = Vec::new();
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == TEXT_HEADER => {}
        Some((_, Err(e))) => return Err(Error::io(path, e)),
        _ => return Err(Error::parse(path, 1, format!("expected header `{TEXT_HEADER}`"))),
    }
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse(path, line_no, format!("expected 4 fields, found {}", fields.len())));
        }
        let bad = |what: &str| Error::parse(path, line_no, format!("invalid {what}"));
        let t: u64 = fields[0].trim().parse().map_err(|_| bad("timestamp"))?;
        let x: u16 = fields[1].trim().parse().map_err(|_| bad("x"))?;
        let y: u16 = fields[2].trim().parse().map_err(|_| bad("y"))?;
        let p = fields[3]
            .trim()
            .parse::<i64>()
            .ok()
            .and_then(Polarity::from_sign)
            .ok_or_else(|| bad("polarity"))?;
        if let Some(prev) = events.last().map(|e: &Event| e.t) {
            if t < prev {
                return Err(Error::parse(path, line_no, "timestamps must be non-decreasing"));
            }
        }
        events.push(Event::new(t, x, y, p));
    }
    let (w, h) = dims.unwrap_or_else(|| {
        let w = events.iter().map(|e| e.x as usize + 1).max().unwrap_or(0);
        let h = events.iter().map(|e| e.y as usize + 1).max().unwrap_or(0);
        (w, h)
    });
    let t0 = events.first().map_or(0, |e| e.t);
    let t1 = events.last().map_or(0, |e| e.t);
    EventStream::new(w, h, t0, t1, events).map_err(|e| Error::parse(path, 0, e.to_string()))
}

pub fn write_events_binary(path: &Path, stream: &EventStream) -> Result<()> {
    let mut buf = Vec::with_capacity(36 + RECORD_BYTES * stream.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(stream.width() as u32).to_le_bytes());
    buf.extend_from_slice(&(stream.height() as u32).to_le_bytes());
    buf.extend_from_slice(&stream.t_start().to_le_bytes());
    buf.extend_from_slice(&stream.t_end().to_le_bytes());
    buf.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    for e in stream.events() {
        buf.extend_from_slice(&e.t.to_le_bytes());
        buf.extend_from_slice(&e.x.to_le_bytes());
        buf.extend_from_slice(&e.y.to_le_bytes());
        buf.push(e.p.sign() as u8);
        buf.extend_from_slice(&[0u8; 3]);
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_events_binary(path: &Path) -> Result<EventStream> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    parse_binary(path, &bytes)
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<EventStream> {
    if bytes.len() < 36 || &bytes[..4] != MAGIC {
        return Err(Error::parse(path, 0, "missing EVT1 header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let width = u32_at(4) as usize;
    let height = u32_at(8) as usize;
    let t_start = u64_at(12);
    let t_end = u64_at(20);
    let count = u64_at(28) as usize;
    let expected = count
        .checked_mul(RECORD_BYTES)
        .and_then(|n| n.checked_add(36))
        .ok_or_else(|| Error::parse(path, 0, "event count overflows"))?;
    if bytes.len() != expected {
        return Err(Error::parse(
            path,
            0,
            format!("header declares {count} events but file has {} bytes", bytes.len()),
        ));
    }
    let mut events = Vec::with_capacity(count);
    for i in 0..count {
        let o = 36 + i * RECORD_BYTES;
        let t = u64_at(o);
        let x = u16::from_le_bytes([bytes[o + 8], bytes[o + 9]]);
        let y = u16::from_le_bytes([bytes[o + 10], bytes[o + 11]]);
        let p = Polarity::from_sign(bytes[o + 12] as i8 as i64)
            .ok_or_else(|| Error::parse(path, i + 1, "invalid polarity byte"))?;
        events.push(Event::new(t, x, y, p));
    }
    EventStream::new(width, height, t_start, t_end, events).map_err(|e| Error::parse(path, 0, e.to_string()))
}

/// Reads either format, choosing by the leading magic bytes.
pub fn read_events(path: &Path) -> Result<EventStream> {
    let mut head = [0u8; 4];
    let n = File::open(path)
        .and_then(|mut f| f.read(&mut head))
        .map_err(|e| Error::io(path, e))?;
    if n == 4 && &head == MAGIC {
        read_events_binary(path)
    } else {
        read_events_text(path, None)
    }
}
