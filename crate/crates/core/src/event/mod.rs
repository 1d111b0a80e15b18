//! Event data model, stream slicing, and image-like event representations.
//!
//! Timestamps are integer microseconds. Windows are half-open `[t0, t1)`,
//! except the last interval produced by [`partition_intervals`] which is
//! closed on the right so that events stamped exactly at `t_end` are kept.

mod io;
mod repr;

pub use io::{read_events, read_events_binary, read_events_text, write_events_binary, write_events_text};
pub use repr::{count_image, time_surface};

use crate::error::{Error, Result};

/// Sign of the log-intensity change that fired an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn from_sign(p: i64) -> Option<Self> {
        match p {
            1 => Some(Polarity::Positive),
            -1 => Some(Polarity::Negative),
            _ => None,
        }
    }

    #[inline]
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    /// Timestamp in microseconds.
    pub t: u64,
    pub x: u16,
    pub y: u16,
    pub p: Polarity,
}

impl Event {
    pub fn new(t: u64, x: u16, y: u16, p: Polarity) -> Self {
        Event { t, x, y, p }
    }
}

/// Time-ordered events from a `width x height` sensor over `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    events: Vec<Event>,
    width: usize,
    height: usize,
    t_start: u64,
    t_end: u64,
}

impl EventStream {
    /// Builds a stream, checking ordering, pixel bounds and the time window.
    pub fn new(
        width: usize,
        height: usize,
        t_start: u64,
        t_end: u64,
        events: Vec<Event>,
    ) -> Result<Self> {
        if t_start > t_end {
            return Err(Error::Range(format!(
                "stream window [{t_start}, {t_end}] is inverted"
            )));
        }
        if events.windows(2).any(|w| w[0].t > w[1].t) {
            return Err(Error::arg("events must be sorted by timestamp"));
        }
        for e in &events {
            if e.x as usize >= width || e.y as usize >= height {
                return Err(Error::arg(format!(
                    "event at ({}, {}) outside {}x{} sensor",
                    e.x, e.y, width, height
                )));
            }
            if e.t < t_start || e.t > t_end {
                return Err(Error::Range(format!(
                    "event at t={} outside window [{t_start}, {t_end}]",
                    e.t
                )));
            }
        }
        Ok(EventStream {
            events,
            width,
            height,
            t_start,
            t_end,
        })
    }

    /// Like [`EventStream::new`] but stable-sorts the events by timestamp first.
    pub fn from_unsorted(
        width: usize,
        height: usize,
        t_start: u64,
        t_end: u64,
        mut events: Vec<Event>,
    ) -> Result<Self> {
        events.sort_by_key(|e| e.t);
        Self::new(width, height, t_start, t_end, events)
    }

    pub fn empty(width: usize, height: usize, t_start: u64, t_end: u64) -> Self {
        EventStream {
            events: Vec::new(),
            width,
            height,
            t_start,
            t_end,
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn t_start(&self) -> u64 {
        self.t_start
    }

    pub fn t_end(&self) -> u64 {
        self.t_end
    }

    pub fn duration_us(&self) -> u64 {
        self.t_end - self.t_start
    }

    fn with_events(&self, t_start: u64, t_end: u64, events: Vec<Event>) -> EventStream {
        EventStream {
            events,
            width: self.width,
            height: self.height,
            t_start,
            t_end,
        }
    }

    /// Index of the first event with `t >= ts`.
    fn lower_bound(&self, ts: u64) -> usize {
        self.events.partition_point(|e| e.t < ts)
    }
}

/// Events with `t` in `[t0, t1)`.
///
/// `t1` may be `t_end + 1` to select everything up to and including `t_end`;
/// the returned stream's window is `[t0, min(t1, t_end)]`.
pub fn window(stream: &EventStream, t0: u64, t1: u64) -> Result<EventStream> {
    if t0 < stream.t_start || t0 > t1 || t1 > stream.t_end.saturating_add(1) {
        return Err(Error::Range(format!(
            "window [{t0}, {t1}) not within stream [{}, {}]",
            stream.t_start, stream.t_end
        )));
    }
    let lo = stream.lower_bound(t0);
    let hi = stream.lower_bound(t1);
    Ok(stream.with_events(t0, t1.min(stream.t_end), stream.events[lo..hi].to_vec()))
}

/// Boundaries `b_0 = t_start < ... < b_m = t_end` of `m_count` equal sub-windows.
pub fn interval_bounds(t_start: u64, t_end: u64, m_count: usize) -> Vec<u64> {
    let span = (t_end - t_start) as u128;
    (0..=m_count)
        .map(|i| t_start + (span * i as u128 / m_count as u128) as u64)
        .collect()
}

/// Splits the stream into `m_count` equal-duration sub-streams.
///
/// Every event lands in exactly one sub-stream; the last one also takes the
/// events stamped at `t_end`.
pub fn partition_intervals(stream: &EventStream, m_count: usize) -> Result<Vec<EventStream>> {
    if m_count == 0 {
        return Err(Error::arg("m_count must be at least 1"));
    }
    let bounds = interval_bounds(stream.t_start, stream.t_end, m_count);
    let mut out = Vec::with_capacity(m_count);
    for i in 0..m_count {
        let (b0, b1) = (bounds[i], bounds[i + 1]);
        let lo = stream.lower_bound(b0);
        let hi = if i + 1 == m_count {
            stream.events.len()
        } else {
            stream.lower_bound(b1)
        };
        out.push(stream.with_events(b0, b1, stream.events[lo..hi].to_vec()));
    }
    Ok(out)
}
