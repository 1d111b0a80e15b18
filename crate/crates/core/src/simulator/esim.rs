use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};
use crate::frame::FrameSequence;

/// Smallest per-pixel threshold after adding the sampled variation.
const MIN_THRESHOLD: f64 = 0.01;
/// Slack (log units) when testing whether a level was reached exactly.
const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Nominal contrast threshold `c` in log-intensity units.
    pub contrast_threshold: f64,
    /// Standard deviation of the per-pixel threshold.
    pub threshold_sigma: f64,
    /// Offset inside `log(I + log_eps)`.
    pub log_eps: f64,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            contrast_threshold: 0.2,
            threshold_sigma: 0.03,
            log_eps: 1e-3,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if !(self.contrast_threshold > 0.0) {
            return Err(Error::arg("contrast threshold must be positive"));
        }
        if !(self.threshold_sigma >= 0.0) {
            return Err(Error::arg("threshold sigma must be non-negative"));
        }
        if !(self.log_eps > 0.0) {
            return Err(Error::arg("log_eps must be positive"));
        }
        Ok(())
    }
}

/// Simulates events from a sharp sequence.
///
/// Each pixel's log-intensity is interpolated linearly between frames and
/// an event fires each time it moves one threshold away from the pixel's
/// reference level, stamped at the interpolated crossing time. The
/// reference then moves to the crossed level. Thresholds are drawn once per
/// pixel. The result covers `[first timestamp, last timestamp]`.
pub fn simulate_events(seq: &FrameSequence, cfg: &SimConfig) -> Result<EventStream> {
    cfg.validate()?;
    if seq.len() < 2 {
        return Err(Error::arg("event simulation needs at least two frames"));
    }
    let (w, h) = seq.dims().expect("non-empty sequence");
    if w > u16::MAX as usize + 1 || h > u16::MAX as usize + 1 {
        return Err(Error::arg("sensor too large for 16-bit coordinates"));
    }
    let npix = w * h;
    let thresholds: Vec<f64> = if cfg.threshold_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let normal = Normal::new(cfg.contrast_threshold, cfg.threshold_sigma)
            .map_err(|e| Error::arg(e.to_string()))?;
        (0..npix).map(|_| normal.sample(&mut rng).max(MIN_THRESHOLD)).collect()
    } else {
        vec![cfg.contrast_threshold.max(MIN_THRESHOLD); npix]
    };

    let logs: Vec<Vec<f64>> = seq
        .frames()
        .iter()
        .map(|f| f.data().iter().map(|&v| (v + cfg.log_eps).ln()).collect())
        .collect();
    let ts = seq.timestamps();

    let mut events = Vec::new();
    for (pix, &c) in thresholds.iter().enumerate() {
        let (x, y) = ((pix % w) as u16, (pix / w) as u16);
        let mut reference = logs[0][pix];
        for j in 0..seq.len() - 1 {
            let (a, b) = (logs[j][pix], logs[j + 1][pix]);
            let (t0, t1) = (ts[j], ts[j + 1]);
            let span = (t1 - t0) as f64;
            let stamp = |level: f64| {
                let frac = ((level - a) / (b - a)).clamp(0.0, 1.0);
                t0 + (frac * span).round() as u64
            };
            if b > a {
                while reference + c <= b + LEVEL_TOL {
                    reference += c;
                    events.push(Event::new(stamp(reference), x, y, Polarity::Positive));
                }
            } else if b < a {
                while reference - c >= b - LEVEL_TOL {
                    reference -= c;
                    events.push(Event::new(stamp(reference), x, y, Polarity::Negative));
                }
            }
        }
    }
    // stable: ties keep pixel order, then per-pixel firing order
    events.sort_by_key(|e| e.t);
    EventStream::new(w, h, ts[0], ts[ts.len() - 1], events)
}
