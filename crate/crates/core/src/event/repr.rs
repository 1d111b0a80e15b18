use super::EventStream;
use crate::error::{Error, Result};
use crate::frame::Frame;

/// Recency image of the events up to `t_ref`.
///
/// Without `decay_us`, a pixel holds its latest timestamp normalized to
/// `[0, 1]` over `[t_start, t_ref]`. With `decay_us = Some(tau)` it holds
/// `exp(-(t_ref - t_last) / tau)`. Pixels without events are 0.
pub fn time_surface(stream: &EventStream, t_ref: u64, decay_us: Option<f64>) -> Result<Frame> {
    if t_ref < stream.t_start() {
        return Err(Error::Range(format!(
            "t_ref {t_ref} precedes stream start {}",
            stream.t_start()
        )));
    }
    if let Some(tau) = decay_us {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::arg("decay constant must be positive and finite"));
        }
    }
    let (w, h) = (stream.width(), stream.height());
    let mut last: Vec<Option<u64>> = vec![None; w * h];
    for e in stream.events().iter().take_while(|e| e.t <= t_ref) {
        last[e.y as usize * w + e.x as usize] = Some(e.t);
    }
    let span = (t_ref - stream.t_start()) as f64;
    let data = last
        .into_iter()
        .map(|t| match (t, decay_us) {
            (None, _) => 0.0,
            (Some(t), Some(tau)) => (-((t_ref - t) as f64) / tau).exp(),
            (Some(_), None) if span == 0.0 => 1.0,
            (Some(t), None) => (t - stream.t_start()) as f64 / span,
        })
        .collect();
    Frame::new(w, h, data)
}

/// Per-pixel event counts, or polarity sums when `signed` is set.
pub fn count_image(stream: &EventStream, signed: bool) -> Frame {
    let w = stream.width();
    let mut img = Frame::zeros(w, stream.height());
    let data = img.data_mut();
    for e in stream.events() {
        let v = if signed { e.p.sign() as f64 } else { 1.0 };
        data[e.y as usize * w + e.x as usize] += v;
    }
    img
}
