use crate::error::{Error, Result};
use crate::event::{interval_bounds, EventStream};
use crate::frame::Frame;
use crate::motion::{flows_from_frames, FlowField, LkParams};

/// Event-integration baseline.
///
/// Frame `m` is the observed image's log-intensity shifted by `c` times the
/// per-pixel polarity sum of the events before the start of interval `m`,
/// with a per-pixel gain chosen so that the plain average of the `M`
/// exponentiated frames reproduces `observed`. Output is clamped to `[0, 1]`.
pub fn integrate_baseline(
    observed: &Frame,
    stream: &EventStream,
    c: f64,
    m_count: usize,
) -> Result<Vec<Frame>> {
    if !(c > 0.0) {
        return Err(Error::arg("contrast threshold must be positive"));
    }
    if m_count == 0 {
        return Err(Error::arg("m_count must be at least 1"));
    }
    if observed.dims() != (stream.width(), stream.height()) {
        return Err(Error::arg("observed frame and event sensor sizes differ"));
    }
    let (w, h) = observed.dims();
    let bounds = interval_bounds(stream.t_start(), stream.t_end(), m_count);
    let mut level = vec![0i64; w * h];
    let mut rel: Vec<Vec<f64>> = Vec::with_capacity(m_count);
    let mut events = stream.events().iter().peekable();
    for &t in &bounds[..m_count] {
        while let Some(e) = events.next_if(|e| e.t < t) {
            level[e.y as usize * w + e.x as usize] += e.p.sign() as i64;
        }
        rel.push(level.iter().map(|&l| (c * l as f64).exp()).collect());
    }
    let mut frames: Vec<Vec<f64>> = vec![vec![0.0; w * h]; m_count];
    for i in 0..w * h {
        let mean = rel.iter().map(|r| r[i]).sum::<f64>() / m_count as f64;
        let gain = observed.data()[i] / mean;
        for (f, r) in frames.iter_mut().zip(&rel) {
            f[i] = (gain * r[i]).clamp(0.0, 1.0);
        }
    }
    frames.into_iter().map(|d| Frame::new(w, h, d)).collect()
}

/// Per-interval displacement fields estimated from the blurry frame and its
/// events.
///
/// The event-integration baseline supplies one intensity image per interval
/// start, and Lucas-Kanade runs on consecutive pairs of those. Intensity
/// images carry sub-pixel edge positions, which bare event counts inside a
/// single interval do not.
pub fn flows_from_reconstruction(
    observed: &Frame,
    stream: &EventStream,
    c: f64,
    m_count: usize,
    params: &LkParams,
) -> Result<Vec<FlowField>> {
    let frames = integrate_baseline(observed, stream, c, m_count)?;
    flows_from_frames(&frames, params)
}
