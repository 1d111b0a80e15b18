//! Synthetic ground truth: scene rendering, event simulation, frame-average
//! blur and the two families of real-sensor event noise.

mod esim;
mod noise;
mod scene;

pub use esim::{simulate_events, SimConfig};
pub use noise::{inject_spatial_noise, inject_temporal_jitter};
pub use scene::{generate_scene, ground_truth_model, render_pattern, MotionSchedule, MotionSegment, Pattern};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};

/// Per-pixel arithmetic mean of all frames in the sequence.
pub fn synthesize_blur(seq: &FrameSequence) -> Result<Frame> {
    mean_frame(seq.frames())
}

pub(crate) fn mean_frame(frames: &[Frame]) -> Result<Frame> {
    let first = frames
        .first()
        .ok_or_else(|| Error::arg("cannot average an empty frame list"))?;
    let (w, h) = first.dims();
    let mut acc = vec![0.0; w * h];
    for f in frames {
        first.check_same_dims(f, "mean_frame")?;
        for (a, v) in acc.iter_mut().zip(f.data()) {
            *a += v;
        }
    }
    let inv = 1.0 / frames.len() as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    Frame::new(w, h, acc)
}
