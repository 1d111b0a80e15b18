use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::motion::{FlowField, PlmModel, WarpStencil};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pattern {
    /// Squares of `cell` pixels alternating between 0.1 and 0.9.
    Checker { cell: usize },
    /// Horizontal linear ramp from 0.1 to 0.9.
    Ramp,
    /// Smooth seeded sum of oriented sinusoids in `[0.1, 0.9]`.
    Texture { seed: u64 },
}

pub fn render_pattern(pattern: Pattern, width: usize, height: usize) -> Frame {
    match pattern {
        Pattern::Checker { cell } => {
            let cell = cell.max(1);
            Frame::from_fn(width, height, |x, y| {
                if (x / cell + y / cell) % 2 == 0 {
                    0.9
                } else {
                    0.1
                }
            })
        }
        Pattern::Ramp => {
            let span = width.saturating_sub(1).max(1) as f64;
            Frame::from_fn(width, height, |x, _| 0.1 + 0.8 * x as f64 / span)
        }
        Pattern::Texture { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let waves: Vec<(f64, f64, f64)> = (0..6)
                .map(|_| {
                    let angle = rng.gen_range(0.0..std::f64::consts::PI);
                    let freq = rng.gen_range(0.15..0.6);
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    (freq * angle.cos(), freq * angle.sin(), phase)
                })
                .collect();
            Frame::from_fn(width, height, |x, y| {
                let s: f64 = waves
                    .iter()
                    .map(|(fx, fy, ph)| (fx * x as f64 + fy * y as f64 + ph).sin())
                    .sum();
                (0.5 + 0.4 * s / waves.len() as f64 * 2.0).clamp(0.1, 0.9)
            })
        }
    }
}

/// A run of `frames` frame steps at a constant per-frame offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSegment {
    pub frames: usize,
    /// Sampling offset per frame step, in the crate's flow convention:
    /// frame `k+1` is frame `k` warped by this vector.
    pub velocity: (f64, f64),
}

/// Piece-wise constant velocity over frame steps. The last segment's
/// velocity continues past the end of the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSchedule {
    pub segments: Vec<MotionSegment>,
    pub frame_interval_us: u64,
}

impl MotionSchedule {
    pub fn constant(velocity: (f64, f64), frame_interval_us: u64) -> Self {
        MotionSchedule {
            segments: vec![MotionSegment {
                frames: 1,
                velocity,
            }],
            frame_interval_us,
        }
    }

    fn velocity_at_step(&self, step: usize) -> (f64, f64) {
        let mut start = 0;
        for seg in &self.segments {
            if step < start + seg.frames {
                return seg.velocity;
            }
            start += seg.frames;
        }
        self.segments.last().map_or((0.0, 0.0), |s| s.velocity)
    }

    /// Accumulated offset from frame 0 to frame `k`.
    pub fn offset_at(&self, k: usize) -> (f64, f64) {
        (0..k).fold((0.0, 0.0), |(ax, ay), j| {
            let (vx, vy) = self.velocity_at_step(j);
            (ax + vx, ay + vy)
        })
    }
}

/// Renders `n_frames` frames of `pattern` moving under `motion`.
///
/// Frame `k` is the pattern raster bilinearly resampled at `x + d_k`, where
/// `d_k` is the schedule's accumulated offset, with clamp-to-edge borders.
pub fn generate_scene(
    pattern: Pattern,
    motion: &MotionSchedule,
    n_frames: usize,
    width: usize,
    height: usize,
) -> Result<FrameSequence> {
    if motion.segments.is_empty() {
        return Err(Error::arg("motion schedule is empty"));
    }
    if n_frames < 2 {
        return Err(Error::arg("a scene needs at least two frames"));
    }
    if width == 0 || height == 0 {
        return Err(Error::arg("scene size must be non-zero"));
    }
    if motion.frame_interval_us == 0 {
        return Err(Error::arg("frame interval must be positive"));
    }
    let base = render_pattern(pattern, width, height);
    let frames = (0..n_frames)
        .map(|k| {
            let (dx, dy) = motion.offset_at(k);
            WarpStencil::new(&FlowField::uniform(width, height, dx, dy), 1.0).apply(&base)
        })
        .collect();
    let timestamps = (0..n_frames as u64).map(|k| k * motion.frame_interval_us).collect();
    FrameSequence::new(frames, timestamps)
}

/// PLM model whose interval `m` carries the schedule's mean per-frame
/// velocity over frames `[m k, (m+1) k)`, treating each frame step as one
/// latent sub-step.
pub fn ground_truth_model(
    motion: &MotionSchedule,
    width: usize,
    height: usize,
    m_count: usize,
    k: usize,
) -> Result<PlmModel> {
    let flows = (0..m_count)
        .map(|m| {
            let (x0, y0) = motion.offset_at(m * k);
            let (x1, y1) = motion.offset_at((m + 1) * k);
            FlowField::uniform(width, height, (x1 - x0) / k as f64, (y1 - y0) / k as f64)
        })
        .collect();
    PlmModel::new(flows, k)
}
