//! Event-based motion deblurring toolkit.
//!
//! A blurry frame is modelled as the average of `N = M k` latent sharp
//! images. Those latent images are generated from `M` sharp keyframes by
//! warping each keyframe along a piece-wise linear motion field whose
//! per-interval flows come from events. Recovering the keyframes then
//! amounts to minimizing a blur-consistency term (reblurred vs. observed)
//! plus a photometric term (consecutive keyframes agree after warping).
//!
//! The crate is organised as:
//!
//! - [`event`]: event streams, slicing, time surfaces and count images;
//! - [`simulator`]: synthetic scenes, event simulation, frame-average blur
//!   and sensor noise;
//! - [`motion`]: flow fields, LM/PLM motion, bilinear warping and a
//!   Lucas-Kanade flow estimator;
//! - [`deblur`]: reblurring, losses, gradients and the solver;
//! - [`metrics`]: PSNR, SSIM and evaluation reports;
//! - [`io`]: frame, sequence and flow file formats;
//! - [`cli`]: the pipeline commands behind the `evdeblur` binary.

pub mod cli;
pub mod deblur;
pub mod error;
pub mod event;
pub mod frame;
pub mod io;
pub mod metrics;
pub mod motion;
pub mod simulator;

pub use error::{Error, Result};
pub use event::{Event, EventStream, Polarity};
pub use frame::{Frame, FrameSequence};
pub use motion::{FlowField, PlmModel};

/// Interval count used by default.
pub const DEFAULT_M: usize = 7;
/// Latent sub-steps per interval used by default.
pub const DEFAULT_K: usize = 11;
