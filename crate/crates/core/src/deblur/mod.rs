//! Reblurring, the consistency losses, their gradients, and the variational
//! solver that recovers `M` sharp frames from one blurry frame.

mod baseline;
mod loss;
mod operator;
mod solver;

pub use baseline::{flows_from_reconstruction, integrate_baseline};
pub use loss::{
    blur_loss, latent_frame, loss_gradient, photo_loss, photo_warp, reblur, recon_loss, smoothed_objective,
    total_loss, LossWeights,
};
pub use operator::ReblurOperator;
pub use solver::{solve, write_trace_csv, SolverConfig, SolverReport};
