//! Warping and reblurring: seven keyframes and their ground-truth flows
//! regenerate the 49-frame average blur.
//!
//!     cargo run --release --example reblur

use evdeblur::deblur::{blur_loss, latent_frame, photo_loss, reblur};
use evdeblur::metrics::psnr;
use evdeblur::motion::warp;
use evdeblur::simulator::{generate_scene, ground_truth_model, synthesize_blur, MotionSchedule, Pattern};
use evdeblur::FlowField;

fn main() -> evdeblur::Result<()> {
    let (m, k) = (7, 7);
    let motion = MotionSchedule::constant((1.0 / 7.0, 0.0), 1000);
    let seq = generate_scene(Pattern::Checker { cell: 8 }, &motion, m * k, 64, 64)?;
    let blur = synthesize_blur(&seq)?;
    let keys: Vec<_> = (0..m).map(|i| seq.frames()[i * k].clone()).collect();
    let model = ground_truth_model(&motion, 64, 64, m, k)?;

    // a single warp: later(x) = earlier(x + f)
    let shifted = warp(&keys[0], &FlowField::uniform(64, 64, 1.0, 0.0))?;
    println!("keyframe 0 warped by 1 px vs keyframe 1: PSNR {:.1} dB", psnr(&shifted, &keys[1])?);

    // latent image 10 lives three sub-steps into interval 1
    let latent = latent_frame(&keys, &model, 10)?;
    println!("latent 10 vs sharp frame 10: PSNR {:.1} dB", psnr(&latent, &seq.frames()[10])?);

    let re = reblur(&keys, &model)?;
    println!("reblur vs 49-frame average: blur loss {:.2e}", blur_loss(&re, &blur)?);
    println!("photometric loss of the true keyframes: {:.2e}", photo_loss(&keys, &model)?);

    // keyframes with the wrong motion do not explain the blur
    let still = evdeblur::PlmModel::linear(FlowField::zeros(64, 64), m, k)?;
    println!("reblur with zero motion: blur loss {:.3}", blur_loss(&reblur(&keys, &still)?, &blur)?);
    Ok(())
}
