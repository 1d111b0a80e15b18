//! Event-integration baseline next to the variational solver.
//!
//!     cargo run --release --example baseline

use evdeblur::deblur::{flows_from_reconstruction, integrate_baseline, solve, SolverConfig};
use evdeblur::metrics::evaluate;
use evdeblur::motion::LkParams;
use evdeblur::simulator::{generate_scene, simulate_events, synthesize_blur, MotionSchedule, Pattern, SimConfig};
use evdeblur::{EventStream, PlmModel};

fn main() -> evdeblur::Result<()> {
    let (m, k, w, h) = (7, 7, 64, 64);
    let motion = MotionSchedule::constant((0.2, 0.1), 1000);
    let seq = generate_scene(Pattern::Texture { seed: 3 }, &motion, m * k, w, h)?;
    let blur = synthesize_blur(&seq)?;
    let truth: Vec<_> = (0..m).map(|i| seq.frames()[i * k].clone()).collect();
    let raw = simulate_events(&seq, &SimConfig::default())?;
    let events = EventStream::new(w, h, 0, 49_000, raw.into_events())?;

    let base = integrate_baseline(&blur, &events, 0.2, m)?;
    let flows = flows_from_reconstruction(&blur, &events, 0.2, m, &LkParams::default())?;
    let (solved, _) = solve(&blur, &PlmModel::from_interval_displacements(flows, k)?, &SolverConfig::default())?;

    for (name, frames) in [("blurry", vec![blur.clone(); m]), ("integration", base), ("solver", solved)] {
        let r = evaluate(&frames, &truth)?;
        let per: Vec<String> = r.per_frame_psnr.iter().map(|p| format!("{p:.1}")).collect();
        println!("{name:>12}: mean {:.2} dB, SSIM {:.3}  [{}]", r.mean_psnr, r.mean_ssim, per.join(" "));
    }
    Ok(())
}
