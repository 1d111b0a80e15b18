//! Sensor noise channels: false negatives, background activity and
//! read-out bandwidth jitter, and what they do to a deblurring run.
//!
//!     cargo run --release --example sensor_noise

use evdeblur::deblur::{flows_from_reconstruction, solve, SolverConfig};
use evdeblur::metrics::mean_psnr;
use evdeblur::motion::LkParams;
use evdeblur::simulator::{
    generate_scene, inject_spatial_noise, inject_temporal_jitter, simulate_events, synthesize_blur, MotionSchedule,
    Pattern, SimConfig,
};
use evdeblur::{EventStream, PlmModel};

fn main() -> evdeblur::Result<()> {
    let (m, k, w, h) = (7, 7, 64, 64);
    let motion = MotionSchedule::constant((1.0 / 7.0, 0.0), 1000);
    let seq = generate_scene(Pattern::Checker { cell: 8 }, &motion, m * k, w, h)?;
    let blur = synthesize_blur(&seq)?;
    let truth: Vec<_> = (0..m).map(|i| seq.frames()[i * k].clone()).collect();
    let raw = simulate_events(&seq, &SimConfig::default())?;
    let clean = EventStream::new(w, h, 0, 49_000, raw.into_events())?;

    let jittered = inject_temporal_jitter(&clean, 2e6)?;
    let lag: u64 = jittered.events().iter().zip(clean.events()).map(|(a, b)| a.t - b.t).max().unwrap_or(0);
    println!("jitter at 2M ev/s: {} events, max delay {lag} us", jittered.len());

    let cases = [
        ("clean", clean.clone()),
        ("10% dropped", inject_spatial_noise(&clean, 0.0, 0.1, 1)?),
        ("BA 5 Hz/px", inject_spatial_noise(&clean, 5.0, 0.0, 2)?),
        ("BA 50 Hz/px", inject_spatial_noise(&clean, 50.0, 0.0, 3)?),
        ("jitter", jittered),
    ];
    println!("blurry input: {:.2} dB", mean_psnr(&vec![blur.clone(); m], &truth)?);
    for (name, events) in cases {
        let flows = flows_from_reconstruction(&blur, &events, 0.2, m, &LkParams::default())?;
        let model = PlmModel::from_interval_displacements(flows, k)?;
        let (frames, _) = solve(&blur, &model, &SolverConfig::default())?;
        println!("{name:>12}: {:>6} events -> {:.2} dB", events.len(), mean_psnr(&frames, &truth)?);
    }
    Ok(())
}
