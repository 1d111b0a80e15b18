//! Per-interval flow from events, scored against ground truth.
//!
//! Two estimators are compared: Lucas-Kanade between event-integration
//! reconstructions at interval starts (the default), and Lucas-Kanade
//! between count images of the two halves of each interval.
//!
//!     cargo run --release --example estimate_flow

use evdeblur::deblur::flows_from_reconstruction;
use evdeblur::motion::{flows_from_events, LkParams};
use evdeblur::simulator::{generate_scene, ground_truth_model, simulate_events, MotionSchedule, Pattern, SimConfig};
use evdeblur::{EventStream, FlowField};

/// Mean endpoint error over the masked pixels.
fn endpoint_error(est: &FlowField, truth: &FlowField, mask: &[bool]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for (i, &keep) in mask.iter().enumerate() {
        if keep {
            let (du, dv) = (est.u()[i] - truth.u()[i], est.v()[i] - truth.v()[i]);
            sum += (du * du + dv * dv).sqrt();
            n += 1;
        }
    }
    sum / n.max(1) as f64
}

fn main() -> evdeblur::Result<()> {
    let (m, k, w, h) = (7, 7, 64, 64);
    let motion = MotionSchedule::constant((1.0 / 7.0, 0.0), 1000);
    let seq = generate_scene(Pattern::Checker { cell: 8 }, &motion, m * k, w, h)?;
    let blur = evdeblur::simulator::synthesize_blur(&seq)?;
    let raw = simulate_events(&seq, &SimConfig::default())?;
    // window to the end of the last frame slot so intervals start on keyframes
    let events = EventStream::new(w, h, 0, (m * k) as u64 * 1000, raw.into_events())?;
    let truth = ground_truth_model(&motion, w, h, m, k)?.interval_displacements();

    // every interior pixel sees a checker edge within the 15x15 window;
    // the 8 px border is dropped since clamp-to-edge sampling smears it
    let inner = |c: usize| (8..56).contains(&c);
    let mask: Vec<bool> = (0..w * h).map(|i| inner(i % w) && inner(i / w)).collect();

    let recon = flows_from_reconstruction(&blur, &events, 0.2, m, &LkParams::default())?;
    let counts = flows_from_events(&events, m, 7)?;
    println!("interval  true_u  recon_u  recon_err  counts_u  counts_err");
    for i in 0..m {
        let mean_u = |f: &FlowField| f.u().iter().sum::<f64>() / f.u().len() as f64;
        println!(
            "{i:>8}  {:>6.2}  {:>7.2}  {:>9.3}  {:>8.2}  {:>10.3}",
            mean_u(&truth[i]),
            mean_u(&recon[i]),
            endpoint_error(&recon[i], &truth[i], &mask),
            mean_u(&counts[i]),
            endpoint_error(&counts[i], &truth[i], &mask)
        );
    }
    Ok(())
}
