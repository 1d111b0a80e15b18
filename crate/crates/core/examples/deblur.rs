//! Deblurring a simulated blurry frame with events: ground-truth flows
//! versus flows estimated from the events.
//!
//!     cargo run --release --example deblur [out_dir]

use evdeblur::deblur::{flows_from_reconstruction, solve, write_trace_csv, SolverConfig};
use evdeblur::io::write_pgm;
use evdeblur::metrics::evaluate;
use evdeblur::motion::LkParams;
use evdeblur::simulator::{
    generate_scene, ground_truth_model, simulate_events, synthesize_blur, MotionSchedule, Pattern, SimConfig,
};
use evdeblur::{EventStream, PlmModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("evdeblur-deblur"), Into::into);
    std::fs::create_dir_all(&out)?;
    let (m, k, w, h) = (7, 7, 64, 64);
    let motion = MotionSchedule::constant((1.0 / 7.0, 0.0), 1000);
    let seq = generate_scene(Pattern::Checker { cell: 8 }, &motion, m * k, w, h)?;
    let blur = synthesize_blur(&seq)?;
    let truth: Vec<_> = (0..m).map(|i| seq.frames()[i * k].clone()).collect();
    let raw = simulate_events(&seq, &SimConfig::default())?;
    let events = EventStream::new(w, h, 0, (m * k) as u64 * 1000, raw.into_events())?;

    let cfg = SolverConfig::default();
    let gt = ground_truth_model(&motion, w, h, m, k)?;
    let est = PlmModel::from_interval_displacements(
        flows_from_reconstruction(&blur, &events, 0.2, m, &LkParams::default())?,
        k,
    )?;

    let base = evaluate(&vec![blur.clone(); m], &truth)?;
    println!("blurry input:        mean PSNR {:.2} dB, SSIM {:.3}", base.mean_psnr, base.mean_ssim);
    for (name, model) in [("ground-truth flows", &gt), ("estimated flows", &est)] {
        let (frames, report) = solve(&blur, model, &cfg)?;
        let score = evaluate(&frames, &truth)?;
        println!(
            "{name:<20} mean PSNR {:.2} dB, SSIM {:.3}; objective {:.4} -> {:.4}",
            score.mean_psnr,
            score.mean_ssim,
            report.loss_trace[0],
            report.total_loss_final
        );
        let tag = name.split(' ').next().unwrap_or("run");
        write_trace_csv(&out.join(format!("trace_{tag}.csv")), &report)?;
        for (i, f) in frames.iter().enumerate() {
            write_pgm(&out.join(format!("{tag}_{i}.pgm")), f)?;
        }
    }
    write_pgm(&out.join("blurry.pgm"), &blur)?;
    println!("wrote {}", out.display());
    Ok(())
}
