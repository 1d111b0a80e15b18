//! Renders a translating checkerboard, simulates its events and blur, and
//! writes them to disk.
//!
//!     cargo run --release --example simulate_events [out_dir]

use evdeblur::event::{count_image, write_events_binary, write_events_text, Polarity};
use evdeblur::io::{write_pgm, write_sequence, FrameFormat};
use evdeblur::simulator::{generate_scene, simulate_events, synthesize_blur, MotionSchedule, Pattern, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("evdeblur-simulate"), Into::into);
    std::fs::create_dir_all(&out)?;

    // 49 frames, content drifting 1/7 px left per frame
    let motion = MotionSchedule::constant((1.0 / 7.0, 0.0), 1000);
    let seq = generate_scene(Pattern::Checker { cell: 8 }, &motion, 49, 64, 64)?;
    let blur = synthesize_blur(&seq)?;
    let cfg = SimConfig { rng_seed: 1, ..SimConfig::default() };
    let events = simulate_events(&seq, &cfg)?;

    let on = events.events().iter().filter(|e| e.p == Polarity::Positive).count();
    println!(
        "{} events over {} us ({} on, {} off)",
        events.len(),
        events.duration_us(),
        on,
        events.len() - on
    );
    let counts = count_image(&events, false);
    let (_, busiest) = counts.min_max();
    println!("busiest pixel fired {busiest} times; mean {:.2} per pixel", counts.mean());

    write_events_binary(&out.join("events.bin"), &events)?;
    write_events_text(&out.join("events.csv"), &events)?;
    write_pgm(&out.join("blurry.pgm"), &blur)?;
    write_sequence(&out.join("truth"), &seq, FrameFormat::Pgm8)?;
    println!("wrote {}", out.display());
    Ok(())
}
