//! Time surfaces of a drifting texture, with and without decay.
//!
//!     cargo run --release --example time_surface [out_dir]

use evdeblur::event::{time_surface, window};
use evdeblur::io::write_pgm;
use evdeblur::simulator::{generate_scene, simulate_events, MotionSchedule, Pattern, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("evdeblur-timesurface"), Into::into);
    std::fs::create_dir_all(&out)?;

    let motion = MotionSchedule::constant((0.3, 0.15), 1000);
    let seq = generate_scene(Pattern::Texture { seed: 4 }, &motion, 30, 96, 64)?;
    let events = simulate_events(&seq, &SimConfig::default())?;
    let t_end = events.t_end();

    // plain surface: latest timestamp per pixel, normalized over the stream
    let plain = time_surface(&events, t_end, None)?;
    // exponential decay keeps only the last few milliseconds bright
    let decayed = time_surface(&events, t_end, Some(3000.0))?;
    // surface of just the second half of the stream
    let late = window(&events, t_end / 2, t_end + 1)?;
    let half = time_surface(&late, t_end, None)?;

    for (name, img) in [("plain", &plain), ("decay", &decayed), ("second_half", &half)] {
        let lit = img.data().iter().filter(|&&v| v > 0.0).count();
        println!("{name:>12}: mean {:.3}, {lit} of {} pixels lit", img.mean(), img.len());
        write_pgm(&out.join(format!("timesurface_{name}.pgm")), img)?;
    }
    println!("wrote {}", out.display());
    Ok(())
}
