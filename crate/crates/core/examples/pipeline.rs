//! The file-based pipeline driven from code: simulate, deblur, evaluate.
//! Equivalent to running the `evdeblur` binary's subcommands in turn.
//!
//!     cargo run --release --example pipeline [out_dir]

use evdeblur::cli::{cmd_deblur, cmd_eval, cmd_simulate, names, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("evdeblur-pipeline"), Into::into);
    let mut cfg = PipelineConfig::default();
    cfg.set("pattern", "texture")?;
    cfg.set("velocity_y", "0.05")?;
    cfg.seed = 3;

    let sim = PipelineConfig { out: root.join("sim"), ..cfg.clone() };
    cmd_simulate(&sim)?;

    let deb = PipelineConfig {
        out: root.join("deblur"),
        events: Some(sim.out.join(names::EVENTS_BIN)),
        blurry: Some(sim.out.join("blurry.pfg")),
        ..cfg.clone()
    };
    let outcome = cmd_deblur(&deb)?;
    println!("flow source: {}", outcome.flow_source);

    let eval = PipelineConfig {
        out: root.join("eval"),
        frames: Some(deb.out.join(names::FRAMES_DIR)),
        truth: Some(sim.out.join(names::SHARP_DIR)),
        ..cfg
    };
    let report = cmd_eval(&eval)?;
    println!("mean PSNR {:.2} dB, mean SSIM {:.3}", report.mean_psnr, report.mean_ssim);
    println!("artifacts under {}", root.display());
    Ok(())
}
