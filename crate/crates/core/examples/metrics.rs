//! PSNR, SSIM and the sequence / single-frame evaluation protocols.
//!
//!     cargo run --release --example metrics

use evdeblur::metrics::{evaluate, psnr, ssim, write_report_csv};
use evdeblur::simulator::{render_pattern, Pattern};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sharp = render_pattern(Pattern::Texture { seed: 11 }, 48, 48);
    println!("identical: PSNR {} dB (cap), SSIM {:.3}", psnr(&sharp, &sharp)?, ssim(&sharp, &sharp)?);

    for offset in [0.01, 0.05, 0.1] {
        let brighter = sharp.map(|v| v + offset);
        println!(
            "+{offset:<4} brightness: PSNR {:5.2} dB, SSIM {:.4}",
            psnr(&sharp, &brighter)?,
            ssim(&sharp, &brighter)?
        );
    }

    // a sequence where later frames are noisier
    let truth: Vec<_> = (0..5).map(|i| sharp.map(|v| v * (0.9 + 0.02 * i as f64))).collect();
    let noisy: Vec<_> = truth
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut g = f.clone();
            for (j, v) in g.data_mut().iter_mut().enumerate() {
                *v += 0.02 * i as f64 * if j % 2 == 0 { 1.0 } else { -1.0 };
            }
            g
        })
        .collect();
    let report = evaluate(&noisy, &truth)?;
    println!(
        "sequence: mean PSNR {:.2} dB; middle frame {} PSNR {:.2} dB",
        report.mean_psnr, report.single_frame_index, report.single_frame_psnr
    );
    let path = std::env::temp_dir().join("evdeblur-report.csv");
    write_report_csv(&path, &report)?;
    print!("{}", std::fs::read_to_string(&path)?);
    Ok(())
}
