//! PSNR/SSIM and the single-frame and sequence evaluation protocols.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Returned by [`psnr`] when the images are identical.
pub const PSNR_CAP_DB: f64 = 99.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;

/// Peak signal-to-noise ratio for unit dynamic range, capped at 99 dB.
pub fn psnr(a: &Frame, b: &Frame) -> Result<f64> {
    a.check_same_dims(b, "psnr")?;
    let mse = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB))
}

fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let mut taps = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - c;
        *t = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= s);
    taps
}

/// Separable valid-mode filtering: output is `(w - 10) x (h - 10)`.
fn filter_valid(data: &[f64], w: usize, h: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            rows[y * ow + x] = (0..SSIM_WINDOW).map(|j| taps[j] * data[y * w + x + j]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..SSIM_WINDOW).map(|j| taps[j] * rows[(y + j) * ow + x]).sum();
        }
    }
    out
}

/// Mean structural similarity over all valid 11x11 Gaussian-window
/// placements (sigma 1.5, unit dynamic range).
pub fn ssim(a: &Frame, b: &Frame) -> Result<f64> {
    a.check_same_dims(b, "ssim")?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::arg(format!("ssim needs at least 11x11 pixels, got {w}x{h}")));
    }
    let taps = gaussian_taps();
    let (x, y) = (a.data(), b.data());
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();
    let [mx, my, sxx, syy, sxy] = [x, y, &xx[..], &yy[..], &xy[..]].map(|d| filter_valid(d, w, h, &taps));
    let n = mx.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cov = sxy[i] - ux * uy;
            ((2.0 * ux * uy + SSIM_C1) * (2.0 * cov + SSIM_C2))
                / ((ux * ux + uy * uy + SSIM_C1) * (vx + vy + SSIM_C2))
        })
        .sum();
    Ok(total / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_frame_psnr: Vec<f64>,
    pub per_frame_ssim: Vec<f64>,
    pub mean_psnr: f64,
    pub mean_ssim: f64,
    /// Index scored by the single-frame protocol: the middle frame, `M / 2`.
    pub single_frame_index: usize,
    pub single_frame_psnr: f64,
    pub single_frame_ssim: f64,
}

/// Scores a recovered sequence against ground truth under both protocols.
pub fn evaluate(frames: &[Frame], truth: &[Frame]) -> Result<EvalReport> {
    evaluate_with(frames, truth, true)
}

/// As [`evaluate`]; with `with_ssim` off the SSIM fields are empty or NaN,
/// which also admits images smaller than the SSIM window.
pub fn evaluate_with(frames: &[Frame], truth: &[Frame], with_ssim: bool) -> Result<EvalReport> {
    if frames.len() != truth.len() {
        return Err(Error::arg(format!(
            "evaluate: {} frames vs {} ground-truth frames",
            frames.len(),
            truth.len()
        )));
    }
    if frames.is_empty() {
        return Err(Error::arg("evaluate: empty sequence"));
    }
    let per_frame_psnr = frames.iter().zip(truth).map(|(f, g)| psnr(f, g)).collect::<Result<Vec<_>>>()?;
    let per_frame_ssim = if with_ssim {
        frames.iter().zip(truth).map(|(f, g)| ssim(f, g)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let n = frames.len() as f64;
    let mid = frames.len() / 2;
    Ok(EvalReport {
        mean_psnr: per_frame_psnr.iter().sum::<f64>() / n,
        mean_ssim: if with_ssim { per_frame_ssim.iter().sum::<f64>() / n } else { f64::NAN },
        single_frame_index: mid,
        single_frame_psnr: per_frame_psnr[mid],
        single_frame_ssim: per_frame_ssim.get(mid).copied().unwrap_or(f64::NAN),
        per_frame_psnr,
        per_frame_ssim,
    })
}

/// Mean PSNR only; usable on images smaller than the SSIM window.
pub fn mean_psnr(frames: &[Frame], truth: &[Frame]) -> Result<f64> {
    if frames.len() != truth.len() || frames.is_empty() {
        return Err(Error::arg("mean_psnr: sequence lengths differ or are empty"));
    }
    let sum = frames.iter().zip(truth).map(|(f, g)| psnr(f, g)).sum::<Result<f64>>()?;
    Ok(sum / frames.len() as f64)
}

/// Writes `frame,psnr,ssim` rows (`frame,psnr` when SSIM was skipped)
/// followed by a `#` summary line.
pub fn write_report_csv(path: &Path, report: &EvalReport) -> Result<()> {
    let with_ssim = !report.per_frame_ssim.is_empty();
    let mut out = String::from(if with_ssim { "frame,psnr,ssim\n" } else { "frame,psnr\n" });
    for (i, p) in report.per_frame_psnr.iter().enumerate() {
        match report.per_frame_ssim.get(i) {
            Some(s) => out.push_str(&format!("{i},{p:.6},{s:.6}\n")),
            None => out.push_str(&format!("{i},{p:.6}\n")),
        }
    }
    out.push_str(&format!(
        "# mean_psnr={:.6} single_frame={} single_psnr={:.6}",
        report.mean_psnr, report.single_frame_index, report.single_frame_psnr
    ));
    if with_ssim {
        out.push_str(&format!(" mean_ssim={:.6} single_ssim={:.6}", report.mean_ssim, report.single_frame_ssim));
    }
    out.push('\n');
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psnr_cap_and_known_value() {
        let a = Frame::filled(4, 4, 0.5);
        assert_eq!(psnr(&a, &a).unwrap(), 99.0);
        let b = a.map(|v| v + 0.1); // mse 0.01
        assert!((psnr(&a, &b).unwrap() - 20.0).abs() < 1e-9);
        assert!(psnr(&a, &Frame::zeros(3, 4)).is_err());
    }

    #[test]
    fn ssim_identity_and_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Frame::from_fn(24, 20, |_, _| if rng.gen_bool(0.5) { rng.gen_range(0.0..0.3) } else { rng.gen_range(0.7..1.0) });
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let inv = a.map(|v| 1.0 - v);
        assert!(ssim(&a, &inv).unwrap() < 0.5);
        assert!(ssim(&Frame::zeros(10, 20), &Frame::zeros(10, 20)).is_err());
    }

    #[test]
    fn psnr_decreases_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = Frame::from_fn(16, 16, |_, _| rng.gen_range(0.2..0.8));
        let noise: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut last = f64::INFINITY;
        for amp in [0.01, 0.02, 0.05, 0.1] {
            let noisy = Frame::new(16, 16, base.data().iter().zip(&noise).map(|(b, n)| b + amp * n).collect()).unwrap();
            let p = psnr(&base, &noisy).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn evaluate_protocols() {
        let truth: Vec<Frame> = (0..7).map(|i| Frame::filled(12, 12, 0.1 * i as f64)).collect();
        let r = evaluate(&truth, &truth).unwrap();
        assert_eq!(r.mean_psnr, 99.0);
        assert!((r.mean_ssim - 1.0).abs() < 1e-12);
        assert_eq!(r.single_frame_index, 3);
        assert_eq!(r.per_frame_psnr.len(), 7);
        // per-frame offsets 0.1, 0.01, 0.001 -> 20, 40, 60 dB
        let t3 = &truth[..3];
        let f3: Vec<Frame> = t3.iter().zip([0.1, 0.01, 0.001]).map(|(f, d)| f.map(|v| v + d)).collect();
        let r = evaluate(&f3, t3).unwrap();
        assert!((r.mean_psnr - 40.0).abs() < 1e-6);
        assert_eq!(r.single_frame_index, 1);
        assert!(evaluate(&f3, &truth).is_err());
    }
}
