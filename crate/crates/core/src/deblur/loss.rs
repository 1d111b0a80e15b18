use super::ReblurOperator;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::motion::PlmModel;

/// Balancing weights of the combined objective. `alpha` and `beta` weight
/// the blur and photometric terms when ground truth is available, `gamma`
/// and `delta` when it is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma, self.delta];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::arg("loss weights must be finite and non-negative"));
        }
        Ok(())
    }
}

fn mean_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

pub fn latent_frame(frames: &[Frame], model: &PlmModel, n: usize) -> Result<Frame> {
    ReblurOperator::new(model).latent(frames, n)
}

/// Blurry image re-rendered as the mean of the `N = M k` latent images.
pub fn reblur(frames: &[Frame], model: &PlmModel) -> Result<Frame> {
    ReblurOperator::new(model).reblur(frames)
}

/// Mean absolute difference between a reblurred and an observed image.
pub fn blur_loss(reblurred: &Frame, observed: &Frame) -> Result<f64> {
    reblurred.check_same_dims(observed, "blur_loss")?;
    Ok(mean_abs_diff(reblurred.data(), observed.data()))
}

pub fn photo_warp(frames: &[Frame], model: &PlmModel, m: usize) -> Result<Frame> {
    ReblurOperator::new(model).photo_warp(frames, m)
}

fn photo_loss_with(op: &ReblurOperator, frames: &[Frame]) -> Result<f64> {
    op.check_frames(frames)?;
    let m_count = op.m_count();
    if m_count < 2 {
        return Err(Error::arg("photometric loss needs at least two frames"));
    }
    let mut sum = 0.0;
    for m in 0..m_count - 1 {
        let warped = op.photo_warp(frames, m)?;
        sum += mean_abs_diff(warped.data(), frames[m].data());
    }
    Ok(sum / (m_count - 1) as f64)
}

/// Mean over consecutive pairs of the mean absolute difference between
/// each frame and its successor warped back onto it.
pub fn photo_loss(frames: &[Frame], model: &PlmModel) -> Result<f64> {
    photo_loss_with(&ReblurOperator::new(model), frames)
}

/// Mean over frames of the mean absolute error against ground truth.
pub fn recon_loss(frames: &[Frame], truth: &[Frame]) -> Result<f64> {
    if frames.len() != truth.len() || frames.is_empty() {
        return Err(Error::arg(format!(
            "recon_loss: {} frames vs {} ground-truth frames",
            frames.len(),
            truth.len()
        )));
    }
    let mut sum = 0.0;
    for (f, g) in frames.iter().zip(truth) {
        f.check_same_dims(g, "recon_loss")?;
        sum += mean_abs_diff(f.data(), g.data());
    }
    Ok(sum / frames.len() as f64)
}

/// Combined objective. With ground truth it is
/// `recon + alpha * blur + beta * photo`; without, `gamma * blur + delta * photo`.
/// Terms with zero weight are not evaluated.
pub fn total_loss(
    frames: &[Frame],
    model: &PlmModel,
    observed: &Frame,
    truth: Option<&[Frame]>,
    weights: &LossWeights,
) -> Result<f64> {
    weights.validate()?;
    let op = ReblurOperator::new(model);
    let (wb, wp, base) = match truth {
        Some(t) => (weights.alpha, weights.beta, recon_loss(frames, t)?),
        None => (weights.gamma, weights.delta, 0.0),
    };
    let mut total = base;
    if wb != 0.0 {
        total += wb * blur_loss(&op.reblur(frames)?, observed)?;
    }
    if wp != 0.0 {
        total += wp * photo_loss_with(&op, frames)?;
    }
    Ok(total)
}

#[inline]
pub(crate) fn charbonnier(x: f64, eps: f64) -> f64 {
    (x * x + eps * eps).sqrt()
}

#[inline]
pub(crate) fn charbonnier_grad(x: f64, eps: f64) -> f64 {
    x / (x * x + eps * eps).sqrt()
}

/// Values of the smoothed self-supervised objective and its two terms.
pub(crate) struct Smoothed {
    pub total: f64,
    /// Exact (unsmoothed) mean-L1 blur and photometric terms.
    pub blur_l1: f64,
    pub photo_l1: f64,
}

/// Evaluates `gamma * blur + delta * photo` with every absolute value
/// replaced by `sqrt(x^2 + eps^2)`, and optionally its gradient.
///
/// The photometric term is dropped when there is a single frame.
pub(crate) fn smoothed_eval(
    op: &ReblurOperator,
    frames: &[Frame],
    observed: &Frame,
    weights: &LossWeights,
    eps: f64,
    mut grad: Option<&mut [Vec<f64>]>,
) -> Result<Smoothed> {
    op.check_frames(frames)?;
    frames[0].check_same_dims(observed, "objective")?;
    let (w, h) = op.dims();
    let npix = (w * h) as f64;
    let m_count = op.m_count();
    let k = op.k();
    if let Some(g) = grad.as_deref_mut() {
        for gm in g.iter_mut() {
            gm.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    let reblurred = op.reblur(frames)?;
    let mut blur = 0.0;
    let mut blur_l1 = 0.0;
    let mut resid_grad = vec![0.0; w * h];
    for (i, (r, b)) in reblurred.data().iter().zip(observed.data()).enumerate() {
        let d = r - b;
        blur += charbonnier(d, eps);
        blur_l1 += d.abs();
        resid_grad[i] = weights.gamma * charbonnier_grad(d, eps) / npix;
    }
    blur /= npix;
    blur_l1 /= npix;
    if let Some(g) = grad.as_deref_mut() {
        let inv_n = 1.0 / op.n_total() as f64;
        for (m, gm) in g.iter_mut().enumerate() {
            for s in 0..k {
                op.latent_adjoint(&resid_grad, m, s, gm, inv_n);
            }
        }
    }

    let mut photo = 0.0;
    let mut photo_l1 = 0.0;
    if m_count >= 2 {
        let pairs = (m_count - 1) as f64;
        let mut warped = vec![0.0; w * h];
        let mut eg = vec![0.0; w * h];
        for m in 0..m_count - 1 {
            let st = op.photo_stencil(m);
            st.apply_into(frames[m + 1].data(), &mut warped, 1.0, false);
            let mut term = 0.0;
            let mut term_l1 = 0.0;
            for (i, (a, b)) in warped.iter().zip(frames[m].data()).enumerate() {
                let d = a - b;
                term += charbonnier(d, eps);
                term_l1 += d.abs();
                eg[i] = weights.delta * charbonnier_grad(d, eps) / (npix * pairs);
            }
            photo += term / npix;
            photo_l1 += term_l1 / npix;
            if let Some(g) = grad.as_deref_mut() {
                st.adjoint_accumulate(&eg, &mut g[m + 1], 1.0);
                for (gv, e) in g[m].iter_mut().zip(&eg) {
                    *gv -= e;
                }
            }
        }
        photo /= pairs;
        photo_l1 /= pairs;
    }
    let total = weights.gamma * blur + weights.delta * photo;
    Ok(Smoothed {
        total,
        blur_l1,
        photo_l1,
    })
}

/// Charbonnier-smoothed self-supervised objective `gamma * blur + delta * photo`.
pub fn smoothed_objective(
    frames: &[Frame],
    model: &PlmModel,
    observed: &Frame,
    weights: &LossWeights,
    eps: f64,
) -> Result<f64> {
    weights.validate()?;
    Ok(smoothed_eval(&ReblurOperator::new(model), frames, observed, weights, eps, None)?.total)
}

/// Gradient of [`smoothed_objective`] with respect to each frame.
pub fn loss_gradient(
    frames: &[Frame],
    model: &PlmModel,
    observed: &Frame,
    weights: &LossWeights,
    eps: f64,
) -> Result<Vec<Frame>> {
    weights.validate()?;
    if !(eps > 0.0) {
        return Err(Error::arg("Charbonnier epsilon must be positive"));
    }
    let op = ReblurOperator::new(model);
    let (w, h) = op.dims();
    let mut grad = vec![vec![0.0; w * h]; op.m_count()];
    smoothed_eval(&op, frames, observed, weights, eps, Some(&mut grad))?;
    grad.into_iter().map(|g| Frame::new(w, h, g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{warp, FlowField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_frame(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Frame {
        Frame::from_fn(w, h, |_, _| rng.gen())
    }

    fn rand_model(w: usize, h: usize, m: usize, k: usize, rng: &mut ChaCha8Rng) -> PlmModel {
        let flows = (0..m)
            .map(|_| FlowField::from_fn(w, h, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        PlmModel::new(flows, k).unwrap()
    }

    #[test]
    fn latent_at_interval_start_is_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let frames: Vec<Frame> = (0..3).map(|_| rand_frame(6, 5, &mut rng)).collect();
        let model = rand_model(6, 5, 3, 4, &mut rng);
        for m in 0..3 {
            assert_eq!(latent_frame(&frames, &model, m * 4).unwrap(), frames[m]);
        }
        assert!(latent_frame(&frames, &model, 12).is_err());
    }

    #[test]
    fn latent_uses_intra_interval_displacement() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let frames: Vec<Frame> = (0..2).map(|_| rand_frame(6, 5, &mut rng)).collect();
        let model = PlmModel::new(
            vec![FlowField::uniform(6, 5, 0.3, -0.2), FlowField::uniform(6, 5, 1.0, 0.0)],
            2,
        )
        .unwrap();
        let got = latent_frame(&frames, &model, 3).unwrap();
        assert_eq!(got, warp(&frames[1], &FlowField::uniform(6, 5, 1.0, 0.0)).unwrap());
    }

    #[test]
    fn constant_frames_are_flow_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frames = vec![Frame::filled(7, 6, 0.37); 3];
        let model = rand_model(7, 6, 3, 5, &mut rng);
        let r = reblur(&frames, &model).unwrap();
        assert!(r.data().iter().all(|&v| (v - 0.37).abs() < 1e-14));
        assert!(latent_frame(&frames, &model, 7).unwrap().data().iter().all(|&v| (v - 0.37).abs() < 1e-15));
        let p = photo_warp(&frames, &model, 1).unwrap();
        assert!(p.data().iter().all(|&v| (v - 0.37).abs() < 1e-15));
    }

    #[test]
    fn reblur_single_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = rand_frame(5, 5, &mut rng);
        let model = PlmModel::new(vec![FlowField::zeros(5, 5)], 1).unwrap();
        assert_eq!(reblur(&[f.clone()], &model).unwrap(), f);
    }

    #[test]
    fn zero_flow_reblur_is_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let frames: Vec<Frame> = (0..4).map(|_| rand_frame(5, 4, &mut rng)).collect();
        let model = PlmModel::linear(FlowField::zeros(5, 4), 4, 3).unwrap();
        let mean = crate::simulator::synthesize_blur(
            &crate::frame::FrameSequence::new(frames.clone(), vec![0, 1, 2, 3]).unwrap(),
        )
        .unwrap();
        assert!(blur_loss(&reblur(&frames, &model).unwrap(), &mean).unwrap() < 1e-15);
    }

    #[test]
    fn blur_loss_values() {
        let a = Frame::filled(4, 4, 0.3);
        assert_eq!(blur_loss(&a, &a).unwrap(), 0.0);
        let b = a.map(|v| v + 0.1);
        assert!((blur_loss(&b, &a).unwrap() - 0.1).abs() < 1e-15);
        assert!(blur_loss(&a, &Frame::zeros(4, 3)).is_err());
    }

    #[test]
    fn photo_warp_samples_backwards_over_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let frames: Vec<Frame> = (0..3).map(|_| rand_frame(9, 4, &mut rng)).collect();
        let model = PlmModel::linear(FlowField::uniform(9, 4, -1.0, 0.0), 3, 2).unwrap();
        // v = (-1, 0), k = 2: frame m+1 sampled 2 px to the right
        let got = photo_warp(&frames, &model, 0).unwrap();
        for y in 0..4 {
            for x in 0..9 {
                assert_eq!(got.get(x, y), frames[1].get((x + 2).min(8), y));
            }
        }
        assert!(photo_warp(&frames, &model, 2).is_err());
        let zero = PlmModel::linear(FlowField::zeros(9, 4), 3, 2).unwrap();
        assert_eq!(photo_warp(&frames, &zero, 1).unwrap(), frames[2]);
    }

    #[test]
    fn photo_loss_zero_on_consistent_sequence() {
        let base = Frame::from_fn(12, 6, |x, _| 0.05 * x as f64);
        let model = PlmModel::linear(FlowField::uniform(12, 6, 0.5, 0.0), 3, 2).unwrap();
        // frame m+1 = frame m shifted by one pixel, interior only (exact for a ramp away from the border)
        let shift = |f: &Frame| warp(f, &FlowField::uniform(12, 6, 1.0, 0.0)).unwrap();
        let f1 = shift(&base);
        let f2 = shift(&f1);
        let frames = [base.clone(), f1, f2];
        let op = ReblurOperator::new(&model);
        for m in 0..2 {
            let w = op.photo_warp(&frames, m).unwrap();
            for y in 0..6 {
                for x in 1..9 {
                    assert!((w.get(x, y) - frames[m].get(x, y)).abs() < 1e-15);
                }
            }
        }
        let still = vec![base; 3];
        assert_eq!(photo_loss(&still, &PlmModel::linear(FlowField::zeros(12, 6), 3, 2).unwrap()).unwrap(), 0.0);
        assert!(photo_loss(&still[..1], &PlmModel::new(vec![FlowField::zeros(12, 6)], 2).unwrap()).is_err());
    }

    #[test]
    fn losses_match_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (w, h) = (6, 5);
        let frames: Vec<Frame> = (0..3).map(|_| rand_frame(w, h, &mut rng)).collect();
        let truth: Vec<Frame> = (0..3).map(|_| rand_frame(w, h, &mut rng)).collect();
        let model = rand_model(w, h, 3, 2, &mut rng);
        // photometric: explicit loops with warp()
        let mut photo = 0.0;
        for m in 0..2 {
            let back = warp(&frames[m + 1], &model.flows()[m].scaled(-2.0)).unwrap();
            let mut s = 0.0;
            for y in 0..h {
                for x in 0..w {
                    s += (back.get(x, y) - frames[m].get(x, y)).abs();
                }
            }
            photo += s / (w * h) as f64;
        }
        photo /= 2.0;
        assert_eq!(photo_loss(&frames, &model).unwrap(), photo);
        let mut rec = 0.0;
        for m in 0..3 {
            let mut s = 0.0;
            for y in 0..h {
                for x in 0..w {
                    s += (frames[m].get(x, y) - truth[m].get(x, y)).abs();
                }
            }
            rec += s / (w * h) as f64;
        }
        assert_eq!(recon_loss(&frames, &truth).unwrap(), rec / 3.0);
        let shifted: Vec<Frame> = truth.iter().map(|f| f.map(|v| v + 0.2)).collect();
        assert!((recon_loss(&shifted, &truth).unwrap() - 0.2).abs() < 1e-14);
        assert!(recon_loss(&frames[..2], &truth).is_err());
    }

    #[test]
    fn total_loss_branches_and_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (w, h) = (6, 6);
        let frames: Vec<Frame> = (0..3).map(|_| rand_frame(w, h, &mut rng)).collect();
        let truth: Vec<Frame> = (0..3).map(|_| rand_frame(w, h, &mut rng)).collect();
        let observed = rand_frame(w, h, &mut rng);
        let model = rand_model(w, h, 3, 3, &mut rng);
        let blur = blur_loss(&reblur(&frames, &model).unwrap(), &observed).unwrap();
        let photo = photo_loss(&frames, &model).unwrap();
        let rec = recon_loss(&frames, &truth).unwrap();
        let ones = LossWeights::default();
        let sup = total_loss(&frames, &model, &observed, Some(&truth), &ones).unwrap();
        assert!((sup - (rec + blur + photo)).abs() < 1e-14);
        let masked = LossWeights { alpha: 0.0, beta: 0.0, gamma: 0.7, delta: 2.5 };
        let unsup = total_loss(&frames, &model, &observed, None, &masked).unwrap();
        assert!((unsup - (0.7 * blur + 2.5 * photo)).abs() < 1e-14);
        let doubled = LossWeights { gamma: 1.4, ..masked };
        let unsup2 = total_loss(&frames, &model, &observed, None, &doubled).unwrap();
        assert!((unsup2 - unsup - 0.7 * blur).abs() < 1e-14);
        let bad = LossWeights { gamma: -1.0, ..ones };
        assert!(total_loss(&frames, &model, &observed, None, &bad).is_err());
    }

    #[test]
    fn total_loss_zero_at_consistent_static_scene() {
        let f = Frame::from_fn(5, 5, |x, y| 0.1 * (x * y % 7) as f64);
        let frames = vec![f.clone(); 3];
        let model = PlmModel::linear(FlowField::zeros(5, 5), 3, 4).unwrap();
        let l = total_loss(&frames, &model, &f, Some(&frames), &LossWeights::default()).unwrap();
        assert!(l < 1e-15);
    }

    #[test]
    fn gradient_vanishes_at_global_minimum() {
        let f = Frame::from_fn(8, 8, |x, y| 0.1 + 0.05 * ((x + 2 * y) % 9) as f64);
        let frames = vec![f.clone(); 3];
        let model = PlmModel::linear(FlowField::zeros(8, 8), 3, 2).unwrap();
        let g = loss_gradient(&frames, &model, &f, &LossWeights::default(), 1e-6).unwrap();
        let norm: f64 = g.iter().flat_map(|f| f.data()).map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-8);
    }

    #[test]
    fn photometric_weight_zero_leaves_blur_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let frames: Vec<Frame> = (0..3).map(|_| rand_frame(6, 6, &mut rng)).collect();
        let observed = rand_frame(6, 6, &mut rng);
        let model = rand_model(6, 6, 3, 2, &mut rng);
        let blur_only = LossWeights { delta: 0.0, ..LossWeights::default() };
        let photo_only = LossWeights { gamma: 0.0, ..LossWeights::default() };
        let gb = loss_gradient(&frames, &model, &observed, &blur_only, 1e-3).unwrap();
        let gp = loss_gradient(&frames, &model, &observed, &photo_only, 1e-3).unwrap();
        let g = loss_gradient(&frames, &model, &observed, &LossWeights::default(), 1e-3).unwrap();
        for m in 0..3 {
            for i in 0..36 {
                let sum = gb[m].data()[i] + gp[m].data()[i];
                assert!((g[m].data()[i] - sum).abs() < 1e-15);
            }
        }
    }
}
