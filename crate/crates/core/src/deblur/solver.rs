use std::io::Write;
use std::path::Path;

use super::loss::smoothed_eval;
use super::{LossWeights, ReblurOperator};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::motion::PlmModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub iterations: usize,
    /// Fixed step, in intensity units per unit of per-pixel gradient.
    pub step_size: f64,
    /// Smoothing of the absolute value inside the differentiated objective.
    pub charbonnier_eps: f64,
    pub weights: LossWeights,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            iterations: 500,
            step_size: 0.25,
            charbonnier_eps: 0.3,
            weights: LossWeights::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::arg("iterations must be at least 1"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::arg("step_size must be positive"));
        }
        if !(self.charbonnier_eps > 0.0 && self.charbonnier_eps.is_finite()) {
            return Err(Error::arg("charbonnier_eps must be positive"));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// Exact-L1 objective `gamma * blur + delta * photo` of the iterate at
    /// the start of each iteration.
    pub loss_trace: Vec<f64>,
    pub blur_trace: Vec<f64>,
    pub photo_trace: Vec<f64>,
    /// Terms of the returned frames.
    pub blur_loss_final: f64,
    pub photo_loss_final: f64,
    pub total_loss_final: f64,
    pub iterations_run: usize,
}

/// Recovers `M` sharp frames from `observed` under the motion `model`.
///
/// Every frame starts as the observed image. Each iteration takes one
/// fixed-size gradient step on the Charbonnier-smoothed
/// `gamma * blur + delta * photo` and projects the frames back onto
/// `[0, 1]`. The step acts on the pixel-summed objective, so `step_size`
/// means the same thing at any resolution.
pub fn solve(observed: &Frame, model: &PlmModel, cfg: &SolverConfig) -> Result<(Vec<Frame>, SolverReport)> {
    cfg.validate()?;
    if observed.dims() != model.dims() {
        return Err(Error::arg("observed frame and motion model sizes differ"));
    }
    let op = ReblurOperator::new(model);
    let (w, h) = op.dims();
    let npix = (w * h) as f64;
    let m_count = op.m_count();
    let mut frames = vec![observed.clone(); m_count];
    let mut grad = vec![vec![0.0; w * h]; m_count];
    let mut report = SolverReport {
        loss_trace: Vec::with_capacity(cfg.iterations),
        blur_trace: Vec::with_capacity(cfg.iterations),
        photo_trace: Vec::with_capacity(cfg.iterations),
        blur_loss_final: 0.0,
        photo_loss_final: 0.0,
        total_loss_final: 0.0,
        iterations_run: 0,
    };
    let scale = cfg.step_size * npix;
    let wts = &cfg.weights;
    for it in 0..cfg.iterations {
        let val = smoothed_eval(&op, &frames, observed, wts, cfg.charbonnier_eps, Some(&mut grad))?;
        let exact = wts.gamma * val.blur_l1 + wts.delta * val.photo_l1;
        if !exact.is_finite() || !val.total.is_finite() {
            return Err(Error::Numerical {
                iteration: it,
                message: "objective is not finite".into(),
            });
        }
        report.loss_trace.push(exact);
        report.blur_trace.push(val.blur_l1);
        report.photo_trace.push(val.photo_l1);
        for (f, g) in frames.iter_mut().zip(&grad) {
            for (v, gv) in f.data_mut().iter_mut().zip(g) {
                *v = (*v - scale * gv).clamp(0.0, 1.0);
            }
        }
        report.iterations_run = it + 1;
    }
    let fin = smoothed_eval(&op, &frames, observed, wts, cfg.charbonnier_eps, None)?;
    report.blur_loss_final = fin.blur_l1;
    report.photo_loss_final = fin.photo_l1;
    report.total_loss_final = wts.gamma * fin.blur_l1 + wts.delta * fin.photo_l1;
    if !report.total_loss_final.is_finite() {
        return Err(Error::Numerical {
            iteration: cfg.iterations,
            message: "final objective is not finite".into(),
        });
    }
    Ok((frames, report))
}

/// Writes the trace as CSV with header `iter,total,blur,photo`.
pub fn write_trace_csv(path: &Path, report: &SolverReport) -> Result<()> {
    let mut out = String::from("iter,total,blur,photo\n");
    for i in 0..report.loss_trace.len() {
        out.push_str(&format!(
            "{},{:.9e},{:.9e},{:.9e}\n",
            i, report.loss_trace[i], report.blur_trace[i], report.photo_trace[i]
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}
