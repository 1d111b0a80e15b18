use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::motion::{PlmModel, WarpStencil};

/// Precomputed warps for one PLM model: the `N` latent-frame warps used by
/// reblurring and the `M - 1` warps of the photometric term.
///
/// Latent instant `n = m k + s` reads frame `m` at `x + s v_m(x)`. The
/// photometric term maps frame `m + 1` back onto frame `m` by sampling it
/// at `x - k v_m(x)`, the inverse of the interval's displacement.
#[derive(Debug, Clone)]
pub struct ReblurOperator {
    m_count: usize,
    k: usize,
    width: usize,
    height: usize,
    /// `latent[m][s - 1]` for `s` in `1..k`; `s = 0` is the identity.
    latent: Vec<Vec<WarpStencil>>,
    photo: Vec<WarpStencil>,
}

impl ReblurOperator {
    pub fn new(model: &PlmModel) -> Self {
        let k = model.k();
        let latent = model
            .flows()
            .iter()
            .map(|v| (1..k).map(|s| WarpStencil::new(v, s as f64)).collect())
            .collect();
        let photo = model
            .flows()
            .iter()
            .take(model.m_count().saturating_sub(1))
            .map(|v| WarpStencil::new(v, -(k as f64)))
            .collect();
        let (width, height) = model.dims();
        ReblurOperator {
            m_count: model.m_count(),
            k,
            width,
            height,
            latent,
            photo,
        }
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_total(&self) -> usize {
        self.m_count * self.k
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub(crate) fn check_frames(&self, frames: &[Frame]) -> Result<()> {
        if frames.len() != self.m_count {
            return Err(Error::arg(format!(
                "expected {} frames for the motion model, got {}",
                self.m_count,
                frames.len()
            )));
        }
        if frames.iter().any(|f| f.dims() != self.dims()) {
            return Err(Error::arg("frame dimensions do not match the motion model"));
        }
        Ok(())
    }

    pub(crate) fn latent_into(&self, frame: &Frame, m: usize, s: usize, out: &mut [f64], weight: f64, acc: bool) {
        if s == 0 {
            for (o, v) in out.iter_mut().zip(frame.data()) {
                if acc {
                    *o += weight * v;
                } else {
                    *o = weight * v;
                }
            }
        } else {
            self.latent[m][s - 1].apply_into(frame.data(), out, weight, acc);
        }
    }

    pub(crate) fn latent_adjoint(&self, g: &[f64], m: usize, s: usize, acc: &mut [f64], weight: f64) {
        if s == 0 {
            for (a, v) in acc.iter_mut().zip(g) {
                *a += weight * v;
            }
        } else {
            self.latent[m][s - 1].adjoint_accumulate(g, acc, weight);
        }
    }

    pub(crate) fn photo_stencil(&self, m: usize) -> &WarpStencil {
        &self.photo[m]
    }

    /// Latent sharp image at instant `n`.
    pub fn latent(&self, frames: &[Frame], n: usize) -> Result<Frame> {
        self.check_frames(frames)?;
        if n >= self.n_total() {
            return Err(Error::arg(format!("latent index {n} outside [0, {})", self.n_total())));
        }
        let (m, s) = (n / self.k, n % self.k);
        let mut out = Frame::zeros(self.width, self.height);
        self.latent_into(&frames[m], m, s, out.data_mut(), 1.0, false);
        Ok(out)
    }

    /// Average of all `N` latent images.
    pub fn reblur(&self, frames: &[Frame]) -> Result<Frame> {
        self.check_frames(frames)?;
        let mut out = Frame::zeros(self.width, self.height);
        let w = 1.0 / self.n_total() as f64;
        for (m, frame) in frames.iter().enumerate() {
            for s in 0..self.k {
                self.latent_into(frame, m, s, out.data_mut(), w, true);
            }
        }
        Ok(out)
    }

    /// Frame `m + 1` warped back onto frame `m`.
    pub fn photo_warp(&self, frames: &[Frame], m: usize) -> Result<Frame> {
        self.check_frames(frames)?;
        if m + 1 >= self.m_count {
            return Err(Error::arg(format!(
                "photometric index {m} outside [0, {})",
                self.m_count.saturating_sub(1)
            )));
        }
        Ok(self.photo[m].apply(&frames[m + 1]))
    }
}
