use crate::error::{Error, Result};

/// Dense per-pixel 2D displacement, stored as two row-major rasters.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl FlowField {
    pub fn new(width: usize, height: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != width * height || v.len() != width * height {
            return Err(Error::arg("flow component rasters do not match dimensions"));
        }
        if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::arg("flow values must be finite"));
        }
        Ok(FlowField {
            width,
            height,
            u,
            v,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::uniform(width, height, 0.0, 0.0)
    }

    pub fn uniform(width: usize, height: usize, u: f64, v: f64) -> Self {
        FlowField {
            width,
            height,
            u: vec![u; width * height],
            v: vec![v; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> (f64, f64)) -> Self {
        let mut u = Vec::with_capacity(width * height);
        let mut v = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let (a, b) = f(x, y);
                u.push(a);
                v.push(b);
            }
        }
        FlowField {
            width,
            height,
            u,
            v,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> (f64, f64) {
        let i = y * self.width + x;
        (self.u[i], self.v[i])
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn scaled(&self, s: f64) -> FlowField {
        FlowField {
            width: self.width,
            height: self.height,
            u: self.u.iter().map(|a| a * s).collect(),
            v: self.v.iter().map(|a| a * s).collect(),
        }
    }

    /// Componentwise `self + s * other`.
    pub fn add_scaled(&mut self, other: &FlowField, s: f64) {
        debug_assert_eq!(self.dims(), other.dims());
        for (a, b) in self.u.iter_mut().zip(&other.u) {
            *a += s * b;
        }
        for (a, b) in self.v.iter_mut().zip(&other.v) {
            *a += s * b;
        }
    }

    /// Mean of the two components over all pixels.
    pub fn mean(&self) -> (f64, f64) {
        let n = self.u.len().max(1) as f64;
        (self.u.iter().sum::<f64>() / n, self.v.iter().sum::<f64>() / n)
    }

    pub fn max_abs_diff(&self, other: &FlowField) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Piece-wise linear motion: `M` unit flows (displacement per sub-step),
/// each held for `k` sub-steps, so the exposure is discretized into
/// `N = M * k` latent instants.
#[derive(Debug, Clone, PartialEq)]
pub struct PlmModel {
    flows: Vec<FlowField>,
    k: usize,
}

impl PlmModel {
    pub fn new(flows: Vec<FlowField>, k: usize) -> Result<Self> {
        if flows.is_empty() {
            return Err(Error::arg("a PLM model needs at least one interval flow"));
        }
        if k == 0 {
            return Err(Error::arg("interval length k must be at least 1"));
        }
        let dims = flows[0].dims();
        if flows.iter().any(|f| f.dims() != dims) {
            return Err(Error::arg("all interval flows must share dimensions"));
        }
        Ok(PlmModel { flows, k })
    }

    /// Builds the model from per-interval displacements (as produced by
    /// [`flows_from_events`](super::flows_from_events)) by dividing each by `k`.
    pub fn from_interval_displacements(displacements: Vec<FlowField>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::arg("interval length k must be at least 1"));
        }
        let inv = 1.0 / k as f64;
        Self::new(displacements.iter().map(|d| d.scaled(inv)).collect(), k)
    }

    /// Linear-motion special case: one unit flow repeated over `m_count` intervals.
    pub fn linear(v: FlowField, m_count: usize, k: usize) -> Result<Self> {
        Self::new(vec![v; m_count], k)
    }

    pub fn flows(&self) -> &[FlowField] {
        &self.flows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m_count(&self) -> usize {
        self.flows.len()
    }

    pub fn n_total(&self) -> usize {
        self.flows.len() * self.k
    }

    pub fn dims(&self) -> (usize, usize) {
        self.flows[0].dims()
    }

    /// Per-interval displacement `k * v_m`.
    pub fn interval_displacements(&self) -> Vec<FlowField> {
        self.flows.iter().map(|f| f.scaled(self.k as f64)).collect()
    }

    /// Interval index and offset within it for latent instant `n`.
    pub(crate) fn locate(&self, n: usize) -> Result<(usize, usize)> {
        if n >= self.n_total() {
            return Err(Error::arg(format!(
                "latent index {n} outside [0, {})",
                self.n_total()
            )));
        }
        Ok((n / self.k, n % self.k))
    }
}

/// Linear motion field `u_n = n v`.
pub fn lm_field(v: &FlowField, n: usize) -> FlowField {
    v.scaled(n as f64)
}

/// PLM motion field at latent instant `n` in interval `m = n / k`:
/// `(n - m k) v_m + k * sum_{j<m} v_j`.
pub fn plm_field(model: &PlmModel, n: usize) -> Result<FlowField> {
    let (m, offset) = model.locate(n)?;
    let (w, h) = model.dims();
    let mut cumulative = FlowField::zeros(w, h);
    for v in &model.flows[..m] {
        cumulative.add_scaled(v, 1.0);
    }
    let mut out = cumulative.scaled(model.k as f64);
    out.add_scaled(&model.flows[m], offset as f64);
    Ok(out)
}
