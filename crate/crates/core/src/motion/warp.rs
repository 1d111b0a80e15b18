use super::FlowField;
use crate::error::{Error, Result};
use crate::frame::Frame;

/// Precomputed bilinear sampling pattern of a backward warp.
///
/// Output pixel `i` reads the four source pixels `idx[i]` with weights
/// `wt[i]`. Because the warp is linear in the image, the same stencil gives
/// both the forward map and its adjoint.
#[derive(Debug, Clone)]
pub struct WarpStencil {
    width: usize,
    height: usize,
    idx: Vec<[u32; 4]>,
    wt: Vec<[f64; 4]>,
}

impl WarpStencil {
    /// Stencil for sampling at `x + scale * field(x)`, clamped to the raster.
    pub fn new(field: &FlowField, scale: f64) -> Self {
        let (w, h) = field.dims();
        let max_x = w.saturating_sub(1) as f64;
        let max_y = h.saturating_sub(1) as f64;
        let mut idx = Vec::with_capacity(w * h);
        let mut wt = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let (du, dv) = field.get(x, y);
                let sx = (x as f64 + scale * du).clamp(0.0, max_x);
                let sy = (y as f64 + scale * dv).clamp(0.0, max_y);
                let x0 = sx.floor();
                let y0 = sy.floor();
                let fx = sx - x0;
                let fy = sy - y0;
                let x0 = x0 as usize;
                let y0 = y0 as usize;
                let x1 = (x0 + 1).min(w - 1);
                let y1 = (y0 + 1).min(h - 1);
                idx.push([
                    (y0 * w + x0) as u32,
                    (y0 * w + x1) as u32,
                    (y1 * w + x0) as u32,
                    (y1 * w + x1) as u32,
                ]);
                wt.push([
                    (1.0 - fx) * (1.0 - fy),
                    fx * (1.0 - fy),
                    (1.0 - fx) * fy,
                    fx * fy,
                ]);
            }
        }
        WarpStencil {
            width: w,
            height: h,
            idx,
            wt,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Writes the warped image into `out`, adding `weight * warp(src)` when
    /// `accumulate` is set and overwriting otherwise.
    pub fn apply_into(&self, src: &[f64], out: &mut [f64], weight: f64, accumulate: bool) {
        for ((o, ix), w) in out.iter_mut().zip(&self.idx).zip(&self.wt) {
            let mut s = 0.0;
            for j in 0..4 {
                if w[j] != 0.0 {
                    s += w[j] * src[ix[j] as usize];
                }
            }
            if accumulate {
                *o += weight * s;
            } else {
                *o = weight * s;
            }
        }
    }

    pub fn apply(&self, src: &Frame) -> Frame {
        let mut out = Frame::zeros(self.width, self.height);
        self.apply_into(src.data(), out.data_mut(), 1.0, false);
        out
    }

    /// Adds `weight * W^T g` to `acc`, scattering each output gradient back
    /// onto the source pixels it was interpolated from.
    pub fn adjoint_accumulate(&self, g: &[f64], acc: &mut [f64], weight: f64) {
        for ((gi, ix), w) in g.iter().zip(&self.idx).zip(&self.wt) {
            let s = weight * gi;
            for j in 0..4 {
                if w[j] != 0.0 {
                    acc[ix[j] as usize] += w[j] * s;
                }
            }
        }
    }
}

/// Backward bilinear warp: `out(x) = img(x + field(x))` with clamp-to-edge
/// sampling coordinates.
pub fn warp(img: &Frame, field: &FlowField) -> Result<Frame> {
    if img.dims() != field.dims() {
        return Err(Error::arg(format!(
            "warp: image {}x{} vs flow {}x{}",
            img.width(),
            img.height(),
            field.width(),
            field.height()
        )));
    }
    Ok(WarpStencil::new(field, 1.0).apply(img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Frame {
        Frame::from_fn(w, h, |_, _| rng.gen())
    }

    #[test]
    fn zero_field_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = random_frame(7, 5, &mut rng);
        assert_eq!(warp(&img, &FlowField::zeros(7, 5)).unwrap(), img);
    }

    #[test]
    fn unit_shift_takes_right_neighbour() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let img = random_frame(6, 4, &mut rng);
        let out = warp(&img, &FlowField::uniform(6, 4, 1.0, 0.0)).unwrap();
        for y in 0..4 {
            for x in 0..6 {
                assert_eq!(out.get(x, y), img.get((x + 1).min(5), y));
            }
        }
    }

    #[test]
    fn half_shift_on_ramp_is_midpoint() {
        let img = Frame::from_fn(8, 3, |x, _| 0.1 * x as f64);
        let out = warp(&img, &FlowField::uniform(8, 3, 0.5, 0.0)).unwrap();
        for y in 0..3 {
            for x in 0..7 {
                let mid = 0.5 * (img.get(x, y) + img.get(x + 1, y));
                assert!((out.get(x, y) - mid).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(warp(&Frame::zeros(3, 3), &FlowField::zeros(3, 4)).is_err());
    }

    #[test]
    fn linear_in_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_frame(9, 7, &mut rng);
        let b = random_frame(9, 7, &mut rng);
        let f = FlowField::from_fn(9, 7, |_, _| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
        let (ca, cb) = (0.7, -1.3);
        let combo = Frame::from_fn(9, 7, |x, y| ca * a.get(x, y) + cb * b.get(x, y));
        let lhs = warp(&combo, &f).unwrap();
        let wa = warp(&a, &f).unwrap();
        let wb = warp(&b, &f).unwrap();
        for i in 0..lhs.len() {
            let rhs = ca * wa.data()[i] + cb * wb.data()[i];
            assert!((lhs.data()[i] - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_identity() {
        // <W a, g> == <a, W^T g>
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_frame(8, 6, &mut rng);
        let g = random_frame(8, 6, &mut rng);
        let f = FlowField::from_fn(8, 6, |_, _| (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)));
        let st = WarpStencil::new(&f, 0.8);
        let wa = st.apply(&a);
        let mut wtg = vec![0.0; 48];
        st.adjoint_accumulate(g.data(), &mut wtg, 1.0);
        let lhs: f64 = wa.data().iter().zip(g.data()).map(|(x, y)| x * y).sum();
        let rhs: f64 = a.data().iter().zip(&wtg).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
