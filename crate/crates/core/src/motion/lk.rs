//! Dense single-scale Lucas-Kanade on event count images.

use super::{warp, FlowField};
use crate::error::{Error, Result};
use crate::event::{count_image, partition_intervals, window, EventStream};
use crate::frame::Frame;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LkParams {
    pub window_radius: usize,
    /// Pixels whose structure tensor has a smaller eigenvalue below this
    /// (in squared count units) get zero flow.
    pub min_eigenvalue: f64,
    /// Gauss-Newton passes; each re-warps `prev` by the current estimate.
    pub iterations: usize,
}

impl Default for LkParams {
    fn default() -> Self {
        LkParams {
            window_radius: 7,
            min_eigenvalue: 1e-3,
            iterations: 1,
        }
    }
}

fn binomial3(img: &Frame) -> Frame {
    let (w, h) = img.dims();
    const K: [f64; 3] = [0.25, 0.5, 0.25];
    let at = |x: isize, y: isize, src: &Frame| {
        src.get(x.clamp(0, w as isize - 1) as usize, y.clamp(0, h as isize - 1) as usize)
    };
    let horiz = Frame::from_fn(w, h, |x, y| {
        (0..3)
            .map(|j| K[j] * at(x as isize + j as isize - 1, y as isize, img))
            .sum()
    });
    Frame::from_fn(w, h, |x, y| {
        (0..3)
            .map(|j| K[j] * at(x as isize, y as isize + j as isize - 1, &horiz))
            .sum()
    })
}

/// Summed-area table with a zero first row/column.
struct Integral {
    w1: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn new(values: &[f64], w: usize, h: usize) -> Self {
        let w1 = w + 1;
        let mut sums = vec![0.0; w1 * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                row += values[y * w + x];
                sums[(y + 1) * w1 + x + 1] = sums[y * w1 + x + 1] + row;
            }
        }
        Integral { w1, sums }
    }

    /// Sum over `[x0, x1) x [y0, y1)`.
    fn rect(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        let s = &self.sums;
        s[y1 * self.w1 + x1] - s[y0 * self.w1 + x1] - s[y1 * self.w1 + x0] + s[y0 * self.w1 + x0]
    }
}

/// Per-pixel flow `f` such that `next(x) ~ prev(x + f(x))`.
pub fn estimate_flow(prev: &Frame, next: &Frame, window_radius: usize) -> Result<FlowField> {
    estimate_flow_with(
        prev,
        next,
        &LkParams {
            window_radius,
            ..LkParams::default()
        },
    )
}

pub fn estimate_flow_with(prev: &Frame, next: &Frame, params: &LkParams) -> Result<FlowField> {
    prev.check_same_dims(next, "estimate_flow")?;
    if params.window_radius == 0 {
        return Err(Error::arg("window_radius must be at least 1"));
    }
    let (w, h) = prev.dims();
    let prev = binomial3(prev);
    let next = binomial3(next);
    let mut flow = FlowField::zeros(w, h);
    for _ in 0..params.iterations.max(1) {
        let moved = warp(&prev, &flow)?;
        let step = lk_step(&moved, &next, params);
        let (mut u, mut v) = (flow.u().to_vec(), flow.v().to_vec());
        for i in 0..w * h {
            u[i] += step.u()[i];
            v[i] += step.v()[i];
        }
        flow = FlowField::new(w, h, u, v)?;
    }
    Ok(flow)
}

fn lk_step(prev: &Frame, next: &Frame, params: &LkParams) -> FlowField {
    let (w, h) = prev.dims();
    let n = w * h;
    let clampx = |x: isize| x.clamp(0, w as isize - 1) as usize;
    let clampy = |y: isize| y.clamp(0, h as isize - 1) as usize;
    let mean = |x: usize, y: usize| 0.5 * (prev.get(x, y) + next.get(x, y));

    let mut ixx = vec![0.0; n];
    let mut ixy = vec![0.0; n];
    let mut iyy = vec![0.0; n];
    let mut ixt = vec![0.0; n];
    let mut iyt = vec![0.0; n];
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let gx = 0.5 * (mean(clampx(xi + 1), y) - mean(clampx(xi - 1), y));
            let gy = 0.5 * (mean(x, clampy(yi + 1)) - mean(x, clampy(yi - 1)));
            let gt = next.get(x, y) - prev.get(x, y);
            let i = y * w + x;
            ixx[i] = gx * gx;
            ixy[i] = gx * gy;
            iyy[i] = gy * gy;
            ixt[i] = gx * gt;
            iyt[i] = gy * gt;
        }
    }
    let tables = [&ixx, &ixy, &iyy, &ixt, &iyt].map(|v| Integral::new(v, w, h));
    let r = params.window_radius;
    FlowField::from_fn(w, h, |x, y| {
        let (x0, y0) = (x.saturating_sub(r), y.saturating_sub(r));
        let (x1, y1) = ((x + r + 1).min(w), (y + r + 1).min(h));
        let [a, b, c, bx, by] = [0, 1, 2, 3, 4].map(|k| tables[k].rect(x0, y0, x1, y1));
        let half_tr = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        if half_tr - disc < params.min_eigenvalue {
            return (0.0, 0.0);
        }
        let det = a * c - b * b;
        ((c * bx - b * by) / det, (a * by - b * bx) / det)
    })
}

/// Per-interval displacement fields estimated from the events of each of
/// `m_count` equal intervals.
///
/// For each interval the count images of its first and second halves are
/// matched; their content is half an interval apart, so the result is
/// doubled to express displacement per whole interval.
pub fn flows_from_events(
    stream: &EventStream,
    m_count: usize,
    window_radius: usize,
) -> Result<Vec<FlowField>> {
    let params = LkParams {
        window_radius,
        ..LkParams::default()
    };
    partition_intervals(stream, m_count)?
        .iter()
        .map(|part| {
            let mid = part.t_start() + (part.t_end() - part.t_start()) / 2;
            let first = window(part, part.t_start(), mid)?;
            let second = window(part, mid, part.t_end() + 1)?;
            let flow = estimate_flow_with(&count_image(&first, false), &count_image(&second, false), &params)?;
            Ok(flow.scaled(2.0))
        })
        .collect()
}

/// Per-interval displacement fields from `M` frames sampled at the interval
/// starts.
///
/// Consecutive pairs give the displacement across each of the `M - 1` inner
/// boundaries. Interval `m` takes the average of the pairs on either side of
/// it; the first and last intervals use their single neighbouring pair.
pub fn flows_from_frames(frames: &[Frame], params: &LkParams) -> Result<Vec<FlowField>> {
    match frames.len() {
        0 => return Err(Error::arg("no frames to estimate flow from")),
        1 => return Ok(vec![FlowField::zeros(frames[0].width(), frames[0].height())]),
        _ => {}
    }
    let pairs = frames
        .windows(2)
        .map(|p| estimate_flow_with(&p[0], &p[1], params))
        .collect::<Result<Vec<_>>>()?;
    let m = frames.len();
    Ok((0..m)
        .map(|i| match i {
            0 => pairs[0].clone(),
            _ if i == m - 1 => pairs[m - 2].clone(),
            _ => {
                let mut f = pairs[i - 1].scaled(0.5);
                f.add_scaled(&pairs[i], 0.5);
                f
            }
        })
        .collect())
}
