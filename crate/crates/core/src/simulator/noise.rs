use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

/// Spatial sensor noise: false negatives and background activity.
///
/// Each real event is dropped with probability `fn_prob`. Background events
/// arrive as a homogeneous Poisson process of `ba_rate` events per pixel per
/// second, uniform over pixels and the stream window, with random polarity.
pub fn inject_spatial_noise(
    stream: &EventStream,
    ba_rate: f64,
    fn_prob: f64,
    rng_seed: u64,
) -> Result<EventStream> {
    if !(0.0..=1.0).contains(&fn_prob) {
        return Err(Error::arg("fn_prob must lie in [0, 1]"));
    }
    if !(ba_rate >= 0.0 && ba_rate.is_finite()) {
        return Err(Error::arg("ba_rate must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut events: Vec<Event> = if fn_prob > 0.0 {
        stream
            .events()
            .iter()
            .filter(|_| rng.gen::<f64>() >= fn_prob)
            .copied()
            .collect()
    } else {
        stream.events().to_vec()
    };

    let (w, h) = (stream.width(), stream.height());
    let expected = ba_rate * stream.duration_us() as f64 * 1e-6 * (w * h) as f64;
    if expected > 0.0 {
        let count = Poisson::new(expected)
            .map_err(|e| Error::arg(e.to_string()))?
            .sample(&mut rng) as usize;
        for _ in 0..count {
            let t = rng.gen_range(stream.t_start()..=stream.t_end());
            let x = rng.gen_range(0..w) as u16;
            let y = rng.gen_range(0..h) as u16;
            let p = if rng.gen_bool(0.5) {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            events.push(Event::new(t, x, y, p));
        }
    }
    EventStream::from_unsorted(w, h, stream.t_start(), stream.t_end(), events)
}

/// Temporal noise from a bandwidth-limited FIFO read-out.
///
/// Events leave the queue no faster than `max_bandwidth` per second, so each
/// output time is `max(t_i, previous_output + 1/max_bandwidth)`. Counts and
/// the `(x, y, p)` order are untouched; the window grows to cover any
/// events pushed past `t_end`.
pub fn inject_temporal_jitter(stream: &EventStream, max_bandwidth: f64) -> Result<EventStream> {
    if !(max_bandwidth > 0.0 && max_bandwidth.is_finite()) {
        return Err(Error::arg("max_bandwidth must be positive and finite"));
    }
    let period_us = 1e6 / max_bandwidth;
    let mut free_at = f64::NEG_INFINITY;
    let events: Vec<Event> = stream
        .events()
        .iter()
        .map(|e| {
            let served = (e.t as f64).max(free_at + period_us);
            free_at = served;
            Event { t: (served.ceil() as u64).max(e.t), ..*e }
        })
        .collect();
    let t_end = events.last().map_or(stream.t_end(), |e| e.t.max(stream.t_end()));
    EventStream::new(stream.width(), stream.height(), stream.t_start(), t_end, events)
}
