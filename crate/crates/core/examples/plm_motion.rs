//! Piece-wise linear motion: per-interval flows chained into a trajectory,
//! compared with a single constant (linear) flow.
//!
//!     cargo run --release --example plm_motion

use evdeblur::motion::{lm_field, plm_field};
use evdeblur::{FlowField, PlmModel};

fn main() -> evdeblur::Result<()> {
    let (m, k) = (4, 5);
    // unit flows per latent sub-step: speed doubles halfway through
    let speeds = [0.1, 0.1, 0.2, 0.2];
    let flows: Vec<FlowField> = speeds.iter().map(|&s| FlowField::uniform(8, 8, s, 0.0)).collect();
    let plm = PlmModel::new(flows, k)?;
    let mean = speeds.iter().sum::<f64>() / m as f64;
    let v = FlowField::uniform(8, 8, mean, 0.0);

    println!("  n  interval   plm_u    lm_u");
    for n in 0..m * k {
        let p = plm_field(&plm, n)?.get(0, 0).0;
        let l = lm_field(&v, n).get(0, 0).0;
        println!("{n:>3}  {:>8}  {p:>6.2}  {l:>6.2}", n / k);
    }

    // interval starts sit at K times the sum of earlier unit flows
    for b in 0..m {
        let want = (0.0 + speeds[..b].iter().sum::<f64>()) * k as f64;
        println!("boundary {b}: {:.2} (K * sum = {want:.2})", plm_field(&plm, b * k)?.get(0, 0).0);
    }

    // equal flows in every interval reduce to the linear model
    let same = PlmModel::linear(v.clone(), m, k)?;
    let worst = (0..m * k)
        .map(|n| Ok(plm_field(&same, n)?.max_abs_diff(&lm_field(&v, n))))
        .collect::<evdeblur::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("constant-flow PLM vs LM: max difference {worst:.1e}");
    Ok(())
}
