//! Motion models and dense warping.
//!
//! Flows follow one convention everywhere: a field `f` relates an earlier
//! image `A` to a later image `B` by `B(x) = A(x + f(x))`, i.e. `B` is
//! obtained from `A` by [`warp`]. Image content therefore moves by `-f`.

mod field;
mod lk;
mod warp;

pub use field::{lm_field, plm_field, FlowField, PlmModel};
pub use lk::{estimate_flow, estimate_flow_with, flows_from_events, flows_from_frames, LkParams};
pub use warp::{warp, WarpStencil};
