//! Planning arithmetic for native-resolution vision-language pipelines.
//!
//! Everything here is deterministic and model-free: image and video token
//! accounting, 2D rotary encodings, sequence packing with attention masks,
//! FLOP-balanced device placement, data-loader IO volumes, scaling-law fits
//! and the `[0, 999]` grounding grammar.
//!
//! See the `examples/` directory for one runnable program per area.

pub mod balancer;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod grounding;
pub mod loadsim;
pub mod packer;
pub mod rope2d;
pub mod scaling;
pub mod videoplan;

pub use error::{Error, Result};
