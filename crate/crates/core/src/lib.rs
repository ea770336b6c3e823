//! Intersection-aware accessibility of emergency medical services over a road
//! network: density-based edge delays, nearest-facility travel times,
//! Voronoi population weights, coverage curves and underserved clusters.

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accessibility;
pub mod calibration;
pub mod config;
pub mod density;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod network;
pub mod pipeline;
pub mod population;
pub mod spatial;
pub mod travel;

pub use error::{Error, Result};
