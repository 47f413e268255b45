//! Centrally symmetric hyperbolic polygons, their side-pairing and reflection
//! groups, and random walks driven by finitely supported measures on them.
//!
//! The modules build on each other roughly bottom-up:
//!
//! - [`hyperbolic`]: Poincaré disk points, geodesics, isometries.
//! - [`polygon`]: symmetric 2m-gons, cycle condition, side pairings, and the
//!   obtuse-angle reductions (pentagon surgery, dual polygons).
//! - [`inequality`]: the singularity criterion and numerical verifiers.
//! - [`freewalk`]: first-passage probabilities on free groups and free
//!   products of ℤ/2ℤ.
//! - [`fuchswalk`]: Monte Carlo walks, drift, entropy bounds, histograms.
//! - [`coxeter`]: the reflection-group variant.

pub mod coxeter;
pub mod error;
pub mod freewalk;
pub mod fuchswalk;
pub mod hyperbolic;
pub mod inequality;
mod parallel;
pub mod polygon;
pub mod sampling;

pub use error::{Error, Result};
pub use parallel::with_threads;
