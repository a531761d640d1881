//! High-precision laboratory for the return/transfer geometry of S-unimodal
//! interval maps: monotone branches and their extensions, Koebe-type
//! distortion estimates, first-return and first-entry structures around nice
//! points, closest-approach sequences and shrinking transfer ranges.

pub mod branch;
pub mod error;
pub mod first_return;
pub mod interval;
pub mod map;
pub mod real;
pub mod render;
pub mod wmp;

pub use error::{Error, Result};
pub use interval::{koebe_bound, scaled_factor, Interval, ScaledFactor};
pub use map::{admissibility_check, AdmissibilityReport, Side, UnimodalMap};
pub use real::{Ctx, Real};
