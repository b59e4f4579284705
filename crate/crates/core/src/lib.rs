//! Finite-support probability measures, analog motion planners on spheres,
//! projective spaces and tori, and numerical audits of their support bounds,
//! section property and continuity.

pub mod audit;
pub mod error;
pub mod geometry;
pub mod group;
pub mod measure;
pub mod planners;
pub mod transport;

pub use error::{Error, Result};
