//! Harmonic Lagrangian extensions of vector fields on the circle.
//!
//! A continuous vector field `X` on `S¹` is stored through its support
//! function `φ`. The crate solves for the mean surface `ū` in Half-Pipe space
//! bounded by the graph of `φ`, builds the extension field from it, and
//! compares that field with the Douady–Earle extension, the convex-core width
//! and the cross-ratio norm.

pub mod circle;
pub mod cli;
pub mod douady_earle;
pub mod envelope;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod grid;
pub mod hl;
pub mod io;
pub mod mean_surface;
pub mod ode;
pub mod samples;

pub use error::{Error, Result};
