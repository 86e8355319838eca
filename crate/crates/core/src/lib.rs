//! Smoothness quasi-norms of sampled functions in Triebel-Lizorkin-Morrey scales.
//!
//! Three independent routes compute equivalent quantities from the same samples:
//! a Littlewood-Paley reference on the torus ([`lp`]), higher-order differences
//! ([`differences`]) and local polynomial oscillations ([`oscillation`]). All of them
//! are measured in discrete Morrey norms ([`morrey`]) over balls intersected with a
//! domain ([`geometry`]). [`harness`] compares the routes across corpora and grids.

pub mod differences;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod model;
pub mod morrey;
pub mod oscillation;
pub mod profile;
pub mod report;

pub use error::{Error, Result};
