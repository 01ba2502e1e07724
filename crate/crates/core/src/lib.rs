//! Volume ratios of centrally symmetric convex bodies.
//!
//! The crate provides symbolic body descriptions with exact gauges and
//! support functions, hit-and-run sampling and Monte Carlo volume estimation,
//! random constructions (Gluskin polytopes, random parallelepipeds, Gaussian
//! inclusion positions), a max-determinant inclusion solver that bounds the
//! volume ratio `vr(K, L)`, and the experiment drivers behind the `volratio`
//! command-line tool.

pub mod bodies;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod lp;
pub mod operators;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod solver;
pub mod stats;
pub mod volume;

pub use bodies::{Body, BodyDescriptor, SymmetricGaugeSpec};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use operators::LinearMap;
pub use rng::RngStream;
