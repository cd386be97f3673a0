//! Exponential last-passage percolation on Z^2: passage-time DP, stationary
//! fields, queueing couplings, Busemann pairs and geodesic forests.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which the experiments use.

pub mod busemann;
pub mod error;
pub mod geodesics;
pub mod lattice;
pub mod lpp;
pub mod montecarlo;
pub mod queueing;
pub mod scalar;
pub mod stationary;
pub mod stats;

pub use error::{LppError, Result};
pub use lattice::{Coord, LazyWeights, Rect, RngStream, StreamRng, WeightField, WeightRows};
pub use lpp::{Orientation, PassageField};
pub use scalar::Scalar;
pub use stationary::{BoundaryWeights, IncrementField};
pub use busemann::CoupledPair;
pub use geodesics::GeodesicForest;
pub use queueing::{QueueOutputs, QueueWindow};

pub type WeightField64 = WeightField<f64>;
pub type PassageField64 = PassageField<f64>;
pub type BoundaryWeights64 = BoundaryWeights<f64>;
pub type IncrementField64 = IncrementField<f64>;
pub type CoupledPair64 = CoupledPair<f64>;
pub type QueueWindow64 = QueueWindow<f64>;
pub type WeightField32 = WeightField<f32>;
pub type PassageField32 = PassageField<f32>;
