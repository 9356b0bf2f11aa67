//! Age-dependent random connection models and their clique complexes.
//!
//! The crate samples the model on a finite window or around a typical
//! vertex, builds edge sets (optionally thinned), expands them to clique
//! complexes, computes generalized degree distributions and Betti numbers,
//! and fits power-law, normal and stable laws for Monte-Carlo hypothesis
//! tests against collaboration-network data.
//!
//! Geometry and statistics are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod complex;
pub mod error;
pub mod graph;
pub mod homology;
pub mod ingest;
pub mod io;
pub mod montecarlo;
pub mod point_process;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ModelParams = point_process::ModelParams<f64>;
pub type ModelParamsF32 = point_process::ModelParams<f32>;
pub type Vertex = point_process::Vertex<f64>;
pub type VertexF32 = point_process::Vertex<f32>;
pub type PalmSample = point_process::PalmSample<f64>;
pub type PalmSampleF32 = point_process::PalmSample<f32>;
pub type Thinning = graph::Thinning<f64>;
pub type PowerLawFit = stats::PowerLawFit<f64>;
pub type NormalParams = stats::NormalParams<f64>;
pub type StableParams = stats::StableParams<f64>;
pub type StableParamsF32 = stats::StableParams<f32>;

pub use complex::{DegreeDistribution, SimplicialComplex};
pub use graph::{Edge, EdgeSet};
pub use homology::BettiVector;
