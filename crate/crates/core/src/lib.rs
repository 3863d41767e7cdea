//! Weighted Motzkin paths with boundary measures: exact finite-length laws,
//! exact sampling, the two limiting Markov chains and spectral certificates.

pub mod converge;
pub mod dist;
pub mod draw;
pub mod engine;
pub mod error;
pub mod limit_chains;
pub mod model;
pub mod rational;
pub mod registry;
pub mod sampler;
pub mod spectral;

pub use dist::DistTable;
pub use error::{Error, Result};
pub use model::{BoundaryMeasure, ModelSpec, MotzkinPath, WeightConfig};
pub use rational::Q;
