//! Resistance networks approximating the stretched Sierpinski gasket, the
//! matching-pair scalar calculus that classifies its symmetric forms, network
//! reduction, and numerical experiments checking the predicted identities.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod functions;
pub mod network;
pub mod scalar;
pub mod sequence;
pub mod topology;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Sequence = sequence::MatchingSequence<f64>;
pub type Network = network::ResistorNetwork<f64>;
pub type Function = network::DiscretizedFunction<f64>;
pub type Trace = engine::TraceForm<f64>;
pub type SgFunction = functions::SgFunction<f64>;
pub type Embedding = topology::EmbeddingParams<f64>;

pub type SequenceF32 = sequence::MatchingSequence<f32>;
pub type NetworkF32 = network::ResistorNetwork<f32>;
pub type FunctionF32 = network::DiscretizedFunction<f32>;
