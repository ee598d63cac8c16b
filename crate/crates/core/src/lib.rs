//! Power-imbalanced SCMA codebook design.
//!
//! Build codebooks from a star-QAM mother constellation and a sparse
//! signature template, score them by minimum Euclidean and product distance,
//! search the design space with a genetic algorithm and measure BER over
//! Rayleigh fading with an MPA receiver.

pub mod cli;
pub mod codebook;
pub mod error;
pub mod exec;
pub mod link;
pub mod metrics;
pub mod mother_constellation;
pub mod optimizer;
pub mod rng;
pub mod signature;

pub use codebook::{build_codebooks, load_codebooks, reference_codebooks, save_codebooks, Codebook, CodebookSet};
pub use error::{Error, Result};
pub use exec::Execution;
pub use mother_constellation::MotherConstellation;
pub use optimizer::{ga_optimize, DesignPoint, GaConfig, OptimizationResult};
pub use signature::{ResourceWeights, SignatureMatrix, SignatureTemplate};
