//! Single-chord augmentation of weighted cycle graphs.
//!
//! The crate covers the exact spectral and resistance updates caused by one
//! added chord, resistance-balanced candidate screening, two-objective Pareto
//! analysis, a noisy-consensus simulator and seeded Monte Carlo campaigns.

pub mod chord;
pub mod consensus;
pub mod cycle;
pub mod error;
pub mod experiments;
pub mod pareto;
pub mod screening;
mod secular;
pub mod spectral;

pub use chord::{ChordCandidate, ChordScore};
pub use cycle::{Chord, WeightedCycle};
pub use error::{Error, Result};
pub use screening::{CandidateSet, CandidateSource};
pub use spectral::SpectralDecomposition;
