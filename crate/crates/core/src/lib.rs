//! Local bounds, quantum values and noise tolerances for two-party,
//! two-setting Bell expressions.
//!
//! Expressions are written over joint probabilities `P_ab^ij` and evaluated
//! either on deterministic strategies (the `gamma` tensor) or on a family of
//! quantum settings built from a bipartite state and phase-shifted Fourier
//! measurements.

pub mod analysis;
pub mod bell;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod optimize;
pub mod polytope;
pub mod quantum;
pub mod scenario;

pub use analysis::{AnalysisReport, Tolerances, ViolationMode};
pub use bell::{BellExpression, GammaCoefficients, LocalBounds};
pub use error::{Error, Result};
pub use optimize::{FreeParameters, Objective, OptimizationConfig, OptimizationResult};
pub use polytope::DimensionReport;
pub use quantum::{NoiseModel, QuantumSettings};
pub use scenario::{
    DeterministicStrategy, GammaIndex, GammaTensor, PVector, Party, Scenario, TermIndex,
};
