//! Multiform evolution for high-dimensional black-box problems whose objective
//! only varies along a low-dimensional subspace.
//!
//! The target problem lives on the box `[-1, 1]^D`. Several random Gaussian
//! embeddings `x = M y` turn it into low-dimensional formulations that are
//! evolved together with the original problem by per-formulation differential
//! evolution. Elite solutions move between formulations through closed-form
//! linear maps fitted to the paired populations, and the per-generation
//! evaluation budget is shifted towards formulations that are still improving.
//!
//! Module map:
//!
//! * [`objective`]: benchmark functions and rotated, shifted embedded objectives.
//! * [`embedding`]: formulations, lifting and box projection.
//! * [`de`]: DE/rand/1/bin sub-populations.
//! * [`transfer`]: cross-form genetic transfer.
//! * [`allocation`]: softmax preference-based budget allocation.
//! * [`orchestrator`]: the main loop and the four study variants.
//! * [`harness`]: experiment specs, Wilcoxon tests, summaries and file output.

pub mod allocation;
pub mod de;
pub mod embedding;
mod error;
pub mod harness;
pub mod objective;
pub mod orchestrator;
pub mod transfer;

pub use allocation::AllocationState;
pub use de::{Individual, SubPopulation};
pub use embedding::{Formulation, FormulationKind, FormulationSet};
pub use error::{Error, Result};
pub use objective::{BaseFunctionId, EmbeddedObjective};
pub use orchestrator::{GenerationRecord, RunConfig, RunLog, VariantId};
pub use transfer::TransferMap;

/// Seeded random stream used throughout the crate.
///
/// ChaCha8 output is stable across platforms and crate versions, which the
/// byte-reproducibility of run manifests depends on.
pub type Rng = rand_chacha::ChaCha8Rng;
