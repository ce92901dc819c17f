//! Batch experiments: specs, statistics and file output.

pub mod experiment;
pub mod output;
pub mod stats;
pub mod summary;

pub use experiment::{parse_seeds, parse_settings, ExperimentSpec};
pub use output::{write_outputs, OutputFiles};
pub use stats::{wilcoxon_signed_rank, Direction, WilcoxonResult};
pub use summary::{summarize, Mark, SummaryRow};
