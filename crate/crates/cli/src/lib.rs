//! File formats, benchmark generation, and batch evaluation around the
//! `pcmax` solver; the `pcmax` binary is a thin layer over this library.

pub mod batch;
pub mod format;
pub mod planted;

pub use batch::{evaluate_file, evaluate_instance, run_batch, ReportRow, RowStatus, RunOptions};
pub use format::{parse_assignment, parse_instance, serialize_instance, ParsedInstance};
pub use planted::{generate_planted, PlantedParams, Ratio, SWEEP_RATIOS};
