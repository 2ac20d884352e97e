//! Batch verification and reporting behind the `cocircuit` binary.

pub mod batch;
pub mod report;

pub use batch::{run_batch, BatchOptions, BatchReport, Check, LineRange};
pub use report::Format;
