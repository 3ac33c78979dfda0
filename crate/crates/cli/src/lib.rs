//! Library side of the `nodeloc` command: document I/O, instance generation,
//! analysis reports and outcome files.

pub mod doc;
pub mod error;
pub mod generate;
pub mod outcome;
pub mod report;

pub use doc::TopologyDocument;
pub use error::{CliError, Result};
pub use report::{analyze, emit_json, emit_text, AnalysisReport, AnalyzeOptions};
