//! File formats: DIMACS and QDIMACS formulas, the JSON instance format,
//! path and strategy files.

mod dimacs;
mod instance;
mod strategy;

pub use dimacs::{parse_dimacs, parse_qdimacs};
pub use instance::{read_instance, write_instance, AgentRecord, InstanceFile, RuleRecord};
pub use strategy::{read_paths, read_strategies, write_paths, write_table, TableEntry};

use crate::error::FrogError;

/// Maps a JSON error onto a line-numbered parse error.
pub(crate) fn json_error(e: serde_json::Error) -> FrogError {
    FrogError::Parse { line: e.line(), msg: e.to_string() }
}
