//! Problem-file parsing and run orchestration behind the `sigmm` binary,
//! exposed as a library so the integration tests can drive the same code.

pub mod fixtures;
pub mod problem_file;
pub mod runner;
