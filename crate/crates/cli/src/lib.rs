//! IO companion for `netsum-core`: graph/vector/schedule file formats,
//! JSON and CSV reports, experiment configs, and the `netsum` binary's
//! command implementations.

pub mod commands;
pub mod experiment;
pub mod family;
pub mod format;
pub mod report;
