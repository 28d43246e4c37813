//! IO companion to the `lipcube` library: truth-table and mapping file
//! formats, and the JSON report documents emitted by the CLI.

pub mod formats;
pub mod report;
