//! Library behind the `bubblelab` binary: configuration and artifact
//! schemas, scenario parsing, plot emission, and the command
//! implementations. Kept as a library so integration tests can build and
//! inspect the same artifacts the binary reads and writes.

pub mod commands;
pub mod config;
pub mod fieldfile;
pub mod io;
pub mod scenario;
pub mod svg;
pub mod trajectory;
