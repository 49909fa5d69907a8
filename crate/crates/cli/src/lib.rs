//! Command-line experiments and the annotation HTTP service.

pub mod cli;
pub mod server;
