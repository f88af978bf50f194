//! Front end for `khslice-core`: run configuration, the braid corpus, check
//! batteries and report rendering. The binary is a thin clap layer on top.

pub mod batteries;
pub mod config;
pub mod corpus;
pub mod kh;
pub mod report;

pub use khslice_core;
