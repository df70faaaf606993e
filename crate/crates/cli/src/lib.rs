//! Library half of the `bcregions` command-line tool: JSON channel and
//! strategy files, command implementations, and output formats. The binary
//! in `main.rs` is a thin argument-parsing shell over this.

pub mod commands;
pub mod files;
