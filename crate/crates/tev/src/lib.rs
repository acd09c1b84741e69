//! Driver layer for `tev-core`: file formats, the experiment harness that
//! reproduces parameter sweeps and conductivity-limit studies, and the
//! `tev` command line.

pub mod cli;
pub mod config;
mod error;
pub mod experiments;
pub mod io;

pub use error::{TevError, TevResultOf};
